//! Orientation planning: candidate directions toward cell vertices, coverage
//! evaluation at worst-case locations, greedy selection, cooperative
//! recalibration, and the integrated RRF-branching algorithm.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{sector_polygon_intersection_area, AnnularSector, Point2, EPS};
use crate::robust::{sensor_rrf, worst_case_location, RrfReport};
use crate::voronoi::{build_clipped_voronoi, Roi, VoronoiCell, VoronoiDiagram};

/// Vertices closer than this to the nominal location give no direction.
pub const DEGENERATE_VERTEX: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensor {
    pub id: usize,
    pub nominal: Point2,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Full angle of view in radians.
    pub theta_h: f64,
}

impl Sensor {
    pub fn new(
        id: usize,
        nominal: Point2,
        r_inner: f64,
        r_outer: f64,
        theta_h: f64,
    ) -> Result<Self> {
        let s = Sensor {
            id,
            nominal,
            r_inner,
            r_outer,
            theta_h,
        };
        s.footprint(nominal, 0.0)?;
        Ok(s)
    }

    /// The footprint with its apex at `location`, facing `direction`.
    pub fn footprint(&self, location: Point2, direction: f64) -> Result<AnnularSector> {
        AnnularSector::new(
            location,
            self.r_inner,
            self.r_outer,
            self.theta_h,
            direction,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    /// Exact positions.
    Nominal,
    /// Coverage at the worst-case displaced location.
    RobustCounterpart,
    /// Robust counterpart with the minimum-RRF requirement.
    Robustified,
}

/// Which side of the RRF threshold a sensor fell on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "RC")]
    RobustCounterpart,
    Robustified,
}

/// What happens to a sensor none of whose candidates reaches `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fallback {
    #[default]
    Sleep,
    Random {
        seed: u64,
    },
}

/// Which vertex-sharing pairs the recalibration pass examines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecalibrationRule {
    /// Only pairs whose sensors currently point at the same shared vertex.
    #[default]
    SharedTarget,
    /// Every awake vertex-sharing pair.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgoParams {
    /// Overlap threshold.
    pub epsilon: f64,
    /// Convergence threshold on the change of total area between sweeps.
    pub delta: f64,
    /// Candidates covering less than this are discarded.
    pub lambda: f64,
    /// Sensors with RRF at or below this take the robustified branch.
    pub rho_min: f64,
    /// Cap on the robust-counterpart shift.
    pub rho_max: Option<f64>,
    pub max_iterations: usize,
    pub fallback: Fallback,
    pub recalibration: RecalibrationRule,
}

impl Default for AlgoParams {
    fn default() -> Self {
        AlgoParams {
            epsilon: 1.0,
            delta: 1.0,
            lambda: 1.0,
            rho_min: 10.0,
            rho_max: None,
            max_iterations: 100,
            fallback: Fallback::Sleep,
            recalibration: RecalibrationRule::SharedTarget,
        }
    }
}

impl AlgoParams {
    pub fn validate(&self) -> Result<()> {
        for (what, v) in [
            ("epsilon", self.epsilon),
            ("delta", self.delta),
            ("lambda", self.lambda),
            ("rho_min", self.rho_min),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    what,
                    format!("{v} is not a finite non-negative number"),
                ));
            }
        }
        if let Some(cap) = self.rho_max {
            if cap.is_nan() || cap < 0.0 {
                return Err(Error::invalid("rho_max", format!("{cap} < 0")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations", "must be at least 1"));
        }
        Ok(())
    }

    /// Shift used on the robust-counterpart branch for a sensor with RRF `rho`.
    pub fn rc_shift(&self, rho: f64) -> f64 {
        self.rho_max.map_or(rho, |cap| rho.min(cap))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub vertex_index: usize,
    pub vertex: Point2,
    pub direction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedCandidate {
    pub vertex_index: usize,
    pub vertex: Point2,
    pub direction: f64,
    pub effective_location: Point2,
    pub area: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SensorState {
    Oriented {
        direction: f64,
        target_vertex: Point2,
        effective_location: Point2,
    },
    Sleep,
    Random {
        direction: f64,
        effective_location: Point2,
    },
}

impl SensorState {
    /// Facing direction, `None` when asleep.
    pub fn direction(&self) -> Option<f64> {
        match *self {
            SensorState::Oriented { direction, .. } | SensorState::Random { direction, .. } => {
                Some(direction)
            }
            SensorState::Sleep => None,
        }
    }

    pub fn effective_location(&self) -> Option<Point2> {
        match *self {
            SensorState::Oriented {
                effective_location, ..
            }
            | SensorState::Random {
                effective_location, ..
            } => Some(effective_location),
            SensorState::Sleep => None,
        }
    }

    pub fn is_awake(&self) -> bool {
        !matches!(self, SensorState::Sleep)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationAssignment {
    pub sensor: usize,
    pub state: SensorState,
    pub covered_area: f64,
    /// All candidates, best first.
    pub candidate_ranking: Vec<RankedCandidate>,
    /// Index into `candidate_ranking` of the current choice.
    pub cursor: usize,
    /// Displacement magnitude used to evaluate the candidates.
    pub shift: f64,
    pub branch: Option<Branch>,
    /// Robustified-branch sensor left with no candidate reaching `lambda`.
    pub rrf_violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationSolution {
    pub assignments: Vec<OrientationAssignment>,
    pub model: ModelKind,
    pub total_area: f64,
    pub iterations: usize,
    pub rrf_reports: Vec<RrfReport>,
}

impl OrientationSolution {
    pub(crate) fn new(
        assignments: Vec<OrientationAssignment>,
        model: ModelKind,
        rrf_reports: Vec<RrfReport>,
    ) -> Self {
        let mut s = OrientationSolution {
            assignments,
            model,
            total_area: 0.0,
            iterations: 0,
            rrf_reports,
        };
        s.recompute_total();
        s
    }

    fn recompute_total(&mut self) {
        self.total_area = self.assignments.iter().map(|a| a.covered_area).sum();
    }

    /// Number of sensors on each branch: `(robust counterpart, robustified)`.
    pub fn branch_counts(&self) -> (usize, usize) {
        self.assignments
            .iter()
            .fold((0, 0), |(rc, rob), a| match a.branch {
                Some(Branch::RobustCounterpart) => (rc + 1, rob),
                Some(Branch::Robustified) => (rc, rob + 1),
                None => (rc, rob),
            })
    }
}

/// One candidate per cell vertex, in cell vertex order.
pub fn candidate_directions(sensor: &Sensor, cell: &VoronoiCell) -> Vec<Candidate> {
    cell.vertices()
        .iter()
        .enumerate()
        .filter_map(|(k, v)| {
            let d = *v - sensor.nominal;
            (d.norm() >= DEGENERATE_VERTEX).then(|| Candidate {
                vertex_index: k,
                vertex: *v,
                direction: d.angle(),
            })
        })
        .collect()
}

/// Effective location and covered area when facing `direction`. The
/// location is displaced by `shift` along the direction (no displacement
/// under the nominal model); the area counts only the owner's cell.
pub fn evaluate_candidate(
    sensor: &Sensor,
    cell: &VoronoiCell,
    direction: f64,
    model: ModelKind,
    shift: f64,
) -> Result<(Point2, f64)> {
    let shift = if model == ModelKind::Nominal {
        0.0
    } else {
        shift
    };
    let location = worst_case_location(sensor.nominal, Point2::from_angle(direction), shift)?;
    let footprint = sensor.footprint(location, direction)?;
    Ok((
        location,
        sector_polygon_intersection_area(&footprint, &cell.polygon),
    ))
}

fn rank_order(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    b.area
        .total_cmp(&a.area)
        .then(a.direction.total_cmp(&b.direction))
        .then(a.vertex_index.cmp(&b.vertex_index))
}

/// Direction drawn for a sensor by the random fallback or baseline.
pub(crate) fn seeded_direction(seed: u64, stream: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    PI - TAU * rng.random::<f64>()
}

/// Ranks every candidate and picks the best one covering at least `lambda`.
pub fn select_orientation(
    sensor: &Sensor,
    cell: &VoronoiCell,
    model: ModelKind,
    params: &AlgoParams,
    shift: f64,
) -> Result<OrientationAssignment> {
    let mut ranking = candidate_directions(sensor, cell)
        .into_iter()
        .map(|c| {
            let (effective_location, area) =
                evaluate_candidate(sensor, cell, c.direction, model, shift)?;
            Ok(RankedCandidate {
                vertex_index: c.vertex_index,
                vertex: c.vertex,
                direction: c.direction,
                effective_location,
                area,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ranking.sort_by(rank_order);
    let shift = if model == ModelKind::Nominal {
        0.0
    } else {
        shift
    };
    let mut assignment = OrientationAssignment {
        sensor: sensor.id,
        state: SensorState::Sleep,
        covered_area: 0.0,
        candidate_ranking: ranking,
        cursor: 0,
        shift,
        branch: None,
        rrf_violation: false,
    };
    match assignment.candidate_ranking.first() {
        Some(best) if best.area >= params.lambda => point_at(&mut assignment, 0),
        _ => apply_fallback(&mut assignment, sensor, cell, model, params)?,
    }
    Ok(assignment)
}

fn point_at(a: &mut OrientationAssignment, k: usize) {
    let c = a.candidate_ranking[k];
    a.cursor = k;
    a.state = SensorState::Oriented {
        direction: c.direction,
        target_vertex: c.vertex,
        effective_location: c.effective_location,
    };
    a.covered_area = c.area;
}

fn apply_fallback(
    a: &mut OrientationAssignment,
    sensor: &Sensor,
    cell: &VoronoiCell,
    model: ModelKind,
    params: &AlgoParams,
) -> Result<()> {
    a.cursor = a.candidate_ranking.len();
    match params.fallback {
        Fallback::Sleep => {
            a.state = SensorState::Sleep;
            a.covered_area = 0.0;
        }
        Fallback::Random { seed } => {
            let direction = seeded_direction(seed, sensor.id as u64);
            let (effective_location, area) =
                evaluate_candidate(sensor, cell, direction, model, a.shift)?;
            a.state = SensorState::Random {
                direction,
                effective_location,
            };
            a.covered_area = area;
        }
    }
    Ok(())
}

/// `ρ_a + ρ_b + R_a + R_b − d_ab > ε`, with `d_ab` the nominal separation.
pub fn pairwise_overlap_trigger(
    a: &Sensor,
    rho_a: f64,
    b: &Sensor,
    rho_b: f64,
    epsilon: f64,
) -> bool {
    rho_a + rho_b + a.r_outer + b.r_outer - a.nominal.distance(b.nominal) > epsilon
}

fn same_target(a: &SensorState, b: &SensorState) -> bool {
    match (a, b) {
        (
            SensorState::Oriented {
                target_vertex: u, ..
            },
            SensorState::Oriented {
                target_vertex: v, ..
            },
        ) => u.distance(*v) <= EPS,
        _ => false,
    }
}

/// Repeated sweeps over vertex-sharing pairs: when a pair triggers, the
/// sensor covering less (the larger id on ties) moves to its next ranked
/// candidate, or sleeps once its ranking is exhausted. Stops when a sweep
/// changes the total by less than `delta` or after `max_iterations` sweeps.
///
/// `rho` gives the radius used in the trigger for each sensor position.
pub fn cooperative_recalibration(
    mut solution: OrientationSolution,
    sensors: &[Sensor],
    diagram: &VoronoiDiagram,
    params: &AlgoParams,
    rho: &[f64],
) -> Result<OrientationSolution> {
    params.validate()?;
    if sensors.len() != solution.assignments.len()
        || rho.len() != sensors.len()
        || diagram.cells.len() != sensors.len()
    {
        return Err(Error::invalid(
            "recalibration",
            "sensors, assignments, radii and cells must align",
        ));
    }
    let pairs = diagram.vertex_sharing_pairs();
    solution.iterations = 0;
    loop {
        solution.iterations += 1;
        let before = solution.total_area;
        for &(i, j) in &pairs {
            let (ai, aj) = (&solution.assignments[i], &solution.assignments[j]);
            let eligible = match params.recalibration {
                RecalibrationRule::SharedTarget => same_target(&ai.state, &aj.state),
                RecalibrationRule::Literal => ai.state.is_awake() && aj.state.is_awake(),
            };
            if !eligible
                || !pairwise_overlap_trigger(
                    &sensors[i],
                    rho[i],
                    &sensors[j],
                    rho[j],
                    params.epsilon,
                )
            {
                continue;
            }
            let loser = match ai.covered_area.total_cmp(&aj.covered_area) {
                Ordering::Less => i,
                Ordering::Greater => j,
                Ordering::Equal if sensors[i].id > sensors[j].id => i,
                Ordering::Equal => j,
            };
            advance(&mut solution.assignments[loser], params.lambda);
        }
        solution.recompute_total();
        if (solution.total_area - before).abs() < params.delta
            || solution.iterations >= params.max_iterations
        {
            break;
        }
    }
    Ok(solution)
}

fn advance(a: &mut OrientationAssignment, lambda: f64) {
    let next = a.cursor + 1;
    if matches!(a.state, SensorState::Oriented { .. })
        && next < a.candidate_ranking.len()
        && a.candidate_ranking[next].area >= lambda
    {
        point_at(a, next);
    } else {
        a.cursor = a.candidate_ranking.len();
        a.state = SensorState::Sleep;
        a.covered_area = 0.0;
    }
}

fn check_ids(sensors: &[Sensor]) -> Result<()> {
    let mut seen = HashSet::with_capacity(sensors.len());
    for s in sensors {
        if !seen.insert(s.id) {
            return Err(Error::DuplicateSensorId(s.id));
        }
    }
    Ok(())
}

/// Voronoi diagram of the sensors' nominal positions, checking ids.
pub fn sensor_diagram(sensors: &[Sensor], roi: Roi) -> Result<VoronoiDiagram> {
    check_ids(sensors)?;
    for s in sensors {
        s.footprint(s.nominal, 0.0)?;
    }
    let sites: Vec<Point2> = sensors.iter().map(|s| s.nominal).collect();
    build_clipped_voronoi(&sites, roi)
}

/// Per-sensor RRF reports over an existing diagram.
pub fn rrf_reports(sensors: &[Sensor], diagram: &VoronoiDiagram) -> Result<Vec<RrfReport>> {
    sensors
        .iter()
        .zip(&diagram.cells)
        .map(|(s, c)| sensor_rrf(s.id, s.nominal, &c.neighbor_edges))
        .collect()
}

/// The integrated algorithm: build the diagram, compute every RRF, orient
/// each sensor on the robust-counterpart branch (RRF above `rho_min`) or the
/// robustified branch, then recalibrate.
pub fn run_integrated_algorithm(
    sensors: &[Sensor],
    roi: Roi,
    params: &AlgoParams,
) -> Result<OrientationSolution> {
    let diagram = sensor_diagram(sensors, roi)?;
    solve_on_diagram(sensors, &diagram, params)
}

/// [`run_integrated_algorithm`] on a prebuilt diagram whose cell `k` belongs
/// to `sensors[k]`.
pub fn solve_on_diagram(
    sensors: &[Sensor],
    diagram: &VoronoiDiagram,
    params: &AlgoParams,
) -> Result<OrientationSolution> {
    params.validate()?;
    check_ids(sensors)?;
    let reports = rrf_reports(sensors, diagram)?;
    let assignments = sensors
        .par_iter()
        .zip(&diagram.cells)
        .zip(&reports)
        .map(|((s, cell), report)| {
            let (branch, model, shift) = if report.rrf > params.rho_min {
                (
                    Branch::RobustCounterpart,
                    ModelKind::RobustCounterpart,
                    params.rc_shift(report.rrf),
                )
            } else {
                (Branch::Robustified, ModelKind::Robustified, params.rho_min)
            };
            let mut a = select_orientation(s, cell, model, params, shift)?;
            a.branch = Some(branch);
            a.rrf_violation = branch == Branch::Robustified && a.state == SensorState::Sleep;
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    let rho: Vec<f64> = reports.iter().map(|r| r.rrf).collect();
    let solution = OrientationSolution::new(assignments, ModelKind::Robustified, reports);
    cooperative_recalibration(solution, sensors, diagram, params, &rho)
}
