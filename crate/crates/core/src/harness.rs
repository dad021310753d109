//! Experiment harness: random deployments, the random and vertex-greedy
//! baselines, perturbed re-evaluation, comparison runs and parameter sweeps.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::orientation::{
    cooperative_recalibration, evaluate_candidate, rrf_reports, seeded_direction,
    select_orientation, sensor_diagram, solve_on_diagram, AlgoParams, ModelKind,
    OrientationAssignment, OrientationSolution, Sensor, SensorState,
};
use crate::robust::worst_case_location;
use crate::voronoi::{Roi, VoronoiDiagram, MIN_SITE_SEPARATION};

/// Resampling budget per site in [`random_deployment`].
pub const MAX_ATTEMPTS: usize = 1000;

/// Footprint shared by every sensor of a deployment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub r_inner: f64,
    pub r_outer: f64,
    /// Radians.
    pub theta_h: f64,
}

/// `m` sensors with ids `0..m`, uniform over the ROI inset by `margin`.
/// Draws closer than the minimum site separation to an earlier site are
/// redrawn.
pub fn random_deployment(
    m: usize,
    roi: Roi,
    seed: u64,
    margin: f64,
    footprint: Footprint,
) -> Result<Vec<Sensor>> {
    if m == 0 {
        return Err(Error::NoSites);
    }
    if !margin.is_finite() || margin < 0.0 || 2.0 * margin >= roi.width().min(roi.height()) {
        return Err(Error::invalid(
            "margin",
            format!("{margin} does not leave room inside the region"),
        ));
    }
    let inset = Roi::new(
        roi.min + Point2::new(margin, margin),
        roi.max - Point2::new(margin, margin),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sites: Vec<Point2> = Vec::with_capacity(m);
    while sites.len() < m {
        let mut attempts = 0;
        let site = loop {
            if attempts == MAX_ATTEMPTS {
                return Err(Error::DeploymentExhausted {
                    placed: sites.len(),
                    requested: m,
                    attempts,
                });
            }
            attempts += 1;
            let p = Point2::new(
                inset.min.x + inset.width() * rng.random::<f64>(),
                inset.min.y + inset.height() * rng.random::<f64>(),
            );
            if roi.strictly_contains(p) && sites.iter().all(|q| q.distance(p) > MIN_SITE_SEPARATION)
            {
                break p;
            }
        };
        sites.push(site);
    }
    sites
        .into_iter()
        .enumerate()
        .map(|(id, p)| {
            Sensor::new(
                id,
                p,
                footprint.r_inner,
                footprint.r_outer,
                footprint.theta_h,
            )
        })
        .collect()
}

/// Vertex-greedy baseline: every sensor picks its best vertex at its nominal
/// location, then the recalibration pass runs.
pub fn ids_orientation(
    sensors: &[Sensor],
    roi: Roi,
    params: &AlgoParams,
) -> Result<OrientationSolution> {
    let diagram = sensor_diagram(sensors, roi)?;
    ids_on_diagram(sensors, &diagram, params)
}

pub fn ids_on_diagram(
    sensors: &[Sensor],
    diagram: &VoronoiDiagram,
    params: &AlgoParams,
) -> Result<OrientationSolution> {
    params.validate()?;
    let reports = rrf_reports(sensors, diagram)?;
    let assignments = sensors
        .par_iter()
        .zip(&diagram.cells)
        .map(|(s, cell)| select_orientation(s, cell, ModelKind::Nominal, params, 0.0))
        .collect::<Result<Vec<_>>>()?;
    let rho: Vec<f64> = reports.iter().map(|r| r.rrf).collect();
    let solution = OrientationSolution::new(assignments, ModelKind::Nominal, reports);
    cooperative_recalibration(solution, sensors, diagram, params, &rho)
}

/// Uniform random directions evaluated at nominal locations; no
/// recalibration.
pub fn random_orientation(sensors: &[Sensor], roi: Roi, seed: u64) -> Result<OrientationSolution> {
    let diagram = sensor_diagram(sensors, roi)?;
    random_on_diagram(sensors, &diagram, seed)
}

pub fn random_on_diagram(
    sensors: &[Sensor],
    diagram: &VoronoiDiagram,
    seed: u64,
) -> Result<OrientationSolution> {
    let reports = rrf_reports(sensors, diagram)?;
    let assignments = sensors
        .iter()
        .zip(&diagram.cells)
        .map(|(s, cell)| {
            let direction = seeded_direction(seed, s.id as u64);
            let (effective_location, area) =
                evaluate_candidate(s, cell, direction, ModelKind::Nominal, 0.0)?;
            Ok(OrientationAssignment {
                sensor: s.id,
                state: SensorState::Random {
                    direction,
                    effective_location,
                },
                covered_area: area,
                candidate_ranking: Vec::new(),
                cursor: 0,
                shift: 0.0,
                branch: None,
                rrf_violation: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrientationSolution::new(
        assignments,
        ModelKind::Nominal,
        reports,
    ))
}

/// How far each sensor is displaced in a perturbed evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    /// Each sensor by its own RRF.
    OwnRrf,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbationMode {
    /// Along the sensing direction.
    Adversarial,
    /// Along an independent uniform direction per sensor.
    Random { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub magnitude: Magnitude,
    pub mode: PerturbationMode,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation {
            magnitude: Magnitude::OwnRrf,
            mode: PerturbationMode::Adversarial,
        }
    }
}

/// Total coverage after displacing every awake sensor from its nominal
/// location, keeping orientations and the nominal cells fixed.
pub fn perturbed_evaluation(
    sensors: &[Sensor],
    diagram: &VoronoiDiagram,
    solution: &OrientationSolution,
    perturbation: Perturbation,
) -> Result<f64> {
    if sensors.len() != solution.assignments.len() || diagram.cells.len() != sensors.len() {
        return Err(Error::invalid(
            "perturbation",
            "sensors, assignments and cells must align",
        ));
    }
    let areas = sensors
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let Some(direction) = solution.assignments[k].state.direction() else {
                return Ok(0.0);
            };
            let magnitude = match perturbation.magnitude {
                Magnitude::OwnRrf => {
                    solution.rrf_reports.get(k).map(|r| r.rrf).ok_or_else(|| {
                        Error::invalid(
                            "perturbation",
                            "own-RRF magnitude needs RRF reports in the solution",
                        )
                    })?
                }
                Magnitude::Fixed(v) => v,
            };
            let heading = match perturbation.mode {
                PerturbationMode::Adversarial => direction,
                PerturbationMode::Random { seed } => seeded_direction(seed, s.id as u64),
            };
            let location = worst_case_location(s.nominal, Point2::from_angle(heading), magnitude)?;
            let fp = s.footprint(location, direction)?;
            Ok(crate::geometry::sector_polygon_intersection_area(
                &fp,
                &diagram.cells[k].polygon,
            ))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(areas.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub m: usize,
    pub roi: Roi,
    pub footprint: Footprint,
    pub params: AlgoParams,
    pub seed: u64,
    pub trials: usize,
    pub margin: f64,
    pub perturbation: Perturbation,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            m: 150,
            roi: Roi {
                min: Point2::ORIGIN,
                max: Point2::new(1000.0, 1000.0),
            },
            footprint: Footprint {
                r_inner: 25.0,
                r_outer: 80.0,
                theta_h: 60f64.to_radians(),
            },
            params: AlgoParams::default(),
            seed: 1,
            trials: 100,
            margin: 1.0,
            perturbation: Perturbation::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        if self.m == 0 {
            return Err(Error::NoSites);
        }
        if let Magnitude::Fixed(v) = self.perturbation.magnitude {
            if !v.is_finite() || v < 0.0 {
                return Err(Error::invalid(
                    "perturbation",
                    format!("magnitude {v} must be finite and non-negative"),
                ));
            }
        }
        self.params.validate()?;
        let f = self.footprint;
        Sensor::new(0, self.roi.center(), f.r_inner, f.r_outer, f.theta_h)?;
        Ok(())
    }
}

/// Independent seeds for trial `trial`: deployment, random baseline,
/// random perturbation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialSeeds {
    pub deployment: u64,
    pub random_orientation: u64,
    pub perturbation: u64,
}

pub fn trial_seeds(seed: u64, trial: usize) -> TrialSeeds {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    TrialSeeds {
        deployment: rng.next_u64(),
        random_orientation: rng.next_u64(),
        perturbation: rng.next_u64(),
    }
}

fn trial_perturbation(p: Perturbation, seeds: &TrialSeeds) -> Perturbation {
    match p.mode {
        PerturbationMode::Adversarial => p,
        // The configured seed is folded into the per-trial stream.
        PerturbationMode::Random { seed } => Perturbation {
            mode: PerturbationMode::Random {
                seed: seed ^ seeds.perturbation,
            },
            ..p
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    Random,
    #[serde(rename = "IDS")]
    Ids,
    Robustified,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Random, Strategy::Ids, Strategy::Robustified];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Random => "random",
            Strategy::Ids => "ids",
            Strategy::Robustified => "robustified",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Nominal,
    Perturbed,
}

impl Condition {
    pub const ALL: [Condition; 2] = [Condition::Nominal, Condition::Perturbed];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::Nominal => "nominal",
            Condition::Perturbed => "perturbed",
        })
    }
}

/// Totals indexed by strategy, nominal then perturbed.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StrategyTotals {
    pub random: [f64; 2],
    pub ids: [f64; 2],
    pub robustified: [f64; 2],
}

impl StrategyTotals {
    pub fn get(&self, strategy: Strategy, condition: Condition) -> f64 {
        self.row(strategy)[condition as usize]
    }

    fn row(&self, strategy: Strategy) -> &[f64; 2] {
        match strategy {
            Strategy::Random => &self.random,
            Strategy::Ids => &self.ids,
            Strategy::Robustified => &self.robustified,
        }
    }

    fn row_mut(&mut self, strategy: Strategy) -> &mut [f64; 2] {
        match strategy {
            Strategy::Random => &mut self.random,
            Strategy::Ids => &mut self.ids,
            Strategy::Robustified => &mut self.robustified,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seeds: TrialSeeds,
    /// Chosen orientations evaluated at the nominal locations and at the
    /// perturbed ones.
    pub totals: StrategyTotals,
    /// Robustified worst-case total as reported by the algorithm.
    pub robustified_reported: f64,
    /// Robustified covered area per cell, by sensor position.
    pub robustified_cell_areas: Vec<f64>,
    /// Smallest RRF in the deployment.
    pub min_rrf: f64,
    pub max_rrf: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub trials: Vec<TrialRecord>,
    pub means: StrategyTotals,
}

fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<TrialRecord> {
    let seeds = trial_seeds(config.seed, trial);
    let sensors = random_deployment(
        config.m,
        config.roi,
        seeds.deployment,
        config.margin,
        config.footprint,
    )?;
    let diagram = sensor_diagram(&sensors, config.roi)?;
    let perturbation = trial_perturbation(config.perturbation, &seeds);
    let solutions = [
        (
            Strategy::Random,
            random_on_diagram(&sensors, &diagram, seeds.random_orientation)?,
        ),
        (
            Strategy::Ids,
            ids_on_diagram(&sensors, &diagram, &config.params)?,
        ),
        (
            Strategy::Robustified,
            solve_on_diagram(&sensors, &diagram, &config.params)?,
        ),
    ];
    let at_nominal = Perturbation {
        magnitude: Magnitude::Fixed(0.0),
        mode: PerturbationMode::Adversarial,
    };
    let mut totals = StrategyTotals::default();
    for (strategy, sol) in &solutions {
        *totals.row_mut(*strategy) = [
            perturbed_evaluation(&sensors, &diagram, sol, at_nominal)?,
            perturbed_evaluation(&sensors, &diagram, sol, perturbation)?,
        ];
    }
    let robust = &solutions[2].1;
    let rrfs = robust.rrf_reports.iter().map(|r| r.rrf);
    Ok(TrialRecord {
        trial,
        seeds,
        totals,
        robustified_reported: robust.total_area,
        robustified_cell_areas: robust.assignments.iter().map(|a| a.covered_area).collect(),
        min_rrf: rrfs.clone().fold(f64::INFINITY, f64::min),
        max_rrf: rrfs.fold(0.0, f64::max),
    })
}

/// Runs all three strategies on `config.trials` independent deployments.
pub fn run_comparison(config: &ExperimentConfig) -> Result<ComparisonResult> {
    config.validate()?;
    let trials = (0..config.trials)
        .into_par_iter()
        .map(|k| run_trial(config, k))
        .collect::<Result<Vec<_>>>()?;
    let n = trials.len() as f64;
    let mut means = StrategyTotals::default();
    for strategy in Strategy::ALL {
        for condition in Condition::ALL {
            let sum: f64 = trials
                .iter()
                .map(|t| t.totals.get(strategy, condition))
                .sum();
            means.row_mut(strategy)[condition as usize] = sum / n;
        }
    }
    Ok(ComparisonResult { trials, means })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    M,
    ThetaH,
    RhoMax,
    RhoMin,
    ROuter,
    RInner,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::M => "m",
            SweepParameter::ThetaH => "theta_h",
            SweepParameter::RhoMax => "rho_max",
            SweepParameter::RhoMin => "rho_min",
            SweepParameter::ROuter => "r_outer",
            SweepParameter::RInner => "r_inner",
        }
    }

    /// The config with this parameter set to `value` (radians for `theta_h`).
    pub fn apply(self, base: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut c = *base;
        match self {
            SweepParameter::M => {
                if value < 1.0 || value.fract() != 0.0 || value > usize::MAX as f64 {
                    return Err(Error::invalid(
                        "m",
                        format!("{value} is not a positive integer"),
                    ));
                }
                c.m = value as usize;
            }
            SweepParameter::ThetaH => c.footprint.theta_h = value,
            SweepParameter::RhoMax => c.params.rho_max = Some(value),
            SweepParameter::RhoMin => c.params.rho_min = value,
            SweepParameter::ROuter => c.footprint.r_outer = value,
            SweepParameter::RInner => c.footprint.r_inner = value,
        }
        c.validate()?;
        Ok(c)
    }
}

impl FromStr for SweepParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            SweepParameter::M,
            SweepParameter::ThetaH,
            SweepParameter::RhoMax,
            SweepParameter::RhoMin,
            SweepParameter::ROuter,
            SweepParameter::RInner,
        ]
        .into_iter()
        .find(|p| p.name() == s)
        .ok_or_else(|| Error::UnknownParameter(s.to_owned()))
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub mean_total: f64,
    pub per_trial: Vec<f64>,
}

/// Robustified total coverage for each value, averaged over the trials.
/// Trial `k` uses the same deployment seed at every value.
pub fn parametric_sweep(
    base: &ExperimentConfig,
    parameter: SweepParameter,
    values: &[f64],
) -> Result<Vec<SweepRow>> {
    base.validate()?;
    values
        .iter()
        .map(|&value| {
            let config = parameter.apply(base, value)?;
            let per_trial = (0..config.trials)
                .into_par_iter()
                .map(|k| {
                    let seeds = trial_seeds(config.seed, k);
                    let sensors = random_deployment(
                        config.m,
                        config.roi,
                        seeds.deployment,
                        config.margin,
                        config.footprint,
                    )?;
                    let diagram = sensor_diagram(&sensors, config.roi)?;
                    Ok(solve_on_diagram(&sensors, &diagram, &config.params)?.total_area)
                })
                .collect::<Result<Vec<f64>>>()?;
            let mean_total = per_trial.iter().sum::<f64>() / per_trial.len() as f64;
            Ok(SweepRow {
                parameter,
                value,
                mean_total,
                per_trial,
            })
        })
        .collect()
}
