//! Output files. Every number goes through [`sig`] so files are byte-stable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rrfcov::geometry::Point2;
use rrfcov::harness::{ComparisonResult, Condition, Strategy, SweepRow};
use rrfcov::orientation::{Branch, ModelKind, OrientationSolution, Sensor, SensorState};
use rrfcov::voronoi::{Boundary, Roi, Wall};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// `x` rounded to 9 significant digits.
pub fn sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.8e}").parse().expect("formatted float parses")
}

fn sig_point(p: Point2) -> Point2 {
    Point2::new(sig(p.x), sig(p.y))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub roi: Roi,
    pub model: ModelKind,
    pub total_area: f64,
    pub iterations: usize,
    pub sensors: Vec<SensorRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorRecord {
    pub id: usize,
    pub nominal: Point2,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Degrees.
    pub theta_h: f64,
    /// `oriented`, `sleep` or `random`.
    pub state: String,
    /// Degrees.
    pub direction: Option<f64>,
    pub target_vertex: Option<Point2>,
    pub effective_location: Option<Point2>,
    pub area: f64,
    pub rrf: f64,
    pub binding_constraint: String,
    pub branch: Option<Branch>,
    pub shift: f64,
    pub rrf_violation: bool,
}

impl SensorRecord {
    pub fn sensor(&self) -> Result<Sensor, rrfcov::Error> {
        Sensor::new(
            self.id,
            self.nominal,
            self.r_inner,
            self.r_outer,
            self.theta_h.to_radians(),
        )
    }
}

fn boundary_name(b: Boundary) -> String {
    match b {
        Boundary::Neighbor(j) => format!("neighbor:{j}"),
        Boundary::Wall(w) => match w {
            Wall::Left => "wall:left",
            Wall::Bottom => "wall:bottom",
            Wall::Right => "wall:right",
            Wall::Top => "wall:top",
        }
        .to_owned(),
    }
}

impl SolutionFile {
    pub fn new(roi: Roi, sensors: &[Sensor], solution: &OrientationSolution) -> SolutionFile {
        let records = sensors
            .iter()
            .zip(&solution.assignments)
            .zip(&solution.rrf_reports)
            .map(|((s, a), r)| {
                let (state, target) = match a.state {
                    SensorState::Oriented { target_vertex, .. } => {
                        ("oriented", Some(sig_point(target_vertex)))
                    }
                    SensorState::Sleep => ("sleep", None),
                    SensorState::Random { .. } => ("random", None),
                };
                SensorRecord {
                    id: s.id,
                    nominal: sig_point(s.nominal),
                    r_inner: sig(s.r_inner),
                    r_outer: sig(s.r_outer),
                    theta_h: sig(s.theta_h.to_degrees()),
                    state: state.to_owned(),
                    direction: a.state.direction().map(|d| sig(d.to_degrees())),
                    target_vertex: target,
                    effective_location: a.state.effective_location().map(sig_point),
                    area: sig(a.covered_area),
                    rrf: sig(r.rrf),
                    binding_constraint: boundary_name(r.binding_constraint),
                    branch: a.branch,
                    shift: sig(a.shift),
                    rrf_violation: a.rrf_violation,
                }
            })
            .collect();
        SolutionFile {
            roi: Roi {
                min: sig_point(roi.min),
                max: sig_point(roi.max),
            },
            model: solution.model,
            total_area: sig(solution.total_area),
            iterations: solution.iterations,
            sensors: records,
        }
    }
}

pub fn summary_csv(file: &SolutionFile) -> String {
    let mut out =
        String::from("id,x,y,state,direction_deg,effective_x,effective_y,area,rrf,branch\n");
    for r in &file.sensors {
        let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        let branch = match r.branch {
            Some(Branch::RobustCounterpart) => "RC",
            Some(Branch::Robustified) => "Robustified",
            None => "",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.id,
            r.nominal.x,
            r.nominal.y,
            r.state,
            opt(r.direction),
            opt(r.effective_location.map(|p| p.x)),
            opt(r.effective_location.map(|p| p.y)),
            r.area,
            r.rrf,
            branch
        );
    }
    out
}

pub fn compare_csv(result: &ComparisonResult) -> String {
    let mut out = String::from("trial,strategy,condition,total_area\n");
    for t in &result.trials {
        for s in Strategy::ALL {
            for c in Condition::ALL {
                let _ = writeln!(out, "{},{s},{c},{}", t.trial, sig(t.totals.get(s, c)));
            }
        }
    }
    out
}

pub fn cell_areas_csv(result: &ComparisonResult) -> String {
    let mut out = String::from("trial,sensor,robustified_area\n");
    for t in &result.trials {
        for (k, a) in t.robustified_cell_areas.iter().enumerate() {
            let _ = writeln!(out, "{},{k},{}", t.trial, sig(*a));
        }
    }
    out
}

#[derive(Debug, Serialize)]
pub struct ConditionMeans {
    pub nominal: f64,
    pub perturbed: f64,
}

#[derive(Debug, Serialize)]
pub struct MeansFile {
    pub trials: usize,
    pub random: ConditionMeans,
    pub ids: ConditionMeans,
    pub robustified: ConditionMeans,
    /// Mean of the worst-case totals the robustified algorithm reports.
    pub robustified_reported: f64,
}

pub fn means_file(result: &ComparisonResult) -> MeansFile {
    let m = |s| ConditionMeans {
        nominal: sig(result.means.get(s, Condition::Nominal)),
        perturbed: sig(result.means.get(s, Condition::Perturbed)),
    };
    let n = result.trials.len();
    let reported = result
        .trials
        .iter()
        .map(|t| t.robustified_reported)
        .sum::<f64>()
        / n as f64;
    MeansFile {
        trials: n,
        random: m(Strategy::Random),
        ids: m(Strategy::Ids),
        robustified: m(Strategy::Robustified),
        robustified_reported: sig(reported),
    }
}

/// `values_as_given` are the user's values (degrees for angles).
pub fn sweep_csv(rows: &[SweepRow], values_as_given: &[f64]) -> String {
    let trials = rows.first().map_or(0, |r| r.per_trial.len());
    let mut out = String::from("parameter,value,mean_total");
    for k in 0..trials {
        let _ = write!(out, ",trial_{k}");
    }
    out.push('\n');
    for (row, value) in rows.iter().zip(values_as_given) {
        let _ = write!(
            out,
            "{},{},{}",
            row.parameter,
            sig(*value),
            sig(row.mean_total)
        );
        for t in &row.per_trial {
            let _ = write!(out, ",{}", sig(*t));
        }
        out.push('\n');
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("output types serialize");
    s.push('\n');
    s
}

/// Collects output files and writes the run manifest last.
pub struct OutputDir {
    dir: PathBuf,
    written: Vec<String>,
    started: u64,
}

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set so that
/// manifests are reproducible.
pub fn timestamp() -> u64 {
    std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or_else(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs())
        })
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub version: &'a str,
    pub seed: Option<u64>,
    pub config: Option<serde_json::Value>,
    pub started_unix: u64,
    pub finished_unix: u64,
    pub outputs: &'a [String],
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<OutputDir, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(OutputDir {
            dir: dir.to_owned(),
            written: Vec::new(),
            started: timestamp(),
        })
    }

    pub fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    pub fn finish(
        mut self,
        command: &str,
        seed: Option<u64>,
        config: Option<serde_json::Value>,
    ) -> Result<(), CliError> {
        let mut outputs = self.written.clone();
        outputs.push("manifest.json".to_owned());
        let manifest = RunManifest {
            command,
            version: env!("CARGO_PKG_VERSION"),
            seed,
            config,
            started_unix: self.started,
            finished_unix: timestamp(),
            outputs: &outputs,
        };
        let text = to_json(&manifest);
        self.write("manifest.json", &text)
    }
}
