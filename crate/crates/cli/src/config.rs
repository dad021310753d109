//! The JSON run configuration. Angles are in degrees, everything else in
//! ground units.

use std::path::Path;

use rrfcov::geometry::Point2;
use rrfcov::harness::{trial_seeds, ExperimentConfig, Footprint, Perturbation};
use rrfcov::orientation::{AlgoParams, Sensor};
use rrfcov::voronoi::Roi;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub roi: Roi,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensors: Option<Vec<SensorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deployment: Option<DeploymentSpec>,
    #[serde(default)]
    pub params: AlgoParams,
    #[serde(default)]
    pub experiment: ExperimentSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensorSpec {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Degrees.
    pub theta_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeploymentSpec {
    pub m: usize,
    #[serde(default = "default_margin")]
    pub margin: f64,
    pub r_inner: f64,
    pub r_outer: f64,
    /// Degrees.
    pub theta_h: f64,
}

fn default_margin() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSpec {
    pub seed: u64,
    pub trials: usize,
    pub perturbation: Perturbation,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            seed: 1,
            trials: 100,
            perturbation: Perturbation::default(),
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Config::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Config, CliError> {
        let config: Config =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        Roi::new(config.roi.min, config.roi.max)
            .map_err(|e| CliError::Config(format!("roi: {e}")))?;
        config
            .params
            .validate()
            .map_err(|e| CliError::Config(format!("params: {e}")))?;
        match (&config.sensors, &config.deployment) {
            (Some(_), Some(_)) => Err(CliError::Config(
                "`sensors` and `deployment` are mutually exclusive".into(),
            )),
            (None, None) => Err(CliError::Config(
                "missing field `sensors` or `deployment`".into(),
            )),
            _ => Ok(config),
        }
    }

    pub fn apply_overrides(&mut self, seed: Option<u64>, trials: Option<usize>) {
        if let Some(seed) = seed {
            self.experiment.seed = seed;
        }
        if let Some(trials) = trials {
            self.experiment.trials = trials;
        }
    }

    /// The sensors to solve: the explicit list, or trial 0 of the random
    /// deployment.
    pub fn sensors(&self) -> Result<Vec<Sensor>, CliError> {
        if let Some(list) = &self.sensors {
            return list
                .iter()
                .map(|s| {
                    Sensor::new(
                        s.id,
                        Point2::new(s.x, s.y),
                        s.r_inner,
                        s.r_outer,
                        s.theta_h.to_radians(),
                    )
                })
                .collect::<Result<_, _>>()
                .map_err(|e| CliError::Config(format!("sensors: {e}")));
        }
        let exp = self.experiment_config()?;
        let seeds = trial_seeds(exp.seed, 0);
        rrfcov::harness::random_deployment(
            exp.m,
            exp.roi,
            seeds.deployment,
            exp.margin,
            exp.footprint,
        )
        .map_err(CliError::from)
    }

    /// The experiment configuration; requires a random deployment.
    pub fn experiment_config(&self) -> Result<ExperimentConfig, CliError> {
        let d = self.deployment.ok_or_else(|| {
            CliError::Config(
                "this command needs a `deployment`, not an explicit `sensors` list".into(),
            )
        })?;
        let config = ExperimentConfig {
            m: d.m,
            roi: self.roi,
            footprint: Footprint {
                r_inner: d.r_inner,
                r_outer: d.r_outer,
                theta_h: d.theta_h.to_radians(),
            },
            params: self.params,
            seed: self.experiment.seed,
            trials: self.experiment.trials,
            margin: d.margin,
            perturbation: self.experiment.perturbation,
        };
        config
            .validate()
            .map_err(|e| CliError::Config(format!("deployment: {e}")))?;
        Ok(config)
    }
}
