mod config;
mod output;
mod render;
mod validate;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rrfcov::harness::{parametric_sweep, run_comparison, ExperimentConfig, SweepParameter};
use rrfcov::orientation::run_integrated_algorithm;

use crate::config::Config;
use crate::output::{OutputDir, SolutionFile};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible input: {0}")]
    Infeasible(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) => 2,
            CliError::Infeasible(_) => 3,
            CliError::Validation(_) => 4,
        }
    }
}

impl From<rrfcov::Error> for CliError {
    fn from(e: rrfcov::Error) -> Self {
        if e.is_infeasible_input() {
            CliError::Infeasible(e.to_string())
        } else {
            CliError::Config(e.to_string())
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "rrfcov",
    version,
    about = "Robust orientation planning for aerial directional sensors"
)]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true, env = "RC_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Overrides `experiment.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides `experiment.trials`.
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the integrated algorithm once; writes solution.json and summary.csv.
    Solve(RunArgs),
    /// Compare random, IDS and robustified orientation over many trials.
    Compare(RunArgs),
    /// Sweep one parameter; writes sweep.csv.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// One of m, theta_h, rho_max, rho_min, r_outer, r_inner.
        #[arg(long)]
        param: String,
        /// Comma-separated values (degrees for theta_h).
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        values: Vec<f64>,
    },
    /// Run the oracle suites; exits with 4 if any check fails.
    Validate {
        #[command(flatten)]
        run: RunArgs,
        /// Random area fixtures to check.
        #[arg(long, default_value_t = 100)]
        fixtures: usize,
        /// Monte Carlo samples per fixture.
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        /// Deployments for the RRF and argmax checks.
        #[arg(long, default_value_t = 5)]
        deployments: usize,
        /// Multiplies every tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance: f64,
        /// Score contained footprints with (θ/2)(R − r)² instead of the engine.
        #[arg(long)]
        width_squared_area: bool,
    },
    /// Draw a solution.json as SVG.
    Render {
        /// solution.json written by `solve`.
        #[arg(long)]
        solution: PathBuf,
        /// Output directory; the scene is written to scene.svg.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

fn load(run: &RunArgs) -> Result<Config, CliError> {
    let mut config = Config::load(&run.config)?;
    config.apply_overrides(run.seed, run.trials);
    Ok(config)
}

fn config_echo(config: &Config) -> Option<serde_json::Value> {
    serde_json::to_value(config).ok()
}

fn solve(run: &RunArgs) -> Result<(), CliError> {
    let config = load(run)?;
    let sensors = config.sensors()?;
    let solution = run_integrated_algorithm(&sensors, config.roi, &config.params)?;
    let file = SolutionFile::new(config.roi, &sensors, &solution);
    let mut out = OutputDir::create(&run.out)?;
    out.write("solution.json", &output::to_json(&file))?;
    out.write("summary.csv", &output::summary_csv(&file))?;
    out.finish("solve", Some(config.experiment.seed), config_echo(&config))?;
    println!(
        "total_area {} over {} sensors, {} iterations",
        file.total_area,
        file.sensors.len(),
        file.iterations
    );
    Ok(())
}

fn compare(run: &RunArgs) -> Result<(), CliError> {
    let config = load(run)?;
    let exp = config.experiment_config()?;
    let result = run_comparison(&exp)?;
    let mut out = OutputDir::create(&run.out)?;
    out.write("compare.csv", &output::compare_csv(&result))?;
    out.write("cell_areas.csv", &output::cell_areas_csv(&result))?;
    let means = output::means_file(&result);
    out.write("means.json", &output::to_json(&means))?;
    out.finish("compare", Some(exp.seed), config_echo(&config))?;
    println!("{}", output::to_json(&means).trim_end());
    Ok(())
}

fn sweep(run: &RunArgs, param: &str, values: &[f64]) -> Result<(), CliError> {
    let config = load(run)?;
    let exp: ExperimentConfig = config.experiment_config()?;
    let parameter: SweepParameter = param
        .parse()
        .map_err(|e: rrfcov::Error| CliError::Config(e.to_string()))?;
    let internal: Vec<f64> = match parameter {
        SweepParameter::ThetaH => values.iter().map(|v| v.to_radians()).collect(),
        _ => values.to_vec(),
    };
    let rows = parametric_sweep(&exp, parameter, &internal)?;
    let mut out = OutputDir::create(&run.out)?;
    out.write("sweep.csv", &output::sweep_csv(&rows, values))?;
    out.finish("sweep", Some(exp.seed), config_echo(&config))?;
    for (row, v) in rows.iter().zip(values) {
        println!(
            "{parameter}={} mean_total={}",
            output::sig(*v),
            output::sig(row.mean_total)
        );
    }
    Ok(())
}

fn validate_cmd(run: &RunArgs, opts: validate::ValidateOptions) -> Result<(), CliError> {
    let config = load(run)?;
    let deployment = match config.deployment {
        Some(_) => config.experiment_config()?,
        None => ExperimentConfig {
            m: 20,
            roi: config.roi,
            params: config.params,
            seed: config.experiment.seed,
            ..ExperimentConfig::default()
        },
    };
    let opts = validate::ValidateOptions {
        seed: config.experiment.seed,
        ..opts
    };
    let report = validate::run(&opts, &deployment)?;
    let mut out = OutputDir::create(&run.out)?;
    out.write("validation.json", &output::to_json(&report))?;
    out.finish("validate", Some(opts.seed), config_echo(&config))?;
    for c in &report.checks {
        println!(
            "{} {}: {} (tolerance {})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.observed,
            c.tolerance
        );
    }
    if report.passed {
        Ok(())
    } else {
        let failed = report.checks.iter().filter(|c| !c.passed).count();
        Err(CliError::Validation(format!(
            "{failed} of {} checks failed",
            report.checks.len()
        )))
    }
}

fn render_cmd(solution: &Path, out_dir: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(solution)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", solution.display())))?;
    let file: SolutionFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", solution.display())))?;
    let svg = render::render_svg(&file)?;
    let mut out = OutputDir::create(out_dir)?;
    out.write("scene.svg", &svg)?;
    out.finish("render", None, None)
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Solve(run) => solve(run),
        Command::Compare(run) => compare(run),
        Command::Sweep { run, param, values } => sweep(run, param, values),
        Command::Validate {
            run,
            fixtures,
            samples,
            deployments,
            tolerance,
            width_squared_area,
        } => {
            if !(tolerance.is_finite() && *tolerance >= 0.0) {
                return Err(CliError::Config(format!(
                    "--tolerance {tolerance} must be finite and non-negative"
                )));
            }
            if *samples < 1000 {
                return Err(CliError::Config(format!(
                    "--samples {samples} must be at least 1000"
                )));
            }
            let opts = validate::ValidateOptions {
                seed: 0,
                fixtures: *fixtures,
                samples: *samples,
                deployments: *deployments,
                tolerance_scale: *tolerance,
                width_squared_area: *width_squared_area,
            };
            validate_cmd(run, opts)
        }
        Command::Render { solution, out } => render_cmd(solution, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
