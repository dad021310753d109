//! Acceptance criteria. Runs as a plain binary so every PASS/FAIL line is
//! printed; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rrfcov::geometry::{
    annular_sector_area, sector_polygon_intersection_area, width_squared_sector_area, Point2,
};
use rrfcov::harness::{
    parametric_sweep, random_deployment, run_comparison, trial_seeds, Condition, ExperimentConfig,
    Footprint, Strategy, SweepParameter,
};
use rrfcov::oracle::{
    area_fixtures, brute_force_best_vertex, check_fixture_area, contained_fixtures,
    monte_carlo_intersection_area, AreaCheck,
};
use rrfcov::orientation::{
    rrf_reports, sensor_diagram, solve_on_diagram, AlgoParams, Branch, ModelKind, RecalibrationRule,
};
use rrfcov::robust::{sensor_rrf, RrfOracle};
use rrfcov::voronoi::{build_clipped_voronoi, cell_halfplanes, Roi};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

/// Exact areas against 10⁶-sample Monte Carlo on 1000 random fixtures.
fn geometry_oracle() -> Outcome {
    let fixtures = area_fixtures(1000, 20_261_015).map_err(|e| e.to_string())?;
    let checks: Vec<AreaCheck> = fixtures
        .iter()
        .enumerate()
        .map(|(k, f)| check_fixture_area(f, 1_000_000, 1_000 + k as u64))
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;
    let outside_combined = checks.iter().filter(|c| !c.within(3.0, 0.01)).count();
    let outside_rel = checks.iter().filter(|c| c.relative_error > 0.01).count();
    let beyond_3se = checks.iter().filter(|c| c.z_score > 3.0).count();
    let mean_z2 = checks.iter().map(|c| c.z_score * c.z_score).sum::<f64>() / checks.len() as f64;
    let max_rel = checks.iter().map(|c| c.relative_error).fold(0.0, f64::max);
    // Under a correct engine z² has mean 1 and the 3-SE exceedances are
    // Binomial(1000, 0.0027); 9 is its 99.9% quantile.
    let ok = outside_combined == 0
        && outside_rel == 0
        && beyond_3se <= 9
        && (0.85..=1.15).contains(&mean_z2);
    check(
        ok,
        format!(
            "{} fixtures: {outside_combined} outside 3se+1%, {outside_rel} beyond 1% (max {max_rel:.2e}), \
             {beyond_3se} beyond 3se alone (expected ~2.7), mean z^2 {mean_z2:.3}",
            checks.len()
        ),
    )
}

/// Contained footprints return the closed form; the width-squared formula is
/// rejected by the oracle when there is a hole.
fn closed_form() -> Outcome {
    let fixtures = contained_fixtures(200, 77).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    let (mut holed, mut rejected, mut plain_accepted, mut plain) = (0, 0, 0, 0);
    for (k, f) in fixtures.iter().enumerate() {
        let exact = sector_polygon_intersection_area(&f.sector, &f.polygon);
        let (r, big_r, th) = (f.sector.r_inner(), f.sector.r_outer(), f.sector.theta_h());
        worst = worst.max((exact - th / 2.0 * (big_r * big_r - r * r)).abs());
        worst = worst.max((exact - annular_sector_area(&f.sector)).abs());
        let est = monte_carlo_intersection_area(&f.sector, &f.polygon, 1_000_000, 500 + k as u64)
            .map_err(|e| e.to_string())?;
        let literal = AreaCheck::new(width_squared_sector_area(&f.sector), est);
        if r > 0.0 {
            holed += 1;
            rejected += usize::from(!literal.within(3.0, 0.01));
        } else {
            plain += 1;
            plain_accepted += usize::from(literal.within(3.0, 0.01));
        }
    }
    check(
        worst <= 1e-9 && rejected > 0 && plain_accepted == plain,
        format!(
            "max |engine - closed form| {worst:.1e} over {}; width-squared formula rejected on {rejected} of {holed} with r > 0, \
             accepted on {plain_accepted} of {plain} with r = 0",
            fixtures.len()
        ),
    )
}

/// RRF against bisection over the boundary-sampling oracle.
fn rrf_correctness() -> Outcome {
    let roi = Roi::square(1000.0).unwrap();
    let fp = Footprint {
        r_inner: 10.0,
        r_outer: 50.0,
        theta_h: PI / 3.0,
    };
    let oracle = RrfOracle::new(32_768).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut sensors_checked = 0;
    for k in 0..200 {
        let m = rng.random_range(5..=50);
        let sensors = random_deployment(m, roi, 10_000 + k, 1.0, fp).map_err(|e| e.to_string())?;
        let d = sensor_diagram(&sensors, roi).map_err(|e| e.to_string())?;
        for (s, cell) in sensors.iter().zip(&d.cells) {
            let rho = sensor_rrf(s.id, s.nominal, &cell.neighbor_edges)
                .map_err(|e| e.to_string())?
                .rrf;
            let est = oracle.bisect(s.nominal, &cell_halfplanes(cell), 1000.0, 1e-6);
            worst = worst.max((rho - est).abs());
            sensors_checked += 1;
        }
    }
    let d = build_clipped_voronoi(&[Point2::new(250.0, 500.0), Point2::new(750.0, 500.0)], roi)
        .unwrap();
    let two_site = sensor_rrf(0, d.cells[0].site, &d.cells[0].neighbor_edges)
        .map_err(|e| e.to_string())?
        .rrf;
    check(
        worst <= 1e-5 && two_site == 250.0,
        format!("200 deployments, {sensors_checked} sensors: max |rrf - bisection| {worst:.2e}; two-site rrf {two_site}"),
    )
}

/// Termination, branch selection and argmax over 1000 random configs.
fn algorithm_behavior() -> Outcome {
    let roi = Roi::square(1000.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut over_budget, mut wrong_branch, mut argmax_miss, mut forced_miss, mut sensors_checked) =
        (0, 0, 0, 0, 0);
    for k in 0..1000u64 {
        let m = rng.random_range(5..=50);
        let r_outer = rng.random_range(20.0..150.0);
        let fp = Footprint {
            r_inner: rng.random_range(0.0..0.6) * r_outer,
            r_outer,
            theta_h: rng.random_range(0.2..TAU),
        };
        let params = AlgoParams {
            epsilon: rng.random_range(0.0..50.0),
            delta: rng.random_range(0.0..10.0),
            lambda: rng.random_range(0.0..50.0),
            rho_min: rng.random_range(0.0..60.0),
            max_iterations: rng.random_range(1..=100),
            recalibration: if k % 4 == 0 {
                RecalibrationRule::Literal
            } else {
                RecalibrationRule::SharedTarget
            },
            ..AlgoParams::default()
        };
        let sensors = random_deployment(m, roi, 20_000 + k, 1.0, fp).map_err(|e| e.to_string())?;
        let d = sensor_diagram(&sensors, roi).map_err(|e| e.to_string())?;
        let sol = solve_on_diagram(&sensors, &d, &params).map_err(|e| e.to_string())?;
        over_budget += usize::from(sol.iterations > params.max_iterations);
        for ((s, cell), (a, r)) in sensors
            .iter()
            .zip(&d.cells)
            .zip(sol.assignments.iter().zip(&sol.rrf_reports))
        {
            let want = if r.rrf > params.rho_min {
                Branch::RobustCounterpart
            } else {
                Branch::Robustified
            };
            wrong_branch += usize::from(a.branch != Some(want));
            let model = match want {
                Branch::RobustCounterpart => ModelKind::RobustCounterpart,
                Branch::Robustified => ModelKind::Robustified,
            };
            let brute =
                brute_force_best_vertex(s, cell, model, a.shift, 360).map_err(|e| e.to_string())?;
            let agree = match (a.candidate_ranking.first(), brute.best_vertex) {
                (Some(x), Some(y)) => x.area == y.area && x.direction == y.direction,
                (None, None) => true,
                _ => false,
            };
            argmax_miss += usize::from(!agree);
            sensors_checked += 1;
        }
        if k % 10 == 0 {
            for (rho_min, want) in [(0.0, Branch::RobustCounterpart), (1e9, Branch::Robustified)] {
                let forced = solve_on_diagram(&sensors, &d, &AlgoParams { rho_min, ..params })
                    .map_err(|e| e.to_string())?;
                forced_miss += forced
                    .assignments
                    .iter()
                    .filter(|a| a.branch != Some(want))
                    .count();
            }
        }
    }
    check(
        over_budget == 0 && wrong_branch == 0 && argmax_miss == 0 && forced_miss == 0,
        format!(
            "1000 configs, {sensors_checked} sensors: {over_budget} over max_iterations, {wrong_branch} off-flowchart branches, \
             {forced_miss} misses on forced branches, {argmax_miss} argmax disagreements"
        ),
    )
}

/// Orderings of the trial means at the default desk-scale setting.
fn experiment_trends() -> Outcome {
    let result = run_comparison(&ExperimentConfig::default()).map_err(|e| e.to_string())?;
    let g = |s, c| result.means.get(s, c);
    let (rn, inom, bn) = (
        g(Strategy::Random, Condition::Nominal),
        g(Strategy::Ids, Condition::Nominal),
        g(Strategy::Robustified, Condition::Nominal),
    );
    let (rp, ip, bp) = (
        g(Strategy::Random, Condition::Perturbed),
        g(Strategy::Ids, Condition::Perturbed),
        g(Strategy::Robustified, Condition::Perturbed),
    );
    let gap = (inom - bn) / inom;
    let a = bp > rp;
    let b = inom >= bn && bn >= rn && gap <= 0.05;
    let c = bp > ip;
    check(
        a && b && c,
        format!(
            "100 trials: (a) perturbed robustified {bp:.2} > random {rp:.2}: {a}; (b) nominal IDS {inom:.2} >= robustified {bn:.2} \
             >= random {rn:.2}, gap {:.2}%: {b}; (c) perturbed robustified {bp:.2} > IDS {ip:.2}: {c}",
            100.0 * gap
        ),
    )
}

fn means(base: &ExperimentConfig, p: SweepParameter, values: &[f64]) -> Result<Vec<f64>, String> {
    Ok(parametric_sweep(base, p, values)
        .map_err(|e| e.to_string())?
        .iter()
        .map(|r| r.mean_total)
        .collect())
}

fn fmt(v: &[f64]) -> String {
    v.iter()
        .map(|x| format!("{x:.0}"))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Shapes of the parameter sweeps.
fn sweep_shapes() -> Outcome {
    let base = ExperimentConfig::default();
    let theta_deg = [30.0, 60.0, 90.0, 120.0, 150.0, 180.0, 360.0];
    let theta: Vec<f64> = theta_deg.iter().map(|d: &f64| d.to_radians()).collect();
    let t = means(&base, SweepParameter::ThetaH, &theta)?;
    let ro = means(
        &base,
        SweepParameter::ROuter,
        &[40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 120.0],
    )?;
    let ri = means(
        &base,
        SweepParameter::RInner,
        &[10.0, 15.0, 20.0, 25.0, 30.0, 35.0, 40.0],
    )?;
    let rho_max_values = [40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 120.0];
    let rm = means(&base, SweepParameter::RhoMax, &rho_max_values)?;
    let mv = means(
        &base,
        SweepParameter::M,
        &[90.0, 120.0, 150.0, 180.0, 360.0],
    )?;

    let mut max_rrf = 0.0f64;
    for k in 0..base.trials {
        let s = random_deployment(
            base.m,
            base.roi,
            trial_seeds(base.seed, k).deployment,
            base.margin,
            base.footprint,
        )
        .map_err(|e| e.to_string())?;
        let d = sensor_diagram(&s, base.roi).map_err(|e| e.to_string())?;
        max_rrf = rrf_reports(&s, &d)
            .map_err(|e| e.to_string())?
            .iter()
            .map(|r| r.rrf)
            .fold(max_rrf, f64::max);
    }
    let saturated: Vec<f64> = rho_max_values
        .iter()
        .zip(&rm)
        .filter(|(v, _)| **v >= max_rrf)
        .map(|(_, m)| *m)
        .collect();

    let increasing = |v: &[f64]| v.windows(2).all(|w| w[1] > w[0]);
    let non_increasing = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    let second: Vec<f64> = mv.windows(3).map(|w| w[2] - 2.0 * w[1] + w[0]).collect();
    let ok_t = increasing(&t);
    let ok_ro = increasing(&ro);
    let ok_ri = non_increasing(&ri);
    let ok_rm = saturated.len() >= 2 && saturated.windows(2).all(|w| w[0] == w[1]);
    let ok_m = second.last().is_some_and(|d| *d <= 0.0);
    check(
        ok_t && ok_ro && ok_ri && ok_rm && ok_m,
        format!(
            "theta_h [{}] increasing: {ok_t}; r_outer [{}] increasing: {ok_ro}; r_inner [{}] non-increasing: {ok_ri}; \
             rho_max [{}] constant for the {} values >= max rrf {max_rrf:.2}: {ok_rm}; m [{}] second differences [{}] \
             end <= 0: {ok_m}",
            fmt(&t),
            fmt(&ro),
            fmt(&ri),
            fmt(&rm),
            saturated.len(),
            fmt(&mv),
            fmt(&second)
        ),
    )
}

fn run_cli(args: &[&str], dir: &Path, threads: &str) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let status = Command::new(env!("CARGO_BIN_EXE_rrfcov"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env("RC_THREADS", threads)
        .env("SOURCE_DATE_EPOCH", "0")
        .output()
        .map_err(|e| e.to_string())?;
    if !status.status.success() {
        return Err(format!(
            "{args:?} failed: {}",
            String::from_utf8_lossy(&status.stderr)
        ));
    }
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).map_err(|e| e.to_string())? {
        let entry = entry.map_err(|e| e.to_string())?;
        files.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).map_err(|e| e.to_string())?,
        );
    }
    Ok(files)
}

/// Byte-identical outputs across re-runs and thread counts.
fn determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = tmp.path().join("config.json");
    std::fs::write(
        &config,
        r#"{
            "roi": {"min": {"x": 0, "y": 0}, "max": {"x": 1000, "y": 1000}},
            "deployment": {"m": 150, "r_inner": 25, "r_outer": 80, "theta_h": 60},
            "experiment": {"seed": 7, "trials": 8, "perturbation": {"magnitude": "own_rrf", "mode": {"random": {"seed": 3}}}}
        }"#,
    )
    .map_err(|e| e.to_string())?;
    let c = config.to_str().unwrap();
    let commands: [&[&str]; 3] = [
        &["solve", "--config", c],
        &["compare", "--config", c],
        &[
            "sweep",
            "--config",
            c,
            "--param",
            "theta_h",
            "--values",
            "30,90,180",
        ],
    ];
    let mut compared = 0;
    for (k, args) in commands.iter().enumerate() {
        let mut runs = Vec::new();
        for (j, threads) in ["1", "1", "4"].iter().enumerate() {
            runs.push(run_cli(
                args,
                &tmp.path().join(format!("{k}-{j}")),
                threads,
            )?);
        }
        if runs.iter().any(|r| *r != runs[0]) {
            return Err(format!("{} outputs differ between runs", args[0]));
        }
        compared += runs[0].len();
    }
    Ok(format!("solve, compare and sweep: {compared} output files byte-identical across 3 runs (threads 1, 1, 4)"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("1 geometry oracle", geometry_oracle),
        ("2 closed form", closed_form),
        ("3 rrf correctness", rrf_correctness),
        ("4 algorithm behavior", algorithm_behavior),
        ("5 experiment trends", experiment_trends),
        ("6 sweep shapes", sweep_shapes),
        ("7 determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name} ({secs:.1}s): {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name} ({secs:.1}s): {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
