use std::f64::consts::TAU;

use proptest::prelude::*;
use rrfcov::harness::{
    parametric_sweep, random_deployment, run_comparison, trial_seeds, Condition, ExperimentConfig,
    Footprint, Strategy, SweepParameter,
};
use rrfcov::orientation::{
    candidate_directions, evaluate_candidate, rrf_reports, sensor_diagram, solve_on_diagram,
    AlgoParams, ModelKind, Sensor,
};
use rrfcov::voronoi::Roi;

fn roi() -> Roi {
    Roi::square(1000.0).unwrap()
}

fn small(m: usize, trials: usize, seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        m,
        trials,
        seed,
        ..ExperimentConfig::default()
    }
}

fn resized(s: &Sensor, r_inner: f64, r_outer: f64, theta_h: f64) -> Sensor {
    Sensor::new(s.id, s.nominal, r_inner, r_outer, theta_h).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn candidate_areas_are_monotone_in_the_footprint(
        m in 2usize..25,
        seed in any::<u64>(),
        r in 0.0..30.0f64,
        extra_r in 0.0..20.0f64,
        big_r in 40.0..120.0f64,
        extra_big_r in 0.0..40.0f64,
        theta in 0.1..TAU,
        extra_theta in 0.0..1.0f64,
        shift in 0.0..20.0f64,
    ) {
        let theta_wide = (theta + extra_theta).min(TAU);
        let fp = Footprint { r_inner: r, r_outer: big_r, theta_h: theta };
        let sensors = random_deployment(m, roi(), seed, 1.0, fp).unwrap();
        let d = sensor_diagram(&sensors, roi()).unwrap();
        for (s, cell) in sensors.iter().zip(&d.cells) {
            for c in candidate_directions(s, cell) {
                let area = |x: &Sensor| evaluate_candidate(x, cell, c.direction, ModelKind::RobustCounterpart, shift).unwrap().1;
                let base = area(s);
                prop_assert!(area(&resized(s, r, big_r, theta_wide)) >= base - 1e-7);
                prop_assert!(area(&resized(s, r, big_r + extra_big_r, theta)) >= base - 1e-7);
                prop_assert!(area(&resized(s, (r + extra_r).min(big_r - 1.0), big_r, theta)) <= base + 1e-7);
                prop_assert!(base <= cell.area() + 1e-7);
            }
        }
    }

    #[test]
    fn rho_max_saturates_at_the_largest_rrf(m in 2usize..40, seed in any::<u64>()) {
        let fp = Footprint { r_inner: 20.0, r_outer: 70.0, theta_h: 1.2 };
        let sensors = random_deployment(m, roi(), seed, 1.0, fp).unwrap();
        let d = sensor_diagram(&sensors, roi()).unwrap();
        let top = rrf_reports(&sensors, &d).unwrap().iter().map(|r| r.rrf).fold(0.0, f64::max);
        let at = |rho_max| solve_on_diagram(&sensors, &d, &AlgoParams { rho_max: Some(rho_max), ..AlgoParams::default() }).unwrap();
        let uncapped = solve_on_diagram(&sensors, &d, &AlgoParams::default()).unwrap();
        prop_assert_eq!(&at(top), &uncapped);
        prop_assert_eq!(&at(top * 3.0 + 1.0), &uncapped);
    }
}

#[test]
fn totals_stay_within_the_region() {
    let result = run_comparison(&small(80, 6, 9)).unwrap();
    for t in &result.trials {
        for s in Strategy::ALL {
            for c in Condition::ALL {
                let v = t.totals.get(s, c);
                assert!((0.0..=roi().area()).contains(&v), "{s} {c} {v}");
            }
        }
    }
}

#[test]
fn wider_heads_never_lower_the_best_candidate() {
    let cfg = small(60, 1, 4);
    let seeds = trial_seeds(cfg.seed, 0);
    let params = AlgoParams::default();
    let mut previous: Option<Vec<f64>> = None;
    for theta in [0.3, 0.8, 1.5, 3.0, TAU] {
        let fp = Footprint {
            theta_h: theta,
            ..cfg.footprint
        };
        let sensors = random_deployment(cfg.m, cfg.roi, seeds.deployment, cfg.margin, fp).unwrap();
        let d = sensor_diagram(&sensors, cfg.roi).unwrap();
        let best: Vec<f64> = sensors
            .iter()
            .zip(&d.cells)
            .map(|(s, cell)| {
                rrfcov::orientation::select_orientation(s, cell, ModelKind::Nominal, &params, 0.0)
                    .unwrap()
                    .candidate_ranking
                    .first()
                    .map_or(0.0, |c| c.area)
            })
            .collect();
        if let Some(prev) = &previous {
            assert!(best.iter().zip(prev).all(|(b, p)| *b >= p - 1e-7));
        }
        previous = Some(best);
    }
}

#[test]
fn results_do_not_depend_on_the_thread_count() {
    let cfg = small(70, 5, 21);
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                (
                    run_comparison(&cfg).unwrap(),
                    parametric_sweep(&cfg, SweepParameter::ROuter, &[50.0, 90.0]).unwrap(),
                )
            })
    };
    assert_eq!(run(1), run(3));
}
