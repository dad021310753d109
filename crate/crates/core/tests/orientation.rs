use std::f64::consts::{PI, TAU};

use proptest::prelude::*;
use rrfcov::geometry::{covers_point, Point2};
use rrfcov::harness::{random_deployment, Footprint};
use rrfcov::oracle::{brute_force_best_vertex, monte_carlo_area};
use rrfcov::orientation::{
    evaluate_candidate, run_integrated_algorithm, select_orientation, sensor_diagram,
    solve_on_diagram, AlgoParams, Branch, ModelKind, RecalibrationRule, Sensor, SensorState,
};
use rrfcov::robust::RrfOracle;
use rrfcov::voronoi::{cell_halfplanes, Roi};

#[derive(Debug, Clone)]
struct Case {
    m: usize,
    seed: u64,
    footprint: Footprint,
    params: AlgoParams,
}

fn case() -> impl Strategy<Value = Case> {
    (
        2usize..30,
        any::<u64>(),
        20.0..140.0f64,
        0.0..0.7f64,
        0.2..TAU,
        0.0..40.0f64,
        0.0..30.0f64,
        1usize..60,
        any::<bool>(),
    )
        .prop_map(
            |(m, seed, r_outer, hole, theta_h, rho_min, lambda, max_iterations, literal)| Case {
                m,
                seed,
                footprint: Footprint {
                    r_inner: hole * r_outer,
                    r_outer,
                    theta_h,
                },
                params: AlgoParams {
                    rho_min,
                    lambda,
                    max_iterations,
                    recalibration: if literal {
                        RecalibrationRule::Literal
                    } else {
                        RecalibrationRule::SharedTarget
                    },
                    ..AlgoParams::default()
                },
            },
        )
}

fn roi() -> Roi {
    Roi::square(1000.0).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn terminates_deterministically_on_the_flowchart_branch(c in case()) {
        let sensors = random_deployment(c.m, roi(), c.seed, 1.0, c.footprint).unwrap();
        let a = run_integrated_algorithm(&sensors, roi(), &c.params).unwrap();
        let b = run_integrated_algorithm(&sensors, roi(), &c.params).unwrap();
        prop_assert!(a.iterations <= c.params.max_iterations);
        prop_assert_eq!(&a, &b);
        for (asg, rep) in a.assignments.iter().zip(&a.rrf_reports) {
            let want = if rep.rrf > c.params.rho_min { Branch::RobustCounterpart } else { Branch::Robustified };
            prop_assert_eq!(asg.branch, Some(want));
            if asg.rrf_violation {
                prop_assert_eq!(asg.state, SensorState::Sleep);
            }
        }
        let total: f64 = a.assignments.iter().map(|x| x.covered_area).sum();
        prop_assert!((total - a.total_area).abs() <= 1e-9 * (1.0 + total));
        prop_assert!(a.total_area <= roi().area() + 1e-6);
    }

    #[test]
    fn vertex_argmax_matches_exhaustive_search(c in case()) {
        let sensors = random_deployment(c.m, roi(), c.seed, 1.0, c.footprint).unwrap();
        let d = sensor_diagram(&sensors, roi()).unwrap();
        for (s, cell) in sensors.iter().zip(&d.cells) {
            for (model, shift) in [(ModelKind::Nominal, 0.0), (ModelKind::RobustCounterpart, 7.5)] {
                let chosen = select_orientation(s, cell, model, &c.params, shift).unwrap();
                let brute = brute_force_best_vertex(s, cell, model, shift, 360).unwrap();
                let (got, want) = (chosen.candidate_ranking.first(), brute.best_vertex);
                prop_assert_eq!(got.map(|g| (g.area, g.direction)), want.map(|w| (w.area, w.direction)));
            }
        }
    }
}

/// The covered region of every awake sensor is the part of its footprint in
/// its own cell: the reported area matches sampling of that set.
#[test]
fn reported_areas_are_cell_restricted() {
    let fp = Footprint {
        r_inner: 15.0,
        r_outer: 90.0,
        theta_h: 1.4,
    };
    let sensors = random_deployment(12, roi(), 41, 1.0, fp).unwrap();
    let d = sensor_diagram(&sensors, roi()).unwrap();
    let sol = solve_on_diagram(&sensors, &d, &AlgoParams::default()).unwrap();
    for ((s, a), cell) in sensors.iter().zip(&sol.assignments).zip(&d.cells) {
        let (Some(dir), Some(loc)) = (a.state.direction(), a.state.effective_location()) else {
            continue;
        };
        let sector = s.footprint(loc, dir).unwrap();
        let est = monte_carlo_area(
            |p| covers_point(&sector, p) && cell.polygon.contains(p),
            roi(),
            400_000,
            s.id as u64,
        )
        .unwrap();
        assert!(
            (est.mean - a.covered_area).abs() <= 4.0 * est.std_error + 0.01 * a.covered_area,
            "{} vs {est:?}",
            a.covered_area
        );
    }
}

#[test]
fn shifted_footprint_never_beats_nominal_in_two_site_fixtures() {
    for (gap, theta) in [
        (500.0, PI / 3.0),
        (300.0, PI / 2.0),
        (200.0, PI),
        (600.0, TAU),
    ] {
        let sensors = [
            Sensor::new(0, Point2::new(500.0 - gap / 2.0, 500.0), 10.0, 120.0, theta).unwrap(),
            Sensor::new(1, Point2::new(500.0 + gap / 2.0, 500.0), 10.0, 120.0, theta).unwrap(),
        ];
        let d = sensor_diagram(&sensors, roi()).unwrap();
        let sol = solve_on_diagram(
            &sensors,
            &d,
            &AlgoParams {
                rho_min: 0.0,
                ..AlgoParams::default()
            },
        )
        .unwrap();
        for ((s, a), cell) in sensors.iter().zip(&sol.assignments).zip(&d.cells) {
            let dir = a.state.direction().unwrap();
            let rho = sol.rrf_reports[s.id].rrf;
            let (_, nominal) = evaluate_candidate(s, cell, dir, ModelKind::Nominal, 0.0).unwrap();
            let (_, shifted) =
                evaluate_candidate(s, cell, dir, ModelKind::RobustCounterpart, rho).unwrap();
            assert!(nominal >= shifted, "gap {gap}: {nominal} < {shifted}");
        }
    }
}

#[test]
fn rrf_matches_the_bisection_oracle() {
    let fp = Footprint {
        r_inner: 10.0,
        r_outer: 50.0,
        theta_h: 1.0,
    };
    let oracle = RrfOracle::new(32_768).unwrap();
    for seed in 0..10 {
        let sensors = random_deployment(25, roi(), seed, 1.0, fp).unwrap();
        let d = sensor_diagram(&sensors, roi()).unwrap();
        let sol = solve_on_diagram(&sensors, &d, &AlgoParams::default()).unwrap();
        for (cell, rep) in d.cells.iter().zip(&sol.rrf_reports) {
            let est = oracle.bisect(cell.site, &cell_halfplanes(cell), 1000.0, 1e-6);
            assert!((est - rep.rrf).abs() <= 1e-5, "{est} vs {}", rep.rrf);
        }
    }
}
