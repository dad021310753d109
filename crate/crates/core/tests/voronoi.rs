use proptest::prelude::*;
use rrfcov::geometry::Point2;
use rrfcov::voronoi::{build_clipped_voronoi, validate_sites, Boundary, Roi};

fn sites() -> impl Strategy<Value = Vec<Point2>> {
    proptest::collection::vec((1.0..999.0f64, 1.0..599.0f64), 1..40)
        .prop_map(|v| {
            v.into_iter()
                .map(|(x, y)| Point2::new(x, y))
                .collect::<Vec<_>>()
        })
        .prop_filter("sites must be valid", |s| validate_sites(s, &roi()).is_ok())
}

fn roi() -> Roi {
    Roi::new(Point2::new(0.0, 0.0), Point2::new(1000.0, 600.0)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn cells_tile_the_region(s in sites()) {
        let d = build_clipped_voronoi(&s, roi()).unwrap();
        let total: f64 = d.cells.iter().map(|c| c.area()).sum();
        prop_assert!((total - roi().area()).abs() <= 1e-6 * roi().area());
        for (k, c) in d.cells.iter().enumerate() {
            prop_assert_eq!(c.owner, k);
            prop_assert!(c.polygon.contains(c.site));
        }
    }

    #[test]
    fn points_belong_to_the_nearest_site(s in sites(), pts in proptest::collection::vec((0.0..1000.0f64, 0.0..600.0f64), 200)) {
        let d = build_clipped_voronoi(&s, roi()).unwrap();
        for (x, y) in pts {
            let p = Point2::new(x, y);
            let owner = d.locate(p).unwrap();
            let best = s.iter().map(|q| q.distance(p)).fold(f64::INFINITY, f64::min);
            prop_assert!(s[owner].distance(p) <= best + 1e-9);
        }
    }

    #[test]
    fn bisectors_are_shared(s in sites()) {
        let d = build_clipped_voronoi(&s, roi()).unwrap();
        for (i, c) in d.cells.iter().enumerate() {
            for e in &c.neighbor_edges {
                if let Boundary::Neighbor(j) = e.boundary {
                    let back = d.cells[j].neighbor_edges.iter().find(|f| f.boundary == Boundary::Neighbor(i));
                    let back = back.expect("neighbor lists the edge back");
                    prop_assert!((back.halfplane.normal + e.halfplane.normal).norm() <= 1e-12);
                    prop_assert!((back.halfplane.offset + e.halfplane.offset).abs() <= 1e-9 * (1.0 + e.halfplane.offset.abs()));
                }
            }
        }
    }
}

#[test]
fn cocircular_sites_still_tile() {
    let s = [
        Point2::new(400.0, 300.0),
        Point2::new(600.0, 300.0),
        Point2::new(500.0, 200.0),
        Point2::new(500.0, 400.0),
    ];
    let d = build_clipped_voronoi(&s, roi()).unwrap();
    let total: f64 = d.cells.iter().map(|c| c.area()).sum();
    assert!((total - roi().area()).abs() <= 1e-6 * roi().area());
    assert!(d.cells.iter().all(|c| c
        .vertices()
        .iter()
        .any(|v| v.distance(Point2::new(500.0, 300.0)) <= 1e-9)));
}
