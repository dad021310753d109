//! Brute-force verifiers kept independent of the production paths they check:
//! Monte Carlo area estimation and exhaustive re-evaluation of orientation
//! candidates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::{
    covers_point, sector_polygon_intersection_area, AnnularSector, ConvexPolygon, Point2,
};
use crate::orientation::{evaluate_candidate, ModelKind, Sensor};
use crate::voronoi::{Roi, VoronoiCell};

/// Samples drawn from one random stream. Streams are indexed by chunk, so the
/// hit count does not depend on how chunks are spread over threads.
const CHUNK: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

impl AreaEstimate {
    pub fn zero(samples: u64) -> Self {
        AreaEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
        }
    }

    /// `|value − mean|` in units of the standard error (infinite when the
    /// estimate has zero spread and disagrees).
    pub fn z_score(&self, value: f64) -> f64 {
        let diff = (value - self.mean).abs();
        if diff == 0.0 {
            0.0
        } else if self.std_error == 0.0 {
            f64::INFINITY
        } else {
            diff / self.std_error
        }
    }
}

/// Hit-or-miss estimate of the area of `{p in bbox : membership(p)}`.
pub fn monte_carlo_area<F>(
    membership: F,
    bbox: Roi,
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate>
where
    F: Fn(Point2) -> bool + Sync,
{
    if samples < 1000 {
        return Err(Error::invalid("samples", format!("{samples} < 1000")));
    }
    let chunks = samples.div_ceil(CHUNK);
    let (w, h) = (bbox.width(), bbox.height());
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let n = CHUNK.min(samples - chunk * CHUNK);
            (0..n)
                .filter(|_| {
                    let p = Point2::new(
                        bbox.min.x + w * rng.random::<f64>(),
                        bbox.min.y + h * rng.random::<f64>(),
                    );
                    membership(p)
                })
                .count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let box_area = bbox.area();
    Ok(AreaEstimate {
        mean: box_area * p,
        std_error: box_area * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// Sampling box for footprint ∩ polygon: the footprint's bounding box clipped
/// to the polygon's. `None` when the boxes do not overlap.
pub fn intersection_sampling_box(sector: &AnnularSector, polygon: &ConvexPolygon) -> Option<Roi> {
    let (flo, fhi) = sector.bounding_box();
    let (plo, phi) = polygon.bounding_box();
    Roi::new(flo, fhi)
        .ok()?
        .intersect(&Roi::new(plo, phi).ok()?)
}

/// Monte Carlo estimate of `area(sector ∩ polygon)` using only point
/// predicates: [`covers_point`] and half-plane membership.
pub fn monte_carlo_intersection_area(
    sector: &AnnularSector,
    polygon: &ConvexPolygon,
    samples: u64,
    seed: u64,
) -> Result<AreaEstimate> {
    match intersection_sampling_box(sector, polygon) {
        None => Ok(AreaEstimate::zero(samples)),
        Some(bbox) => monte_carlo_area(
            |p| covers_point(sector, p) && polygon.contains(p),
            bbox,
            samples,
            seed,
        ),
    }
}

/// One orientation re-evaluated by the brute-force oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCandidate {
    pub vertex_index: Option<usize>,
    pub direction: f64,
    pub area: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteForceReport {
    /// Best cell-vertex direction, `None` when the cell offers no usable vertex.
    pub best_vertex: Option<OracleCandidate>,
    /// Best direction on a uniform angular grid.
    pub best_dense: OracleCandidate,
    /// `best_dense.area − best_vertex.area` (vertex area 0 when absent).
    pub gap: f64,
}

/// Re-evaluates every vertex direction and a dense grid of
/// `angular_resolution` directions. Vertex ties go to the smaller direction
/// angle, then the lower vertex index.
pub fn brute_force_best_vertex(
    sensor: &Sensor,
    cell: &VoronoiCell,
    model: ModelKind,
    shift: f64,
    angular_resolution: usize,
) -> Result<BruteForceReport> {
    if angular_resolution < 360 {
        return Err(Error::invalid(
            "angular_resolution",
            format!("{angular_resolution} < 360"),
        ));
    }
    let mut best_vertex: Option<OracleCandidate> = None;
    for (k, v) in cell.vertices().iter().enumerate() {
        let d = *v - sensor.nominal;
        if d.norm() < 1e-9 {
            continue;
        }
        let direction = d.angle();
        let (_, area) = evaluate_candidate(sensor, cell, direction, model, shift)?;
        let cand = OracleCandidate {
            vertex_index: Some(k),
            direction,
            area,
        };
        let better = match best_vertex {
            None => true,
            Some(b) => area > b.area || (area == b.area && direction < b.direction),
        };
        if better {
            best_vertex = Some(cand);
        }
    }
    let mut best_dense = OracleCandidate {
        vertex_index: None,
        direction: 0.0,
        area: f64::NEG_INFINITY,
    };
    for k in 0..angular_resolution {
        let direction = -PI + TAU * (k as f64 + 1.0) / angular_resolution as f64;
        let (_, area) = evaluate_candidate(sensor, cell, direction, model, shift)?;
        if area > best_dense.area {
            best_dense = OracleCandidate {
                vertex_index: None,
                direction,
                area,
            };
        }
    }
    let gap = best_dense.area - best_vertex.map_or(0.0, |b| b.area);
    Ok(BruteForceReport {
        best_vertex,
        best_dense,
        gap,
    })
}

/// Smallest pilot-estimated fraction of the sampling box a fixture must
/// fill, so that 10⁶ samples resolve its area to well under 1%.
pub const MIN_FILL: f64 = 0.25;

const PILOT_SAMPLES: u64 = 10_000;

/// A footprint and a convex polygon overlapping it.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaFixture {
    pub sector: AnnularSector,
    pub polygon: ConvexPolygon,
}

fn hull(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && (lower[lower.len() - 1] - lower[lower.len() - 2]).cross(p - lower[lower.len() - 1])
                <= 0.0
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && (upper[upper.len() - 1] - upper[upper.len() - 2]).cross(p - upper[upper.len() - 1])
                <= 0.0
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

fn candidate_fixture(rng: &mut ChaCha8Rng) -> Result<AreaFixture> {
    let apex = Point2::new(
        rng.random_range(-100.0..100.0),
        rng.random_range(-100.0..100.0),
    );
    let r_inner = if rng.random_bool(0.2) {
        0.0
    } else {
        rng.random_range(1.0..50.0)
    };
    let r_outer = r_inner + rng.random_range(5.0..150.0);
    let theta_h = if rng.random_bool(0.1) {
        TAU
    } else {
        rng.random_range(0.05..TAU)
    };
    let sector = AnnularSector::new(apex, r_inner, r_outer, theta_h, rng.random_range(-PI..PI))?;
    // Polygon around a point of the footprint, sized like the footprint.
    let bearing = sector.orientation() + rng.random_range(-1.0..1.0) * sector.half_angle();
    let center = apex + Point2::from_angle(bearing) * rng.random_range(r_inner..r_outer);
    let k = rng.random_range(3..=10);
    let pts: Vec<Point2> = (0..k)
        .map(|_| {
            center
                + Point2::from_angle(rng.random_range(-PI..PI))
                    * (r_outer * rng.random_range(0.3..1.5))
        })
        .collect();
    let polygon = ConvexPolygon::from_vertices(hull(pts))?;
    Ok(AreaFixture { sector, polygon })
}

/// `count` random fixtures whose pilot Monte Carlo fill is at least
/// [`MIN_FILL`]. The pilot uses its own random streams.
pub fn area_fixtures(count: usize, seed: u64) -> Result<Vec<AreaFixture>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut pilot_stream = 0u64;
    while out.len() < count {
        let Ok(f) = candidate_fixture(&mut rng) else {
            continue;
        };
        let Some(bbox) = intersection_sampling_box(&f.sector, &f.polygon) else {
            continue;
        };
        pilot_stream += 1;
        let pilot = monte_carlo_intersection_area(
            &f.sector,
            &f.polygon,
            PILOT_SAMPLES,
            seed ^ (pilot_stream << 32),
        )?;
        if pilot.mean >= MIN_FILL * bbox.area() {
            out.push(f);
        }
    }
    Ok(out)
}

/// `count` fixtures whose footprint lies well inside the polygon; half of
/// them have no hole.
pub fn contained_fixtures(count: usize, seed: u64) -> Result<Vec<AreaFixture>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|k| {
            let apex = Point2::new(
                rng.random_range(-100.0..100.0),
                rng.random_range(-100.0..100.0),
            );
            let r_inner = if k % 2 == 0 {
                0.0
            } else {
                rng.random_range(1.0..50.0)
            };
            let r_outer = r_inner + rng.random_range(5.0..150.0);
            let sector = AnnularSector::new(
                apex,
                r_inner,
                r_outer,
                rng.random_range(0.05..TAU),
                rng.random_range(-PI..PI),
            )?;
            let (lo, hi) = sector.bounding_box();
            let pad = |rng: &mut ChaCha8Rng| rng.random_range(1.0..20.0);
            let min = Point2::new(lo.x - pad(&mut rng), lo.y - pad(&mut rng));
            let max = Point2::new(hi.x + pad(&mut rng), hi.y + pad(&mut rng));
            Ok(AreaFixture {
                sector,
                polygon: ConvexPolygon::rectangle(min, max)?,
            })
        })
        .collect()
}

/// Outcome of comparing one area value against a Monte Carlo estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaCheck {
    pub value: f64,
    pub estimate: AreaEstimate,
    /// `|value − mean|` in standard errors.
    pub z_score: f64,
    /// `|value − mean| / |value|` (0 when both vanish).
    pub relative_error: f64,
}

impl AreaCheck {
    pub fn new(value: f64, estimate: AreaEstimate) -> Self {
        let diff = (value - estimate.mean).abs();
        let relative_error = if diff == 0.0 { 0.0 } else { diff / value.abs() };
        AreaCheck {
            value,
            estimate,
            z_score: estimate.z_score(value),
            relative_error,
        }
    }

    /// `|value − mean| ≤ z·SE + rel·|value|`.
    pub fn within(&self, z: f64, rel: f64) -> bool {
        (self.value - self.estimate.mean).abs()
            <= z * self.estimate.std_error + rel * self.value.abs()
    }
}

/// The exact engine's area for `fixture` checked against `samples` Monte
/// Carlo samples.
pub fn check_fixture_area(fixture: &AreaFixture, samples: u64, seed: u64) -> Result<AreaCheck> {
    let value = sector_polygon_intersection_area(&fixture.sector, &fixture.polygon);
    let estimate = monte_carlo_intersection_area(&fixture.sector, &fixture.polygon, samples, seed)?;
    Ok(AreaCheck::new(value, estimate))
}
