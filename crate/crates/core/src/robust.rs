//! Location uncertainty: uncertainty balls, worst-case displacement, and the
//! radius of robust feasibility (RRF) of each sensor's nominal position.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HalfPlane, Point2, EPS};
use crate::voronoi::{Boundary, CellEdge};

/// The closed disc of possible true positions around a nominal position.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyBall {
    pub center: Point2,
    pub radius: f64,
}

impl UncertaintyBall {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(Error::NonFinite("uncertainty ball"));
        }
        if radius < 0.0 {
            return Err(Error::invalid("radius", format!("{radius} < 0")));
        }
        Ok(UncertaintyBall { center, radius })
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.center.distance(p) <= self.radius + EPS
    }

    /// Point of the boundary circle at angle `theta`.
    pub fn boundary_point(&self, theta: f64) -> Point2 {
        self.center + Point2::from_angle(theta) * self.radius
    }
}

/// `nominal + shift · direction / |direction|`.
///
/// ```
/// use rrfcov::geometry::Point2;
/// use rrfcov::robust::worst_case_location;
/// let p = worst_case_location(Point2::new(0.0, 0.0), Point2::new(3.0, 4.0), 5.0).unwrap();
/// assert!((p.x - 3.0).abs() < 1e-12 && (p.y - 4.0).abs() < 1e-12);
/// ```
pub fn worst_case_location(nominal: Point2, direction: Point2, shift: f64) -> Result<Point2> {
    if !nominal.is_finite() || !direction.is_finite() || !shift.is_finite() {
        return Err(Error::NonFinite("displacement"));
    }
    if shift < 0.0 {
        return Err(Error::invalid("shift", format!("{shift} < 0")));
    }
    let len = direction.norm();
    if len == 0.0 {
        return Err(Error::ZeroDirection);
    }
    Ok(nominal + direction * (shift / len))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RrfReport {
    pub sensor: usize,
    pub rrf: f64,
    /// The constraint attaining the minimum slack (first one on ties).
    pub binding_constraint: Boundary,
    /// Normalized slack of every constraint, in input order.
    pub slacks: Vec<f64>,
}

/// RRF of a nominal location against unit-normal constraints: the minimum
/// slack `b_i − a_i · nominal`, i.e. the distance to the nearest constraint
/// line.
pub fn sensor_rrf(sensor: usize, nominal: Point2, constraints: &[CellEdge]) -> Result<RrfReport> {
    if !nominal.is_finite() {
        return Err(Error::NonFinite("nominal location"));
    }
    if constraints.is_empty() {
        return Err(Error::invalid(
            "constraints",
            "no half-planes bound the location",
        ));
    }
    let slacks: Vec<f64> = constraints
        .iter()
        .map(|c| c.halfplane.slack(nominal))
        .collect();
    let mut best = 0;
    for (i, s) in slacks.iter().enumerate() {
        if *s < -EPS {
            return Err(Error::InfeasibleNominal {
                sensor,
                constraint: i,
                violation: -s,
            });
        }
        if *s < slacks[best] {
            best = i;
        }
    }
    Ok(RrfReport {
        sensor,
        rrf: slacks[best].max(0.0),
        binding_constraint: constraints[best].boundary,
        slacks,
    })
}

/// Smallest RRF in the network.
pub fn min_network_rrf(reports: &[RrfReport]) -> Result<f64> {
    reports
        .iter()
        .map(|r| r.rrf)
        .reduce(f64::min)
        .ok_or(Error::EmptyReports)
}

/// Sampling verifier for RRF values. It knows nothing about slacks: it checks
/// whether equally spaced points on the boundary of the α-ball all satisfy
/// every half-plane. The sampled check over-accepts by at most
/// `α·(1 − cos(π/n_dirs))`.
#[derive(Debug, Clone)]
pub struct RrfOracle {
    directions: Vec<Point2>,
}

impl RrfOracle {
    pub fn new(n_dirs: usize) -> Result<Self> {
        if n_dirs < 8 {
            return Err(Error::invalid("n_dirs", format!("{n_dirs} < 8")));
        }
        let directions = (0..n_dirs)
            .map(|k| Point2::from_angle(TAU * k as f64 / n_dirs as f64))
            .collect();
        Ok(RrfOracle { directions })
    }

    pub fn admits(&self, nominal: Point2, halfplanes: &[HalfPlane], alpha: f64) -> bool {
        self.directions
            .iter()
            .all(|u| halfplanes.iter().all(|h| h.contains(nominal + *u * alpha)))
    }

    /// Bisection for the largest admitted α in `[0, upper]`, to within `tol`.
    /// Returns the midpoint of the final bracket.
    pub fn bisect(&self, nominal: Point2, halfplanes: &[HalfPlane], upper: f64, tol: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, upper);
        if self.admits(nominal, halfplanes, hi) {
            return hi;
        }
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if self.admits(nominal, halfplanes, mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// One-shot form of [`RrfOracle::admits`].
pub fn rrf_oracle(
    nominal: Point2,
    halfplanes: &[HalfPlane],
    alpha: f64,
    n_dirs: usize,
) -> Result<bool> {
    Ok(RrfOracle::new(n_dirs)?.admits(nominal, halfplanes, alpha))
}
