//! Planar primitives: points, half-planes, annular sectors, convex polygons,
//! and the exact sector/polygon intersection-area engine.

mod area;
mod polygon;
mod sector;

use std::f64::consts::{PI, TAU};
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use area::{
    circular_segment_area, classify_intersection_case, sector_polygon_intersection_area,
    segment_circle_intersections, segment_sideline_intersection, triangle_area_heron, BoundaryHits,
    IntersectionCase,
};
pub(crate) use polygon::tidy_labeled_ring as tidy_ring;
pub use polygon::ConvexPolygon;
pub use sector::{
    annular_sector_area, covers_point, width_squared_sector_area, AnnularSector, Side,
};

/// Absolute tolerance for geometric predicates, in ground units. Points within
/// this distance of a boundary count as lying on it.
pub const EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Unit vector at angle `theta` from the positive x-axis.
    pub fn from_angle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Point2 { x: c, y: s }
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3-D cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Angle from the positive x-axis, in (−π, π].
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn lerp(self, other: Point2, t: f64) -> Point2 {
        self + (other - self) * t
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Reduce an angle to the half-open interval (−π, π].
///
/// ```
/// use rrfcov::geometry::normalize_angle;
/// use std::f64::consts::PI;
/// assert_eq!(normalize_angle(3.0 * PI).unwrap(), PI);
/// assert!((normalize_angle(-1.5 * PI).unwrap() - PI / 2.0).abs() < 1e-15);
/// ```
pub fn normalize_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap_angle(theta))
}

/// Infallible form of [`normalize_angle`] for values already known finite.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// The closed half-plane `normal · x <= offset` with a unit-length normal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub normal: Point2,
    pub offset: f64,
}

impl HalfPlane {
    /// Builds `normal · x <= offset`, rescaling so the normal has unit length.
    pub fn new(normal: Point2, offset: f64) -> Result<Self> {
        let len = normal.norm();
        if !len.is_finite() || !offset.is_finite() {
            return Err(Error::NonFinite("half-plane"));
        }
        if len == 0.0 {
            return Err(Error::ZeroDirection);
        }
        Ok(HalfPlane {
            normal: normal * (1.0 / len),
            offset: offset / len,
        })
    }

    /// Signed distance from `p` to the boundary line, positive inside.
    pub fn slack(&self, p: Point2) -> f64 {
        self.offset - self.normal.dot(p)
    }

    pub fn contains(&self, p: Point2) -> bool {
        self.slack(p) >= -EPS
    }

    /// The same half-plane expressed in coordinates shifted by `-origin`.
    pub fn translated(&self, origin: Point2) -> HalfPlane {
        HalfPlane {
            normal: self.normal,
            offset: self.offset - self.normal.dot(origin),
        }
    }

    pub fn flipped(&self) -> HalfPlane {
        HalfPlane {
            normal: -self.normal,
            offset: -self.offset,
        }
    }
}
