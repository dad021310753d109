use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{wrap_angle, Point2, EPS};
use crate::error::{Error, Result};

/// Which sideline of a sector: `Plus` sits at `orientation + half_angle`,
/// `Minus` at `orientation - half_angle`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Plus,
    Minus,
}

/// Ground footprint of a directional sensor: all points whose distance from
/// the apex lies in `[r_inner, r_outer]` and whose bearing is within
/// `half_angle` of `orientation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnularSector {
    apex: Point2,
    r_inner: f64,
    r_outer: f64,
    half_angle: f64,
    orientation: f64,
    axis: Point2,
    cos_half: f64,
}

impl AnnularSector {
    /// `theta_h` is the full angular width of the footprint, in `(0, 2π]`.
    pub fn new(
        apex: Point2,
        r_inner: f64,
        r_outer: f64,
        theta_h: f64,
        orientation: f64,
    ) -> Result<Self> {
        if !apex.is_finite() {
            return Err(Error::NonFinite("sector apex"));
        }
        if !(r_inner.is_finite()
            && r_outer.is_finite()
            && theta_h.is_finite()
            && orientation.is_finite())
        {
            return Err(Error::NonFinite("sector parameters"));
        }
        if r_inner < 0.0 || r_inner >= r_outer {
            return Err(Error::invalid(
                "radii",
                format!("need 0 <= r_inner < r_outer, got {r_inner} and {r_outer}"),
            ));
        }
        if theta_h <= 0.0 || theta_h > TAU + 1e-12 {
            return Err(Error::invalid(
                "theta_h",
                format!("{theta_h} is outside (0, 2π]"),
            ));
        }
        let half_angle = (theta_h / 2.0).min(PI);
        let orientation = wrap_angle(orientation);
        Ok(AnnularSector {
            apex,
            r_inner,
            r_outer,
            half_angle,
            orientation,
            axis: Point2::from_angle(orientation),
            cos_half: half_angle.cos(),
        })
    }

    pub fn apex(&self) -> Point2 {
        self.apex
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    pub fn half_angle(&self) -> f64 {
        self.half_angle
    }

    pub fn theta_h(&self) -> f64 {
        2.0 * self.half_angle
    }

    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    /// Unit vector along the orientation.
    pub fn axis(&self) -> Point2 {
        self.axis
    }

    /// A full annulus (or disc) has no sidelines.
    pub fn is_full(&self) -> bool {
        self.half_angle >= PI
    }

    pub fn has_inner_arc(&self) -> bool {
        self.r_inner > EPS
    }

    pub fn side_angle(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.orientation + self.half_angle,
            Side::Minus => self.orientation - self.half_angle,
        }
    }

    pub fn side_direction(&self, side: Side) -> Point2 {
        Point2::from_angle(self.side_angle(side))
    }

    /// Same sector moved to a new apex.
    pub fn with_apex(&self, apex: Point2) -> AnnularSector {
        AnnularSector { apex, ..*self }
    }

    /// True when the bearing of the non-zero vector `d` lies within the
    /// angular window, boundaries inclusive.
    pub(crate) fn bearing_within(&self, d: Point2) -> bool {
        if self.is_full() {
            return true;
        }
        let dist = d.norm();
        if dist <= EPS {
            return true;
        }
        if d.dot(self.axis) >= dist * self.cos_half {
            return true;
        }
        // Within EPS of either sideline ray.
        [Side::Plus, Side::Minus].into_iter().any(|side| {
            let w = self.side_direction(side);
            d.dot(w) >= 0.0 && d.cross(w).abs() <= EPS
        })
    }

    /// Largest value of `n · x` over the footprint.
    pub fn support(&self, n: Point2) -> f64 {
        let base = n.dot(self.apex);
        let len = n.norm();
        if self.is_full() || (len > 0.0 && self.bearing_within(n)) {
            return base + self.r_outer * len;
        }
        let mut best = f64::NEG_INFINITY;
        for side in [Side::Plus, Side::Minus] {
            let w = self.side_direction(side);
            let along = n.dot(w);
            best = best.max(along * self.r_inner).max(along * self.r_outer);
        }
        base + best
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let max_x = self.support(Point2::new(1.0, 0.0));
        let min_x = -self.support(Point2::new(-1.0, 0.0));
        let max_y = self.support(Point2::new(0.0, 1.0));
        let min_y = -self.support(Point2::new(0.0, -1.0));
        (Point2::new(min_x, min_y), Point2::new(max_x, max_y))
    }

    pub fn area(&self) -> f64 {
        annular_sector_area(self)
    }
}

/// Coverage test for a single ground point. Boundaries are inclusive; the
/// apex itself is covered only when the inner radius is zero.
pub fn covers_point(sector: &AnnularSector, p: Point2) -> bool {
    let d = p - sector.apex;
    let dist = d.norm();
    if dist < sector.r_inner - EPS || dist > sector.r_outer + EPS {
        return false;
    }
    if dist <= EPS {
        return sector.r_inner <= EPS;
    }
    sector.bearing_within(d)
}

/// Area of the annular sector, `(θ_H / 2)(R² − r²)`.
pub fn annular_sector_area(sector: &AnnularSector) -> f64 {
    sector.half_angle * (sector.r_outer * sector.r_outer - sector.r_inner * sector.r_inner)
}

/// `(θ_H / 2)(R − r)²`: the closed form as printed for the uncut footprint.
/// Kept only so the validation suite can show that it disagrees with sampling.
pub fn width_squared_sector_area(sector: &AnnularSector) -> f64 {
    let width = sector.r_outer - sector.r_inner;
    sector.half_angle * width * width
}
