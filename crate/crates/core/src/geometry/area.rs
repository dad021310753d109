use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::sector::{annular_sector_area, AnnularSector, Side};
use super::{ConvexPolygon, HalfPlane, Point2, EPS};
use crate::error::{Error, Result};

/// Triangle area from its three edge lengths (Heron's formula, evaluated in
/// Kahan's cancellation-free ordering). Roundoff-negative radicands clamp to 0.
pub fn triangle_area_heron(e1: f64, e2: f64, e3: f64) -> Result<f64> {
    if !(e1.is_finite() && e2.is_finite() && e3.is_finite()) {
        return Err(Error::NonFinite("triangle edge"));
    }
    if e1 < 0.0 || e2 < 0.0 || e3 < 0.0 {
        return Err(Error::TriangleInequality(e1, e2, e3));
    }
    let mut e = [e1, e2, e3];
    e.sort_by(|a, b| b.total_cmp(a));
    let [a, b, c] = e;
    if a > b + c + EPS * a.max(1.0) {
        return Err(Error::TriangleInequality(e1, e2, e3));
    }
    let radicand = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    Ok(0.25 * radicand.max(0.0).sqrt())
}

/// Area between a chord and its arc, `(r²/2)(φ − sin φ)` for subtended
/// angle `φ ∈ [0, 2π]`.
pub fn circular_segment_area(radius: f64, subtended_angle: f64) -> f64 {
    0.5 * radius * radius * (subtended_angle - subtended_angle.sin())
}

/// Points of segment `[a, b]` at distance `radius` from `center`, ordered
/// from `a` towards `b`. A tangent contact yields a single point.
pub fn segment_circle_intersections(
    a: Point2,
    b: Point2,
    center: Point2,
    radius: f64,
) -> Vec<Point2> {
    let e = b - a;
    let len_sq = e.norm_sq();
    if len_sq == 0.0 {
        return Vec::new();
    }
    let len = len_sq.sqrt();
    let f = a - center;
    let t0 = -f.dot(e) / len_sq;
    let foot = f + e * t0;
    let h = foot.norm();
    let t_tol = EPS / len;
    let in_range = |t: f64| t >= -t_tol && t <= 1.0 + t_tol;
    if h > radius + EPS {
        return Vec::new();
    }
    if (h - radius).abs() <= EPS {
        return if in_range(t0) {
            vec![a + e * t0.clamp(0.0, 1.0)]
        } else {
            Vec::new()
        };
    }
    let half_chord = (radius * radius - h * h).max(0.0).sqrt() / len;
    [t0 - half_chord, t0 + half_chord]
        .into_iter()
        .filter(|&t| in_range(t))
        .map(|t| a + e * t.clamp(0.0, 1.0))
        .collect()
}

/// Where segment `[a, b]` meets one straight side of the sector (the part of
/// the sideline ray between `r_inner` and `r_outer`). A collinear overlap
/// resolves to its point nearest the apex.
pub fn segment_sideline_intersection(
    a: Point2,
    b: Point2,
    sector: &AnnularSector,
    side: Side,
) -> Option<Point2> {
    ray_crossing(
        a,
        b,
        sector.apex(),
        sector.side_direction(side),
        sector.r_inner(),
        sector.r_outer(),
    )
    .map(|(p, _)| p)
}

/// Crossing of `[a, b]` with `origin + s·w` for `s ∈ [s_min, s_max]`,
/// returned with its ray parameter.
fn ray_crossing(
    a: Point2,
    b: Point2,
    origin: Point2,
    w: Point2,
    s_min: f64,
    s_max: f64,
) -> Option<(Point2, f64)> {
    let e = b - a;
    let len = e.norm();
    if len == 0.0 {
        return None;
    }
    let d = a - origin;
    let denom = w.cross(e);
    if denom.abs() <= EPS * len {
        if d.cross(w).abs() > EPS {
            return None;
        }
        let (sa, sb) = (d.dot(w), (b - origin).dot(w));
        let (near_s, near_p) = if sa <= sb { (sa, a) } else { (sb, b) };
        let lo = near_s.max(s_min);
        let hi = sa.max(sb).min(s_max);
        if lo > hi + EPS {
            return None;
        }
        return Some(if lo == near_s {
            (near_p, near_s)
        } else {
            (origin + w * lo, lo)
        });
    }
    let s = d.cross(e) / denom;
    let t = d.cross(w) / denom;
    let t_tol = EPS / len;
    if t < -t_tol || t > 1.0 + t_tol || s < s_min - EPS || s > s_max + EPS {
        return None;
    }
    Some((a + e * t.clamp(0.0, 1.0), s))
}

/// The seven footprint/cell configurations, named by which boundary elements
/// of the footprint the cell's edges cross.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[repr(u8)]
pub enum IntersectionCase {
    /// Footprint lies entirely inside the cell.
    Contained = 1,
    /// Edges cross the outer arc and a sideline (or the outer arc alone).
    OuterArcAndSideline = 2,
    /// Edges cross the inner arc and a sideline (or the inner arc alone).
    InnerArcAndSideline = 3,
    /// Only sidelines are crossed, by edges approaching from the apex side.
    SidelinesFromInside = 4,
    /// Only sidelines are crossed, by edges arriving from beyond the outer radius.
    SidelinesFromOutside = 5,
    /// Both arcs are crossed.
    BothArcs = 6,
    /// No boundary element is crossed and the footprint is not inside the
    /// cell: disjoint, or the cell sits in the annulus hole or inside the band.
    NoBoundaryContact = 7,
}

impl IntersectionCase {
    pub fn id(self) -> u8 {
        self as u8
    }
}

/// Boundary-crossing points gathered while classifying.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryHits {
    pub outer_arc: Vec<Point2>,
    pub inner_arc: Vec<Point2>,
    pub sidelines: Vec<Point2>,
}

impl BoundaryHits {
    pub fn collect(sector: &AnnularSector, cell: &ConvexPolygon) -> BoundaryHits {
        let mut hits = BoundaryHits::default();
        let verts = cell.vertices();
        let n = verts.len();
        for i in 0..n {
            let (a, b) = (verts[i], verts[(i + 1) % n]);
            let apex = sector.apex();
            for p in segment_circle_intersections(a, b, apex, sector.r_outer()) {
                if sector.bearing_within(p - apex) {
                    hits.outer_arc.push(p);
                }
            }
            if sector.has_inner_arc() {
                for p in segment_circle_intersections(a, b, apex, sector.r_inner()) {
                    if sector.bearing_within(p - apex) {
                        hits.inner_arc.push(p);
                    }
                }
            }
            if !sector.is_full() {
                for side in [Side::Plus, Side::Minus] {
                    if let Some(p) = segment_sideline_intersection(a, b, sector, side) {
                        hits.sidelines.push(p);
                    }
                }
            }
        }
        hits
    }

    pub fn is_empty(&self) -> bool {
        self.outer_arc.is_empty() && self.inner_arc.is_empty() && self.sidelines.is_empty()
    }
}

/// True when every half-plane of the cell contains the whole footprint.
fn footprint_inside(sector: &AnnularSector, cell: &ConvexPolygon) -> bool {
    cell.halfplanes()
        .iter()
        .all(|h| sector.support(h.normal) <= h.offset + EPS)
}

/// Labels the footprint/cell configuration. Purely diagnostic: areas come from
/// [`sector_polygon_intersection_area`] regardless of the case.
///
/// When only sidelines are crossed, the case is 5 if some cell edge meets a
/// sideline's supporting ray beyond the outer radius and 4 otherwise.
pub fn classify_intersection_case(
    sector: &AnnularSector,
    cell: &ConvexPolygon,
) -> IntersectionCase {
    if footprint_inside(sector, cell) {
        return IntersectionCase::Contained;
    }
    let hits = BoundaryHits::collect(sector, cell);
    let outer = !hits.outer_arc.is_empty();
    let inner = !hits.inner_arc.is_empty();
    match (outer, inner, hits.sidelines.is_empty()) {
        (true, true, _) => IntersectionCase::BothArcs,
        (true, false, _) => IntersectionCase::OuterArcAndSideline,
        (false, true, _) => IntersectionCase::InnerArcAndSideline,
        (false, false, true) => IntersectionCase::NoBoundaryContact,
        (false, false, false) => {
            let verts = cell.vertices();
            let n = verts.len();
            let beyond = (0..n).any(|i| {
                [Side::Plus, Side::Minus].into_iter().any(|side| {
                    ray_crossing(
                        verts[i],
                        verts[(i + 1) % n],
                        sector.apex(),
                        sector.side_direction(side),
                        sector.r_outer() + EPS,
                        f64::INFINITY,
                    )
                    .is_some()
                })
            });
            if beyond {
                IntersectionCase::SidelinesFromOutside
            } else {
                IntersectionCase::SidelinesFromInside
            }
        }
    }
}

/// A boundary piece of a closed curve, in apex-relative coordinates.
#[derive(Debug, Clone, Copy)]
enum Piece {
    Segment {
        from: Point2,
        to: Point2,
    },
    /// Arc centered at the origin, from angle `start` sweeping `sweep`
    /// radians (negative = clockwise).
    Arc {
        radius: f64,
        start: f64,
        sweep: f64,
    },
}

impl Piece {
    fn start_point(&self) -> Point2 {
        match *self {
            Piece::Segment { from, .. } => from,
            Piece::Arc { radius, start, .. } => Point2::from_angle(start) * radius,
        }
    }

    fn end_point(&self) -> Point2 {
        match *self {
            Piece::Segment { to, .. } => to,
            Piece::Arc {
                radius,
                start,
                sweep,
            } => Point2::from_angle(start + sweep) * radius,
        }
    }

    fn point_at(&self, t: f64) -> Point2 {
        match *self {
            Piece::Segment { from, to } => from.lerp(to, t),
            Piece::Arc {
                radius,
                start,
                sweep,
            } => Point2::from_angle(start + t * sweep) * radius,
        }
    }

    fn sub(&self, t0: f64, t1: f64) -> Piece {
        match *self {
            Piece::Segment { .. } => Piece::Segment {
                from: self.point_at(t0),
                to: self.point_at(t1),
            },
            Piece::Arc {
                radius,
                start,
                sweep,
            } => Piece::Arc {
                radius,
                start: start + t0 * sweep,
                sweep: (t1 - t0) * sweep,
            },
        }
    }

    /// Parameters in (0, 1) where the piece crosses the line `n · x = b`.
    fn crossings(&self, h: &HalfPlane) -> Vec<f64> {
        match *self {
            Piece::Segment { from, to } => {
                let f0 = h.normal.dot(from) - h.offset;
                let f1 = h.normal.dot(to) - h.offset;
                if (f0 < 0.0 && f1 > 0.0) || (f0 > 0.0 && f1 < 0.0) {
                    vec![f0 / (f0 - f1)]
                } else {
                    Vec::new()
                }
            }
            Piece::Arc {
                radius,
                start,
                sweep,
            } => {
                let k = h.offset / radius;
                if k.abs() >= 1.0 {
                    return Vec::new();
                }
                let psi = h.normal.angle();
                let delta = k.acos();
                let span = sweep.abs();
                let mut ts: Vec<f64> = [psi + delta, psi - delta]
                    .into_iter()
                    .map(|phi| ((phi - start) * sweep.signum()).rem_euclid(TAU) / span)
                    .filter(|&t| t > 0.0 && t < 1.0)
                    .collect();
                ts.sort_by(f64::total_cmp);
                ts
            }
        }
    }

    /// Contribution to `½∮(x dy − y dx)`: the chord's shoelace term plus the
    /// signed circular-segment correction for arcs.
    fn area_term(&self) -> f64 {
        let chord = 0.5 * self.start_point().cross(self.end_point());
        match *self {
            Piece::Segment { .. } => chord,
            Piece::Arc { radius, sweep, .. } => {
                chord + sweep.signum() * circular_segment_area(radius, sweep.abs())
            }
        }
    }
}

/// Closed boundary loops of the footprint with its apex at the origin.
fn footprint_loops(sector: &AnnularSector) -> Vec<Vec<Piece>> {
    let (r, big_r) = (sector.r_inner(), sector.r_outer());
    let beta = sector.orientation();
    if sector.is_full() {
        let mut loops = vec![vec![Piece::Arc {
            radius: big_r,
            start: beta,
            sweep: TAU,
        }]];
        if sector.has_inner_arc() {
            loops.push(vec![Piece::Arc {
                radius: r,
                start: beta,
                sweep: -TAU,
            }]);
        }
        return loops;
    }
    let h = sector.half_angle();
    let plus = Point2::from_angle(beta + h);
    let minus = Point2::from_angle(beta - h);
    let mut ring = vec![
        Piece::Arc {
            radius: big_r,
            start: beta - h,
            sweep: 2.0 * h,
        },
        Piece::Segment {
            from: plus * big_r,
            to: plus * r,
        },
    ];
    if sector.has_inner_arc() {
        ring.push(Piece::Arc {
            radius: r,
            start: beta + h,
            sweep: -2.0 * h,
        });
        ring.push(Piece::Segment {
            from: minus * r,
            to: minus * big_r,
        });
    } else {
        ring.push(Piece::Segment {
            from: Point2::ORIGIN,
            to: minus * big_r,
        });
    }
    vec![ring]
}

/// Keeps the parts of a closed curve inside `h`, bridging each exit to the
/// next entry along the clip line. The winding number of the result agrees
/// with the input inside `h` and vanishes outside, so its signed area is the
/// area of (region ∩ h) even for the non-convex annular sector.
fn clip_loop(ring: &[Piece], h: &HalfPlane) -> Vec<Piece> {
    let mut kept: Vec<Piece> = Vec::new();
    for piece in ring {
        let mut cuts = vec![0.0];
        cuts.extend(piece.crossings(h));
        cuts.push(1.0);
        for w in cuts.windows(2) {
            if w[1] - w[0] <= 0.0 {
                continue;
            }
            let sub = piece.sub(w[0], w[1]);
            if h.slack(sub.point_at(0.5)) >= -EPS {
                kept.push(sub);
            }
        }
    }
    if kept.is_empty() {
        return kept;
    }
    let mut out = Vec::with_capacity(kept.len() * 2);
    for i in 0..kept.len() {
        out.push(kept[i]);
        let end = kept[i].end_point();
        let next = kept[(i + 1) % kept.len()].start_point();
        if end.distance(next) > 1e-12 {
            out.push(Piece::Segment {
                from: end,
                to: next,
            });
        }
    }
    out
}

/// Exact area of footprint ∩ cell.
///
/// The footprint boundary (two arcs and two radial sides, or two full circles
/// for θ_H = 2π) is clipped against each half-plane of the cell; the area is
/// then the shoelace sum over chords plus circular-segment corrections for
/// the surviving arc pieces.
pub fn sector_polygon_intersection_area(sector: &AnnularSector, cell: &ConvexPolygon) -> f64 {
    let apex = sector.apex();
    let mut active: Vec<HalfPlane> = Vec::new();
    for h in cell.halfplanes() {
        if sector.support(h.normal) <= h.offset + EPS {
            continue;
        }
        // Minimum of n·x over the footprint already beyond the line.
        if -sector.support(-h.normal) > h.offset {
            return 0.0;
        }
        active.push(h.translated(apex));
    }
    let full = annular_sector_area(sector);
    if active.is_empty() {
        return full;
    }
    let hole_sq = sector.r_inner() * sector.r_inner();
    if cell
        .vertices()
        .iter()
        .all(|v| (*v - apex).norm_sq() <= hole_sq)
    {
        return 0.0;
    }
    let mut loops = footprint_loops(sector);
    for h in &active {
        for ring in loops.iter_mut() {
            *ring = clip_loop(ring, h);
        }
        loops.retain(|ring| !ring.is_empty());
        if loops.is_empty() {
            return 0.0;
        }
    }
    let area: f64 = loops
        .iter()
        .flat_map(|ring| ring.iter())
        .map(Piece::area_term)
        .sum();
    area.max(0.0).min(full).min(cell.area())
}
