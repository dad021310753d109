use serde::{Deserialize, Serialize};

use super::{HalfPlane, Point2, EPS};
use crate::error::{Error, Result};

/// Counter-clockwise convex polygon together with one supporting half-plane
/// per edge. Edge `i` runs from `vertices[i]` to `vertices[i + 1]` and lies on
/// the boundary of `halfplanes[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
    halfplanes: Vec<HalfPlane>,
}

impl ConvexPolygon {
    /// Builds a polygon from counter-clockwise vertices. Repeated and
    /// collinear vertices are dropped.
    pub fn from_vertices(vertices: Vec<Point2>) -> Result<Self> {
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("polygon vertex"));
        }
        let vertices = simplify_ring(vertices);
        if vertices.len() < 3 {
            return Err(Error::invalid(
                "polygon",
                "fewer than three distinct vertices",
            ));
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).cross(c - b) <= 0.0 {
                return Err(Error::invalid(
                    "polygon",
                    "vertices are not strictly convex and counter-clockwise",
                ));
            }
        }
        let halfplanes = (0..n)
            .map(|i| edge_halfplane(vertices[i], vertices[(i + 1) % n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(ConvexPolygon {
            vertices,
            halfplanes,
        })
    }

    /// Pairs vertices with caller-supplied edge half-planes; each vertex must
    /// lie on the boundaries of its two adjacent edges.
    pub fn from_parts(vertices: Vec<Point2>, halfplanes: Vec<HalfPlane>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 || halfplanes.len() != n {
            return Err(Error::invalid(
                "polygon",
                "need at least three vertices and one half-plane per edge",
            ));
        }
        let scale = vertices
            .iter()
            .fold(1.0f64, |m, v| m.max(v.x.abs()).max(v.y.abs()));
        let tol = 1e-7 * scale;
        for i in 0..n {
            let h = &halfplanes[i];
            for v in [vertices[i], vertices[(i + 1) % n]] {
                if h.slack(v).abs() > tol {
                    return Err(Error::invalid(
                        "polygon",
                        format!("vertex ({}, {}) is off edge line {i}", v.x, v.y),
                    ));
                }
            }
        }
        Ok(ConvexPolygon {
            vertices,
            halfplanes,
        })
    }

    pub fn rectangle(min: Point2, max: Point2) -> Result<Self> {
        if !(min.x < max.x && min.y < max.y) {
            return Err(Error::invalid(
                "rectangle",
                "max corner must dominate min corner",
            ));
        }
        ConvexPolygon::from_vertices(vec![
            min,
            Point2::new(max.x, min.y),
            max,
            Point2::new(min.x, max.y),
        ])
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn halfplanes(&self) -> &[HalfPlane] {
        &self.halfplanes
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        let origin = self.vertices[0];
        let twice: f64 = (1..n - 1)
            .map(|i| (self.vertices[i] - origin).cross(self.vertices[i + 1] - origin))
            .sum();
        0.5 * twice
    }

    pub fn centroid(&self) -> Point2 {
        let n = self.vertices.len();
        let origin = self.vertices[0];
        let mut acc = Point2::ORIGIN;
        let mut total = 0.0;
        for i in 1..n - 1 {
            let a = self.vertices[i] - origin;
            let b = self.vertices[i + 1] - origin;
            let w = a.cross(b);
            acc = acc + (a + b) * (w / 3.0);
            total += w;
        }
        origin + acc * (1.0 / total)
    }

    /// Closed-set membership with the global tolerance.
    pub fn contains(&self, p: Point2) -> bool {
        self.halfplanes.iter().all(|h| h.contains(p))
    }

    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = self.vertices[0];
        let mut hi = self.vertices[0];
        for v in &self.vertices[1..] {
            lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    /// Intersection with one more half-plane, or `None` when less than a
    /// sliver remains.
    pub fn clip(&self, h: &HalfPlane) -> Option<ConvexPolygon> {
        let n = self.vertices.len();
        let mut verts = Vec::with_capacity(n + 1);
        let mut planes = Vec::with_capacity(n + 1);
        for i in 0..n {
            let p = self.vertices[i];
            let q = self.vertices[(i + 1) % n];
            let sp = h.slack(p);
            let sq = h.slack(q);
            if sp >= 0.0 {
                verts.push(p);
                planes.push(self.halfplanes[i]);
                if sq < 0.0 {
                    verts.push(p.lerp(q, sp / (sp - sq)));
                    planes.push(*h);
                }
            } else if sq >= 0.0 {
                verts.push(p.lerp(q, sp / (sp - sq)));
                planes.push(self.halfplanes[i]);
            }
        }
        let (verts, planes) = tidy_labeled_ring(verts, planes);
        if verts.len() < 3 {
            return None;
        }
        let poly = ConvexPolygon {
            vertices: verts,
            halfplanes: planes,
        };
        (poly.area() > EPS).then_some(poly)
    }
}

fn edge_halfplane(a: Point2, b: Point2) -> Result<HalfPlane> {
    // Interior lies to the left of a counter-clockwise edge.
    let e = b - a;
    let normal = Point2::new(e.y, -e.x);
    HalfPlane::new(normal, normal.dot(a))
}

fn simplify_ring(mut ring: Vec<Point2>) -> Vec<Point2> {
    ring.dedup_by(|b, a| a.distance(*b) <= EPS);
    while ring.len() > 1 && ring[0].distance(ring[ring.len() - 1]) <= EPS {
        ring.pop();
    }
    let mut changed = true;
    while changed && ring.len() >= 3 {
        changed = false;
        let n = ring.len();
        for i in 0..n {
            let a = ring[(i + n - 1) % n];
            let b = ring[i];
            let c = ring[(i + 1) % n];
            let span = a.distance(c).max(EPS);
            if ((b - a).cross(c - a) / span).abs() <= EPS && (b - a).dot(c - b) >= 0.0 {
                ring.remove(i);
                changed = true;
                break;
            }
        }
    }
    ring
}

/// Drops zero-length edges from a labeled ring. The label of the edge leaving
/// a surviving vertex is kept.
pub(crate) fn tidy_labeled_ring<L: Copy>(
    verts: Vec<Point2>,
    labels: Vec<L>,
) -> (Vec<Point2>, Vec<L>) {
    let mut out_v: Vec<Point2> = Vec::with_capacity(verts.len());
    let mut out_l: Vec<L> = Vec::with_capacity(labels.len());
    for (v, l) in verts.into_iter().zip(labels) {
        if let Some(last) = out_v.last() {
            if last.distance(v) <= EPS {
                // The edge from `last` to `v` is degenerate; the edge leaving `v` survives.
                *out_l.last_mut().unwrap() = l;
                continue;
            }
        }
        out_v.push(v);
        out_l.push(l);
    }
    while out_v.len() > 1 && out_v[0].distance(out_v[out_v.len() - 1]) <= EPS {
        out_v.pop();
        out_l.pop();
    }
    (out_v, out_l)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::rectangle(Point2::new(0.0, 0.0), Point2::new(1.0, 1.0)).unwrap()
    }

    #[test]
    fn square_basics() {
        let sq = unit_square();
        assert_eq!(sq.vertices().len(), 4);
        assert!((sq.area() - 1.0).abs() < 1e-15);
        assert!(sq.contains(Point2::new(0.5, 0.5)));
        assert!(sq.contains(Point2::new(1.0, 0.5)));
        assert!(!sq.contains(Point2::new(1.1, 0.5)));
        let c = sq.centroid();
        assert!((c.x - 0.5).abs() < 1e-15 && (c.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn every_vertex_on_two_edge_lines() {
        let sq = unit_square();
        let n = sq.vertices().len();
        for (i, v) in sq.vertices().iter().enumerate() {
            let on: Vec<usize> = (0..n)
                .filter(|&k| sq.halfplanes()[k].slack(*v).abs() <= EPS)
                .collect();
            assert_eq!(on, {
                let mut e = vec![(i + n - 1) % n, i];
                e.sort();
                e
            });
        }
    }

    #[test]
    fn rejects_clockwise_and_degenerate() {
        let cw = vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ];
        assert!(ConvexPolygon::from_vertices(cw).is_err());
        let line = vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(ConvexPolygon::from_vertices(line).is_err());
    }

    #[test]
    fn collinear_vertex_is_dropped() {
        let p = ConvexPolygon::from_vertices(vec![
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap();
        assert_eq!(p.vertices().len(), 4);
    }

    #[test]
    fn clip_halves_square() {
        let h = HalfPlane::new(Point2::new(1.0, 0.0), 0.5).unwrap();
        let half = unit_square().clip(&h).unwrap();
        assert!((half.area() - 0.5).abs() < 1e-15);
        assert_eq!(half.vertices().len(), 4);
        let away = HalfPlane::new(Point2::new(1.0, 0.0), -0.5).unwrap();
        assert!(unit_square().clip(&away).is_none());
    }
}
