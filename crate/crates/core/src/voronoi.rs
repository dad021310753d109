//! Voronoi partition of sensor sites, clipped to a rectangular region of
//! interest. Each cell is built directly by clipping the region against the
//! perpendicular bisectors toward the other sites, nearest first.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, HalfPlane, Point2, EPS};

/// Minimum separation between two sites.
pub const MIN_SITE_SEPARATION: f64 = 1e-6;

/// Axis-aligned rectangular region of interest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roi {
    pub min: Point2,
    pub max: Point2,
}

impl Roi {
    pub fn new(min: Point2, max: Point2) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::NonFinite("region corner"));
        }
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::invalid(
                "region",
                "max corner must strictly dominate min corner",
            ));
        }
        Ok(Roi { min, max })
    }

    /// `[0, side]²`.
    pub fn square(side: f64) -> Result<Self> {
        Roi::new(Point2::ORIGIN, Point2::new(side, side))
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        self.min.lerp(self.max, 0.5)
    }

    pub fn contains(&self, p: Point2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn strictly_contains(&self, p: Point2) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    /// Overlap with another box, `None` when it has no interior.
    pub fn intersect(&self, other: &Roi) -> Option<Roi> {
        let min = Point2::new(self.min.x.max(other.min.x), self.min.y.max(other.min.y));
        let max = Point2::new(self.max.x.min(other.max.x), self.max.y.min(other.max.y));
        Roi::new(min, max).ok()
    }

    pub fn wall_halfplane(&self, wall: Wall) -> HalfPlane {
        let (normal, offset) = match wall {
            Wall::Left => (Point2::new(-1.0, 0.0), -self.min.x),
            Wall::Bottom => (Point2::new(0.0, -1.0), -self.min.y),
            Wall::Right => (Point2::new(1.0, 0.0), self.max.x),
            Wall::Top => (Point2::new(0.0, 1.0), self.max.y),
        };
        HalfPlane { normal, offset }
    }

    pub fn polygon(&self) -> ConvexPolygon {
        ConvexPolygon::rectangle(self.min, self.max).expect("validated region")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Wall {
    Left,
    Bottom,
    Right,
    Top,
}

/// What bounds a cell edge: the bisector toward another site, or a wall of
/// the region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Boundary {
    Neighbor(usize),
    Wall(Wall),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellEdge {
    pub boundary: Boundary,
    pub halfplane: HalfPlane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiCell {
    pub owner: usize,
    pub site: Point2,
    pub polygon: ConvexPolygon,
    /// One entry per polygon edge, in the polygon's edge order.
    pub neighbor_edges: Vec<CellEdge>,
}

impl VoronoiCell {
    pub fn vertices(&self) -> &[Point2] {
        self.polygon.vertices()
    }

    pub fn area(&self) -> f64 {
        self.polygon.area()
    }

    pub fn neighbors(&self) -> impl Iterator<Item = usize> + '_ {
        self.neighbor_edges.iter().filter_map(|e| match e.boundary {
            Boundary::Neighbor(j) => Some(j),
            Boundary::Wall(_) => None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiDiagram {
    pub cells: Vec<VoronoiCell>,
    pub roi: Roi,
}

impl VoronoiDiagram {
    /// Index of the cell containing `p` (lowest index on shared boundaries).
    pub fn locate(&self, p: Point2) -> Option<usize> {
        self.cells.iter().position(|c| c.polygon.contains(p))
    }

    /// Pairs `(i, j)`, `i < j`, whose cells have a common vertex within
    /// [`EPS`]. Sorted ascending.
    pub fn vertex_sharing_pairs(&self) -> Vec<(usize, usize)> {
        let boxes: Vec<(Point2, Point2)> = self
            .cells
            .iter()
            .map(|c| c.polygon.bounding_box())
            .collect();
        let mut pairs = Vec::new();
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let (a, b) = (boxes[i], boxes[j]);
                if a.0.x > b.1.x + EPS
                    || b.0.x > a.1.x + EPS
                    || a.0.y > b.1.y + EPS
                    || b.0.y > a.1.y + EPS
                {
                    continue;
                }
                let shared = self.cells[i].vertices().iter().any(|u| {
                    self.cells[j]
                        .vertices()
                        .iter()
                        .any(|v| u.distance(*v) <= EPS)
                });
                if shared {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }
}

/// Checks the site preconditions: non-empty, strictly inside the region,
/// pairwise separated by more than [`MIN_SITE_SEPARATION`].
pub fn validate_sites(sites: &[Point2], roi: &Roi) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::NoSites);
    }
    for (index, s) in sites.iter().enumerate() {
        if !s.is_finite() || !roi.strictly_contains(*s) {
            return Err(Error::SiteOutsideRoi {
                index,
                x: s.x,
                y: s.y,
            });
        }
    }
    let mut order: Vec<usize> = (0..sites.len()).collect();
    order.sort_by(|&a, &b| sites[a].x.total_cmp(&sites[b].x));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if sites[j].x - sites[i].x > MIN_SITE_SEPARATION {
                break;
            }
            if sites[i].distance(sites[j]) <= MIN_SITE_SEPARATION {
                return Err(Error::DuplicateSites {
                    first: i.min(j),
                    second: i.max(j),
                });
            }
        }
    }
    Ok(())
}

pub fn build_clipped_voronoi(sites: &[Point2], roi: Roi) -> Result<VoronoiDiagram> {
    validate_sites(sites, &roi)?;
    let cells = (0..sites.len())
        .into_par_iter()
        .map(|i| build_cell(sites, i, &roi))
        .collect::<Result<Vec<_>>>()?;
    Ok(VoronoiDiagram { cells, roi })
}

fn build_cell(sites: &[Point2], owner: usize, roi: &Roi) -> Result<VoronoiCell> {
    let site = sites[owner];
    let mut verts = vec![
        roi.min,
        Point2::new(roi.max.x, roi.min.y),
        roi.max,
        Point2::new(roi.min.x, roi.max.y),
    ];
    let mut labels: Vec<CellEdge> = [Wall::Bottom, Wall::Right, Wall::Top, Wall::Left]
        .into_iter()
        .map(|w| CellEdge {
            boundary: Boundary::Wall(w),
            halfplane: roi.wall_halfplane(w),
        })
        .collect();

    let mut others: Vec<(f64, usize)> = (0..sites.len())
        .filter(|&j| j != owner)
        .map(|j| (site.distance(sites[j]), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (dist, j) in others {
        // A bisector at distance dist/2 cannot cut a cell whose farthest
        // vertex is closer than that.
        let reach = verts.iter().map(|v| v.distance(site)).fold(0.0, f64::max);
        if dist / 2.0 > reach + EPS {
            break;
        }
        let other = sites[j];
        let normal = other - site;
        let h = HalfPlane::new(normal, normal.dot(site.lerp(other, 0.5)))?;
        let edge = CellEdge {
            boundary: Boundary::Neighbor(j),
            halfplane: h,
        };
        (verts, labels) = clip_labeled(&verts, &labels, edge);
    }

    let halfplanes = labels.iter().map(|e| e.halfplane).collect();
    let polygon = ConvexPolygon::from_parts(verts, halfplanes)?;
    Ok(VoronoiCell {
        owner,
        site,
        polygon,
        neighbor_edges: labels,
    })
}

/// Sutherland–Hodgman step that carries a label per edge. `labels[i]` belongs
/// to the edge leaving `verts[i]`.
fn clip_labeled(
    verts: &[Point2],
    labels: &[CellEdge],
    cut: CellEdge,
) -> (Vec<Point2>, Vec<CellEdge>) {
    let h = cut.halfplane;
    let n = verts.len();
    let mut out_v = Vec::with_capacity(n + 1);
    let mut out_l = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = verts[i];
        let q = verts[(i + 1) % n];
        let sp = h.slack(p);
        let sq = h.slack(q);
        let p_in = sp >= -EPS;
        let q_in = sq >= -EPS;
        if p_in {
            out_v.push(p);
            out_l.push(labels[i]);
            if !q_in && sp > EPS {
                out_v.push(p.lerp(q, sp / (sp - sq)));
                out_l.push(cut);
            } else if !q_in {
                // p sits on the cut line: the edge leaving it runs along the cut.
                *out_l.last_mut().unwrap() = cut;
            }
        } else if q_in && sq > EPS {
            out_v.push(p.lerp(q, sp / (sp - sq)));
            out_l.push(labels[i]);
        }
    }
    let (v, l) = crate::geometry::tidy_ring(out_v, out_l);
    drop_collinear(v, l)
}

/// Removes vertices whose two adjacent edges lie on one line.
fn drop_collinear(
    mut verts: Vec<Point2>,
    mut labels: Vec<CellEdge>,
) -> (Vec<Point2>, Vec<CellEdge>) {
    let mut i = 0;
    while verts.len() > 3 && i < verts.len() {
        let n = verts.len();
        let prev = verts[(i + n - 1) % n];
        let next = verts[(i + 1) % n];
        let span = prev.distance(next).max(EPS);
        if ((verts[i] - prev).cross(next - prev) / span).abs() <= EPS {
            verts.remove(i);
            labels.remove(i);
            i = 0;
        } else {
            i += 1;
        }
    }
    (verts, labels)
}

/// The unit-normal half-planes bounding the cell: bisectors toward each
/// Voronoi neighbor plus the active region walls.
pub fn cell_halfplanes(cell: &VoronoiCell) -> Vec<HalfPlane> {
    cell.neighbor_edges.iter().map(|e| e.halfplane).collect()
}

/// Counter-clockwise cell vertices.
pub fn cell_vertices(cell: &VoronoiCell) -> &[Point2] {
    cell.polygon.vertices()
}
