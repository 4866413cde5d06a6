//! Circumcenter and incenter set of convex polygons.
//!
//! The circumcenter is the center of the minimum enclosing circle of the
//! vertex set. Small vertex sets are solved by checking every pair and triple;
//! larger ones use the incremental move-to-front method.
//!
//! The incenter set is the set of Chebyshev centers: the maximizers of the
//! distance to the nearest edge line. It is obtained from a three-variable
//! linear program and is always a segment, possibly degenerate.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexPolygon, Point2, Segment, Tolerances};

/// Vertex counts up to this use exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Minimum enclosing circle of a polygon's vertices.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circumcircle {
    pub center: Point2,
    pub radius: f64,
}

impl Circumcircle {
    fn contains(&self, p: Point2, slack: f64) -> bool {
        self.center.distance(p) <= self.radius + slack
    }
}

/// Chebyshev center set and radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncenterSolution {
    pub segment: Segment,
    pub inradius: f64,
}

impl IncenterSolution {
    /// True when the incenter set is a single point.
    pub fn is_point(&self, eps: f64) -> bool {
        self.segment.length() <= eps
    }

    /// Closest incenter to `p`.
    pub fn nearest(&self, p: Point2) -> Point2 {
        crate::geometry::project_onto_segment(p, &self.segment)
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        self.segment.distance_to(p)
    }
}

/// Circumcenter and circumradius of `w`.
pub fn circumcenter(w: &ConvexPolygon) -> Circumcircle {
    if w.len() <= EXHAUSTIVE_LIMIT {
        min_enclosing_circle_exhaustive(w.vertices())
    } else {
        min_enclosing_circle_incremental(w.vertices())
    }
}

fn slack_for(points: &[Point2]) -> f64 {
    let scale = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    1e-12 * scale
}

fn diameter_circle(a: Point2, b: Point2) -> Circumcircle {
    Circumcircle {
        center: a.midpoint(b),
        radius: 0.5 * a.distance(b),
    }
}

/// Circle through three points, `None` if they are collinear.
pub(crate) fn circle_through(a: Point2, b: Point2, c: Point2) -> Option<Circumcircle> {
    let ab = b - a;
    let ac = c - a;
    let d = 2.0 * ab.cross(ac);
    let scale = ab.norm() * ac.norm();
    if d.abs() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let ab2 = ab.norm_sq();
    let ac2 = ac.norm_sq();
    let ux = (ac.y * ab2 - ab.y * ac2) / d;
    let uy = (ab.x * ac2 - ac.x * ab2) / d;
    let center = a + Point2::new(ux, uy);
    Some(Circumcircle {
        center,
        radius: center.distance(a),
    })
}

/// Smallest circle among all pair and triple circles that encloses every point.
pub fn min_enclosing_circle_exhaustive(points: &[Point2]) -> Circumcircle {
    match points.len() {
        0 => {
            return Circumcircle {
                center: Point2::ZERO,
                radius: 0.0,
            }
        }
        1 => {
            return Circumcircle {
                center: points[0],
                radius: 0.0,
            }
        }
        _ => {}
    }
    let slack = slack_for(points);
    let encloses = |c: &Circumcircle| points.iter().all(|&p| c.contains(p, slack));
    let mut best: Option<Circumcircle> = None;
    let mut consider = |c: Circumcircle| {
        if best.is_none_or(|b| c.radius < b.radius) && encloses(&c) {
            best = Some(c);
        }
    };
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            consider(diameter_circle(points[i], points[j]));
            for k in j + 1..points.len() {
                if let Some(c) = circle_through(points[i], points[j], points[k]) {
                    consider(c);
                }
            }
        }
    }
    best.expect("the farthest pair or some triple always encloses the set")
}

/// Incremental minimum enclosing circle over a fixed-seed shuffle of the points.
pub fn min_enclosing_circle_incremental(points: &[Point2]) -> Circumcircle {
    if points.is_empty() {
        return Circumcircle {
            center: Point2::ZERO,
            radius: 0.0,
        };
    }
    let slack = slack_for(points);
    let mut pts = points.to_vec();
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(0x6d65_6300_5eed);
    pts.shuffle(&mut rng);

    let mut c = Circumcircle {
        center: pts[0],
        radius: 0.0,
    };
    for i in 1..pts.len() {
        if c.contains(pts[i], slack) {
            continue;
        }
        c = Circumcircle {
            center: pts[i],
            radius: 0.0,
        };
        for j in 0..i {
            if c.contains(pts[j], slack) {
                continue;
            }
            c = diameter_circle(pts[i], pts[j]);
            for k in 0..j {
                if c.contains(pts[k], slack) {
                    continue;
                }
                c = circle_through(pts[i], pts[j], pts[k]).unwrap_or_else(|| {
                    // collinear: the circle on the outermost pair
                    let pairs = [(pts[i], pts[j]), (pts[i], pts[k]), (pts[j], pts[k])];
                    pairs
                        .iter()
                        .map(|&(a, b)| diameter_circle(a, b))
                        .max_by(|a, b| a.radius.total_cmp(&b.radius))
                        .expect("three pairs")
                });
            }
        }
    }
    c
}

/// Incenter set and inradius of `w`.
pub fn incenter_set(w: &ConvexPolygon) -> IncenterSolution {
    let tol = Tolerances::for_polygon(w);
    let m = w.len();
    let normals: Vec<Point2> = (0..m).map(|k| w.inward_normal(k)).collect();
    let origin = w.centroid();

    // Variables (dx+, dx-, dy+, dy-, r) >= 0, x = origin + d.
    // Constraint per edge: -n.d + r <= D_e(origin).
    let rows: Vec<Vec<f64>> = normals
        .iter()
        .map(|n| vec![-n.x, n.x, -n.y, n.y, 1.0])
        .collect();
    let rhs: Vec<f64> = (0..m)
        .map(|k| w.edge_line_distance(k, origin).max(0.0))
        .collect();
    let objective = [0.0, 0.0, 0.0, 0.0, 1.0];
    let sol = simplex::maximize(&objective, &rows, &rhs)
        .expect("bounded polygon gives a bounded feasible program");
    let x_star = origin + Point2::new(sol[0] - sol[1], sol[2] - sol[3]);

    // Re-evaluate the radius at the recovered point; the LP value and the
    // geometric clearance agree up to rounding.
    let dist: Vec<f64> = (0..m).map(|k| w.edge_line_distance(k, x_star)).collect();
    let r_star = dist.iter().copied().fold(f64::INFINITY, f64::min);

    let active: Vec<usize> = (0..m).filter(|&k| dist[k] - r_star <= tol.geo).collect();
    let spans_plane = active.iter().any(|&a| {
        active
            .iter()
            .any(|&b| normals[a].cross(normals[b]).abs() > 1e-9)
    });
    if spans_plane || active.is_empty() {
        return IncenterSolution {
            segment: Segment::point(x_star),
            inradius: r_star,
        };
    }

    // All active normals are parallel: the optimal face is the segment of the
    // line through x_star orthogonal to them, cut by the inactive constraints.
    let dir = normals[active[0]].perp();
    let mut t_lo = f64::NEG_INFINITY;
    let mut t_hi = f64::INFINITY;
    for k in 0..m {
        if active.contains(&k) {
            continue;
        }
        let s = normals[k].dot(dir);
        let gap = dist[k] - r_star;
        if s > 1e-12 {
            t_lo = t_lo.max(-gap / s);
        } else if s < -1e-12 {
            t_hi = t_hi.min(gap / -s);
        }
    }
    if !t_lo.is_finite() || !t_hi.is_finite() || t_hi < t_lo {
        return IncenterSolution {
            segment: Segment::point(x_star),
            inradius: r_star,
        };
    }
    IncenterSolution {
        segment: Segment::new(x_star + dir * t_lo, x_star + dir * t_hi),
        inradius: r_star,
    }
}

/// Dense tableau simplex for `max c.x  s.t.  A x <= b, x >= 0` with `b >= 0`.
mod simplex {
    const EPS: f64 = 1e-12;

    pub fn maximize(c: &[f64], a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
        let m = a.len();
        let n = c.len();
        let width = n + m + 1;
        let mut t = vec![vec![0.0; width]; m + 1];
        for i in 0..m {
            t[i][..n].copy_from_slice(&a[i]);
            t[i][n + i] = 1.0;
            t[i][width - 1] = b[i];
        }
        for j in 0..n {
            t[m][j] = -c[j];
        }
        let mut basis: Vec<usize> = (n..n + m).collect();

        for _ in 0..10_000 {
            // Bland's rule: lowest index with a negative reduced cost.
            let Some(col) = (0..n + m).find(|&j| t[m][j] < -EPS) else {
                let mut x = vec![0.0; n];
                for (i, &bv) in basis.iter().enumerate() {
                    if bv < n {
                        x[bv] = t[i][width - 1];
                    }
                }
                return Some(x);
            };
            let mut row = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                if t[i][col] > EPS {
                    let ratio = t[i][width - 1] / t[i][col];
                    let better = ratio < best - EPS
                        || (ratio <= best + EPS && row.is_some_and(|r: usize| basis[i] < basis[r]));
                    if better {
                        best = ratio;
                        row = Some(i);
                    }
                }
            }
            let row = row?; // unbounded
            let pivot = t[row][col];
            for v in t[row].iter_mut() {
                *v /= pivot;
            }
            let pivot_row = t[row].clone();
            for (i, r) in t.iter_mut().enumerate() {
                if i != row {
                    let f = r[col];
                    if f != 0.0 {
                        for (v, p) in r.iter_mut().zip(&pivot_row) {
                            *v -= f * p;
                        }
                    }
                }
            }
            basis[row] = col;
        }
        None
    }

}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(v: &[(f64, f64)]) -> ConvexPolygon {
        ConvexPolygon::new(v.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn square_circumcircle() {
        let c = circumcenter(&poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        assert!(c.center.distance(Point2::new(0.5, 0.5)) < 1e-12);
        assert!((c.radius - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn equilateral_circumcircle() {
        let h = 3f64.sqrt() / 2.0;
        let c = circumcenter(&poly(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]));
        assert!(c.center.distance(Point2::new(0.5, 3f64.sqrt() / 6.0)) < 1e-12);
        assert!((c.radius - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn obtuse_triangle_uses_longest_side() {
        let c = circumcenter(&poly(&[(0.0, 0.0), (4.0, 0.0), (1.0, 0.5)]));
        assert!(c.center.distance(Point2::new(2.0, 0.0)) < 1e-12);
        assert!((c.radius - 2.0).abs() < 1e-12);
    }

    #[test]
    fn incremental_matches_exhaustive_on_regular_polygon() {
        let pts: Vec<Point2> = (0..20)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / 20.0;
                Point2::new(1.0 + 2.0 * a.cos(), -0.5 + 2.0 * a.sin())
            })
            .collect();
        let w = ConvexPolygon::new(pts.clone()).unwrap();
        let inc = circumcenter(&w);
        let ex = min_enclosing_circle_exhaustive(&pts);
        assert!(inc.center.distance(ex.center) < 1e-9);
        assert!((inc.radius - ex.radius).abs() < 1e-9);
        assert!((inc.radius - 2.0).abs() < 1e-9);
    }

    #[test]
    fn square_incenter() {
        let ic = incenter_set(&poly(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]));
        assert!(ic.is_point(1e-12));
        assert!(ic.segment.a.distance(Point2::new(0.5, 0.5)) < 1e-12);
        assert!((ic.inradius - 0.5).abs() < 1e-12);
    }

    #[test]
    fn rectangle_incenter_is_segment() {
        let ic = incenter_set(&poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]));
        assert!((ic.inradius - 0.5).abs() < 1e-12);
        let (a, b) = (ic.segment.a, ic.segment.b);
        let (lo, hi) = if a.x < b.x { (a, b) } else { (b, a) };
        assert!(lo.distance(Point2::new(0.5, 0.5)) < 1e-12);
        assert!(hi.distance(Point2::new(1.5, 0.5)) < 1e-12);
    }

    #[test]
    fn equilateral_incenter() {
        let h = 3f64.sqrt() / 2.0;
        let ic = incenter_set(&poly(&[(0.0, 0.0), (1.0, 0.0), (0.5, h)]));
        assert!(ic.is_point(1e-12));
        assert!(ic.segment.a.distance(Point2::new(0.5, 3f64.sqrt() / 6.0)) < 1e-12);
        assert!((ic.inradius - 3f64.sqrt() / 6.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_incenter_clamps_to_segment() {
        let ic = incenter_set(&poly(&[(0.0, 0.0), (2.0, 0.0), (2.0, 1.0), (0.0, 1.0)]));
        assert!(ic.nearest(Point2::new(1.9, 0.9)).distance(Point2::new(1.5, 0.5)) < 1e-12);
        assert!(ic.nearest(Point2::new(1.0, 0.1)).distance(Point2::new(1.0, 0.5)) < 1e-12);
    }
}
