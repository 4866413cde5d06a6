#![allow(dead_code)]

use multicenter::{ConvexPolygon, Point2};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

pub type TestRng = Xoshiro256PlusPlus;

pub fn rng(seed: u64) -> TestRng {
    TestRng::seed_from_u64(seed)
}

pub fn eight_vertex_polygon() -> ConvexPolygon {
    ConvexPolygon::new(
        [
            [0.0, 0.0],
            [2.5, 0.0],
            [3.45, 1.5],
            [3.5, 1.6],
            [3.45, 1.7],
            [2.7, 2.1],
            [1.0, 2.4],
            [0.2, 1.2],
        ]
        .into_iter()
        .map(Point2::from)
        .collect(),
    )
    .unwrap()
}

pub fn unit_square() -> ConvexPolygon {
    ConvexPolygon::new(vec![
        Point2::new(0.0, 0.0),
        Point2::new(1.0, 0.0),
        Point2::new(1.0, 1.0),
        Point2::new(0.0, 1.0),
    ])
    .unwrap()
}

/// Random convex polygon with 3 to `max_vertices` vertices on a rotated ellipse.
///
/// Consecutive vertices are at least 0.1 rad apart so that no corner is nearly flat.
pub fn random_polygon(rng: &mut TestRng, max_vertices: usize) -> ConvexPolygon {
    polygon_on_ellipse(rng, max_vertices, false)
}

/// Like [`random_polygon`] but inscribed in a circle, so never elongated by stretching.
pub fn random_round_polygon(rng: &mut TestRng, max_vertices: usize) -> ConvexPolygon {
    polygon_on_ellipse(rng, max_vertices, true)
}

fn polygon_on_ellipse(rng: &mut TestRng, max_vertices: usize, round: bool) -> ConvexPolygon {
    loop {
        let k = rng.random_range(3..=max_vertices);
        let mut angles: Vec<f64> = (0..k)
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect();
        angles.sort_by(f64::total_cmp);
        let gaps_ok = (0..k).all(|i| {
            let next = if i + 1 < k {
                angles[i + 1]
            } else {
                angles[0] + std::f64::consts::TAU
            };
            next - angles[i] > 0.1 && next - angles[i] < std::f64::consts::PI - 0.1
        });
        if !gaps_ok {
            continue;
        }
        let (ax, ay) = (rng.random_range(0.5..2.0), rng.random_range(0.5..2.0));
        let (ax, ay) = if round { (ax, ax) } else { (ax, ay) };
        let rot: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (s, c) = rot.sin_cos();
        let shift = Point2::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        let pts = angles
            .iter()
            .map(|t| {
                let (x, y) = (ax * t.cos(), ay * t.sin());
                Point2::new(c * x - s * y, s * x + c * y) + shift
            })
            .collect();
        if let Ok(q) = ConvexPolygon::new(pts) {
            if q.len() == k {
                return q;
            }
        }
    }
}

/// Uniform point of `q` at least `clearance` away from its boundary.
pub fn random_point(rng: &mut TestRng, q: &ConvexPolygon, clearance: f64) -> Point2 {
    let (lo, hi) = q.bounding_box();
    loop {
        let p = Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if q.contains(p, 0.0) && q.clearance(p) >= clearance {
            return p;
        }
    }
}

/// `n` random points of `q` pairwise at least `separation` apart.
pub fn random_points(
    rng: &mut TestRng,
    q: &ConvexPolygon,
    n: usize,
    separation: f64,
) -> Vec<Point2> {
    let mut pts: Vec<Point2> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = random_point(rng, q, 0.0);
        if pts.iter().all(|o| o.distance(p) >= separation) {
            pts.push(p);
        }
    }
    pts
}

/// Intersection of the lines `a1 x + b1 y = c1` and `a2 x + b2 y = c2`.
pub fn intersect(l1: (f64, f64, f64), l2: (f64, f64, f64)) -> Option<Point2> {
    let det = l1.0 * l2.1 - l1.1 * l2.0;
    if det.abs() < 1e-300 {
        return None;
    }
    Some(Point2::new(
        (l1.2 * l2.1 - l1.1 * l2.2) / det,
        (l1.0 * l2.2 - l1.2 * l2.0) / det,
    ))
}

/// Bisector of `p` and `q` as `(a, b, c)` with `a x + b y = c`.
pub fn bisector_line(p: Point2, q: Point2) -> (f64, f64, f64) {
    let d = q - p;
    (d.x, d.y, 0.5 * (q.norm_sq() - p.norm_sq()))
}

/// Distance from `p` to the line through `a` and `b`.
pub fn line_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    (d.cross(p - a) / d.norm()).abs()
}

/// Smallest circle through two or three of `pts` that encloses all of them.
pub fn enclosing_by_enumeration(pts: &[Point2]) -> (Point2, f64) {
    let encloses = |c: Point2, r: f64| pts.iter().all(|p| p.distance(c) <= r * (1.0 + 1e-12));
    let mut best = (Point2::ZERO, f64::INFINITY);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let c = pts[i].midpoint(pts[j]);
            let r = 0.5 * pts[i].distance(pts[j]);
            if r < best.1 && encloses(c, r) {
                best = (c, r);
            }
            for k in j + 1..pts.len() {
                let (u, w) = (pts[j] - pts[i], pts[k] - pts[i]);
                if u.cross(w).abs() < 1e-12 * u.norm() * w.norm() {
                    continue;
                }
                let Some(c) = intersect(bisector_line(pts[i], pts[j]), bisector_line(pts[i], pts[k])) else {
                    continue;
                };
                let r = c.distance(pts[i]);
                if r < best.1 && encloses(c, r) {
                    best = (c, r);
                }
            }
        }
    }
    best
}
