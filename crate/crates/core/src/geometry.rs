//! Planar primitives with tolerance-based predicates.
//!
//! Every coincidence or collinearity test takes an explicit tolerance. Callers
//! working inside an environment polygon obtain it from
//! [`Tolerances::for_polygon`], which scales everything by the environment
//! diameter so that the predicates behave the same at any unit of length.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ZERO: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    #[inline]
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    #[inline]
    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the direction of `self`, or `None` for the zero vector.
    pub fn unit(self) -> Option<Point2> {
        let n = self.norm();
        if n > 0.0 && n.is_finite() {
            Some(self * (1.0 / n))
        } else {
            None
        }
    }

    /// Counterclockwise rotation by a right angle.
    #[inline]
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    #[inline]
    pub fn midpoint(self, other: Point2) -> Point2 {
        Point2::new(0.5 * (self.x + other.x), 0.5 * (self.y + other.y))
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(v: [f64; 2]) -> Self {
        Point2::new(v[0], v[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    #[inline]
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Point2 {
    #[inline]
    fn add_assign(&mut self, o: Point2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Point2 {
    type Output = Point2;
    #[inline]
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Point2 {
    #[inline]
    fn sub_assign(&mut self, o: Point2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    #[inline]
    fn mul(self, s: f64) -> Point2 {
        Point2::new(self.x * s, self.y * s)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    #[inline]
    fn mul(self, p: Point2) -> Point2 {
        p * self
    }
}

impl Neg for Point2 {
    type Output = Point2;
    #[inline]
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Tolerances derived from the diameter of the environment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Diameter of the environment the tolerances were derived from.
    pub diameter: f64,
    /// Geometric coincidence tolerance, `1e-9 * diameter`.
    pub geo: f64,
    /// Active-set membership tolerance, `1e-7 * diameter`.
    pub act: f64,
    /// Criticality tolerance, `1e-6 * diameter`.
    pub crit: f64,
}

impl Tolerances {
    pub const GEO_REL: f64 = 1e-9;
    pub const ACT_REL: f64 = 1e-7;
    pub const CRIT_REL: f64 = 1e-6;

    pub fn from_diameter(diameter: f64) -> Self {
        Self {
            diameter,
            geo: Self::GEO_REL * diameter,
            act: Self::ACT_REL * diameter,
            crit: Self::CRIT_REL * diameter,
        }
    }

    pub fn for_polygon(poly: &ConvexPolygon) -> Self {
        Self::from_diameter(poly.diameter())
    }
}

/// Closed half-plane `a*x + b*y + c >= 0` with `a^2 + b^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    /// Builds and normalizes the half-plane `a*x + b*y + c >= 0`.
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        let n = a.hypot(b);
        if !(n > 0.0) || !n.is_finite() || !c.is_finite() {
            return Err(GeometryError::DegenerateHalfPlane);
        }
        Ok(Self {
            a: a / n,
            b: b / n,
            c: c / n,
        })
    }

    /// Points closer to `p` than to `q`, i.e. `|x - p| <= |x - q|`.
    pub fn bisector(p: Point2, q: Point2) -> Result<Self, GeometryError> {
        let d = q - p;
        let m = p.midpoint(q);
        // -(d . x) + d . m >= 0
        Self::new(-d.x, -d.y, d.dot(m))
    }

    /// Left side of the directed line through `from` and `to`.
    pub fn left_of(from: Point2, to: Point2) -> Result<Self, GeometryError> {
        let d = to - from;
        // inward normal for a counterclockwise boundary is the left perpendicular
        let n = d.perp();
        Self::new(n.x, n.y, -n.dot(from))
    }

    /// Unit normal pointing into the half-plane.
    #[inline]
    pub fn normal(&self) -> Point2 {
        Point2::new(self.a, self.b)
    }

    /// Signed distance to the boundary line, positive inside.
    #[inline]
    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y + self.c
    }

    #[inline]
    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        self.signed_distance(p) >= -eps
    }
}

/// Closed segment; the endpoints may coincide.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub a: Point2,
    pub b: Point2,
}

impl Segment {
    pub const fn new(a: Point2, b: Point2) -> Self {
        Self { a, b }
    }

    pub const fn point(p: Point2) -> Self {
        Self { a: p, b: p }
    }

    pub fn length(&self) -> f64 {
        self.a.distance(self.b)
    }

    pub fn midpoint(&self) -> Point2 {
        self.a.midpoint(self.b)
    }

    /// Point at parameter `t` in `[0, 1]`.
    pub fn lerp(&self, t: f64) -> Point2 {
        self.a + (self.b - self.a) * t
    }

    pub fn distance_to(&self, p: Point2) -> f64 {
        p.distance(project_onto_segment(p, self))
    }
}

/// Closest point of `s` to `p`.
pub fn project_onto_segment(p: Point2, s: &Segment) -> Point2 {
    let d = s.b - s.a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return s.a;
    }
    let t = ((p - s.a).dot(d) / len_sq).clamp(0.0, 1.0);
    s.a + d * t
}

/// Distance from `p` to the closed segment `s`.
pub fn distance_to_segment(p: Point2, s: &Segment) -> f64 {
    s.distance_to(p)
}

/// Extreme points of the convex hull in counterclockwise order.
///
/// Points within `eps` of each other are merged and points within `eps` of a
/// hull edge are dropped, so a collinear set yields its two endpoints and a
/// clustered set yields a single point.
pub fn convex_hull2(points: &[Point2], eps: f64) -> Vec<Point2> {
    let mut pts: Vec<Point2> = points.to_vec();
    pts.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));
    let mut uniq: Vec<Point2> = Vec::with_capacity(pts.len());
    for p in pts {
        if uniq.iter().all(|q| q.distance(p) > eps) {
            uniq.push(p);
        }
    }
    if uniq.len() <= 2 {
        return uniq;
    }
    uniq.sort_by(|p, q| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)));

    // Monotone chain; a point is kept only if it lies strictly left of the
    // chord by more than eps.
    let keeps_turn = |o: Point2, a: Point2, b: Point2| -> bool {
        let ob = b - o;
        let len = ob.norm();
        len > 0.0 && (a - o).cross(ob) / len > eps
    };
    let mut lower: Vec<Point2> = Vec::new();
    for &p in &uniq {
        while lower.len() >= 2 && !keeps_turn(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point2> = Vec::new();
    for &p in uniq.iter().rev() {
        while upper.len() >= 2 && !keeps_turn(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0].distance(lower[1]) <= eps {
        lower.truncate(1);
    }
    lower
}

/// Position of the origin relative to the convex hull of a vector set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZeroPosition {
    Outside,
    Boundary,
    Interior,
}

/// Classifies the origin against `co(points)` with a boundary band of width `eps`.
///
/// `Interior` is equivalent to the vectors positively spanning the plane.
pub fn zero_in_hull(points: &[Point2], eps: f64) -> ZeroPosition {
    let hull = convex_hull2(points, eps);
    match hull.len() {
        0 => ZeroPosition::Outside,
        1 => {
            if hull[0].norm() <= eps {
                ZeroPosition::Boundary
            } else {
                ZeroPosition::Outside
            }
        }
        2 => {
            if distance_to_segment(Point2::ZERO, &Segment::new(hull[0], hull[1])) <= eps {
                ZeroPosition::Boundary
            } else {
                ZeroPosition::Outside
            }
        }
        m => {
            let mut min_clearance = f64::INFINITY;
            for k in 0..m {
                let a = hull[k];
                let b = hull[(k + 1) % m];
                let d = b - a;
                let clearance = d.cross(Point2::ZERO - a) / d.norm();
                min_clearance = min_clearance.min(clearance);
            }
            if min_clearance > eps {
                ZeroPosition::Interior
            } else if min_clearance >= -eps {
                ZeroPosition::Boundary
            } else {
                ZeroPosition::Outside
            }
        }
    }
}

/// Convex polygon with counterclockwise vertices, lexicographically smallest first.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    /// Validates and canonicalizes a vertex list.
    ///
    /// Accepts either orientation. The tolerance is `1e-9` times the diameter
    /// of the input.
    pub fn new(vertices: Vec<Point2>) -> Result<Self, GeometryError> {
        if vertices.len() < 3 {
            return Err(GeometryError::TooFewVertices(vertices.len()));
        }
        if let Some(k) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(GeometryError::NonFinite(k));
        }
        let eps = Tolerances::GEO_REL * diameter_of(&vertices);
        let mut v = vertices;
        if signed_area(&v) < 0.0 {
            v.reverse();
        }
        let m = v.len();
        for k in 0..m {
            if v[k].distance(v[(k + 1) % m]) <= eps {
                return Err(GeometryError::DuplicateVertex(k));
            }
        }
        for k in 0..m {
            let prev = v[(k + m - 1) % m];
            let cur = v[k];
            let next = v[(k + 1) % m];
            let d = next - prev;
            let turn = (cur - prev).cross(next - cur);
            // distance of `cur` outside the chord prev -> next
            let height = (cur - prev).cross(d) / d.norm().max(f64::MIN_POSITIVE);
            if turn <= 0.0 || height <= eps {
                return Err(GeometryError::NotStrictlyConvex(k));
            }
        }
        // a strictly convex chain must wind exactly once
        let mut winding = 0.0;
        for k in 0..m {
            let d0 = v[(k + 1) % m] - v[k];
            let d1 = v[(k + 2) % m] - v[(k + 1) % m];
            winding += d0.cross(d1).atan2(d0.dot(d1));
        }
        if (winding - std::f64::consts::TAU).abs() > 1e-6 {
            return Err(GeometryError::NotStrictlyConvex(0));
        }
        Ok(Self::canonical(v))
    }

    /// Canonicalizes an already valid counterclockwise chain.
    fn canonical(mut v: Vec<Point2>) -> Self {
        let first = v
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y)))
            .map(|(k, _)| k)
            .unwrap_or(0);
        v.rotate_left(first);
        Self { vertices: v }
    }

    /// Cleans up a counterclockwise chain produced by clipping.
    ///
    /// Merges vertices closer than `eps`, drops vertices within `eps` of the
    /// chord of their neighbours and returns `None` when no full-dimensional
    /// polygon remains.
    pub(crate) fn from_ccw_chain(chain: Vec<Point2>, eps: f64) -> Option<Self> {
        let mut v: Vec<Point2> = Vec::with_capacity(chain.len());
        for p in chain {
            if v.last().is_none_or(|q| q.distance(p) > eps) {
                v.push(p);
            }
        }
        while v.len() > 1 && v[0].distance(v[v.len() - 1]) <= eps {
            v.pop();
        }
        loop {
            if v.len() < 3 {
                return None;
            }
            let m = v.len();
            let mut removed = false;
            for k in 0..m {
                let prev = v[(k + m - 1) % m];
                let cur = v[k];
                let next = v[(k + 1) % m];
                let d = next - prev;
                let len = d.norm();
                if len <= eps || (cur - prev).cross(d) / len <= eps {
                    v.remove(k);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        let poly = Self::canonical(v);
        if poly.width() <= eps {
            return None;
        }
        Some(poly)
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, k: usize) -> Point2 {
        self.vertices[k % self.vertices.len()]
    }

    /// Edge `k` runs from vertex `k` to vertex `k + 1`.
    pub fn edge(&self, k: usize) -> Segment {
        Segment::new(self.vertex(k), self.vertex(k + 1))
    }

    pub fn edges(&self) -> impl Iterator<Item = Segment> + '_ {
        (0..self.len()).map(move |k| self.edge(k))
    }

    /// Half-plane bounded by edge `k` that contains the polygon.
    pub fn edge_halfplane(&self, k: usize) -> HalfPlane {
        HalfPlane::left_of(self.vertex(k), self.vertex(k + 1))
            .expect("validated polygons have no zero-length edges")
    }

    /// Unit normal of edge `k` pointing into the polygon.
    pub fn inward_normal(&self, k: usize) -> Point2 {
        self.edge_halfplane(k).normal()
    }

    /// Distance from `p` to the line supporting edge `k`, positive inside.
    pub fn edge_line_distance(&self, k: usize, p: Point2) -> f64 {
        self.edge_halfplane(k).signed_distance(p)
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn diameter(&self) -> f64 {
        diameter_of(&self.vertices)
    }

    /// Minimum over edges of the largest vertex height above that edge.
    pub fn width(&self) -> f64 {
        (0..self.len())
            .map(|k| {
                let h = self.edge_halfplane(k);
                self.vertices
                    .iter()
                    .map(|&p| h.signed_distance(p))
                    .fold(0.0, f64::max)
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn centroid(&self) -> Point2 {
        let m = self.len();
        let mut a = 0.0;
        let mut c = Point2::ZERO;
        for k in 0..m {
            let p = self.vertices[k];
            let q = self.vertices[(k + 1) % m];
            let w = p.cross(q);
            a += w;
            c += (p + q) * w;
        }
        c * (1.0 / (3.0 * a))
    }

    /// Smallest signed distance from `p` to an edge line; negative outside.
    pub fn clearance(&self, p: Point2) -> f64 {
        (0..self.len())
            .map(|k| self.edge_line_distance(k, p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point2, eps: f64) -> bool {
        self.clearance(p) >= -eps
    }

    /// Closest point of the polygon to `p` (identity for points inside).
    pub fn project(&self, p: Point2) -> Point2 {
        if self.clearance(p) >= 0.0 {
            return p;
        }
        self.edges()
            .map(|e| project_onto_segment(p, &e))
            .min_by(|a, b| a.distance(p).total_cmp(&b.distance(p)))
            .expect("polygon has edges")
    }

    /// Axis-aligned bounding box as `(min, max)`.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// True when both polygons have the same vertex set within `eps`.
    pub fn approx_eq(&self, other: &ConvexPolygon, eps: f64) -> bool {
        self.len() == other.len()
            && self
                .vertices
                .iter()
                .all(|p| other.vertices.iter().any(|q| q.distance(*p) <= eps))
    }
}

/// Intersection of `poly` with the half-plane, or `None` if it has empty interior.
pub fn clip_halfplane(poly: &ConvexPolygon, h: &HalfPlane, eps: f64) -> Option<ConvexPolygon> {
    let v = poly.vertices();
    let dist: Vec<f64> = v.iter().map(|&p| h.signed_distance(p)).collect();
    if dist.iter().all(|&d| d >= -eps) {
        return Some(poly.clone());
    }
    if dist.iter().all(|&d| d <= eps) {
        return None;
    }
    let m = v.len();
    let mut out = Vec::with_capacity(m + 1);
    for k in 0..m {
        let (p, dp) = (v[k], dist[k]);
        let (q, dq) = (v[(k + 1) % m], dist[(k + 1) % m]);
        if dp >= -eps {
            out.push(p);
        }
        // strict crossing of the line between two clearly separated vertices
        if (dp > eps && dq < -eps) || (dp < -eps && dq > eps) {
            let t = dp / (dp - dq);
            out.push(p + (q - p) * t);
        }
    }
    ConvexPolygon::from_ccw_chain(out, eps)
}

fn signed_area(v: &[Point2]) -> f64 {
    let m = v.len();
    0.5 * (0..m).map(|k| v[k].cross(v[(k + 1) % m])).sum::<f64>()
}

fn diameter_of(v: &[Point2]) -> f64 {
    let mut d: f64 = 0.0;
    for (k, p) in v.iter().enumerate() {
        for q in &v[k + 1..] {
            d = d.max(p.distance(*q));
        }
    }
    d
}
