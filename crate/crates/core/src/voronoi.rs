//! Bounded Voronoi partitions of a convex environment.
//!
//! Cell `i` is the environment clipped by the bisector half-planes of
//! generator `i` against every other generator. After clipping, each cell
//! vertex is classified by the elements (generators and environment edges)
//! that define it:
//!
//! - type (a): three generators, an interior vertex of the diagram;
//! - type (b): an environment edge and two generators;
//! - type (c): two environment edges and the owning generator, i.e. a vertex
//!   of the environment.
//!
//! A vertex defined by more than three elements is degenerate. Its full list of
//! defining elements is kept so that gradient assembly can enumerate every
//! admissible triplet.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::VoronoiError;
use crate::geometry::{clip_halfplane, ConvexPolygon, HalfPlane, Point2, Segment, Tolerances};

/// Ordered generator positions inside the environment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    points: Vec<Point2>,
}

impl Configuration {
    /// Validates that every point lies in `env` and that no two coincide.
    pub fn new(points: Vec<Point2>, env: &ConvexPolygon) -> Result<Self, VoronoiError> {
        let tol = Tolerances::for_polygon(env);
        if points.is_empty() {
            return Err(VoronoiError::NoGenerators);
        }
        for (index, &point) in points.iter().enumerate() {
            if !point.is_finite() {
                return Err(VoronoiError::NonFinite(index));
            }
            if !env.contains(point, tol.geo) {
                return Err(VoronoiError::OutsideEnvironment { index, point });
            }
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                if points[i].distance(points[j]) < tol.geo {
                    return Err(VoronoiError::CoincidentGenerators(i, j));
                }
            }
        }
        Ok(Self { points })
    }

    /// Wraps points without validation.
    pub fn from_points_unchecked(points: Vec<Point2>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: usize) -> Point2 {
        self.points[i]
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    /// Stacked coordinates `(x0, y0, x1, y1, ...)`.
    pub fn to_flat(&self) -> Vec<f64> {
        self.points.iter().flat_map(|p| [p.x, p.y]).collect()
    }

    /// Euclidean distance between stacked coordinate vectors.
    pub fn distance(&self, other: &Configuration) -> f64 {
        self.points
            .iter()
            .zip(&other.points)
            .map(|(p, q)| (*p - *q).norm_sq())
            .sum::<f64>()
            .sqrt()
    }
}

/// A generator or an edge of the environment (edge `k` joins vertices `k`, `k+1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Element {
    Generator(usize),
    Edge(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexKind {
    /// Circumcenter of three generators; the first index is the owning cell.
    TypeA(usize, usize, usize),
    /// Intersection of an environment edge with the bisector of two generators.
    TypeB { edge: usize, i: usize, j: usize },
    /// Vertex of the environment between edges `e` and `f`.
    TypeC { e: usize, f: usize, i: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexRecord {
    pub position: Point2,
    pub kind: VertexKind,
    pub degenerate: bool,
    /// Every element whose defining distance matches within tolerance,
    /// generators first, including the owning generator.
    pub defining_elements: Vec<Element>,
}

impl VertexRecord {
    pub fn generators(&self) -> impl Iterator<Item = usize> + '_ {
        self.defining_elements.iter().filter_map(|e| match e {
            Element::Generator(g) => Some(*g),
            Element::Edge(_) => None,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.defining_elements.iter().filter_map(|e| match e {
            Element::Edge(k) => Some(*k),
            Element::Generator(_) => None,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    /// Piece of the bisector between the owning generator `i` and `j`.
    TypeA { i: usize, j: usize },
    /// Piece of environment edge `edge`.
    TypeB { i: usize, edge: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub segment: Segment,
    pub kind: EdgeKind,
    /// Unit normal pointing into the owning cell (type a) or the environment (type b).
    pub inward_normal: Point2,
}

/// One Voronoi cell with its classified boundary.
///
/// `edges[k]` joins `vertices[k]` and `vertices[k + 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub polygon: ConvexPolygon,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<EdgeRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VoronoiPartition {
    environment: ConvexPolygon,
    generators: Vec<Point2>,
    tolerances: Tolerances,
    cells: Vec<Cell>,
    neighbors: Vec<BTreeSet<usize>>,
}

impl VoronoiPartition {
    pub fn environment(&self) -> &ConvexPolygon {
        &self.environment
    }

    pub fn generators(&self) -> &[Point2] {
        &self.generators
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, i: usize) -> &Cell {
        &self.cells[i]
    }

    pub fn polygon(&self, i: usize) -> &ConvexPolygon {
        &self.cells[i].polygon
    }

    pub fn vertex_records(&self, i: usize) -> &[VertexRecord] {
        &self.cells[i].vertices
    }

    pub fn edge_records(&self, i: usize) -> &[EdgeRecord] {
        &self.cells[i].edges
    }

    /// Voronoi neighbors of `i`: generators whose cells share an edge with cell `i`.
    pub fn neighbors(&self, i: usize) -> &BTreeSet<usize> {
        &self.neighbors[i]
    }

    /// True when any vertex of any cell is defined by more than three elements.
    pub fn is_degenerate(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.vertices.iter().any(|v| v.degenerate))
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(|c| c.polygon.area()).sum()
    }

    /// Index of the generator closest to `q` (lowest index on ties).
    pub fn nearest_generator(&self, q: Point2) -> usize {
        nearest_index(&self.generators, q)
    }
}

pub(crate) fn nearest_index(points: &[Point2], q: Point2) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (k, p) in points.iter().enumerate() {
        let d = p.distance(q);
        if d < best_d {
            best_d = d;
            best = k;
        }
    }
    best
}

/// Builds the bounded Voronoi partition of `env` generated by `config`.
pub fn compute_partition(
    env: &ConvexPolygon,
    config: &Configuration,
) -> Result<VoronoiPartition, VoronoiError> {
    let tol = Tolerances::for_polygon(env);
    let points = config.points();
    if points.is_empty() {
        return Err(VoronoiError::NoGenerators);
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i].distance(points[j]) < tol.geo {
                return Err(VoronoiError::CoincidentGenerators(i, j));
            }
        }
    }

    let mut cells = Vec::with_capacity(points.len());
    for i in 0..points.len() {
        let polygon = build_cell(env, points, i, tol.geo)?;
        let vertices = polygon
            .vertices()
            .iter()
            .map(|&v| classify_vertex(env, points, i, v, tol.geo))
            .collect::<Vec<_>>();
        let edges = (0..polygon.len())
            .map(|k| classify_edge(env, points, i, polygon.edge(k)))
            .collect::<Vec<_>>();
        cells.push(Cell {
            polygon,
            vertices,
            edges,
        });
    }

    let mut neighbors = vec![BTreeSet::new(); points.len()];
    for (i, cell) in cells.iter().enumerate() {
        for e in &cell.edges {
            if let EdgeKind::TypeA { j, .. } = e.kind {
                if e.segment.length() > tol.geo {
                    neighbors[i].insert(j);
                    neighbors[j].insert(i);
                }
            }
        }
    }

    Ok(VoronoiPartition {
        environment: env.clone(),
        generators: points.to_vec(),
        tolerances: tol,
        cells,
        neighbors,
    })
}

/// Sorted neighbor set of generator `i`.
pub fn neighbors(partition: &VoronoiPartition, i: usize) -> BTreeSet<usize> {
    partition.neighbors(i).clone()
}

fn build_cell(
    env: &ConvexPolygon,
    points: &[Point2],
    i: usize,
    eps: f64,
) -> Result<ConvexPolygon, VoronoiError> {
    let pi = points[i];
    let mut order: Vec<usize> = (0..points.len()).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| {
        pi.distance(points[a])
            .total_cmp(&pi.distance(points[b]))
            .then(a.cmp(&b))
    });
    let mut cell = env.clone();
    for j in order {
        let reach = cell
            .vertices()
            .iter()
            .map(|v| v.distance(pi))
            .fold(0.0, f64::max);
        // bisectors beyond twice the cell radius cannot cut the cell
        if 0.5 * pi.distance(points[j]) > reach + eps {
            break;
        }
        let h = HalfPlane::bisector(pi, points[j])
            .map_err(|_| VoronoiError::CoincidentGenerators(i.min(j), i.max(j)))?;
        cell = clip_halfplane(&cell, &h, eps).ok_or(VoronoiError::EmptyCell(i))?;
    }
    Ok(cell)
}

fn classify_vertex(
    env: &ConvexPolygon,
    points: &[Point2],
    i: usize,
    v: Point2,
    eps: f64,
) -> VertexRecord {
    let di = v.distance(points[i]);
    let mut gens: Vec<(f64, usize)> = points
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(j, p)| ((v.distance(*p) - di).abs(), j))
        .collect();
    let mut edges: Vec<(f64, usize)> = env
        .edges()
        .enumerate()
        .map(|(k, e)| (e.distance_to(v), k))
        .collect();
    gens.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut g_sel: Vec<usize> = gens.iter().filter(|c| c.0 <= eps).map(|c| c.1).collect();
    let mut e_sel: Vec<usize> = edges.iter().filter(|c| c.0 <= eps).map(|c| c.1).collect();

    // A vertex always has at least two defining elements besides its owner;
    // fall back to the nearest residuals if rounding pushed them out of band.
    while g_sel.len() + e_sel.len() < 2 {
        let next_g = gens.iter().find(|c| !g_sel.contains(&c.1));
        let next_e = edges.iter().find(|c| !e_sel.contains(&c.1));
        match (next_g, next_e) {
            (Some(g), Some(e)) if g.0 <= e.0 => g_sel.push(g.1),
            (_, Some(e)) => e_sel.push(e.1),
            (Some(g), None) => g_sel.push(g.1),
            (None, None) => break,
        }
    }
    g_sel.sort_unstable();
    e_sel.sort_unstable();

    let kind = if e_sel.len() >= 2 {
        let (e, f) = consecutive_edges(env.len(), &e_sel);
        VertexKind::TypeC { e, f, i }
    } else if e_sel.len() == 1 {
        VertexKind::TypeB {
            edge: e_sel[0],
            i,
            j: g_sel[0],
        }
    } else {
        VertexKind::TypeA(i, g_sel[0], g_sel[1])
    };

    let mut defining_elements = Vec::with_capacity(1 + g_sel.len() + e_sel.len());
    defining_elements.push(Element::Generator(i));
    defining_elements.extend(g_sel.iter().map(|&g| Element::Generator(g)));
    defining_elements.extend(e_sel.iter().map(|&k| Element::Edge(k)));
    let degenerate = defining_elements.len() > 3;

    VertexRecord {
        position: v,
        kind,
        degenerate,
        defining_elements,
    }
}

/// Picks the pair of edges meeting at an environment vertex, preferring adjacent ones.
fn consecutive_edges(m: usize, sel: &[usize]) -> (usize, usize) {
    for &a in sel {
        for &b in sel {
            if (a + 1) % m == b {
                return (a, b);
            }
        }
    }
    (sel[0], sel[1])
}

fn classify_edge(env: &ConvexPolygon, points: &[Point2], i: usize, segment: Segment) -> EdgeRecord {
    let m = segment.midpoint();
    let pi = points[i];
    let di = m.distance(pi);

    let mut best_gen: Option<(f64, usize)> = None;
    for (j, p) in points.iter().enumerate() {
        if j == i {
            continue;
        }
        let r = (m.distance(*p) - di).abs();
        if best_gen.is_none_or(|(br, _)| r < br) {
            best_gen = Some((r, j));
        }
    }
    let mut best_edge: Option<(f64, usize)> = None;
    for k in 0..env.len() {
        let r = env.edge_line_distance(k, m).abs();
        if best_edge.is_none_or(|(br, _)| r < br) {
            best_edge = Some((r, k));
        }
    }

    match (best_gen, best_edge) {
        (Some((rg, j)), Some((re, _))) if rg < re => EdgeRecord {
            segment,
            kind: EdgeKind::TypeA { i, j },
            inward_normal: (pi - points[j]).unit().expect("distinct generators"),
        },
        (_, Some((_, k))) => EdgeRecord {
            segment,
            kind: EdgeKind::TypeB { i, edge: k },
            inward_normal: env.inward_normal(k),
        },
        _ => unreachable!("environment has edges"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::new(vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ])
        .unwrap()
    }

    fn partition(points: &[(f64, f64)]) -> VoronoiPartition {
        let q = unit_square();
        let config = Configuration::new(
            points.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            &q,
        )
        .unwrap();
        compute_partition(&q, &config).unwrap()
    }

    #[test]
    fn two_generators_split_square() {
        let vp = partition(&[(0.25, 0.5), (0.75, 0.5)]);
        assert!((vp.polygon(0).area() - 0.5).abs() < 1e-12);
        assert!((vp.polygon(1).area() - 0.5).abs() < 1e-12);

        let mut type_b = Vec::new();
        let mut type_c = 0;
        for cell in vp.cells() {
            for v in &cell.vertices {
                assert!(!v.degenerate);
                match v.kind {
                    VertexKind::TypeB { .. } => type_b.push(v.position),
                    VertexKind::TypeC { .. } => type_c += 1,
                    VertexKind::TypeA(..) => panic!("no type (a) vertex expected"),
                }
            }
        }
        // each type (b) vertex is stored once per cell
        assert_eq!(type_b.len(), 4);
        assert!(type_b.iter().all(|p| (p.x - 0.5).abs() < 1e-12));
        assert!(type_b.iter().any(|p| p.y.abs() < 1e-12));
        assert!(type_b.iter().any(|p| (p.y - 1.0).abs() < 1e-12));
        assert_eq!(type_c, 4);

        let shared: Vec<&EdgeRecord> = vp
            .edge_records(0)
            .iter()
            .filter(|e| matches!(e.kind, EdgeKind::TypeA { .. }))
            .collect();
        assert_eq!(shared.len(), 1);
        assert!((shared[0].inward_normal - Point2::new(-1.0, 0.0)).norm() < 1e-12);
        let other: Vec<&EdgeRecord> = vp
            .edge_records(1)
            .iter()
            .filter(|e| matches!(e.kind, EdgeKind::TypeA { .. }))
            .collect();
        assert!((other[0].inward_normal - Point2::new(1.0, 0.0)).norm() < 1e-12);

        assert_eq!(neighbors(&vp, 0), BTreeSet::from([1]));
        assert_eq!(neighbors(&vp, 1), BTreeSet::from([0]));
    }

    #[test]
    fn single_generator_owns_environment() {
        let vp = partition(&[(0.3, 0.6)]);
        assert_eq!(vp.polygon(0), &unit_square());
        assert!(vp
            .vertex_records(0)
            .iter()
            .all(|v| matches!(v.kind, VertexKind::TypeC { .. }) && !v.degenerate));
        assert!(vp.neighbors(0).is_empty());
        assert!(vp
            .edge_records(0)
            .iter()
            .all(|e| matches!(e.kind, EdgeKind::TypeB { .. })));
    }

    #[test]
    fn four_quadrants_have_degenerate_center() {
        let vp = partition(&[(0.25, 0.25), (0.75, 0.25), (0.75, 0.75), (0.25, 0.75)]);
        for i in 0..4 {
            assert!((vp.polygon(i).area() - 0.25).abs() < 1e-12);
            let center = vp
                .vertex_records(i)
                .iter()
                .find(|v| v.position.distance(Point2::new(0.5, 0.5)) < 1e-12)
                .expect("center vertex");
            assert!(center.degenerate);
            assert_eq!(center.generators().count(), 4);
            assert_eq!(vp.neighbors(i).len(), 2);
        }
        assert_eq!(vp.neighbors(0), &BTreeSet::from([1, 3]));
        assert!(vp.is_degenerate());
    }

    #[test]
    fn coincident_generators_rejected() {
        let q = unit_square();
        let pts = vec![Point2::new(0.5, 0.5), Point2::new(0.5, 0.5)];
        assert!(matches!(
            Configuration::new(pts.clone(), &q),
            Err(VoronoiError::CoincidentGenerators(0, 1))
        ));
        let raw = Configuration::from_points_unchecked(pts);
        assert!(matches!(
            compute_partition(&q, &raw),
            Err(VoronoiError::CoincidentGenerators(0, 1))
        ));
    }

    #[test]
    fn outside_generator_rejected() {
        let q = unit_square();
        assert!(matches!(
            Configuration::new(vec![Point2::new(1.5, 0.5)], &q),
            Err(VoronoiError::OutsideEnvironment { index: 0, .. })
        ));
    }

    #[test]
    fn three_generators_make_type_a_vertex() {
        let vp = partition(&[(0.2, 0.2), (0.8, 0.25), (0.45, 0.8)]);
        let mut found = 0;
        for i in 0..3 {
            for v in vp.vertex_records(i) {
                if let VertexKind::TypeA(a, b, c) = v.kind {
                    assert_eq!(a, i);
                    let d: Vec<f64> = [a, b, c]
                        .iter()
                        .map(|&g| v.position.distance(vp.generators()[g]))
                        .collect();
                    assert!((d[0] - d[1]).abs() < 1e-12 && (d[0] - d[2]).abs() < 1e-12);
                    found += 1;
                }
            }
        }
        assert_eq!(found, 3);
        assert!((vp.total_area() - 1.0).abs() < 1e-12);
    }
}
