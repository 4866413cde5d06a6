//! Generalized gradients of the one-center and multi-center functions,
//! least-norm elements and criticality tests.
//!
//! A [`GradientSet`] stores finitely many candidate vectors; the generalized
//! gradient is their convex hull. Multi-center gradients live in `R^{2n}`
//! with generator `i` occupying coordinates `2i` and `2i + 1`.

use serde::{Deserialize, Serialize};

use crate::centers::{circumcenter, incenter_set};
use crate::error::NonsmoothError;
use crate::geometry::{
    distance_to_segment, zero_in_hull, ConvexPolygon, HalfPlane, Point2, Tolerances, ZeroPosition,
};
use crate::objective::{
    edge_distance, evaluate_f, evaluate_g, hdc_on, hsp_on, lg_unchecked, sm_unchecked, Problem,
};
use crate::voronoi::{compute_partition, Configuration, EdgeKind, Element, VoronoiPartition};

/// Absolute tolerance for "the least-norm element is zero".
pub const ZERO_TOL: f64 = 1e-9;

/// Where a candidate vector came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    /// A vertex of a single polygon (one-center gradients).
    PolygonVertex(usize),
    /// An edge of a single polygon (one-center gradients).
    PolygonEdge(usize),
    /// Vertex `vertex` of cell `cell` together with the two further
    /// elements that fix it with the cell's generator.
    CellVertex {
        cell: usize,
        vertex: usize,
        pair: [Element; 2],
    },
    /// Edge `edge` of cell `cell`.
    CellEdge { cell: usize, edge: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientSet {
    dimension: usize,
    candidates: Vec<Vec<f64>>,
    provenance: Vec<Provenance>,
}

impl GradientSet {
    pub fn new(dimension: usize) -> Self {
        GradientSet {
            dimension,
            candidates: Vec::new(),
            provenance: Vec::new(),
        }
    }

    pub fn push(&mut self, candidate: Vec<f64>, tag: Provenance) {
        assert_eq!(candidate.len(), self.dimension, "candidate dimension");
        self.candidates.push(candidate);
        self.provenance.push(tag);
    }

    pub fn extend(&mut self, other: GradientSet) {
        assert_eq!(other.dimension, self.dimension, "gradient set dimension");
        self.candidates.extend(other.candidates);
        self.provenance.extend(other.provenance);
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn candidates(&self) -> &[Vec<f64>] {
        &self.candidates
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    /// Candidates of a two-dimensional set as points.
    pub fn points2(&self) -> Vec<Point2> {
        assert_eq!(self.dimension, 2);
        self.candidates
            .iter()
            .map(|c| Point2::new(c[0], c[1]))
            .collect()
    }

    /// Image of every candidate under the projection onto generator `i`'s block.
    pub fn project(&self, i: usize) -> Vec<Point2> {
        self.candidates
            .iter()
            .map(|c| Point2::new(c[2 * i], c[2 * i + 1]))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub contains_zero: ZeroPosition,
    pub least_norm_vector: Vec<f64>,
    pub least_norm_magnitude: f64,
}

impl CriticalityReport {
    pub fn least_norm_point2(&self) -> Point2 {
        Point2::new(self.least_norm_vector[0], self.least_norm_vector[1])
    }

    /// Block of generator `i` in a `2n`-dimensional least-norm vector.
    pub fn block(&self, i: usize) -> Point2 {
        Point2::new(self.least_norm_vector[2 * i], self.least_norm_vector[2 * i + 1])
    }
}

fn embed(n: usize, blocks: &[(usize, Point2)]) -> Vec<f64> {
    let mut v = vec![0.0; 2 * n];
    for &(i, b) in blocks {
        v[2 * i] += b.x;
        v[2 * i + 1] += b.y;
    }
    v
}

fn check_inside(q: &ConvexPolygon, p: Point2) -> Result<Tolerances, NonsmoothError> {
    let tol = Tolerances::for_polygon(q);
    if !p.is_finite() || !q.contains(p, tol.geo) {
        return Err(crate::error::ObjectiveError::OutsidePolygon(p).into());
    }
    Ok(tol)
}

/// Generalized gradient of `lg_Q` at `p`.
pub fn grad_lg(q: &ConvexPolygon, p: Point2) -> Result<GradientSet, NonsmoothError> {
    let tol = check_inside(q, p)?;
    grad_lg_with(q, p, tol.act)
}

/// `grad_lg` with an explicit activity window.
pub fn grad_lg_with(
    q: &ConvexPolygon,
    p: Point2,
    window: f64,
) -> Result<GradientSet, NonsmoothError> {
    let value = lg_unchecked(q, p);
    let mut set = GradientSet::new(2);
    for (k, &v) in q.vertices().iter().enumerate() {
        if v.distance(p) >= value - window {
            let u = (p - v).unit().ok_or(NonsmoothError::AtFurthestVertex(v))?;
            set.push(vec![u.x, u.y], Provenance::PolygonVertex(k));
        }
    }
    Ok(set)
}

/// Generalized gradient of `sm_Q` at `p`.
pub fn grad_sm(q: &ConvexPolygon, p: Point2) -> Result<GradientSet, NonsmoothError> {
    let tol = check_inside(q, p)?;
    Ok(grad_sm_with(q, p, tol.act))
}

/// `grad_sm` with an explicit activity window.
pub fn grad_sm_with(q: &ConvexPolygon, p: Point2, window: f64) -> GradientSet {
    let value = sm_unchecked(q, p);
    let mut set = GradientSet::new(2);
    for k in 0..q.len() {
        if distance_to_segment(p, &q.edge(k)) <= value + window {
            let n = q.inward_normal(k);
            set.push(vec![n.x, n.y], Provenance::PolygonEdge(k));
        }
    }
    set
}

/// `lambda(e, i, j)` for the edge line `e` and generators `p_i`, `p_j`.
pub fn lambda(e: &HalfPlane, pi: Point2, pj: Point2) -> Result<f64, NonsmoothError> {
    let d = pj - pi;
    let m = pi.midpoint(pj);
    let (a, b, c) = (e.a, e.b, e.c);
    let den = a * d.y - b * d.x;
    if den.abs() <= 1e-12 * d.norm() {
        return Err(NonsmoothError::ParallelBisector);
    }
    Ok(0.5 - (a * d.x + b * d.y) * (a * m.x + b * m.y + c) / (den * den))
}

/// `mu(i, j, k)` for three generators.
pub fn mu(pi: Point2, pj: Point2, pk: Point2) -> Result<f64, NonsmoothError> {
    let dij = pj - pi;
    let dik = pk - pi;
    let djk = pk - pj;
    let den = pk.x * dij.y - pj.x * dik.y + pi.x * djk.y;
    // den is twice the signed area of the triangle
    if den.abs() <= 1e-12 * dij.norm() * dik.norm() {
        return Err(NonsmoothError::CollinearGenerators);
    }
    Ok(0.5 + dij.dot(djk) * dik.dot(djk) / (2.0 * den * den))
}

/// Candidate for the triplet (generator `i`, `alpha`, `beta`) at vertex `v`.
fn triplet_candidate(
    partition: &VoronoiPartition,
    i: usize,
    v: Point2,
    alpha: Element,
    beta: Element,
) -> Option<Vec<f64>> {
    let pts = partition.generators();
    let n = pts.len();
    let unit_from_v = |g: usize| (pts[g] - v).unit();
    match (alpha, beta) {
        (Element::Generator(j), Element::Generator(k)) => {
            let (pi, pj, pk) = (pts[i], pts[j], pts[k]);
            let blocks = [
                (i, mu(pi, pj, pk).ok()? * unit_from_v(i)?),
                (j, mu(pj, pk, pi).ok()? * unit_from_v(j)?),
                (k, mu(pk, pi, pj).ok()? * unit_from_v(k)?),
            ];
            Some(embed(n, &blocks))
        }
        (Element::Generator(j), Element::Edge(e)) | (Element::Edge(e), Element::Generator(j)) => {
            let line = partition.environment().edge_halfplane(e);
            let blocks = [
                (i, lambda(&line, pts[i], pts[j]).ok()? * unit_from_v(i)?),
                (j, lambda(&line, pts[j], pts[i]).ok()? * unit_from_v(j)?),
            ];
            Some(embed(n, &blocks))
        }
        (Element::Edge(_), Element::Edge(_)) => Some(embed(n, &[(i, unit_from_v(i)?)])),
    }
}

/// Generalized gradient of `G_i` in `R^{2n}`.
pub fn grad_g(partition: &VoronoiPartition, i: usize) -> Result<GradientSet, NonsmoothError> {
    grad_g_with(partition, i, partition.tolerances().act)
}

/// `grad_g` with an explicit activity window on the cell's vertices.
pub fn grad_g_with(
    partition: &VoronoiPartition,
    i: usize,
    window: f64,
) -> Result<GradientSet, NonsmoothError> {
    let value = evaluate_g(partition, i)?;
    let p = partition.generators()[i];
    let mut set = GradientSet::new(2 * partition.len());
    let mut last_vertex = None;
    for (k, rec) in partition.vertex_records(i).iter().enumerate() {
        if rec.position.distance(p) < value - window {
            continue;
        }
        last_vertex = Some(rec.position);
        let others: Vec<Element> = rec
            .defining_elements
            .iter()
            .copied()
            .filter(|&e| e != Element::Generator(i))
            .collect();
        for a in 0..others.len() {
            for b in a + 1..others.len() {
                if let Some(c) = triplet_candidate(partition, i, rec.position, others[a], others[b])
                {
                    set.push(
                        c,
                        Provenance::CellVertex {
                            cell: i,
                            vertex: k,
                            pair: [others[a], others[b]],
                        },
                    );
                }
            }
        }
    }
    if set.is_empty() {
        return Err(NonsmoothError::AtFurthestVertex(last_vertex.unwrap_or(p)));
    }
    Ok(set)
}

/// Generalized gradient of `F_i` in `R^{2n}`.
pub fn grad_f(partition: &VoronoiPartition, i: usize) -> Result<GradientSet, NonsmoothError> {
    grad_f_with(partition, i, partition.tolerances().act)
}

/// `grad_f` with an explicit activity window on the cell's edges.
pub fn grad_f_with(
    partition: &VoronoiPartition,
    i: usize,
    window: f64,
) -> Result<GradientSet, NonsmoothError> {
    let value = evaluate_f(partition, i)?;
    let n = partition.len();
    let mut set = GradientSet::new(2 * n);
    for (k, rec) in partition.edge_records(i).iter().enumerate() {
        if edge_distance(partition, i, k) > value + window {
            continue;
        }
        let c = match rec.kind {
            EdgeKind::TypeA { j, .. } => {
                let nrm = rec.inward_normal;
                embed(n, &[(i, 0.5 * nrm), (j, -0.5 * nrm)])
            }
            EdgeKind::TypeB { edge, .. } => {
                embed(n, &[(i, partition.environment().inward_normal(edge))])
            }
        };
        set.push(c, Provenance::CellEdge { cell: i, edge: k });
    }
    Ok(set)
}

/// Generalized gradient of `H_DC`, built on `partition` with activity window `window`.
pub fn grad_hdc_on(
    partition: &VoronoiPartition,
    window: f64,
) -> Result<GradientSet, NonsmoothError> {
    let eval = hdc_on(partition, window);
    let mut set = GradientSet::new(2 * partition.len());
    for &i in &eval.active.active_generators {
        set.extend(grad_g_with(partition, i, window)?);
    }
    Ok(set)
}

/// Generalized gradient of `H_SP`, built on `partition` with activity window `window`.
pub fn grad_hsp_on(
    partition: &VoronoiPartition,
    window: f64,
) -> Result<GradientSet, NonsmoothError> {
    let eval = hsp_on(partition, window);
    let mut set = GradientSet::new(2 * partition.len());
    for &i in &eval.active.active_generators {
        set.extend(grad_f_with(partition, i, window)?);
    }
    Ok(set)
}

pub fn grad_hdc(q: &ConvexPolygon, config: &Configuration) -> Result<GradientSet, NonsmoothError> {
    let partition = compute_partition(q, config)?;
    grad_hdc_on(&partition, partition.tolerances().act)
}

pub fn grad_hsp(q: &ConvexPolygon, config: &Configuration) -> Result<GradientSet, NonsmoothError> {
    let partition = compute_partition(q, config)?;
    grad_hsp_on(&partition, partition.tolerances().act)
}

/// Least-norm element of the convex hull of `g`'s candidates.
///
/// In dimension 2 the position of the origin relative to the hull is
/// classified exactly; in higher dimension only "zero or not" is reported,
/// as `Boundary` or `Outside`.
pub fn least_norm(g: &GradientSet) -> CriticalityReport {
    assert!(!g.is_empty(), "least_norm of an empty gradient set");
    let weights = min_norm_weights(g.candidates());
    let mut x = vec![0.0; g.dimension()];
    for (c, w) in g.candidates().iter().zip(&weights) {
        for (xk, ck) in x.iter_mut().zip(c) {
            *xk += w * ck;
        }
    }
    let magnitude = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let contains_zero = if g.dimension() == 2 {
        zero_in_hull(&g.points2(), ZERO_TOL)
    } else if magnitude <= ZERO_TOL {
        ZeroPosition::Boundary
    } else {
        ZeroPosition::Outside
    };
    CriticalityReport {
        contains_zero,
        least_norm_vector: x,
        least_norm_magnitude: magnitude,
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Convex weights of the minimum-norm point of `co(points)` (Wolfe's method).
pub fn min_norm_weights(points: &[Vec<f64>]) -> Vec<f64> {
    let m = points.len();
    assert!(m > 0);
    let dim = points[0].len();
    let scale = points
        .iter()
        .map(|p| dot(p, p))
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let j0 = (0..m)
        .min_by(|&a, &b| dot(&points[a], &points[a]).total_cmp(&dot(&points[b], &points[b])))
        .expect("nonempty");
    let mut corral = vec![j0];
    let mut w = vec![1.0];
    let combine = |corral: &[usize], w: &[f64]| {
        let mut x = vec![0.0; dim];
        for (&k, &wk) in corral.iter().zip(w) {
            for (xi, pi) in x.iter_mut().zip(&points[k]) {
                *xi += wk * pi;
            }
        }
        x
    };
    let mut x = points[j0].clone();

    for _ in 0..(100 * m + 100) {
        let xx = dot(&x, &x);
        if xx <= 1e-30 * scale {
            break;
        }
        let (j, xp) = (0..m)
            .map(|k| (k, dot(&x, &points[k])))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if xx - xp <= 1e-13 * scale || corral.contains(&j) {
            break;
        }
        corral.push(j);
        w.push(0.0);

        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                // affinely dependent corral: drop the newcomer and stop
                corral.pop();
                w.pop();
                let full = scatter(m, &corral, &w);
                return full;
            };
            if alpha.iter().all(|&a| a > 1e-14) {
                w = alpha;
                break;
            }
            let mut theta: f64 = 1.0;
            for (wk, ak) in w.iter().zip(&alpha) {
                if *ak <= 1e-14 && wk - ak > 0.0 {
                    theta = theta.min(wk / (wk - ak));
                }
            }
            for (wk, ak) in w.iter_mut().zip(&alpha) {
                *wk = theta * ak + (1.0 - theta) * *wk;
            }
            let mut k = 0;
            while k < corral.len() {
                if w[k] <= 1e-14 {
                    corral.remove(k);
                    w.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = w.iter().sum();
            w.iter_mut().for_each(|v| *v /= total);
        }
        x = combine(&corral, &w);
    }
    scatter(m, &corral, &w)
}

fn scatter(m: usize, corral: &[usize], w: &[f64]) -> Vec<f64> {
    let mut full = vec![0.0; m];
    for (&k, &wk) in corral.iter().zip(w) {
        full[k] = wk;
    }
    full
}

/// Weights (summing to one) of the minimum-norm point of the affine hull.
fn affine_minimizer(points: &[Vec<f64>], corral: &[usize]) -> Option<Vec<f64>> {
    let s = corral.len();
    let size = s + 1;
    let mut a = vec![vec![0.0; size + 1]; size];
    let mut scale: f64 = 0.0;
    for r in 0..s {
        for c in 0..s {
            a[r][c] = dot(&points[corral[r]], &points[corral[c]]);
            scale = scale.max(a[r][c].abs());
        }
        a[r][s] = 1.0;
        a[s][r] = 1.0;
    }
    a[s][size] = 1.0;
    let x = solve_dense(a, 1e-13 * scale.max(1.0))?;
    Some(x[..s].to_vec())
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve_dense(mut a: Vec<Vec<f64>>, tiny: f64) -> Option<Vec<f64>> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| a[r][col].abs().total_cmp(&a[s][col].abs()))?;
        if a[piv][col].abs() <= tiny {
            return None;
        }
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            if f != 0.0 {
                for c in col..=n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut s = a[r][n];
        for c in r + 1..n {
            s -= a[r][c] * x[c];
        }
        x[r] = s / a[r][r];
    }
    Some(x)
}

/// Per-generator part of a criticality analysis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorStatus {
    pub index: usize,
    /// `||p_i - CC(V_i)||` for disk covering, `dist(p_i, IC(V_i))` for packing.
    pub center_distance: f64,
    pub centered: bool,
    /// Position of the origin relative to the projection of the gradient onto generator `i`.
    pub projected_zero: ZeroPosition,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalAnalysis {
    pub problem: Problem,
    pub value: f64,
    pub report: CriticalityReport,
    /// Least-norm magnitude is within the criticality tolerance.
    pub is_critical: bool,
    pub generators: Vec<GeneratorStatus>,
    pub all_active_centered: bool,
}

/// Distance from generator `i` to the relevant center of its cell.
pub fn center_distance(partition: &VoronoiPartition, i: usize, problem: Problem) -> f64 {
    let p = partition.generators()[i];
    let cell = partition.polygon(i);
    match problem {
        Problem::DiskCovering => p.distance(circumcenter(cell).center),
        Problem::SpherePacking => incenter_set(cell).distance_to(p),
    }
}

/// Least-norm gradient and centeredness of the active generators.
pub fn classify_critical(
    q: &ConvexPolygon,
    config: &Configuration,
    problem: Problem,
) -> Result<CriticalAnalysis, NonsmoothError> {
    let partition = compute_partition(q, config)?;
    let tol = partition.tolerances();
    let (eval, grad) = match problem {
        Problem::DiskCovering => (hdc_on(&partition, tol.act), grad_hdc_on(&partition, tol.act)?),
        Problem::SpherePacking => (hsp_on(&partition, tol.act), grad_hsp_on(&partition, tol.act)?),
    };
    let report = least_norm(&grad);
    let generators: Vec<GeneratorStatus> = eval
        .active
        .active_generators
        .iter()
        .map(|&i| {
            let d = center_distance(&partition, i, problem);
            GeneratorStatus {
                index: i,
                center_distance: d,
                centered: d <= tol.crit,
                projected_zero: zero_in_hull(&grad.project(i), ZERO_TOL),
            }
        })
        .collect();
    Ok(CriticalAnalysis {
        problem,
        value: eval.value,
        is_critical: report.least_norm_magnitude <= tol.crit,
        all_active_centered: generators.iter().all(|g| g.centered),
        report,
        generators,
    })
}
