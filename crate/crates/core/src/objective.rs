//! One-center functions `lg`, `sm` and the multi-center functions
//! `H_DC = max_i G_i` and `H_SP = min_i F_i`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::ObjectiveError;
use crate::geometry::{distance_to_segment, ConvexPolygon, Point2, Tolerances};
use crate::voronoi::{compute_partition, Configuration, EdgeKind, VoronoiPartition};

/// Which multi-center problem is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    /// Disk covering: minimize `H_DC`.
    DiskCovering,
    /// Sphere packing: maximize `H_SP`.
    SpherePacking,
}

/// A cell vertex at which `H_DC` is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveVertex {
    pub cell: usize,
    pub vertex: usize,
    pub position: Point2,
}

/// A cell edge at which `H_SP` is attained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveEdge {
    pub cell: usize,
    pub edge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActiveSets {
    pub active_generators: BTreeSet<usize>,
    pub active_vertices: Vec<ActiveVertex>,
    pub active_edges: Vec<ActiveEdge>,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub value: f64,
    pub active: ActiveSets,
}

fn check_inside(q: &ConvexPolygon, p: Point2) -> Result<(), ObjectiveError> {
    let tol = Tolerances::for_polygon(q);
    if !p.is_finite() || !q.contains(p, tol.geo) {
        return Err(ObjectiveError::OutsidePolygon(p));
    }
    Ok(())
}

/// Largest distance from `p` to a vertex of `q`.
pub fn lg(q: &ConvexPolygon, p: Point2) -> Result<f64, ObjectiveError> {
    check_inside(q, p)?;
    Ok(lg_unchecked(q, p))
}

pub(crate) fn lg_unchecked(q: &ConvexPolygon, p: Point2) -> f64 {
    q.vertices()
        .iter()
        .map(|v| v.distance(p))
        .fold(0.0, f64::max)
}

/// Smallest distance from `p` to an edge of `q`.
pub fn sm(q: &ConvexPolygon, p: Point2) -> Result<f64, ObjectiveError> {
    check_inside(q, p)?;
    Ok(sm_unchecked(q, p))
}

pub(crate) fn sm_unchecked(q: &ConvexPolygon, p: Point2) -> f64 {
    q.edges()
        .map(|e| distance_to_segment(p, &e))
        .fold(f64::INFINITY, f64::min)
}

fn check_index(partition: &VoronoiPartition, i: usize) -> Result<(), ObjectiveError> {
    if i >= partition.len() {
        return Err(ObjectiveError::IndexOutOfRange {
            index: i,
            n: partition.len(),
        });
    }
    Ok(())
}

/// `G_i`: distance from `p_i` to the furthest vertex of its cell.
pub fn evaluate_g(partition: &VoronoiPartition, i: usize) -> Result<f64, ObjectiveError> {
    check_index(partition, i)?;
    let p = partition.generators()[i];
    Ok(partition
        .vertex_records(i)
        .iter()
        .map(|v| v.position.distance(p))
        .fold(0.0, f64::max))
}

/// Distance from `p_i` to the line of edge `k` of its cell.
pub(crate) fn edge_distance(partition: &VoronoiPartition, i: usize, k: usize) -> f64 {
    let p = partition.generators()[i];
    match partition.edge_records(i)[k].kind {
        EdgeKind::TypeA { j, .. } => 0.5 * p.distance(partition.generators()[j]),
        EdgeKind::TypeB { edge, .. } => {
            distance_to_segment(p, &partition.environment().edge(edge))
        }
    }
}

/// `F_i`: clearance of `p_i` inside its cell.
pub fn evaluate_f(partition: &VoronoiPartition, i: usize) -> Result<f64, ObjectiveError> {
    check_index(partition, i)?;
    Ok((0..partition.edge_records(i).len())
        .map(|k| edge_distance(partition, i, k))
        .fold(f64::INFINITY, f64::min))
}

/// `H_DC` and its active sets on an existing partition, with activity window `window`.
pub fn hdc_on(partition: &VoronoiPartition, window: f64) -> Evaluation {
    let g: Vec<f64> = (0..partition.len())
        .map(|i| evaluate_g(partition, i).expect("index in range"))
        .collect();
    let value = g.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let active_generators = (0..g.len()).filter(|&i| g[i] >= value - window).collect();
    let mut active_vertices = Vec::new();
    for i in 0..partition.len() {
        let p = partition.generators()[i];
        for (k, v) in partition.vertex_records(i).iter().enumerate() {
            if v.position.distance(p) >= value - window {
                active_vertices.push(ActiveVertex {
                    cell: i,
                    vertex: k,
                    position: v.position,
                });
            }
        }
    }
    Evaluation {
        value,
        active: ActiveSets {
            active_generators,
            active_vertices,
            active_edges: Vec::new(),
            tolerance: window,
        },
    }
}

/// `H_SP` and its active sets on an existing partition, with activity window `window`.
pub fn hsp_on(partition: &VoronoiPartition, window: f64) -> Evaluation {
    let f: Vec<f64> = (0..partition.len())
        .map(|i| evaluate_f(partition, i).expect("index in range"))
        .collect();
    let value = f.iter().copied().fold(f64::INFINITY, f64::min);
    let active_generators = (0..f.len()).filter(|&i| f[i] <= value + window).collect();
    let mut active_edges = Vec::new();
    for i in 0..partition.len() {
        for k in 0..partition.edge_records(i).len() {
            if edge_distance(partition, i, k) <= value + window {
                active_edges.push(ActiveEdge { cell: i, edge: k });
            }
        }
    }
    Evaluation {
        value,
        active: ActiveSets {
            active_generators,
            active_vertices: Vec::new(),
            active_edges,
            tolerance: window,
        },
    }
}

/// Multi-circumcenter function `H_DC` of `config` in `q`.
pub fn evaluate_hdc(q: &ConvexPolygon, config: &Configuration) -> Result<Evaluation, ObjectiveError> {
    let partition = compute_partition(q, config)?;
    Ok(hdc_on(&partition, partition.tolerances().act))
}

/// Multi-incenter function `H_SP` of `config` in `q`.
pub fn evaluate_hsp(q: &ConvexPolygon, config: &Configuration) -> Result<Evaluation, ObjectiveError> {
    let partition = compute_partition(q, config)?;
    Ok(hsp_on(&partition, partition.tolerances().act))
}

/// Value of the objective for `problem`.
pub fn evaluate(
    problem: Problem,
    q: &ConvexPolygon,
    config: &Configuration,
) -> Result<Evaluation, ObjectiveError> {
    match problem {
        Problem::DiskCovering => evaluate_hdc(q, config),
        Problem::SpherePacking => evaluate_hsp(q, config),
    }
}
