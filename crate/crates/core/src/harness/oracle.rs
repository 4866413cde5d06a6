//! Brute-force reference values used for cross-checks.

use serde::{Deserialize, Serialize};

use crate::geometry::{distance_to_segment, ConvexPolygon, Point2};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValues {
    /// Grid estimate of `max_q min_i ||q - p_i||`.
    pub h_dc_grid: f64,
    /// Spacing of the sampling grid; the estimate is low by at most about this much.
    pub grid_spacing: f64,
    /// Exact enumeration over generator pairs and generator-edge pairs.
    pub h_sp_enumerated: f64,
}

/// Largest distance to the nearest generator over an `grid x grid` lattice of `q`.
pub fn grid_hdc(q: &ConvexPolygon, points: &[Point2], grid: usize) -> (f64, f64) {
    let (lo, hi) = q.bounding_box();
    let steps = grid.max(2) - 1;
    let dx = (hi.x - lo.x) / steps as f64;
    let dy = (hi.y - lo.y) / steps as f64;
    let mut best: f64 = 0.0;
    for a in 0..=steps {
        for b in 0..=steps {
            let s = Point2::new(lo.x + a as f64 * dx, lo.y + b as f64 * dy);
            if !q.contains(s, 0.0) {
                continue;
            }
            let d = points
                .iter()
                .map(|p| p.distance(s))
                .fold(f64::INFINITY, f64::min);
            best = best.max(d);
        }
    }
    (best, dx.hypot(dy))
}

/// Smallest of all half inter-generator distances and generator-to-edge distances.
pub fn enumerate_hsp(q: &ConvexPolygon, points: &[Point2]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, p) in points.iter().enumerate() {
        for other in &points[i + 1..] {
            best = best.min(0.5 * p.distance(*other));
        }
        for e in q.edges() {
            best = best.min(distance_to_segment(*p, &e));
        }
    }
    best
}

pub fn oracle_values(q: &ConvexPolygon, points: &[Point2], grid: usize) -> OracleValues {
    let (h_dc_grid, grid_spacing) = grid_hdc(q, points, grid);
    OracleValues {
        h_dc_grid,
        grid_spacing,
        h_sp_enumerated: enumerate_hsp(q, points),
    }
}
