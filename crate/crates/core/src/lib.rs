//! Disk-covering and sphere-packing multi-center optimization on bounded
//! Voronoi partitions of a convex polygon.
//!
//! The crate is layered bottom-up:
//!
//! - [`geometry`]: points, half-planes, convex polygons, clipping, hulls.
//! - [`voronoi`]: bounded Voronoi partitions with vertex and edge taxonomy.
//! - [`centers`]: circumcenter and incenter-set solvers.
//! - [`objective`]: the 1-center functions and the multi-center functions
//!   `H_DC` (worst-case coverage radius) and `H_SP` (packing radius).
//! - [`nonsmooth`]: generalized gradients, least-norm elements, criticality.
//! - [`flows`]: the six gradient and geometric-centering flows and their
//!   diagnostics.
//! - [`harness`]: scenario files, batch runs, CSV and SVG output.

pub mod centers;
pub mod error;
pub mod flows;
pub mod geometry;
pub mod harness;
pub mod nonsmooth;
pub mod objective;
pub mod voronoi;

pub use error::{FlowError, GeometryError, NonsmoothError, ObjectiveError, VoronoiError};
pub use geometry::{ConvexPolygon, HalfPlane, Point2, Segment, Tolerances, ZeroPosition};
pub use voronoi::{Configuration, VoronoiPartition};
