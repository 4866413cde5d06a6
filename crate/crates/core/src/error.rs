use thiserror::Error;

use crate::geometry::Point2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is not finite")]
    NonFinite(usize),
    #[error("vertex {0} duplicates its successor")]
    DuplicateVertex(usize),
    #[error("polygon is not strictly convex at vertex {0}")]
    NotStrictlyConvex(usize),
    #[error("half-plane normal is zero or not finite")]
    DegenerateHalfPlane,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VoronoiError {
    #[error("generator {index} at {point} lies outside the environment")]
    OutsideEnvironment { index: usize, point: Point2 },
    #[error("generators {0} and {1} coincide")]
    CoincidentGenerators(usize, usize),
    #[error("generator {0} is not finite")]
    NonFinite(usize),
    #[error("cell {0} has empty interior")]
    EmptyCell(usize),
    #[error("configuration is empty")]
    NoGenerators,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ObjectiveError {
    #[error("point {0} lies outside the polygon")]
    OutsidePolygon(Point2),
    #[error("generator index {index} out of range for {n} generators")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonsmoothError {
    #[error("point coincides with the furthest vertex {0}; the gradient is undefined")]
    AtFurthestVertex(Point2),
    #[error("bisector is parallel to the edge line")]
    ParallelBisector,
    #[error("generators are collinear")]
    CollinearGenerators,
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

impl From<VoronoiError> for NonsmoothError {
    fn from(e: VoronoiError) -> Self {
        NonsmoothError::Objective(e.into())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("invalid flow parameters: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Nonsmooth(#[from] NonsmoothError),
}

impl From<VoronoiError> for FlowError {
    fn from(e: VoronoiError) -> Self {
        FlowError::Nonsmooth(e.into())
    }
}

impl From<ObjectiveError> for FlowError {
    fn from(e: ObjectiveError) -> Self {
        FlowError::Nonsmooth(e.into())
    }
}
