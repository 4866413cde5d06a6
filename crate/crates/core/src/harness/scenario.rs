//! Scenario files.
//!
//! ```toml
//! polygon = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]
//! n = 4
//!
//! [init]
//! random_seed = 7          # or: points = [[0.2, 0.2], ...]
//!
//! [flow]
//! kind = "LloydCC"
//! dt = 0.01
//! t_max = 20.0
//! stop_tol = 1e-4
//!
//! [outputs]
//! csv = true
//! svg_every_k_steps = 0
//! ```

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::GeometryError;
use crate::flows::FlowSpec;
use crate::geometry::{ConvexPolygon, Point2, Tolerances};
use crate::voronoi::Configuration;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Init {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_seed: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default = "yes")]
    pub csv: bool,
    /// Write a partition frame every this many steps; 0 disables periodic frames.
    #[serde(default)]
    pub svg_every_k_steps: u32,
}

fn yes() -> bool {
    true
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs {
            csv: true,
            svg_every_k_steps: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub polygon: Vec<[f64; 2]>,
    pub n: usize,
    pub init: Init,
    pub flow: FlowSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

/// One problem found while validating a scenario.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScenarioIssue {
    #[error("{field}: {message}")]
    Malformed { field: String, message: String },
    #[error("polygon: {0}")]
    InvalidPolygon(GeometryError),
    #[error("init.points[{index}]: {point} lies outside the polygon")]
    PointOutside { index: usize, point: Point2 },
    #[error("init.points: generators {0} and {1} coincide")]
    CoincidentPoints(usize, usize),
    #[error("init: expected exactly one of `points` or `random_seed`")]
    AmbiguousInit,
    #[error("init.points: {given} points given but n = {n}")]
    CountMismatch { given: usize, n: usize },
    #[error("flow: {0}")]
    InvalidFlow(String),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid scenario: {}", join(.0))]
    Invalid(Vec<ScenarioIssue>),
}

fn join(issues: &[ScenarioIssue]) -> String {
    issues
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl ScenarioError {
    pub fn issues(&self) -> &[ScenarioIssue] {
        match self {
            ScenarioError::Invalid(v) => v,
            ScenarioError::Syntax { .. } => &[],
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
    (line, column)
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let scenario: Scenario = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((0, 0), |s| line_col(text, s.start));
        ScenarioError::Syntax {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    scenario.validate()?;
    Ok(scenario)
}

impl Scenario {
    /// Checks every field and reports all problems found.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let mut issues = Vec::new();
        if self.n == 0 {
            issues.push(ScenarioIssue::Malformed {
                field: "n".into(),
                message: "must be at least 1".into(),
            });
        }
        if let Err(e) = self.flow.validate() {
            issues.push(ScenarioIssue::InvalidFlow(e.to_string()));
        }
        let polygon = match self.environment() {
            Ok(p) => Some(p),
            Err(e) => {
                issues.push(ScenarioIssue::InvalidPolygon(e));
                None
            }
        };
        match (&self.init.points, self.init.random_seed) {
            (Some(points), None) => {
                if points.len() != self.n {
                    issues.push(ScenarioIssue::CountMismatch {
                        given: points.len(),
                        n: self.n,
                    });
                }
                if let Some(q) = &polygon {
                    let tol = Tolerances::for_polygon(q);
                    for (index, &p) in points.iter().enumerate() {
                        let point = Point2::from(p);
                        if !point.is_finite() || !q.contains(point, tol.geo) {
                            issues.push(ScenarioIssue::PointOutside { index, point });
                        }
                    }
                    for i in 0..points.len() {
                        for j in i + 1..points.len() {
                            if Point2::from(points[i]).distance(Point2::from(points[j])) < tol.geo {
                                issues.push(ScenarioIssue::CoincidentPoints(i, j));
                            }
                        }
                    }
                }
            }
            (None, Some(_)) => {}
            _ => issues.push(ScenarioIssue::AmbiguousInit),
        }
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(issues))
        }
    }

    pub fn environment(&self) -> Result<ConvexPolygon, GeometryError> {
        ConvexPolygon::new(self.polygon.iter().map(|&p| Point2::from(p)).collect())
    }

    /// Initial configuration: the explicit points, or seeded uniform samples.
    pub fn initial_configuration(&self) -> Result<Configuration, ScenarioError> {
        self.validate()?;
        let q = self.environment().expect("validated");
        let points = match (&self.init.points, self.init.random_seed) {
            (Some(points), _) => points.iter().map(|&p| Point2::from(p)).collect(),
            (None, Some(seed)) => uniform_in_polygon(&q, self.n, seed),
            (None, None) => unreachable!("validated"),
        };
        Configuration::new(points, &q).map_err(|e| {
            ScenarioError::Invalid(vec![ScenarioIssue::Malformed {
                field: "init".into(),
                message: e.to_string(),
            }])
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario serializes")
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_toml())
    }
}

/// `n` points drawn uniformly from the interior of `q` by rejection from its
/// bounding box, using xoshiro256++ seeded with `seed`.
pub fn uniform_in_polygon(q: &ConvexPolygon, n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(seed);
    let (lo, hi) = q.bounding_box();
    let tol = Tolerances::for_polygon(q);
    let mut out: Vec<Point2> = Vec::with_capacity(n);
    while out.len() < n {
        let p = Point2::new(rng.random_range(lo.x..hi.x), rng.random_range(lo.y..hi.y));
        if q.clearance(p) > tol.geo && out.iter().all(|o| o.distance(p) > tol.geo) {
            out.push(p);
        }
    }
    out
}
