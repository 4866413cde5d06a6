//! The six multi-center flows, their time integration and diagnostics.
//!
//! Integration is fixed-step forward Euler followed by projection onto the
//! environment. Each sampled step of length `dt` is split into `substeps`
//! Euler substeps of length `h`.
//!
//! The distributed gradient flows use the exact active sets of each cell, so
//! near a switching surface they oscillate with amplitude about `h` times the
//! speed. The centralized gradient flows also switch between generators; for
//! them the active sets are taken within a window of `2h` times the largest
//! speed seen over the last sampled step. Generators whose values one substep
//! could reorder then descend together instead of taking turns.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centers::{circumcenter, incenter_set};
use crate::error::FlowError;
use crate::geometry::{ConvexPolygon, Point2, Tolerances};
use crate::nonsmooth::{
    center_distance, grad_hdc_on, grad_hsp_on, grad_lg_with, grad_sm_with, least_norm,
};
use crate::objective::{hdc_on, hsp_on, Problem};
use crate::voronoi::{compute_partition, Configuration, VoronoiPartition};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FlowKind {
    GradDC,
    GradSP,
    DistGradDC,
    DistGradSP,
    LloydCC,
    LloydIC,
}

impl FlowKind {
    pub const ALL: [FlowKind; 6] = [
        FlowKind::GradDC,
        FlowKind::GradSP,
        FlowKind::DistGradDC,
        FlowKind::DistGradSP,
        FlowKind::LloydCC,
        FlowKind::LloydIC,
    ];

    /// The objective this flow improves.
    pub fn problem(self) -> Problem {
        match self {
            FlowKind::GradDC | FlowKind::DistGradDC | FlowKind::LloydCC => Problem::DiskCovering,
            FlowKind::GradSP | FlowKind::DistGradSP | FlowKind::LloydIC => Problem::SpherePacking,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowKind::GradDC => "GradDC",
            FlowKind::GradSP => "GradSP",
            FlowKind::DistGradDC => "DistGradDC",
            FlowKind::DistGradSP => "DistGradSP",
            FlowKind::LloydCC => "LloydCC",
            FlowKind::LloydIC => "LloydIC",
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FlowKind {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        FlowKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| FlowError::InvalidSpec(format!("unknown flow kind `{s}`")))
    }
}

pub const DEFAULT_DT: f64 = 0.01;
pub const DEFAULT_T_MAX: f64 = 20.0;
pub const DEFAULT_STOP_TOL: f64 = 1e-4;
pub const DEFAULT_SUBSTEPS: u32 = 10;
/// Activity window of the nonsmooth flows, in units of recent substep displacement.
pub const WINDOW_FACTOR: f64 = 2.0;

fn default_substeps() -> u32 {
    DEFAULT_SUBSTEPS
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowSpec {
    pub kind: FlowKind,
    pub dt: f64,
    pub t_max: f64,
    /// Average speed below which the run counts as converged.
    pub stop_tol: f64,
    #[serde(default = "default_substeps")]
    pub substeps: u32,
}

impl FlowSpec {
    pub fn new(kind: FlowKind) -> Self {
        FlowSpec {
            kind,
            dt: DEFAULT_DT,
            t_max: DEFAULT_T_MAX,
            stop_tol: DEFAULT_STOP_TOL,
            substeps: DEFAULT_SUBSTEPS,
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(FlowError::InvalidSpec(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_max >= self.dt && self.t_max.is_finite()) {
            return Err(FlowError::InvalidSpec(format!(
                "t_max must be at least dt, got {}",
                self.t_max
            )));
        }
        if !(self.stop_tol >= 0.0) {
            return Err(FlowError::InvalidSpec(format!(
                "stop_tol must be nonnegative, got {}",
                self.stop_tol
            )));
        }
        if self.substeps == 0 {
            return Err(FlowError::InvalidSpec("substeps must be at least 1".into()));
        }
        Ok(())
    }

    fn substep(&self) -> f64 {
        self.dt / self.substeps as f64
    }
}

/// Velocities of every generator on a given partition.
///
/// `windows[i]` is the activity window used for generator `i`'s own cell in
/// the distributed flows; the centralized flows use the largest entry.
pub fn velocity_on(
    kind: FlowKind,
    partition: &VoronoiPartition,
    windows: &[f64],
) -> Result<Vec<Point2>, FlowError> {
    let n = partition.len();
    let pts = partition.generators();
    let v = match kind {
        FlowKind::GradDC | FlowKind::GradSP => {
            let window = windows.iter().copied().fold(0.0, f64::max);
            let grad = if kind == FlowKind::GradDC {
                grad_hdc_on(partition, window)?
            } else {
                grad_hsp_on(partition, window)?
            };
            let r = least_norm(&grad);
            let sign = if kind == FlowKind::GradDC { -1.0 } else { 1.0 };
            (0..n).map(|i| sign * r.block(i)).collect()
        }
        FlowKind::DistGradDC => (0..n)
            .map(|i| {
                let g = grad_lg_with(partition.polygon(i), pts[i], windows[i])?;
                Ok(-1.0 * least_norm(&g).least_norm_point2())
            })
            .collect::<Result<_, FlowError>>()?,
        FlowKind::DistGradSP => (0..n)
            .map(|i| {
                let g = grad_sm_with(partition.polygon(i), pts[i], windows[i]);
                least_norm(&g).least_norm_point2()
            })
            .collect(),
        FlowKind::LloydCC => (0..n)
            .map(|i| circumcenter(partition.polygon(i)).center - pts[i])
            .collect(),
        FlowKind::LloydIC => (0..n)
            .map(|i| incenter_set(partition.polygon(i)).nearest(pts[i]) - pts[i])
            .collect(),
    };
    Ok(v)
}

/// Instantaneous velocity field of `kind` at `config`.
pub fn velocity(
    kind: FlowKind,
    q: &ConvexPolygon,
    config: &Configuration,
) -> Result<Vec<Point2>, FlowError> {
    let partition = compute_partition(q, config)?;
    velocity_on(kind, &partition, &vec![partition.tolerances().act; config.len()])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub points: Vec<Point2>,
    pub h_dc: f64,
    pub h_sp: f64,
    /// Speed of each generator at this sample.
    pub speeds: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    TMax,
    Error(String),
}

/// A step at which the monitored objective moved the wrong way beyond tolerance.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub step: usize,
    pub t: f64,
    /// Amount by which the objective got worse.
    pub excess: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub spec: FlowSpec,
    pub samples: Vec<Sample>,
    pub terminated_by: Termination,
    pub monotonicity_violations: Vec<Violation>,
    /// Largest distance by which an Euler substep left the environment before projection.
    pub max_projection: f64,
}

impl Trajectory {
    pub fn last(&self) -> &Sample {
        self.samples.last().expect("trajectory has an initial sample")
    }

    /// Number of Euler steps taken (samples minus the initial one).
    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }
}

/// Per-step tolerance for monotonicity checks: `10 dt^2 + eps_act`.
pub fn monotonicity_tolerance(dt: f64, tol: &Tolerances) -> f64 {
    10.0 * dt * dt + tol.act
}

fn worsening(problem: Problem, before: &Sample, after: &Sample) -> f64 {
    match problem {
        Problem::DiskCovering => after.h_dc - before.h_dc,
        Problem::SpherePacking => before.h_sp - after.h_sp,
    }
}

fn sample(
    t: f64,
    partition: &VoronoiPartition,
    velocity: &[Point2],
) -> Sample {
    let act = partition.tolerances().act;
    Sample {
        t,
        points: partition.generators().to_vec(),
        h_dc: hdc_on(partition, act).value,
        h_sp: hsp_on(partition, act).value,
        speeds: velocity.iter().map(|v| v.norm()).collect(),
    }
}

/// Recent generator speeds, used to size the activity windows.
struct SpeedMemory {
    recent: VecDeque<Vec<f64>>,
    capacity: usize,
}

impl SpeedMemory {
    fn new(capacity: usize) -> Self {
        SpeedMemory {
            recent: VecDeque::with_capacity(capacity + 1),
            capacity,
        }
    }

    fn push(&mut self, v: &[Point2]) {
        self.recent.push_back(v.iter().map(|x| x.norm()).collect());
        if self.recent.len() > self.capacity {
            self.recent.pop_front();
        }
    }

    fn peak(&self, i: usize) -> f64 {
        self.recent.iter().map(|s| s[i]).fold(0.0, f64::max)
    }
}

/// Integrates `spec.kind` from `p0` inside `q`.
///
/// Invalid parameters or an invalid initial configuration are errors; a
/// failure in the middle of a run ends the trajectory with
/// [`Termination::Error`] and keeps the samples computed so far.
pub fn integrate(
    spec: &FlowSpec,
    q: &ConvexPolygon,
    p0: &Configuration,
) -> Result<Trajectory, FlowError> {
    spec.validate()?;
    let tol = Tolerances::for_polygon(q);
    let h = spec.substep();
    let n = p0.len();
    let problem = spec.kind.problem();
    let mono_tol = monotonicity_tolerance(spec.dt, &tol);
    // round to avoid a missing last step from floating-point accumulation
    let max_steps = (spec.t_max / spec.dt + 1e-9).floor() as usize;

    let mut memory = SpeedMemory::new(spec.substeps as usize);
    let windows = |memory: &SpeedMemory| -> Vec<f64> {
        match spec.kind {
            FlowKind::GradDC | FlowKind::GradSP => {
                let peak = (0..n).map(|i| memory.peak(i)).fold(0.0, f64::max);
                vec![tol.act.max(WINDOW_FACTOR * h * peak); n]
            }
            _ => vec![tol.act; n],
        }
    };
    let evaluate = |pts: &[Point2], windows: &[f64]| -> Result<(VoronoiPartition, Vec<Point2>), FlowError> {
        let partition = compute_partition(q, &Configuration::from_points_unchecked(pts.to_vec()))?;
        let v = velocity_on(spec.kind, &partition, windows)?;
        Ok((partition, v))
    };

    let mut pts = p0.points().to_vec();
    let (mut partition, mut v) = evaluate(&pts, &vec![tol.act; n])?;
    memory.push(&v);
    let mut samples = vec![sample(0.0, &partition, &v)];
    let mut violations = Vec::new();
    let mut max_projection: f64 = 0.0;
    let mut terminated_by = Termination::TMax;

    'steps: for step in 1..=max_steps {
        for _ in 0..spec.substeps {
            for (p, vi) in pts.iter_mut().zip(&v) {
                let moved = *p + h * *vi;
                let projected = q.project(moved);
                max_projection = max_projection.max(projected.distance(moved));
                *p = projected;
            }
            match evaluate(&pts, &windows(&memory)) {
                Ok((next, nv)) => {
                    partition = next;
                    v = nv;
                    memory.push(&v);
                }
                Err(e) => {
                    terminated_by = Termination::Error(e.to_string());
                    break 'steps;
                }
            }
        }
        let s = sample(step as f64 * spec.dt, &partition, &v);
        let excess = worsening(problem, samples.last().expect("nonempty"), &s);
        if excess > mono_tol {
            violations.push(Violation {
                step,
                t: s.t,
                excess,
            });
        }
        samples.push(s);

        if step >= 10 {
            let moved = samples[step]
                .points
                .iter()
                .zip(&samples[step - 10].points)
                .map(|(a, b)| a.distance(*b))
                .fold(0.0, f64::max);
            if moved <= spec.stop_tol * spec.dt * 10.0 {
                terminated_by = Termination::Converged;
                break;
            }
        }
    }

    Ok(Trajectory {
        spec: *spec,
        samples,
        terminated_by,
        monotonicity_violations: violations,
        max_projection,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CenterOffset {
    pub index: usize,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub problem: Problem,
    pub steps: usize,
    pub monotonicity_violations: Vec<Violation>,
    /// Violations divided by the number of steps.
    pub violation_fraction: f64,
    /// Distance of each finally active generator to its cell's center.
    pub centeredness: Vec<CenterOffset>,
    pub max_center_distance: f64,
    /// Least-norm magnitude of the generalized gradient at the final state.
    pub final_least_norm: f64,
    /// Fraction of consecutive velocity pairs pointing in opposite half-planes.
    pub chattering: f64,
}

/// Monotonicity, centeredness and chattering summary of a finished run.
pub fn diagnostics(
    traj: &Trajectory,
    q: &ConvexPolygon,
    problem: Problem,
) -> Result<Diagnostics, FlowError> {
    let tol = Tolerances::for_polygon(q);
    let mono_tol = monotonicity_tolerance(traj.spec.dt, &tol);
    let violations: Vec<Violation> = traj
        .samples
        .windows(2)
        .enumerate()
        .filter_map(|(k, w)| {
            let excess = worsening(problem, &w[0], &w[1]);
            (excess > mono_tol).then_some(Violation {
                step: k + 1,
                t: w[1].t,
                excess,
            })
        })
        .collect();
    let steps = traj.steps();

    let last = traj.last();
    let partition = compute_partition(q, &Configuration::from_points_unchecked(last.points.clone()))?;
    let (active, grad) = match problem {
        Problem::DiskCovering => (
            hdc_on(&partition, tol.act).active.active_generators,
            grad_hdc_on(&partition, tol.act)?,
        ),
        Problem::SpherePacking => (
            hsp_on(&partition, tol.act).active.active_generators,
            grad_hsp_on(&partition, tol.act)?,
        ),
    };
    let centeredness: Vec<CenterOffset> = active
        .iter()
        .map(|&i| CenterOffset {
            index: i,
            distance: center_distance(&partition, i, problem),
        })
        .collect();
    let max_center_distance = centeredness.iter().map(|c| c.distance).fold(0.0, f64::max);

    // sign flips of successive displacements per generator
    let mut flips = 0usize;
    let mut pairs = 0usize;
    for w in traj.samples.windows(3) {
        for i in 0..w[0].points.len() {
            let d1 = w[1].points[i] - w[0].points[i];
            let d2 = w[2].points[i] - w[1].points[i];
            if d1.norm() > tol.geo && d2.norm() > tol.geo {
                pairs += 1;
                if d1.dot(d2) < 0.0 {
                    flips += 1;
                }
            }
        }
    }

    Ok(Diagnostics {
        problem,
        steps,
        violation_fraction: if steps == 0 {
            0.0
        } else {
            violations.len() as f64 / steps as f64
        },
        monotonicity_violations: violations,
        centeredness,
        max_center_distance,
        final_least_norm: least_norm(&grad).least_norm_magnitude,
        chattering: if pairs == 0 {
            0.0
        } else {
            flips as f64 / pairs as f64
        },
    })
}
