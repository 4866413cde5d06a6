//! Scenario runs: trajectory tables, summaries and SVG frames on disk.

pub mod oracle;
pub mod scenario;
pub mod svg;

use std::fs;
use std::io::{self, Write as _};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{FlowError, NonsmoothError};
use crate::flows::{diagnostics, integrate, CenterOffset, FlowKind, Termination, Trajectory};
use crate::geometry::{ConvexPolygon, Point2};
use crate::nonsmooth::{classify_critical, CriticalAnalysis};
use crate::objective::{evaluate_hdc, evaluate_hsp, Evaluation, Problem};
use crate::voronoi::{compute_partition, Configuration};

pub use scenario::{parse_scenario, Scenario, ScenarioError, ScenarioIssue};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
}

/// Scenario files shipped with the crate, by name.
pub const BUNDLED: &[(&str, &str)] = &[
    (
        "paper_polygon_16_lloydcc",
        include_str!("../../scenarios/paper_polygon_16_lloydcc.toml"),
    ),
    (
        "paper_polygon_16_lloydic",
        include_str!("../../scenarios/paper_polygon_16_lloydic.toml"),
    ),
    (
        "paper_polygon_16_distgraddc",
        include_str!("../../scenarios/paper_polygon_16_distgraddc.toml"),
    ),
    (
        "paper_polygon_16_distgradsp",
        include_str!("../../scenarios/paper_polygon_16_distgradsp.toml"),
    ),
    (
        "paper_polygon_16_graddc",
        include_str!("../../scenarios/paper_polygon_16_graddc.toml"),
    ),
    (
        "paper_polygon_16_gradsp",
        include_str!("../../scenarios/paper_polygon_16_gradsp.toml"),
    ),
    (
        "paper_polygon_1_distgraddc",
        include_str!("../../scenarios/paper_polygon_1_distgraddc.toml"),
    ),
];

/// A bundled scenario by name.
pub fn bundled(name: &str) -> Option<Scenario> {
    BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| parse_scenario(text).expect("bundled scenarios are valid"))
}

/// Decimal text with 12 significant digits.
pub fn format_number(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    if (-5..15).contains(&magnitude) {
        let decimals = (11 - magnitude).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// Trajectory table with columns `t,i,x,y,H_DC,H_SP,speed`.
pub fn trajectory_csv(traj: &Trajectory) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "i", "x", "y", "H_DC", "H_SP", "speed"])
        .expect("in-memory write");
    for s in &traj.samples {
        for (i, (p, speed)) in s.points.iter().zip(&s.speeds).enumerate() {
            w.write_record([
                format_number(s.t),
                i.to_string(),
                format_number(p.x),
                format_number(p.y),
                format_number(s.h_dc),
                format_number(s.h_sp),
                format_number(*speed),
            ])
            .expect("in-memory write");
        }
    }
    w.into_inner().expect("in-memory flush")
}

/// Final-state summary written as `summary.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub kind: FlowKind,
    pub n: usize,
    pub random_seed: Option<u64>,
    pub dt: f64,
    pub t_max: f64,
    pub steps: usize,
    pub t_final: f64,
    pub terminated_by: Termination,
    pub initial_h_dc: f64,
    pub initial_h_sp: f64,
    pub final_h_dc: f64,
    pub final_h_sp: f64,
    pub final_least_norm: Option<f64>,
    pub centeredness: Vec<CenterOffset>,
    pub max_center_distance: Option<f64>,
    pub monotonicity_violations: usize,
    pub chattering: Option<f64>,
    pub max_projection: f64,
    pub final_points: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub summary: Summary,
    pub files: Vec<PathBuf>,
}

impl RunReport {
    pub fn failed(&self) -> bool {
        matches!(self.summary.terminated_by, Termination::Error(_))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Write initial, final and trajectory frames.
    pub svg: bool,
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = fs::File::create(&tmp).map_err(io_err)?;
    f.write_all(bytes).map_err(io_err)?;
    f.sync_all().map_err(io_err)?;
    drop(f);
    fs::rename(&tmp, path).map_err(io_err)
}

/// Integrates a scenario without touching the disk.
pub fn simulate(scenario: &Scenario) -> Result<(ConvexPolygon, Trajectory), HarnessError> {
    let q = scenario.environment().map_err(|e| {
        HarnessError::Scenario(ScenarioError::Invalid(vec![ScenarioIssue::InvalidPolygon(e)]))
    })?;
    let p0 = scenario.initial_configuration()?;
    let traj = integrate(&scenario.flow, &q, &p0)?;
    Ok((q, traj))
}

pub fn summarize(scenario: &Scenario, q: &ConvexPolygon, traj: &Trajectory) -> Summary {
    let diag = diagnostics(traj, q, scenario.flow.kind.problem()).ok();
    let first = &traj.samples[0];
    let last = traj.last();
    Summary {
        kind: scenario.flow.kind,
        n: scenario.n,
        random_seed: scenario.init.random_seed,
        dt: scenario.flow.dt,
        t_max: scenario.flow.t_max,
        steps: traj.steps(),
        t_final: last.t,
        terminated_by: traj.terminated_by.clone(),
        initial_h_dc: first.h_dc,
        initial_h_sp: first.h_sp,
        final_h_dc: last.h_dc,
        final_h_sp: last.h_sp,
        final_least_norm: diag.as_ref().map(|d| d.final_least_norm),
        centeredness: diag.as_ref().map(|d| d.centeredness.clone()).unwrap_or_default(),
        max_center_distance: diag.as_ref().map(|d| d.max_center_distance),
        monotonicity_violations: traj.monotonicity_violations.len(),
        chattering: diag.as_ref().map(|d| d.chattering),
        max_projection: traj.max_projection,
        final_points: last.points.iter().map(|&p| p.into()).collect(),
    }
}

/// Runs a scenario and writes its artifacts into `out_dir`.
///
/// A flow that fails mid-run still produces its partial table and summary;
/// check [`RunReport::failed`].
pub fn run(
    scenario: &Scenario,
    out_dir: &Path,
    opts: RunOptions,
) -> Result<RunReport, HarnessError> {
    let (q, traj) = simulate(scenario)?;
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut files = Vec::new();
    let mut emit = |name: String, bytes: &[u8]| -> Result<(), HarnessError> {
        let path = out_dir.join(name);
        write_atomic(&path, bytes)?;
        files.push(path);
        Ok(())
    };

    if scenario.outputs.csv {
        emit("trajectory.csv".into(), &trajectory_csv(&traj))?;
    }

    let frame_opts = svg::FrameOptions {
        circles: Some(scenario.flow.kind.problem()),
    };
    let frame = |k: usize| -> Option<String> {
        let s = &traj.samples[k];
        let part = compute_partition(&q, &Configuration::from_points_unchecked(s.points.clone())).ok()?;
        Some(svg::partition_frame(&part, &format!("t = {}", format_number(s.t)), &frame_opts))
    };
    let every = scenario.outputs.svg_every_k_steps as usize;
    if every > 0 {
        for k in (0..traj.samples.len()).step_by(every) {
            if let Some(text) = frame(k) {
                emit(format!("frame_{k:06}.svg"), text.as_bytes())?;
            }
        }
    }
    if opts.svg {
        if let Some(text) = frame(0) {
            emit("initial.svg".into(), text.as_bytes())?;
        }
        let last = traj.samples.len() - 1;
        if let Some(text) = frame(last) {
            emit("final.svg".into(), text.as_bytes())?;
        }
        let n = scenario.n;
        let paths: Vec<Vec<Point2>> = (0..n)
            .map(|i| traj.samples.iter().map(|s| s.points[i]).collect())
            .collect();
        let last_pts = traj.last().points.clone();
        if let Ok(part) = compute_partition(&q, &Configuration::from_points_unchecked(last_pts)) {
            emit(
                "trajectory.svg".into(),
                svg::trajectory_frame(&part, &paths, scenario.flow.kind.name()).as_bytes(),
            )?;
        }
    }

    let summary = summarize(scenario, &q, &traj);
    let json = serde_json::to_vec_pretty(&summary).expect("summary serializes");
    emit("summary.json".into(), &json)?;
    Ok(RunReport { summary, files })
}

/// Objective values and criticality of a scenario's initial configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub h_dc: Evaluation,
    pub h_sp: Evaluation,
    pub disk_covering: CriticalAnalysis,
    pub sphere_packing: CriticalAnalysis,
}

pub fn evaluate_scenario(scenario: &Scenario) -> Result<EvalReport, HarnessError> {
    let q = scenario.environment().map_err(|e| {
        HarnessError::Scenario(ScenarioError::Invalid(vec![ScenarioIssue::InvalidPolygon(e)]))
    })?;
    let p = scenario.initial_configuration()?;
    let wrap = |e: NonsmoothError| HarnessError::Flow(e.into());
    Ok(EvalReport {
        h_dc: evaluate_hdc(&q, &p).map_err(|e| wrap(e.into()))?,
        h_sp: evaluate_hsp(&q, &p).map_err(|e| wrap(e.into()))?,
        disk_covering: classify_critical(&q, &p, Problem::DiskCovering).map_err(wrap)?,
        sphere_packing: classify_critical(&q, &p, Problem::SpherePacking).map_err(wrap)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.0), "0");
        assert_eq!(format_number(-0.0), "0");
        assert_eq!(format_number(1.0), "1.00000000000");
        assert_eq!(format_number(0.01), "0.0100000000000");
        assert_eq!(format_number(-123.456), "-123.456000000");
        assert_eq!(format_number(1e-9), "1.00000000000e-9");
    }

    #[test]
    fn bundled_scenarios_parse() {
        for (name, _) in BUNDLED {
            assert!(bundled(name).is_some(), "{name}");
        }
        let s = bundled("paper_polygon_16_lloydcc").unwrap();
        assert_eq!(s.polygon.len(), 8);
        assert_eq!(s.n, 16);
    }
}
