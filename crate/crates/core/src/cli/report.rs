//! Persistence: profile CSV (`r,u`), JSON and key/value CSV reports.
//! Floats are written with 17 significant digits so files round-trip exactly
//! and identical runs give identical bytes.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::CliError;
use crate::grid::RadialGrid;
use crate::logsobolev::{InequalityReport, LogSobolevConstants};
use crate::operators::RadialField;
use crate::solver::{GroundStateResult, StageSummary};

pub const PROFILE_FILE: &str = "profile.csv";

/// Grid nodes read back from a profile may differ from the configured ones
/// by this much (relative to `R`) before the file counts as a mismatch.
const NODE_MATCH_TOL: f64 = 1e-9;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_profile(path: &Path, u: &RadialField) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["r", "u"]).map_err(|e| io_err(path, e))?;
    for (r, v) in u.grid().nodes().iter().zip(u.values()) {
        w.write_record([num(*r), num(*v)])
            .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Deserialize)]
struct ProfileRow {
    r: f64,
    u: f64,
}

/// Reads a profile and checks it against `grid`: the node count and every
/// node position must agree. A missing file is an I/O failure; anything
/// malformed or mismatched is a configuration error.
pub fn read_profile(path: &Path, grid: &Arc<RadialGrid>) -> Result<RadialField, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let bad = |m: String| CliError::Config(format!("profile {}: {m}", path.display()));
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.len() != 2 || &headers[0] != "r" || &headers[1] != "u" {
        return Err(bad(format!("expected header r,u, found {headers:?}")));
    }
    let mut values = Vec::with_capacity(grid.len());
    for (i, row) in reader.deserialize::<ProfileRow>().enumerate() {
        let row = row.map_err(|e| bad(e.to_string()))?;
        let Some(node) = grid.nodes().get(i) else {
            return Err(bad(format!("more than {} rows", grid.len())));
        };
        if (row.r - node).abs() > NODE_MATCH_TOL * grid.radius() {
            return Err(bad(format!(
                "row {i} has r = {} but the grid node is {node}",
                row.r
            )));
        }
        values.push(row.u);
    }
    if values.len() != grid.len() {
        return Err(bad(format!(
            "{} rows for a grid of {} nodes",
            values.len(),
            grid.len()
        )));
    }
    RadialField::new(grid.clone(), values).map_err(|e| bad(e.to_string()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| io_err(path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub command: &'static str,
    pub dimension: usize,
    pub model: &'static str,
    pub p: Option<f64>,
    pub mu: Option<f64>,
    pub grid_radius: f64,
    pub grid_nodes: usize,
    pub seed: u64,
}

/// Everything in a ground-state result except the profile samples.
#[derive(Debug, Clone, Serialize)]
pub struct ResultSummary {
    pub energy: f64,
    pub bilap_sq: f64,
    pub l2_sq: f64,
    pub pohozaev_relative_residual: f64,
    pub pde_relative_residual: f64,
    pub c_n_log: Option<f64>,
    pub iterations: usize,
    pub final_epsilon: f64,
    pub tail_mass: f64,
    pub newton_steps: usize,
    pub within_tolerance: bool,
    pub stages: Vec<StageSummary>,
}

impl ResultSummary {
    pub fn new(r: &GroundStateResult, tol: f64) -> Self {
        Self {
            energy: r.energy,
            bilap_sq: r.bilap_sq,
            l2_sq: r.profile.l2_sq(),
            pohozaev_relative_residual: r.pohozaev_relative_residual,
            pde_relative_residual: r.pde_relative_residual,
            c_n_log: r.c_n_log,
            iterations: r.iterations,
            final_epsilon: r.final_epsilon,
            tail_mass: r.tail_mass,
            newton_steps: r.newton_steps,
            within_tolerance: r.within_tolerance(tol),
            stages: r.stages.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsReport {
    /// Always "upper estimate": the discrete radial minimum bounds the
    /// infimum from above.
    pub label: &'static str,
    #[serde(flatten)]
    pub constants: LogSobolevConstants,
    pub below_bound: bool,
}

impl ConstantsReport {
    pub fn new(constants: LogSobolevConstants) -> Self {
        Self {
            label: "upper estimate",
            below_bound: constants.lsi_constant < constants.bound,
            constants,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub run: RunInfo,
    pub result: ResultSummary,
    pub log_sobolev: Option<ConstantsReport>,
    pub inequalities: Vec<InequalityReport>,
}

fn kv_rows(report: &SolveReport) -> Vec<(String, String)> {
    let mut rows: Vec<(String, String)> = Vec::new();
    let mut put = |k: &str, v: String| rows.push((k.to_string(), v));
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    let run = &report.run;
    put("command", run.command.into());
    put("dimension", run.dimension.to_string());
    put("model", run.model.into());
    put("p", opt(run.p));
    put("mu", opt(run.mu));
    put("grid_radius", num(run.grid_radius));
    put("grid_nodes", run.grid_nodes.to_string());
    put("seed", run.seed.to_string());
    let r = &report.result;
    put("energy", num(r.energy));
    put("bilap_sq", num(r.bilap_sq));
    put("l2_sq", num(r.l2_sq));
    put(
        "pohozaev_relative_residual",
        num(r.pohozaev_relative_residual),
    );
    put("pde_relative_residual", num(r.pde_relative_residual));
    put("c_n_log", opt(r.c_n_log));
    put("iterations", r.iterations.to_string());
    put("final_epsilon", num(r.final_epsilon));
    put("tail_mass", num(r.tail_mass));
    put("newton_steps", r.newton_steps.to_string());
    put("within_tolerance", r.within_tolerance.to_string());
    for (k, s) in r.stages.iter().enumerate() {
        put(&format!("stage.{k}.epsilon"), num(s.epsilon));
        put(&format!("stage.{k}.energy"), num(s.energy));
        put(&format!("stage.{k}.iterations"), s.iterations.to_string());
        put(&format!("stage.{k}.restarted"), s.restarted.to_string());
        put(
            &format!("stage.{k}.newton_steps"),
            s.newton_steps.to_string(),
        );
    }
    if let Some(c) = &report.log_sobolev {
        put("constants.label", c.label.into());
        put("constants.c_n_log", num(c.constants.c_n_log));
        put("constants.lsi_constant", num(c.constants.lsi_constant));
        put("constants.bound", num(c.constants.bound));
        put("constants.below_bound", c.below_bound.to_string());
    }
    for q in &report.inequalities {
        let key = format!("inequality.{:?}.{}", q.name, q.label);
        put(&format!("{key}.lhs"), num(q.lhs));
        put(&format!("{key}.rhs"), num(q.rhs));
        put(&format!("{key}.margin"), num(q.margin));
        put(&format!("{key}.holds"), q.holds.to_string());
    }
    rows
}

/// The solve report as a two-column `key,value` table.
pub fn write_report_csv(path: &Path, report: &SolveReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["key", "value"])
        .map_err(|e| io_err(path, e))?;
    for (k, v) in kv_rows(report) {
        w.write_record([k, v]).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    #[serde(rename = "N")]
    pub dimension: usize,
    pub model: String,
    #[serde(rename = "inf_J_upper")]
    pub inf_j_upper: Option<f64>,
    #[serde(rename = "C_N_log_upper")]
    pub c_n_log_upper: Option<f64>,
    pub bound: Option<f64>,
    pub ok: bool,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(["N", "model", "inf_J_upper", "C_N_log_upper", "bound", "ok"])
        .map_err(|e| io_err(path, e))?;
    let opt = |x: Option<f64>| x.map(num).unwrap_or_default();
    for r in rows {
        w.write_record([
            r.dimension.to_string(),
            r.model.clone(),
            opt(r.inf_j_upper),
            opt(r.c_n_log_upper),
            opt(r.bound),
            r.ok.to_string(),
        ])
        .map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}
