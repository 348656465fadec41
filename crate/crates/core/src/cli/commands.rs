//! The four commands. Each writes its files before reporting a breach, so a
//! nonzero exit always comes with the evidence on disk.

use std::path::Path;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{parse_model, ModelSpec, ReportFormat, RunConfig, SweepItem};
use super::report::{
    ensure_dir, read_profile, write_json, write_profile, write_report_csv, write_sweep_csv,
    ConstantsReport, ResultSummary, RunInfo, SolveReport, SweepRow, PROFILE_FILE,
};
use super::CliError;
use crate::energy::{energy, reduced_energy};
use crate::grid::RadialGrid;
use crate::logsobolev::{
    attach_constant, biharmonic_lsi_check, classical_lsi_check, constant_from_energy,
    interpolation_check, lsi_bound, pohozaev_scaled_check, InequalityReport, LogSobolevConstants,
};
use crate::nonlinearity::Nonlinearity;
use crate::operators::RadialField;
use crate::pohozaev::{pohozaev_residual, PohozaevReport};
use crate::solver::{minimize, pde_relative_residual, GroundStateResult};
use crate::testfields::{dilated_gaussian, normalized, random_fields, unit_gaussian};

/// Random fields in the logsob battery.
pub const BATTERY_RANDOM_FIELDS: usize = 50;

fn run_info(cfg: &RunConfig, command: &'static str) -> RunInfo {
    let (p, mu) = match cfg.model {
        ModelSpec::Log => (None, None),
        ModelSpec::PowerMass { p, mu } => (Some(p), Some(mu)),
    };
    RunInfo {
        command,
        dimension: cfg.dimension,
        model: cfg.model.label(),
        p,
        mu,
        grid_radius: cfg.radius,
        grid_nodes: cfg.nodes,
        seed: cfg.seed,
    }
}

fn solve(
    nl: &Nonlinearity,
    grid: &Arc<RadialGrid>,
    cfg: &RunConfig,
) -> Result<GroundStateResult, CliError> {
    minimize(nl, grid, &cfg.solver).map_err(|e| CliError::Solver(e.to_string()))
}

/// The four inequality checks on one normalized field.
fn all_checks(
    u: &RadialField,
    k: &LogSobolevConstants,
    label: &str,
) -> crate::Result<Vec<InequalityReport>> {
    Ok(vec![
        biharmonic_lsi_check(u, k.lsi_constant, label)?,
        classical_lsi_check(u, label)?,
        interpolation_check(u, label)?,
        pohozaev_scaled_check(u, k.c_n_log, label)?,
    ])
}

fn residual_breach(r: &GroundStateResult, tol: f64) -> Option<String> {
    (!r.within_tolerance(tol)).then(|| {
        format!(
            "residuals above {tol:e}: Pohozaev {:e}, PDE {:e}",
            r.pohozaev_relative_residual, r.pde_relative_residual
        )
    })
}

pub fn run_solve(cfg: &RunConfig) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    let nl = cfg.nonlinearity()?;
    ensure_dir(&cfg.output)?;
    let mut result = solve(&nl, &grid, cfg)?;

    let mut log_sobolev = None;
    let mut inequalities = Vec::new();
    if cfg.model == ModelSpec::Log {
        let k = attach_constant(&mut result).map_err(|e| CliError::Solver(e.to_string()))?;
        let u = normalized(&result.profile).map_err(|e| CliError::Solver(e.to_string()))?;
        inequalities =
            all_checks(&u, &k, "ground_state").map_err(|e| CliError::Solver(e.to_string()))?;
        log_sobolev = Some(ConstantsReport::new(k));
    }

    write_profile(&cfg.output.join(PROFILE_FILE), &result.profile)?;
    let tol = cfg.solver.residual_tolerance;
    let report = SolveReport {
        run: run_info(cfg, "solve"),
        result: ResultSummary::new(&result, tol),
        log_sobolev,
        inequalities,
    };
    match cfg.format {
        ReportFormat::Json => write_json(&cfg.output.join("report.json"), &report)?,
        ReportFormat::Csv => write_report_csv(&cfg.output.join("report.csv"), &report)?,
    }
    println!(
        "[solve] N = {}, {}: energy {:.10e}, Pohozaev residual {:.2e}, PDE residual {:.2e}",
        cfg.dimension,
        cfg.model.label(),
        result.energy,
        result.pohozaev_relative_residual,
        result.pde_relative_residual
    );
    match residual_breach(&result, tol) {
        Some(m) => Err(CliError::Solver(m)),
        None => Ok(()),
    }
}

#[derive(Debug, Serialize)]
struct VerifyReport {
    run: RunInfo,
    profile: String,
    l2_sq: f64,
    energy: f64,
    reduced_energy: Option<f64>,
    pohozaev: PohozaevReport,
    pde_relative_residual: f64,
    tolerance: f64,
    within_tolerance: bool,
}

pub fn run_verify(cfg: &RunConfig, profile: Option<&Path>) -> Result<(), CliError> {
    let grid = cfg.grid()?;
    let nl = cfg.nonlinearity()?;
    let default_path = cfg.output.join(PROFILE_FILE);
    let path = profile.unwrap_or(&default_path);
    let u = read_profile(path, &grid)?;
    let invalid = |e: crate::Error| CliError::Config(format!("profile {}: {e}", path.display()));

    let poh = pohozaev_residual(&u, &nl).map_err(invalid)?;
    let pde = pde_relative_residual(&grid, u.values(), &nl, None).map_err(invalid)?;
    let j = energy(&u, &nl, None).map_err(invalid)?;
    let reduced = reduced_energy(&u, &nl, None).map_err(invalid)?;
    let tol = cfg.solver.residual_tolerance;
    // NaN residuals fail both comparisons and so count as a breach
    let within = poh.relative_residual <= tol && pde <= tol;
    let report = VerifyReport {
        run: run_info(cfg, "verify"),
        profile: path.display().to_string(),
        l2_sq: u.l2_sq(),
        energy: j.j_value,
        reduced_energy: reduced,
        pohozaev: poh,
        pde_relative_residual: pde,
        tolerance: tol,
        within_tolerance: within,
    };
    ensure_dir(&cfg.output)?;
    write_json(&cfg.output.join("verification.json"), &report)?;
    println!(
        "[verify] {}: Pohozaev residual {:.2e}, PDE residual {:.2e}",
        path.display(),
        poh.relative_residual,
        pde
    );
    if within {
        Ok(())
    } else {
        Err(CliError::Breach(format!(
            "residuals above {tol:e}: Pohozaev {:e}, PDE {pde:e}",
            poh.relative_residual
        )))
    }
}

#[derive(Debug, Serialize)]
struct BatterySummary {
    reports: usize,
    failures: usize,
    all_hold: bool,
}

#[derive(Debug, Serialize)]
struct LogsobReport {
    run: RunInfo,
    ground_state: ResultSummary,
    constants: ConstantsReport,
    /// The biharmonic inequality on the unit Gaussian with the known bound
    /// `(2/(πeN))²` in place of the computed constant.
    gaussian_with_bound: InequalityReport,
    battery: Vec<InequalityReport>,
    summary: BatterySummary,
}

/// Unit Gaussian, its dilations by ½, 1 and 2, the normalized ground state,
/// and seeded random mixtures.
fn battery(
    grid: &Arc<RadialGrid>,
    ground: &RadialField,
    seed: u64,
) -> crate::Result<Vec<(String, RadialField)>> {
    let mut fields = vec![("gaussian".to_string(), unit_gaussian(grid))];
    for (label, l) in [("dilated_0.5", 0.5), ("dilated_1", 1.0), ("dilated_2", 2.0)] {
        fields.push((label.to_string(), dilated_gaussian(grid, l)));
    }
    fields.push(("ground_state".to_string(), normalized(ground)?));
    for (i, u) in random_fields(grid, seed, BATTERY_RANDOM_FIELDS)?
        .into_iter()
        .enumerate()
    {
        fields.push((format!("random_{i:02}"), u));
    }
    Ok(fields)
}

pub fn run_logsob(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.model != ModelSpec::Log {
        return Err(CliError::Config(
            "logsob requires nonlinearity = \"log\"".into(),
        ));
    }
    let grid = cfg.grid()?;
    let nl = cfg.nonlinearity()?;
    ensure_dir(&cfg.output)?;
    let mut result = solve(&nl, &grid, cfg)?;
    let solver_err = |e: crate::Error| CliError::Solver(e.to_string());
    let k = attach_constant(&mut result).map_err(solver_err)?;

    let gaussian_with_bound =
        biharmonic_lsi_check(&unit_gaussian(&grid), lsi_bound(cfg.dimension), "gaussian")
            .map_err(solver_err)?;
    let mut reports = Vec::new();
    for (label, u) in battery(&grid, &result.profile, cfg.seed).map_err(solver_err)? {
        reports.extend(all_checks(&u, &k, &label).map_err(solver_err)?);
    }
    let failures = reports.iter().filter(|r| !r.holds).count();
    let tol = cfg.solver.residual_tolerance;
    let constants = ConstantsReport::new(k);
    let below_bound = constants.below_bound;
    let report = LogsobReport {
        run: run_info(cfg, "logsob"),
        ground_state: ResultSummary::new(&result, tol),
        constants,
        gaussian_with_bound,
        summary: BatterySummary {
            reports: reports.len(),
            failures,
            all_hold: failures == 0,
        },
        battery: reports,
    };
    write_json(&cfg.output.join("logsob.json"), &report)?;
    println!(
        "[logsob] N = {}: C_N_log {:.10e}, lsi constant {:.10e} (bound {:.10e}), {} of {} checks hold",
        cfg.dimension,
        k.c_n_log,
        k.lsi_constant,
        k.bound,
        report.summary.reports - failures,
        report.summary.reports
    );
    if let Some(m) = residual_breach(&result, tol) {
        return Err(CliError::Solver(m));
    }
    if !below_bound {
        return Err(CliError::Breach(format!(
            "lsi constant {:e} is not below the bound {:e}",
            k.lsi_constant, k.bound
        )));
    }
    if failures > 0 {
        return Err(CliError::Breach(format!(
            "{failures} inequality checks fail"
        )));
    }
    Ok(())
}

/// Solves one sweep item; any failure is returned as text for the row.
fn sweep_item(cfg: &RunConfig, item: &SweepItem) -> Result<SweepRow, String> {
    let model = parse_model(&item.nonlinearity, item.dimension, item.p, item.mu)?;
    let nl = model.build(item.dimension).map_err(|e| e.to_string())?;
    let grid = cfg.grid_for(item.dimension).map_err(|e| e.to_string())?;
    let result = minimize(&nl, &grid, &cfg.solver).map_err(|e| e.to_string())?;
    let mut ok = result.within_tolerance(cfg.solver.residual_tolerance);
    let mut c_n_log = None;
    if model == ModelSpec::Log {
        let k = constant_from_energy(item.dimension, result.energy).map_err(|e| e.to_string())?;
        ok &= k.lsi_constant < k.bound;
        c_n_log = Some(k.c_n_log);
    }
    Ok(SweepRow {
        dimension: item.dimension,
        model: model.label().to_string(),
        inf_j_upper: Some(result.energy),
        c_n_log_upper: c_n_log,
        bound: Some(lsi_bound(item.dimension)),
        ok,
    })
}

pub fn run_sweep(cfg: &RunConfig) -> Result<(), CliError> {
    ensure_dir(&cfg.output)?;
    let outcomes: Vec<Result<SweepRow, String>> = cfg
        .sweep
        .par_iter()
        .map(|item| sweep_item(cfg, item))
        .collect();
    let mut rows = Vec::with_capacity(outcomes.len());
    let mut failed = 0;
    for (item, outcome) in cfg.sweep.iter().zip(outcomes) {
        let row = match outcome {
            Ok(row) => row,
            Err(m) => {
                eprintln!("[sweep] N = {}, {}: {m}", item.dimension, item.nonlinearity);
                SweepRow {
                    dimension: item.dimension,
                    model: item.nonlinearity.clone(),
                    inf_j_upper: None,
                    c_n_log_upper: None,
                    bound: None,
                    ok: false,
                }
            }
        };
        failed += usize::from(!row.ok);
        rows.push(row);
    }
    write_sweep_csv(&cfg.output.join("sweep.csv"), &rows)?;
    println!("[sweep] {} items, {failed} failed", rows.len());
    if failed > 0 {
        return Err(CliError::Breach(format!("{failed} sweep items failed")));
    }
    Ok(())
}
