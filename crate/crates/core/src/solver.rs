//! Ground states by ε-continuation: for each ε of a decreasing schedule the
//! reduced energy `Ĵ_ε` is minimized by preconditioned gradient descent with
//! Armijo backtracking, warm-starting from the previous stage. The last
//! iterate is dilated onto `𝓜` and polished by Newton's method on the
//! discrete equation `Δ²u = g(u)`.

use serde::Serialize;

use crate::banded::{Banded, BandedLu};
use crate::energy::{
    bilap_sq, check_pairing, force_values, nonlinear_integral, reduced_from_parts, reduced_state,
    reduced_value, MEMBERSHIP_GUARD,
};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::nonlinearity::{check_epsilon, Nonlinearity};
use crate::operators::{bilaplacian_matrix, bilaplacian_values, weighted_dot, RadialField};
use crate::pohozaev::project_values;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverConfig {
    /// Iteration cap per ε-stage.
    pub max_iterations: usize,
    /// A stage stops once an accepted step changes `Ĵ_ε` by less than this, relatively.
    pub tolerance: f64,
    pub epsilon_schedule: Vec<f64>,
    pub backtracking: f64,
    pub armijo: f64,
    /// Amplitudes tried, in order, on the unit Gaussian for the starting field.
    pub amplitudes: Vec<f64>,
    /// Shift `σ` of the preconditioner `Δ² + σ`.
    pub preconditioner_shift: f64,
    /// Maximum Newton steps per refinement (0 disables refinement).
    pub newton_iterations: usize,
    /// Pohožaev and PDE residuals allowed on a successful solve.
    pub residual_tolerance: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            tolerance: 1e-8,
            epsilon_schedule: (1..=20).map(|k| 0.5f64.powi(k)).collect(),
            backtracking: 0.5,
            armijo: 1e-4,
            amplitudes: (0..=10).map(|k| 2.0f64.powi(k)).collect(),
            preconditioner_shift: 1.0,
            newton_iterations: 20,
            residual_tolerance: 1e-4,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive".into());
        }
        for (name, v) in [
            ("tolerance", self.tolerance),
            ("armijo", self.armijo),
            ("preconditioner_shift", self.preconditioner_shift),
            ("residual_tolerance", self.residual_tolerance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.armijo >= 1.0 {
            return bad(format!("armijo must be below 1, got {}", self.armijo));
        }
        if !(self.backtracking > 0.0 && self.backtracking < 1.0) {
            return bad(format!(
                "backtracking must lie in (0, 1), got {}",
                self.backtracking
            ));
        }
        if self.epsilon_schedule.is_empty() {
            return bad("epsilon schedule is empty".into());
        }
        for e in &self.epsilon_schedule {
            check_epsilon(*e)
                .map_err(|_| Error::InvalidConfig(format!("epsilon {e} outside (0, 1)")))?;
        }
        if self.epsilon_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return bad("epsilon schedule must be strictly decreasing".into());
        }
        if self.amplitudes.is_empty()
            || self.amplitudes.iter().any(|a| !(a.is_finite() && *a > 0.0))
        {
            return bad("amplitudes must be a non-empty list of positive numbers".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageSummary {
    pub epsilon: f64,
    /// `Ĵ_ε` at the end of the stage.
    pub energy: f64,
    pub iterations: usize,
    /// The warm start was outside the positive set for this ε and the stage
    /// began from a fresh amplitude scan instead.
    pub restarted: bool,
    /// Newton steps of the refinement that closes the stage (0 if rejected).
    pub newton_steps: usize,
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub profile: RadialField,
    /// Reduced energy of the final profile: `J` at a point of `𝓜`, hence an
    /// upper estimate of the infimum over `𝓜`.
    pub energy: f64,
    pub bilap_sq: f64,
    pub pohozaev_relative_residual: f64,
    pub pde_relative_residual: f64,
    pub c_n_log: Option<f64>,
    /// Descent iterations summed over all stages.
    pub iterations: usize,
    pub final_epsilon: f64,
    /// `∫_{r>0.9R} u² / ∫ u²`.
    pub tail_mass: f64,
    pub newton_steps: usize,
    pub stages: Vec<StageSummary>,
}

impl GroundStateResult {
    pub fn within_tolerance(&self, tol: f64) -> bool {
        self.pohozaev_relative_residual <= tol && self.pde_relative_residual <= tol
    }
}

fn unit_gaussian(grid: &RadialGrid) -> Vec<f64> {
    let norm = std::f64::consts::PI.powf(-(grid.dimension() as f64) / 4.0);
    grid.nodes()
        .iter()
        .map(|r| norm * (-0.5 * r * r).exp())
        .collect()
}

/// First multiple of the unit Gaussian with `∫G > 0`. Since `G_ε ≥ G`, the
/// result is feasible for every ε of the schedule as well.
fn amplitude_scan(grid: &RadialGrid, nl: &Nonlinearity, amplitudes: &[f64]) -> Result<Vec<f64>> {
    let base = unit_gaussian(grid);
    for t in amplitudes {
        let u: Vec<f64> = base.iter().map(|v| t * v).collect();
        if nonlinear_integral(grid, &u, nl, None)? > MEMBERSHIP_GUARD {
            return Ok(u);
        }
    }
    Err(Error::NoPositiveG)
}

/// First amplitude `t` of the scan with `∫G(t·φ) > 0`, `φ` the unit Gaussian.
pub fn initial_guess(
    nl: &Nonlinearity,
    grid: &Arc<RadialGrid>,
    cfg: &SolverConfig,
) -> Result<RadialField> {
    check_pairing(grid, nl)?;
    cfg.validate()?;
    let u = amplitude_scan(grid, nl, &cfg.amplitudes)?;
    RadialField::new(grid.clone(), u)
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// One ε-stage of descent; `u` is updated in place.
fn descend(
    grid: &RadialGrid,
    u: &mut Vec<f64>,
    nl: &Nonlinearity,
    eps: f64,
    cfg: &SolverConfig,
    precond: &BandedLu,
) -> Result<StageSummary> {
    let eps = Some(eps);
    let mut step = 1.0f64;
    for it in 1..=cfg.max_iterations {
        let state = reduced_state(grid, u, nl, eps)?.ok_or(Error::LostMembership)?;
        let energy = state.value;
        let mut dir: Vec<f64> = precond.solve(&state.gradient).iter().map(|v| -v).collect();
        let mut slope = weighted_dot(grid, &state.gradient, &dir);
        if !(slope < 0.0) {
            dir = state.gradient.iter().map(|v| -v).collect();
            slope = weighted_dot(grid, &state.gradient, &dir);
            if !(slope < 0.0) {
                // zero gradient: nothing left to do
                return Ok(StageSummary {
                    epsilon: eps.unwrap(),
                    energy,
                    iterations: it,
                    restarted: false,
                    newton_steps: 0,
                });
            }
        }
        let mut a = (2.0 * step).min(1e6);
        let mut trial = vec![0.0; u.len()];
        let accepted = loop {
            for ((t, x), d) in trial.iter_mut().zip(u.iter()).zip(&dir) {
                *t = x + a * d;
            }
            // steps leaving the positive set come back as None and are shrunk
            if let Some((value, _, _)) = reduced_value(grid, &trial, nl, eps)? {
                if value <= energy + cfg.armijo * a * slope {
                    break Some(value);
                }
            }
            a *= cfg.backtracking;
            if a * max_abs(&dir) < 1e-16 * max_abs(u) {
                break None;
            }
        };
        let Some(next) = accepted else {
            // no decrease is representable at this precision
            return Ok(StageSummary {
                epsilon: eps.unwrap(),
                energy,
                iterations: it,
                restarted: false,
                newton_steps: 0,
            });
        };
        std::mem::swap(u, &mut trial);
        step = a;
        if (energy - next) / energy < cfg.tolerance {
            return Ok(StageSummary {
                epsilon: eps.unwrap(),
                energy: next,
                iterations: it,
                restarted: false,
                newton_steps: 0,
            });
        }
    }
    Err(Error::MaxIterations {
        epsilon: eps.unwrap(),
        iterations: cfg.max_iterations,
    })
}

/// `‖Δ²u − g(u)‖ / ‖g(u)‖` in the weighted L² norm (with `g_ε` if given).
pub(crate) fn pde_relative_residual(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<f64> {
    let bl = bilaplacian_values(grid, u);
    let f = force_values(u, nl, eps)?;
    let res: Vec<f64> = bl.iter().zip(&f).map(|(a, b)| a - b).collect();
    let den = weighted_dot(grid, &f, &f);
    if !(den > 0.0) {
        return Err(Error::ZeroField);
    }
    Ok((weighted_dot(grid, &res, &res) / den).sqrt())
}

/// Relative residual of `Δ²u = λ g(u)` and the `λ` used.
fn scaled_residual(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
    scaled: bool,
) -> Result<Option<(f64, f64)>> {
    let lambda = if scaled {
        match reduced_value(grid, u, nl, eps)? {
            Some((_, b, g)) => b / (nl.critical_exponent() * g),
            None => return Ok(None),
        }
    } else {
        1.0
    };
    let bl = bilaplacian_values(grid, u);
    let f = force_values(u, nl, eps)?;
    let res: Vec<f64> = bl.iter().zip(&f).map(|(a, b)| a - lambda * b).collect();
    let den = lambda * lambda * weighted_dot(grid, &f, &f);
    if !(den > 0.0) {
        return Ok(None);
    }
    Ok(Some((
        (weighted_dot(grid, &res, &res) / den).sqrt(),
        lambda,
    )))
}

/// Newton's method on `Δ²u = λ g(u)` (or `g_ε`). With `scaled`, `λ` is
/// refreshed each step as `∫|Δu|² / (2** ∫G)`, whose fixed points are exactly
/// the critical points of the reduced energy, so no dilation is needed;
/// otherwise `λ = 1`. Returns the refined samples and the number of steps, or
/// `None` when the residual did not drop or the reduced energy went up — the
/// refinement must polish the descent result, not jump to another solution.
fn newton_refine(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
    scaled: bool,
    bilap: &Banded,
    max_steps: usize,
) -> Result<Option<(Vec<f64>, usize)>> {
    if max_steps == 0 {
        return Ok(None);
    }
    let Some((start_energy, _, _)) = reduced_value(grid, u, nl, eps)? else {
        return Ok(None);
    };
    let Some((mut res, mut lambda)) = scaled_residual(grid, u, nl, eps, scaled)? else {
        return Ok(None);
    };
    let mut v = u.to_vec();
    let mut best: Option<(Vec<f64>, usize)> = None;
    for k in 1..=max_steps {
        let bl = bilaplacian_values(grid, &v);
        let f = force_values(&v, nl, eps)?;
        let rhs: Vec<f64> = bl.iter().zip(&f).map(|(a, b)| a - lambda * b).collect();
        let mut jac = bilap.clone();
        let diag = v
            .iter()
            .map(|s| nl.force_prime(eps, *s).map(|d| -lambda * d))
            .collect::<Result<Vec<f64>>>()?;
        jac.add_diagonal(&diag);
        let Ok(lu) = jac.factor() else { break };
        let delta = lu.solve(&rhs);
        if delta.iter().any(|d| !d.is_finite()) {
            break;
        }
        for (x, d) in v.iter_mut().zip(&delta) {
            *x -= d;
        }
        let Some((next, next_lambda)) = scaled_residual(grid, &v, nl, eps, scaled)? else {
            break;
        };
        if !(next < res) {
            break;
        }
        res = next;
        lambda = next_lambda;
        best = Some((v.clone(), k));
        if res < 1e-12 {
            break;
        }
    }
    let Some((v, k)) = best else { return Ok(None) };
    match reduced_value(grid, &v, nl, eps)? {
        Some((e, _, _)) if e <= start_energy * (1.0 + 1e-12) => Ok(Some((v, k))),
        _ => Ok(None),
    }
}

fn tail_mass(grid: &RadialGrid, u: &[f64]) -> f64 {
    let cut = 0.9 * grid.radius();
    let total = weighted_dot(grid, u, u);
    let tail: f64 = grid
        .nodes()
        .iter()
        .zip(grid.weights())
        .zip(u)
        .filter(|((r, _), _)| **r > cut)
        .map(|((_, w), x)| w * x * x)
        .sum();
    tail / total
}

pub fn minimize(
    nl: &Nonlinearity,
    grid: &Arc<RadialGrid>,
    cfg: &SolverConfig,
) -> Result<GroundStateResult> {
    let start = initial_guess(nl, grid, cfg)?;
    let bilap = bilaplacian_matrix(grid);
    let mut shifted = bilap.clone();
    shifted.add_diagonal(&vec![cfg.preconditioner_shift; grid.len()]);
    let precond = shifted.factor()?;

    let mut u = start.into_values();
    let mut stages = Vec::with_capacity(cfg.epsilon_schedule.len());
    for eps in &cfg.epsilon_schedule {
        // a long low tail that was cheap at the previous ε can leave the warm
        // start infeasible, or barely feasible with a huge Ĵ_ε, once the cutoff
        // tightens; start from the fresh scan whenever that is lower
        let warm = reduced_value(grid, &u, nl, Some(*eps))?.map(|v| v.0);
        let fresh_u = amplitude_scan(grid, nl, &cfg.amplitudes)?;
        let fresh = reduced_value(grid, &fresh_u, nl, Some(*eps))?.map(|v| v.0);
        let restarted = match (warm, fresh) {
            (Some(w), Some(f)) => f < w,
            (None, _) => true,
            (Some(_), None) => false,
        };
        if restarted {
            u = fresh_u;
        }
        let mut stage = descend(grid, &mut u, nl, *eps, cfg, &precond)?;
        stage.restarted = restarted;
        if let Some((v, k)) = newton_refine(
            grid,
            &u,
            nl,
            Some(*eps),
            true,
            &bilap,
            cfg.newton_iterations,
        )? {
            stage.energy = reduced_value(grid, &v, nl, Some(*eps))?
                .ok_or(Error::LostMembership)?
                .0;
            stage.newton_steps = k;
            u = v;
        }
        stages.push(stage);
    }
    let iterations = stages.iter().map(|s| s.iterations).sum();

    let (mut u, _) = project_values(grid, &u, nl, None)?.ok_or(Error::LostMembership)?;
    let mut newton_steps = 0;
    if let Some((v, k)) = newton_refine(grid, &u, nl, None, false, &bilap, cfg.newton_iterations)? {
        u = v;
        newton_steps = k;
    }

    let b = bilap_sq(grid, &u);
    let g = nonlinear_integral(grid, &u, nl, None)?;
    let energy = reduced_from_parts(grid.dimension(), b, g).ok_or(Error::LostMembership)?;
    if !(energy > 1e-6) {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let pohozaev = (b - nl.critical_exponent() * g).abs() / b;
    let pde = pde_relative_residual(grid, &u, nl, None)?;
    let tail = tail_mass(grid, &u);
    Ok(GroundStateResult {
        profile: RadialField::new(grid.clone(), u)?,
        energy,
        bilap_sq: b,
        pohozaev_relative_residual: pohozaev,
        pde_relative_residual: pde,
        c_n_log: None,
        iterations,
        final_epsilon: *cfg.epsilon_schedule.last().unwrap(),
        tail_mass: tail,
        newton_steps,
        stages,
    })
}
