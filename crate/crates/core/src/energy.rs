//! The energy `J(u) = ½∫|Δu|² − ∫G(u)`, its regularized variant `J_ε`, the
//! discrete L² gradient, and the dilation-invariant reduced energy
//!
//! ```text
//! Ĵ(u) = (½ − 1/2**) (∫|Δu|²)^{N/4} (2** ∫G(u))^{−(N−4)/4},
//! ```
//!
//! which is `J` evaluated at the dilation of `u` that lies on the Pohožaev
//! manifold. `Ĵ` is only defined where `∫G(u) > 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::nonlinearity::{check_epsilon, Nonlinearity};
use crate::operators::{bilaplacian_values, laplacian_values, weighted_dot, RadialField};

/// `∫G(u)` must exceed this for `u` to count as a member of the positive set.
pub const MEMBERSHIP_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub bilap_sq: f64,
    pub g_int: f64,
    pub j_value: f64,
    pub epsilon: Option<f64>,
}

pub(crate) fn check_pairing(grid: &RadialGrid, nl: &Nonlinearity) -> Result<()> {
    if grid.dimension() != nl.dimension() {
        return Err(Error::InvalidModel(format!(
            "nonlinearity built for N = {} used on an N = {} grid",
            nl.dimension(),
            grid.dimension()
        )));
    }
    Ok(())
}

fn check_regularization(eps: Option<f64>) -> Result<()> {
    match eps {
        Some(e) => check_epsilon(e),
        None => Ok(()),
    }
}

/// `∫G(u)` (or `∫G_ε(u)`).
pub(crate) fn nonlinear_integral(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<f64> {
    let mut acc = 0.0;
    for (w, s) in grid.weights().iter().zip(u) {
        if *w != 0.0 {
            acc += w * nl.density(eps, *s)?;
        }
    }
    Ok(acc)
}

pub(crate) fn force_values(u: &[f64], nl: &Nonlinearity, eps: Option<f64>) -> Result<Vec<f64>> {
    u.iter().map(|s| nl.force(eps, *s)).collect()
}

pub(crate) fn bilap_sq(grid: &RadialGrid, u: &[f64]) -> f64 {
    let lap = laplacian_values(grid, u);
    weighted_dot(grid, &lap, &lap)
}

pub fn energy(u: &RadialField, nl: &Nonlinearity, eps: Option<f64>) -> Result<EnergyBreakdown> {
    check_pairing(u.grid(), nl)?;
    check_regularization(eps)?;
    let bilap_sq = bilap_sq(u.grid(), u.values());
    let g_int = nonlinear_integral(u.grid(), u.values(), nl, eps)?;
    Ok(EnergyBreakdown {
        bilap_sq,
        g_int,
        j_value: 0.5 * bilap_sq - g_int,
        epsilon: eps,
    })
}

/// `Δ²u − g(u)` (or with `g_ε`), the gradient of `J` in the `∫ f·v` pairing.
pub fn l2_gradient(u: &RadialField, nl: &Nonlinearity, eps: Option<f64>) -> Result<RadialField> {
    check_pairing(u.grid(), nl)?;
    check_regularization(eps)?;
    let bl = bilaplacian_values(u.grid(), u.values());
    let f = force_values(u.values(), nl, eps)?;
    let values = bl.iter().zip(&f).map(|(a, b)| a - b).collect();
    RadialField::new(u.grid().clone(), values)
}

/// Closed form of the projected energy from its two integrals.
pub fn reduced_from_parts(dimension: usize, bilap_sq: f64, g_int: f64) -> Option<f64> {
    if !(g_int > MEMBERSHIP_GUARD) || !(bilap_sq > 0.0) {
        return None;
    }
    let n = dimension as f64;
    let crit = 2.0 * n / (n - 4.0);
    let prefactor = 0.5 - 1.0 / crit;
    let log_value =
        prefactor.ln() + 0.25 * n * bilap_sq.ln() - 0.25 * (n - 4.0) * (crit * g_int).ln();
    Some(log_value.exp())
}

pub fn reduced_energy(u: &RadialField, nl: &Nonlinearity, eps: Option<f64>) -> Result<Option<f64>> {
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let e = energy(u, nl, eps)?;
    Ok(reduced_from_parts(u.dimension(), e.bilap_sq, e.g_int))
}

/// Reduced energy and its gradient at one point.
#[derive(Debug, Clone)]
pub(crate) struct ReducedState {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Value of `Ĵ` at raw samples, `None` outside the positive set.
pub(crate) fn reduced_value(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<Option<(f64, f64, f64)>> {
    let b = bilap_sq(grid, u);
    let g = nonlinear_integral(grid, u, nl, eps)?;
    Ok(reduced_from_parts(grid.dimension(), b, g).map(|v| (v, b, g)))
}

/// `∇Ĵ = Ĵ [ (N/2) Δ²u / ∫|Δu|² − ((N−4)/4) g(u) / ∫G(u) ]`.
pub(crate) fn reduced_state(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<Option<ReducedState>> {
    let Some((value, bilap_sq, g_int)) = reduced_value(grid, u, nl, eps)? else {
        return Ok(None);
    };
    let n = grid.dimension() as f64;
    let bl = bilaplacian_values(grid, u);
    let f = force_values(u, nl, eps)?;
    let a = value * 0.5 * n / bilap_sq;
    let b = value * 0.25 * (n - 4.0) / g_int;
    let gradient = bl.iter().zip(&f).map(|(x, y)| a * x - b * y).collect();
    Ok(Some(ReducedState { value, gradient }))
}

/// Gradient of the reduced energy in the `∫ f·v` pairing; `None` outside the
/// positive set.
pub fn reduced_energy_gradient(
    u: &RadialField,
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<Option<RadialField>> {
    check_pairing(u.grid(), nl)?;
    check_regularization(eps)?;
    match reduced_state(u.grid(), u.values(), nl, eps)? {
        Some(state) => Ok(Some(RadialField::new(u.grid().clone(), state.gradient)?)),
        None => Ok(None),
    }
}
