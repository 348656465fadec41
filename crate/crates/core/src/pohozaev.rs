//! The Pohožaev manifold `𝓜 = { u ≠ 0 : ∫|Δu|² = 2** ∫G(u) }` and the
//! dilation `u ↦ u(r·)` that carries any `u` with `∫G(u) > 0` onto it.

use serde::Serialize;

use crate::energy::{bilap_sq, check_pairing, nonlinear_integral, MEMBERSHIP_GUARD};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::nonlinearity::Nonlinearity;
use crate::operators::{dilate_values, RadialField};

/// Correction passes after the first dilation; each one removes the
/// interpolation error left by the previous.
const PROJECTION_PASSES: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevReport {
    pub bilap_sq: f64,
    pub g_int: f64,
    /// `∫|Δu|² − 2** ∫G(u)`.
    pub residual: f64,
    /// `|residual| / ∫|Δu|²`.
    pub relative_residual: f64,
}

pub fn pohozaev_residual(u: &RadialField, nl: &Nonlinearity) -> Result<PohozaevReport> {
    check_pairing(u.grid(), nl)?;
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let b = bilap_sq(u.grid(), u.values());
    let g = nonlinear_integral(u.grid(), u.values(), nl, None)?;
    let residual = b - nl.critical_exponent() * g;
    Ok(PohozaevReport {
        bilap_sq: b,
        g_int: g,
        residual,
        relative_residual: residual.abs() / b,
    })
}

/// `r` with `u(r·) ∈ 𝓜` (or `𝓜_ε`), i.e. `r⁴ = 2** ∫G / ∫|Δu|²`.
fn projection_scale(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<Option<f64>> {
    let g = nonlinear_integral(grid, u, nl, eps)?;
    if !(g > MEMBERSHIP_GUARD) {
        return Ok(None);
    }
    let b = bilap_sq(grid, u);
    if !(b > 0.0) {
        return Ok(None);
    }
    Ok(Some((nl.critical_exponent() * g / b).powf(0.25)))
}

pub(crate) fn project_values(
    grid: &RadialGrid,
    u: &[f64],
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> Result<Option<(Vec<f64>, f64)>> {
    let Some(mut scale) = projection_scale(grid, u, nl, eps)? else {
        return Ok(None);
    };
    let mut values = dilate_values(u, scale);
    for _ in 0..PROJECTION_PASSES {
        let Some(step) = projection_scale(grid, &values, nl, eps)? else {
            return Err(Error::LostMembership);
        };
        if (step - 1.0).abs() < 1e-14 {
            break;
        }
        values = dilate_values(&values, step);
        scale *= step;
    }
    Ok(Some((values, scale)))
}

/// Dilates `u` onto the manifold. Returns the projected field together with
/// the total dilation factor, or `None` when `∫G(u) ≤ 0` (no dilation works).
pub fn project_to_manifold(
    u: &RadialField,
    nl: &Nonlinearity,
) -> Result<Option<(RadialField, f64)>> {
    check_pairing(u.grid(), nl)?;
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    match project_values(u.grid(), u.values(), nl, None)? {
        Some((values, scale)) => Ok(Some((RadialField::new(u.grid().clone(), values)?, scale))),
        None => Ok(None),
    }
}
