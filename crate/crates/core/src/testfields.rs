//! Reference fields: Gaussians with analytic moments and seeded random
//! Gaussian mixtures for property checks.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::energy::{nonlinear_integral, MEMBERSHIP_GUARD};
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::nonlinearity::Nonlinearity;
use crate::operators::RadialField;

pub const DEFAULT_SEED: u64 = 42;

/// `π^{−N/4} e^{−r²/2}`, unit L² norm.
pub fn unit_gaussian(grid: &Arc<RadialGrid>) -> RadialField {
    dilated_gaussian(grid, 1.0)
}

/// `λ^{N/2} π^{−N/4} e^{−λ²r²/2}`, unit L² norm for every `λ > 0`.
pub fn dilated_gaussian(grid: &Arc<RadialGrid>, lambda: f64) -> RadialField {
    let n = grid.dimension() as f64;
    let c = lambda.powf(n / 2.0) * PI.powf(-n / 4.0);
    RadialField::from_fn(grid.clone(), |r| c * (-0.5 * lambda * lambda * r * r).exp())
        .expect("Gaussian samples are finite")
}

/// `u / ‖u‖₂`.
pub fn normalized(u: &RadialField) -> Result<RadialField> {
    let l2 = u.l2_sq();
    if !(l2 > 0.0) {
        return Err(Error::ZeroField);
    }
    u.scaled(1.0 / l2.sqrt())
}

/// Sum of one to four even shells `c (e^{−(r−a)²/2s²} + e^{−(r+a)²/2s²})`
/// with centers `a ∈ [0, 4]` and widths `s ∈ [0.6, 2]`, normalized in L².
fn random_mixture(grid: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> Result<RadialField> {
    let k = rng.gen_range(1..=4);
    let shells: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let c: f64 = rng.gen_range(0.2..1.0) * if rng.gen_bool(0.25) { -1.0 } else { 1.0 };
            (c, rng.gen_range(0.0..4.0), rng.gen_range(0.6..2.0))
        })
        .collect();
    let u = RadialField::from_fn(grid.clone(), |r| {
        shells
            .iter()
            .map(|(c, a, s)| {
                let d = 2.0 * s * s;
                c * ((-(r - a) * (r - a) / d).exp() + (-(r + a) * (r + a) / d).exp())
            })
            .sum()
    })?;
    normalized(&u)
}

/// `count` smooth L²-normalized fields from the seeded generator.
pub fn random_fields(grid: &Arc<RadialGrid>, seed: u64, count: usize) -> Result<Vec<RadialField>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        match random_mixture(grid, &mut rng) {
            Ok(u) => out.push(u),
            // shells of opposite sign can cancel exactly; draw again
            Err(Error::ZeroField) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// Random members of the positive set `∫G(u) > 0`: each random field is
/// doubled in amplitude until it qualifies.
pub fn random_positive_members(
    grid: &Arc<RadialGrid>,
    nl: &Nonlinearity,
    seed: u64,
    count: usize,
) -> Result<Vec<RadialField>> {
    let fields = random_fields(grid, seed, count)?;
    let mut out = Vec::with_capacity(count);
    for u in fields {
        let mut t = 1.0;
        loop {
            let v = u.scaled(t)?;
            if nonlinear_integral(grid, v.values(), nl, None)? > MEMBERSHIP_GUARD {
                out.push(v);
                break;
            }
            t *= 2.0;
            if t > 1e12 {
                return Err(Error::NoPositiveG);
            }
        }
    }
    Ok(out)
}
