//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::sync::Arc;

use biharmonic_core::energy::{energy, l2_gradient};
use biharmonic_core::testfields::{random_fields, DEFAULT_SEED};
use biharmonic_core::{Nonlinearity, RadialField, RadialGrid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Finite-difference step relative to `max|u|`.
pub const STEP: f64 = 1e-5;

/// `t ↦ (∫|Δ(u+tv)|², ∫G(u+tv))` along a line. The quadratic term is expanded
/// exactly as `B(u) + 2t⟨Δu,Δv⟩ + t²B(v)`: differencing it directly loses
/// everything to cancellation (energies ~10³, slopes O(1)).
pub fn line(
    u: &RadialField,
    v: &RadialField,
    nl: &Nonlinearity,
    eps: Option<f64>,
) -> impl Fn(f64) -> (f64, f64) {
    let (lu, lv) = (u.laplacian(), v.laplacian());
    let b0 = lu.l2_sq();
    let b1 = lu.dot(&lv).unwrap();
    let b2 = lv.l2_sq();
    let (u, v, nl) = (u.clone(), v.clone(), nl.clone());
    move |t| {
        let g = energy(&u.combine(1.0, &v, t).unwrap(), &nl, eps)
            .unwrap()
            .g_int;
        (b0 + 2.0 * t * b1 + t * t * b2, g)
    }
}

/// Fourth-order central difference.
pub fn derivative(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (8.0 * (f(h) - f(-h)) - (f(2.0 * h) - f(-2.0 * h))) / (12.0 * h)
}

pub fn grid(n: usize) -> Arc<RadialGrid> {
    Arc::new(RadialGrid::with_defaults(n).unwrap())
}

/// Positive even mixture `Σ c (e^{−(r−a)²/2s²} + e^{−(r+a)²/2s²})`; positivity
/// keeps finite differences away from the logarithmic singularity of `g′` at 0.
pub fn positive_mixture(g: &Arc<RadialGrid>, rng: &mut ChaCha8Rng) -> RadialField {
    let amp: f64 = rng.gen_range(0.5..20.0);
    let shells: Vec<(f64, f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| {
            (
                amp * rng.gen_range(0.2..1.0),
                rng.gen_range(0.0..3.0),
                rng.gen_range(0.7..2.0),
            )
        })
        .collect();
    RadialField::from_fn(g.clone(), |r| {
        shells
            .iter()
            .map(|(c, a, s)| {
                let d = 2.0 * s * s;
                c * ((-(r - a) * (r - a) / d).exp() + (-(r + a) * (r + a) / d).exp())
            })
            .sum()
    })
    .unwrap()
}

/// Relative errors of `⟨∇J, v⟩` against finite differences on `count` seeded
/// (u, v, ε) triples: N = 5, alternating the two built-in models, half of
/// them regularized with ε log-uniform in [1e-6, 0.8].
pub fn gradient_errors(count: usize) -> Vec<f64> {
    let g = grid(5);
    let models = [
        Nonlinearity::logarithmic(5).unwrap(),
        Nonlinearity::power_mass(5, 4.0, 1.0).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let dirs = random_fields(&g, DEFAULT_SEED + 1, count).unwrap();
    let mut errors = Vec::with_capacity(count);
    for (k, v) in dirs.iter().enumerate() {
        let u = positive_mixture(&g, &mut rng);
        let nl = &models[k % 2];
        let eps = (k % 4 >= 2).then(|| 10f64.powf(rng.gen_range(-6.0..-0.1)));
        let analytic = l2_gradient(&u, nl, eps).unwrap().dot(v).unwrap();
        let h = STEP * u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let at = line(&u, v, nl, eps);
        let fd = derivative(
            |t| {
                let (b, g) = at(t);
                0.5 * b - g
            },
            h,
        );
        errors.push((fd - analytic).abs() / analytic.abs());
    }
    errors
}
