//! Property suites on seeded random fields.

use std::sync::Arc;

use biharmonic_core::energy::{
    energy, reduced_energy, reduced_energy_gradient, reduced_from_parts,
};
use biharmonic_core::logsobolev::interpolation_check;
use biharmonic_core::testfields::{random_fields, random_positive_members, DEFAULT_SEED};
use biharmonic_core::{Nonlinearity, RadialField, RadialGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::{derivative, gradient_errors, grid, line, positive_mixture, STEP};

#[test]
fn gradient_matches_finite_differences() {
    let errors = gradient_errors(100);
    for (k, e) in errors.iter().enumerate() {
        assert!(*e < 1e-6, "triple {k}: relative error {e:e}");
    }
}

#[test]
fn reduced_gradient_matches_finite_differences() {
    let g = grid(6);
    let nl = Nonlinearity::logarithmic(6).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let dirs = random_fields(&g, 8, 10).unwrap();
    for v in &dirs {
        let u = positive_mixture(&g, &mut rng).scaled(20.0).unwrap();
        let Some(grad) = reduced_energy_gradient(&u, &nl, Some(0.25)).unwrap() else {
            panic!("scaled mixture should be in the positive set");
        };
        let analytic = grad.dot(v).unwrap();
        let h = STEP * u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let at = line(&u, v, &nl, Some(0.25));
        let fd = derivative(
            |t| {
                let (b, g) = at(t);
                reduced_from_parts(6, b, g).unwrap()
            },
            h,
        );
        // ∇Ĵ·v is a difference of two terms that can be ~100× larger than
        // itself, so the error is measured against their size: the discrete
        // bilaplacian is self-adjoint only to ~1e-8, which cancellation inflates
        let e = energy(&u, &nl, Some(0.25)).unwrap();
        let force: Vec<f64> = u
            .values()
            .iter()
            .map(|s| nl.force(Some(0.25), *s).unwrap())
            .collect();
        let gv = RadialField::new(g.clone(), force).unwrap().dot(v).unwrap();
        let bv = u.bilaplacian().dot(v).unwrap();
        let value = reduced_from_parts(6, e.bilap_sq, e.g_int).unwrap();
        let terms = value * (3.0 * bv.abs() / e.bilap_sq + 0.5 * gv.abs() / e.g_int);
        assert!(
            (fd - analytic).abs() < 1e-6 * terms,
            "{analytic} vs {fd} (terms {terms})"
        );
    }
}

#[test]
fn reduced_energy_is_dilation_invariant() {
    for nl in [
        Nonlinearity::logarithmic(5).unwrap(),
        Nonlinearity::power_mass(5, 4.0, 1.0).unwrap(),
    ] {
        // u(½·) doubles the support, which must still fit inside R
        let g = Arc::new(RadialGrid::new(5, 40.0, 4001).unwrap());
        for (i, u) in random_positive_members(&g, &nl, DEFAULT_SEED, 20)
            .unwrap()
            .iter()
            .enumerate()
        {
            let base = reduced_energy(u, &nl, None).unwrap().unwrap();
            for l in [0.5, 2.0] {
                let d = reduced_energy(&u.dilated(l), &nl, None).unwrap().unwrap();
                let rel = (d - base).abs() / base;
                assert!(rel < 1e-6, "field {i}, λ = {l}: {base} vs {d} ({rel:e})");
            }
        }
    }
}

#[test]
fn interpolation_holds_strictly_on_random_fields() {
    for n in [5, 6, 8] {
        let g = grid(n);
        for (i, u) in random_fields(&g, DEFAULT_SEED, 50)
            .unwrap()
            .iter()
            .enumerate()
        {
            let r = interpolation_check(u, "random").unwrap();
            assert!(r.holds && r.margin > 0.0, "N = {n}, field {i}: {r:?}");
            // the gap never closes
            assert!(r.margin > 1e-3 * r.lhs, "N = {n}, field {i}: {r:?}");
        }
    }
}

#[test]
fn regularized_energy_never_exceeds_energy() {
    let g = grid(5);
    let nl = Nonlinearity::logarithmic(5).unwrap();
    for u in random_fields(&g, 3, 20).unwrap() {
        let u = u.scaled(10.0).unwrap();
        let j = energy(&u, &nl, None).unwrap().j_value;
        for eps in [0.5, 0.1, 1e-3] {
            assert!(energy(&u, &nl, Some(eps)).unwrap().j_value <= j + 1e-12 * j.abs());
        }
    }
}
