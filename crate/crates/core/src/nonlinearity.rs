//! Scalar nonlinearity data: the primitive `G`, its derivative `g`, the
//! positive/negative split `G = G₊ − G₋`, the cutoff `φ_ε`, and the
//! regularized primitive `G_ε = G₊ − G₋^ε` with `G₋^ε(s) = ∫_0^s φ_ε g₋`.
//!
//! Built-in models have closed forms for every quantity. Custom models only
//! supply `g` (and optionally `G`); the split and the regularization are then
//! obtained by adaptive quadrature.

use std::fmt::Debug;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::critical_exponent;
use crate::quadrature::adaptive_simpson_mixed;

/// Absolute tolerance for quadrature-backed primitives.
pub const QUADRATURE_TOL: f64 = 1e-12;
/// Relative floor on the quadrature tolerance, for very large arguments.
pub const QUADRATURE_REL_TOL: f64 = 1e-13;

fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<f64> {
    adaptive_simpson_mixed(f, a, b, QUADRATURE_TOL, QUADRATURE_REL_TOL)
}

/// A user-supplied autonomous nonlinearity.
pub trait ScalarModel: Debug + Send + Sync {
    fn name(&self) -> &str;

    /// `g(s)`; must be continuous with `g(0) = 0`.
    fn g(&self, s: f64) -> f64;

    /// `G(s) = ∫_0^s g`. The default integrates `g` numerically.
    fn primitive(&self, s: f64) -> Result<f64> {
        integrate(|t| self.g(t), 0.0, s)
    }
}

#[derive(Debug, Clone)]
pub enum Model {
    /// `G(s) = s² log|s|`.
    Logarithmic,
    /// `G(s) = |s|^p/p − μ s²/2`.
    PowerMass {
        p: f64,
        mu: f64,
    },
    Custom(Arc<dyn ScalarModel>),
}

impl Model {
    pub fn label(&self) -> String {
        match self {
            Model::Logarithmic => "log".to_string(),
            Model::PowerMass { .. } => "power_mass".to_string(),
            Model::Custom(m) => m.name().to_string(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Nonlinearity {
    model: Model,
    dimension: usize,
    critical: f64,
}

/// `e^{-1/2}`: where the logarithmic `g` changes sign on `(0, ∞)`.
fn log_sign_change() -> f64 {
    (-0.5f64).exp()
}

pub fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(eps))
    }
}

impl Nonlinearity {
    pub fn new(model: Model, dimension: usize) -> Result<Self> {
        if dimension < 5 {
            return Err(Error::InvalidModel(format!(
                "dimension must be at least 5, got {dimension}"
            )));
        }
        let critical = critical_exponent(dimension);
        if let Model::PowerMass { p, mu } = model {
            if !(p > 2.0 && p < critical) {
                return Err(Error::InvalidModel(format!(
                    "power p = {p} must lie in (2, {critical})"
                )));
            }
            if !(mu > 0.0 && mu.is_finite()) {
                return Err(Error::InvalidModel(format!(
                    "mass mu = {mu} must be positive"
                )));
            }
        }
        Ok(Self {
            model,
            dimension,
            critical,
        })
    }

    pub fn logarithmic(dimension: usize) -> Result<Self> {
        Self::new(Model::Logarithmic, dimension)
    }

    pub fn power_mass(dimension: usize, p: f64, mu: f64) -> Result<Self> {
        Self::new(Model::PowerMass { p, mu }, dimension)
    }

    pub fn custom(dimension: usize, model: Arc<dyn ScalarModel>) -> Result<Self> {
        Self::new(Model::Custom(model), dimension)
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// `2** = 2N/(N−4)`.
    pub fn critical_exponent(&self) -> f64 {
        self.critical
    }

    pub fn is_logarithmic(&self) -> bool {
        matches!(self.model, Model::Logarithmic)
    }

    /// `G(s)`.
    pub fn big_g(&self, s: f64) -> f64 {
        match &self.model {
            Model::Logarithmic => {
                if s == 0.0 {
                    0.0
                } else {
                    s * s * s.abs().ln()
                }
            }
            Model::PowerMass { p, mu } => s.abs().powf(*p) / p - 0.5 * mu * s * s,
            Model::Custom(m) => m.primitive(s).unwrap_or(f64::NAN),
        }
    }

    /// `g(s)`.
    pub fn g(&self, s: f64) -> f64 {
        match &self.model {
            Model::Logarithmic => {
                if s == 0.0 {
                    0.0
                } else {
                    2.0 * s * s.abs().ln() + s
                }
            }
            Model::PowerMass { p, mu } => s.abs().powf(p - 2.0) * s - mu * s,
            Model::Custom(m) => m.g(s),
        }
    }

    /// `g'(s)`, clamped away from the logarithmic singularity at 0.
    pub fn g_prime(&self, s: f64) -> f64 {
        match &self.model {
            Model::Logarithmic => 2.0 * s.abs().max(1e-300).ln() + 3.0,
            Model::PowerMass { p, mu } => (p - 1.0) * s.abs().powf(p - 2.0) - mu,
            Model::Custom(m) => {
                let h = 1e-6 * s.abs().max(1.0);
                (m.g(s + h) - m.g(s - h)) / (2.0 * h)
            }
        }
    }

    /// `g₊`: the positive part of `g` on `s ≥ 0`, the negative part on `s < 0`.
    pub fn g_plus(&self, s: f64) -> f64 {
        let g = self.g(s);
        if s >= 0.0 {
            g.max(0.0)
        } else {
            g.min(0.0)
        }
    }

    /// `g₋ = g₊ − g`.
    pub fn g_minus(&self, s: f64) -> f64 {
        self.g_plus(s) - self.g(s)
    }

    /// `G₊(s) = ∫_0^s g₊ ≥ 0`.
    pub fn g_plus_primitive(&self, s: f64) -> Result<f64> {
        match &self.model {
            Model::Logarithmic => {
                let a = s.abs();
                Ok(if a >= log_sign_change() {
                    a * a * a.ln() + 0.5 / std::f64::consts::E
                } else {
                    0.0
                })
            }
            Model::PowerMass { p, mu } => {
                let a = s.abs();
                let knee = mu.powf(1.0 / (p - 2.0));
                Ok(if a >= knee {
                    self.big_g(a) - self.big_g(knee)
                } else {
                    0.0
                })
            }
            Model::Custom(_) => integrate(|t| self.g_plus(t), 0.0, s),
        }
    }

    /// `G₋(s) = G₊(s) − G(s) ≥ 0`.
    pub fn g_minus_primitive(&self, s: f64) -> Result<f64> {
        match &self.model {
            Model::Custom(m) => Ok(self.g_plus_primitive(s)? - m.primitive(s)?),
            _ => Ok(self.g_plus_primitive(s)? - self.big_g(s)),
        }
    }

    /// `φ_ε(s) = min(1, (|s|/ε)^{2**−1})`.
    pub fn phi_eps(&self, eps: f64, s: f64) -> Result<f64> {
        check_epsilon(eps)?;
        Ok(self.phi_unchecked(eps, s))
    }

    fn phi_unchecked(&self, eps: f64, s: f64) -> f64 {
        let a = s.abs();
        if a >= eps {
            1.0
        } else {
            (a / eps).powf(self.critical - 1.0)
        }
    }

    /// `G₋^ε(s) = ∫_0^s φ_ε g₋`.
    pub fn g_minus_eps_primitive(&self, eps: f64, s: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let q = self.critical - 1.0;
        let a = s.abs();
        match &self.model {
            Model::Logarithmic => {
                // g₋(t) = −(2t ln t + t) on (0, e^{-1/2}), zero beyond
                let m = a.min(log_sign_change());
                let k = q + 2.0;
                let head = |x: f64| {
                    if x == 0.0 {
                        0.0
                    } else {
                        -x.powf(k) / k * (2.0 * x.ln() - 2.0 / k + 1.0)
                    }
                };
                let x_ln_x2 = |x: f64| if x == 0.0 { 0.0 } else { x * x * x.ln() };
                Ok(if m <= eps {
                    head(m) / eps.powf(q)
                } else {
                    head(eps) / eps.powf(q) + x_ln_x2(eps) - x_ln_x2(m)
                })
            }
            Model::PowerMass { p, mu } => {
                // g₋(t) = μt − t^{p−1} on (0, μ^{1/(p−2)}), zero beyond
                let m = a.min(mu.powf(1.0 / (p - 2.0)));
                let head = |x: f64| mu * x.powf(q + 2.0) / (q + 2.0) - x.powf(q + p) / (q + p);
                let plain = |x: f64| 0.5 * mu * x * x - x.powf(*p) / p;
                Ok(if m <= eps {
                    head(m) / eps.powf(q)
                } else {
                    head(eps) / eps.powf(q) + plain(m) - plain(eps)
                })
            }
            Model::Custom(_) => self.g_minus_eps_by_quadrature(eps, s),
        }
    }

    /// Quadrature route for `G₋^ε`, used for custom models and as an oracle.
    pub fn g_minus_eps_by_quadrature(&self, eps: f64, s: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let f = |t: f64| self.phi_unchecked(eps, t) * self.g_minus(t);
        // split at the cutoff so the kink sits on a panel boundary
        let knot = eps.copysign(s);
        if s.abs() > eps {
            Ok(integrate(f, 0.0, knot)? + integrate(f, knot, s)?)
        } else {
            integrate(f, 0.0, s)
        }
    }

    /// `G_ε(s) = G₊(s) − G₋^ε(s)`.
    pub fn big_g_eps(&self, eps: f64, s: f64) -> Result<f64> {
        Ok(self.g_plus_primitive(s)? - self.g_minus_eps_primitive(eps, s)?)
    }

    /// `g_ε(s) = g₊(s) − φ_ε(s) g₋(s)`.
    pub fn g_eps(&self, eps: f64, s: f64) -> Result<f64> {
        check_epsilon(eps)?;
        Ok(self.g_plus(s) - self.phi_unchecked(eps, s) * self.g_minus(s))
    }

    /// `g_ε'(s)`, from the one-sided pieces; kinks at `|s| = ε` and at sign
    /// changes of `g` take the value of the outer piece.
    pub fn g_eps_prime(&self, eps: f64, s: f64) -> Result<f64> {
        check_epsilon(eps)?;
        let gp = self.g_prime(s);
        let plus_active = self.g_plus(s) != 0.0;
        let d_plus = if plus_active { gp } else { 0.0 };
        let d_minus = d_plus - gp;
        let a = s.abs();
        let phi = self.phi_unchecked(eps, s);
        let d_phi = if a < eps && a > 0.0 {
            let q = self.critical - 1.0;
            q * phi / a * s.signum()
        } else {
            0.0
        };
        Ok(d_plus - d_phi * self.g_minus(s) - phi * d_minus)
    }

    /// `g'` or `g_ε'` depending on the regularization.
    pub fn force_prime(&self, eps: Option<f64>, s: f64) -> Result<f64> {
        match eps {
            None => Ok(self.g_prime(s)),
            Some(e) => self.g_eps_prime(e, s),
        }
    }

    /// `G` or `G_ε` depending on the regularization.
    pub fn density(&self, eps: Option<f64>, s: f64) -> Result<f64> {
        match eps {
            None => match &self.model {
                Model::Custom(m) => m.primitive(s),
                _ => Ok(self.big_g(s)),
            },
            Some(e) => self.big_g_eps(e, s),
        }
    }

    /// `g` or `g_ε` depending on the regularization.
    pub fn force(&self, eps: Option<f64>, s: f64) -> Result<f64> {
        match eps {
            None => Ok(self.g(s)),
            Some(e) => self.g_eps(e, s),
        }
    }

    /// A point `ξ₀ > 0` with `G(ξ₀) > 0`, from the closed form when one exists.
    pub fn canonical_witness(&self) -> Option<f64> {
        match &self.model {
            Model::Logarithmic => Some(std::f64::consts::E),
            Model::PowerMass { p, mu } => Some((p * mu).powf(1.0 / (p - 2.0))),
            Model::Custom(_) => None,
        }
    }

    /// Sampled diagnostic for the growth conditions. Finite sampling can only
    /// falsify them, so the result is labeled diagnostic.
    pub fn check_growth_conditions(&self, sample_count: usize) -> Result<GrowthReport> {
        if sample_count < 100 {
            return Err(Error::InvalidModel(format!(
                "growth diagnostic needs at least 100 samples, got {sample_count}"
            )));
        }
        let samples: Vec<f64> = (0..sample_count)
            .map(|i| 10f64.powf(-8.0 + 16.0 * i as f64 / (sample_count - 1) as f64))
            .collect();
        let crit = self.critical;
        let mut ratios = Vec::with_capacity(sample_count);
        let mut g0_constant: f64 = 0.0;
        for &s in &samples {
            let gp = self.g_plus_primitive(s)?.max(self.g_plus_primitive(-s)?);
            ratios.push(gp / s.powf(crit));
            let g = self.g(s).abs().max(self.g(-s).abs());
            g0_constant = g0_constant.max(g / (1.0 + s.powf(crit - 1.0)));
        }
        let decile = (sample_count / 10).max(1);
        let peak = ratios.iter().cloned().fold(0.0, f64::max);
        let near_zero = ratios[..decile].iter().cloned().fold(0.0, f64::max);
        let near_infinity = ratios[sample_count - decile..]
            .iter()
            .cloned()
            .fold(0.0, f64::max);
        let vanishing =
            |end: f64, first: f64, last: f64| end == 0.0 || (end <= 1e-3 * peak && last <= first);

        let g1_ok = vanishing(near_zero, ratios[decile - 1], ratios[0]);
        let g3_ok = vanishing(
            near_infinity,
            ratios[sample_count - decile],
            ratios[sample_count - 1],
        );

        let witness = match self.canonical_witness() {
            Some(x) => Some(x),
            None => samples.iter().cloned().find(|s| self.big_g(*s) > 0.0),
        };
        let witness_value = witness.map(|x| self.big_g(x));
        let g2_ok = witness_value.is_some_and(|v| v > 0.0);

        let mut violations = Vec::new();
        if !g1_ok {
            violations.push("G+ / |s|^(2**) does not vanish near 0".to_string());
        }
        if !g2_ok {
            violations.push("no sampled point with G > 0".to_string());
        }
        if !g3_ok {
            violations.push("G+ / |s|^(2**) does not vanish at infinity".to_string());
        }
        Ok(GrowthReport {
            sample_count,
            critical_exponent: crit,
            ratio_near_zero: near_zero,
            ratio_near_infinity: near_infinity,
            peak_ratio: peak,
            g0_constant,
            witness,
            witness_value,
            g1_ok,
            g2_ok,
            g3_ok,
            violations,
        })
    }
}

/// Diagnostic (not a certificate) for the growth conditions on `g`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct GrowthReport {
    pub sample_count: usize,
    pub critical_exponent: f64,
    /// `sup G₊(s)/|s|^{2**}` over the lowest decile of samples.
    pub ratio_near_zero: f64,
    /// Same over the highest decile.
    pub ratio_near_infinity: f64,
    pub peak_ratio: f64,
    /// Smallest `c` with `|g(s)| ≤ c(1 + |s|^{2**−1})` on the samples.
    pub g0_constant: f64,
    pub witness: Option<f64>,
    pub witness_value: Option<f64>,
    pub g1_ok: bool,
    pub g2_ok: bool,
    pub g3_ok: bool,
    pub violations: Vec<String>,
}
