//! Truncated radial domain `[0, R]` and the quadrature that turns sampled
//! radial profiles into integrals over `R^N`.
//!
//! For a radial `f`, `∫_{R^N} f dx = ω ∫_0^R f(r) r^{N-1} dr` with
//! `ω = 2π^{N/2}/Γ(N/2)`. The nodes are uniform. The weights are the
//! trapezoidal weights with fourth-order end corrections at `r = R`. At
//! `r = 0` no correction is needed: the integrand `f r^{N-1}` of a smooth
//! radial field is either even or vanishes to order `N-1`, so the
//! Euler-Maclaurin terms there are zero or `O(h^N)`.
//!
//! The interior weights are constant. Alternating Simpson weights are not
//! used because the discrete energy `Σ w (Δu)²` would then reward odd/even
//! oscillations of `Δu` and its minimizers would not be smooth.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Weights of the end-corrected trapezoidal rule at the last four nodes,
/// ordered from `r_{n-1}` inwards.
const END_CORRECTION: [f64; 4] = [17.0 / 48.0, 59.0 / 48.0, 43.0 / 48.0, 49.0 / 48.0];

#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    dimension: usize,
    radius: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    step: f64,
    surface: f64,
}

impl RadialGrid {
    /// Default truncation radius.
    pub const DEFAULT_RADIUS: f64 = 20.0;
    /// Default node count.
    pub const DEFAULT_NODES: usize = 2001;

    pub fn new(dimension: usize, radius: f64, node_count: usize) -> Result<Self> {
        if dimension < 5 {
            return Err(Error::InvalidGrid(format!(
                "dimension must be at least 5, got {dimension}"
            )));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "radius must be positive, got {radius}"
            )));
        }
        if node_count < 9 || node_count % 2 == 0 {
            return Err(Error::InvalidGrid(format!(
                "node count must be odd and at least 9, got {node_count}"
            )));
        }

        let step = radius / (node_count - 1) as f64;
        let surface = unit_sphere_area(dimension);
        let nodes: Vec<f64> = (0..node_count)
            .map(|i| {
                if i == node_count - 1 {
                    radius
                } else {
                    i as f64 * step
                }
            })
            .collect();

        let mut coeffs = vec![1.0; node_count];
        for (k, c) in END_CORRECTION.iter().enumerate() {
            coeffs[node_count - 1 - k] = *c;
        }
        let weights = nodes
            .iter()
            .zip(&coeffs)
            .map(|(r, c)| surface * c * step * r.powi(dimension as i32 - 1))
            .collect();

        Ok(Self {
            dimension,
            radius,
            nodes,
            weights,
            step,
            surface,
        })
    }

    pub fn with_defaults(dimension: usize) -> Result<Self> {
        Self::new(dimension, Self::DEFAULT_RADIUS, Self::DEFAULT_NODES)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Area of the unit sphere in `R^N`.
    pub fn surface_factor(&self) -> f64 {
        self.surface
    }

    /// Critical exponent `2** = 2N/(N-4)`.
    pub fn critical_exponent(&self) -> f64 {
        critical_exponent(self.dimension)
    }

    /// True when both grids describe the same `(N, R, n)` triple.
    pub fn compatible(&self, other: &RadialGrid) -> bool {
        self.dimension == other.dimension
            && self.nodes.len() == other.nodes.len()
            && self.radius == other.radius
    }

    /// `Σ w_i f_i`, the discrete `∫_{R^N} f dx`.
    pub fn integrate(&self, samples: &[f64]) -> Result<f64> {
        if samples.len() != self.nodes.len() {
            return Err(Error::LengthMismatch {
                expected: self.nodes.len(),
                got: samples.len(),
            });
        }
        if let Some(index) = samples.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(self.integrate_unchecked(samples))
    }

    pub(crate) fn integrate_unchecked(&self, samples: &[f64]) -> f64 {
        self.weights.iter().zip(samples).map(|(w, f)| w * f).sum()
    }

    /// Integrates `f(r_i)` without materializing the samples.
    pub fn integrate_fn(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.weights
            .iter()
            .zip(&self.nodes)
            .map(|(w, r)| w * f(*r))
            .sum()
    }
}

pub fn critical_exponent(dimension: usize) -> f64 {
    let n = dimension as f64;
    2.0 * n / (n - 4.0)
}

/// `Γ(N/2)` for a positive integer `N`, from the half-integer recursion.
pub fn gamma_half(dimension: usize) -> f64 {
    let mut value = if dimension % 2 == 0 { 1.0 } else { PI.sqrt() };
    let mut x = if dimension % 2 == 0 { 1.0 } else { 0.5 };
    while x < dimension as f64 / 2.0 {
        value *= x;
        x += 1.0;
    }
    value
}

pub fn unit_sphere_area(dimension: usize) -> f64 {
    2.0 * PI.powf(dimension as f64 / 2.0) / gamma_half(dimension)
}
