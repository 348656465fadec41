//! Radial fields and the finite-difference Laplacian / bilaplacian.
//!
//! `Δu = u'' + (N-1)/r u'` with fourth-order central differences. Radial
//! fields are extended evenly across `r = 0` (`u_{-k} = u_k`), where the
//! operator takes the limit form `Δu(0) = N u''(0)`, and by zero beyond
//! `r = R`. The bilaplacian applies the same operator twice, so `Δu` is also
//! zero past the truncation radius (Navier-type truncation).

use std::sync::Arc;

use crate::banded::Banded;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];

/// Sampled radial profile on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

/// `(∫|u|², ∫|∇u|², ∫|Δu|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SobolevNorms {
    pub l2_sq: f64,
    pub grad_sq: f64,
    pub bilap_sq: f64,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().iter().map(|r| f(*r)).collect();
        Self::new(grid, values)
    }

    pub fn zeros(grid: Arc<RadialGrid>) -> Self {
        let n = grid.len();
        Self {
            grid,
            values: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(
            self.grid.clone(),
            self.values.iter().map(|v| factor * v).collect(),
        )
    }

    /// `a·self + b·other` on a common grid.
    pub fn combine(&self, a: f64, other: &RadialField, b: f64) -> Result<Self> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * x + b * y)
            .collect();
        Self::new(self.grid.clone(), values)
    }

    pub fn check_compatible(&self, other: &RadialField) -> Result<()> {
        if self.grid.compatible(&other.grid) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn integral(&self) -> f64 {
        self.grid.integrate_unchecked(&self.values)
    }

    /// `∫ self·other`.
    pub fn dot(&self, other: &RadialField) -> Result<f64> {
        self.check_compatible(other)?;
        Ok(weighted_dot(&self.grid, &self.values, &other.values))
    }

    pub fn l2_sq(&self) -> f64 {
        weighted_dot(&self.grid, &self.values, &self.values)
    }

    pub fn laplacian(&self) -> RadialField {
        Self {
            grid: self.grid.clone(),
            values: laplacian_values(&self.grid, &self.values),
        }
    }

    pub fn bilaplacian(&self) -> RadialField {
        Self {
            grid: self.grid.clone(),
            values: bilaplacian_values(&self.grid, &self.values),
        }
    }

    pub fn gradient(&self) -> Vec<f64> {
        derivative_values(&self.grid, &self.values)
    }

    pub fn norms(&self) -> SobolevNorms {
        let du = self.gradient();
        let lap = laplacian_values(&self.grid, &self.values);
        SobolevNorms {
            l2_sq: self.l2_sq(),
            grad_sq: weighted_dot(&self.grid, &du, &du),
            bilap_sq: weighted_dot(&self.grid, &lap, &lap),
        }
    }

    /// Samples `x ↦ u(scale·x)` back onto the same grid.
    pub fn dilated(&self, scale: f64) -> RadialField {
        Self {
            grid: self.grid.clone(),
            values: dilate_values(&self.values, scale),
        }
    }
}

pub(crate) fn weighted_dot(grid: &RadialGrid, a: &[f64], b: &[f64]) -> f64 {
    grid.weights()
        .iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| w * x * y)
        .sum()
}

/// Value at index `j` of the extended profile (even at 0, zero past R).
#[inline]
fn extended(values: &[f64], j: isize) -> f64 {
    let k = j.unsigned_abs();
    if k < values.len() {
        values[k]
    } else {
        0.0
    }
}

pub(crate) fn laplacian_values(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let h = grid.step();
    let dim = grid.dimension() as f64;
    let inv_h2 = 1.0 / (12.0 * h * h);
    let inv_h = 1.0 / (12.0 * h);
    let nodes = grid.nodes();
    (0..n)
        .map(|i| {
            let mut d2 = 0.0;
            let mut d1 = 0.0;
            for k in 0..5 {
                let v = extended(u, i as isize + k as isize - 2);
                d2 += D2[k] * v;
                d1 += D1[k] * v;
            }
            if i == 0 {
                dim * d2 * inv_h2
            } else {
                d2 * inv_h2 + (dim - 1.0) / nodes[i] * d1 * inv_h
            }
        })
        .collect()
}

pub(crate) fn bilaplacian_values(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    laplacian_values(grid, &laplacian_values(grid, u))
}

pub(crate) fn derivative_values(grid: &RadialGrid, u: &[f64]) -> Vec<f64> {
    let inv_h = 1.0 / (12.0 * grid.step());
    (0..u.len())
        .map(|i| {
            (0..5)
                .map(|k| D1[k] * extended(u, i as isize + k as isize - 2))
                .sum::<f64>()
                * inv_h
        })
        .collect()
}

/// The Laplacian as a banded matrix (bandwidth 2 on both sides).
pub fn laplacian_matrix(grid: &RadialGrid) -> Banded {
    let n = grid.len();
    let h = grid.step();
    let dim = grid.dimension() as f64;
    let mut m = Banded::zeros(n, 2, 2);
    for i in 0..n {
        for k in 0..5 {
            let j = i as isize + k as isize - 2;
            let col = j.unsigned_abs();
            if col >= n {
                continue;
            }
            let coef = if i == 0 {
                dim * D2[k] / (12.0 * h * h)
            } else {
                D2[k] / (12.0 * h * h) + (dim - 1.0) / grid.nodes()[i] * D1[k] / (12.0 * h)
            };
            m.add(i, col, coef);
        }
    }
    m
}

pub fn bilaplacian_matrix(grid: &RadialGrid) -> Banded {
    let l = laplacian_matrix(grid);
    l.mul(&l)
}

/// Number of nodes in the local interpolation stencil used for dilations.
const STENCIL: usize = 8;

pub(crate) fn dilate_values(u: &[f64], scale: f64) -> Vec<f64> {
    let n = u.len();
    let last = (n - 1) as f64;
    let half = STENCIL as isize / 2;
    (0..n)
        .map(|i| {
            let x = scale * i as f64;
            if x == x.trunc() && x <= last {
                return u[x as usize];
            }
            if x >= last {
                return 0.0;
            }
            let base = x.floor() as isize - half + 1;
            let mut acc = 0.0;
            for a in 0..STENCIL as isize {
                let ja = base + a;
                let mut weight = 1.0;
                for b in 0..STENCIL as isize {
                    if a != b {
                        let jb = base + b;
                        weight *= (x - jb as f64) / (ja - jb) as f64;
                    }
                }
                acc += weight * extended(u, ja);
            }
            acc
        })
        .collect()
}
