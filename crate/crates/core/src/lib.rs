//! Radial ground states of biharmonic equations `Δ²u = g(u)` on `ℝᴺ`
//! (`N ≥ 5`), found by minimizing the energy over the Pohožaev manifold, and
//! the log-Sobolev constants that follow from the logarithmic ground state.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with non-positive x
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod banded;
pub mod cli;
pub mod energy;
pub mod error;
pub mod grid;
pub mod logsobolev;
pub mod nonlinearity;
pub mod operators;
pub mod pohozaev;
pub mod quadrature;
pub mod solver;
pub mod testfields;

pub use error::{Error, Result};
pub use grid::RadialGrid;
pub use nonlinearity::{Model, Nonlinearity, ScalarModel};
pub use operators::RadialField;
pub use solver::{GroundStateResult, SolverConfig};
