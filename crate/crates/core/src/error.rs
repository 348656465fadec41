use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("sample length {got} does not match grid node count {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("non-finite value at node {index}")]
    NonFinite { index: usize },

    #[error("fields live on incompatible grids")]
    GridMismatch,

    #[error("epsilon {0} outside (0, 1)")]
    InvalidEpsilon(f64),

    #[error("invalid nonlinearity: {0}")]
    InvalidModel(String),

    #[error("adaptive quadrature did not reach tolerance on [{lo}, {hi}]")]
    QuadratureFailure { lo: f64, hi: f64 },

    #[error("no amplitude in the scan gives a positive nonlinear integral")]
    NoPositiveG,

    #[error("stage with epsilon {epsilon:e} did not converge in {iterations} iterations")]
    MaxIterations { epsilon: f64, iterations: usize },

    #[error("iterate left the set where the nonlinear integral is positive")]
    LostMembership,

    #[error("field is not L2-normalized (norm squared {0})")]
    NotNormalized(f64),

    #[error("field is identically zero")]
    ZeroField,

    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("singular banded system at row {0}")]
    Singular(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
