use thiserror::Error;

/// Errors raised by the solver and analysis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("spectral coefficients are not Hermitian-symmetric (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("not in homogeneous negative space: mean coefficient {mean:e} exceeds 1e-10 of the L2 norm")]
    NotInNegativeSpace { mean: f64 },

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("state blow-up at t = {time}")]
    BlowUp { time: f64 },

    #[error("stiffness limit; reduce N or T (step size underflow at t = {time})")]
    StepSizeUnderflow { time: f64 },

    #[error("time mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("cannot take log: value {value:e} at t = {time}")]
    NonPositive { time: f64, value: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
