use thiserror::Error;

/// Errors produced by construction, propagation, and analysis routines.
#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite parameter `{name}`")]
    NonFinite { name: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "Fock truncation tail exceeded at t = {time}: weight {weight:.3e} > tolerance {tol:.3e} \
         (increase n_max)"
    )]
    TruncationTail { time: f64, weight: f64, tol: f64 },

    #[error("Krylov step failed to converge at t = {time} (step size underflow at {dt:.3e})")]
    KrylovStall { time: f64, dt: f64 },

    #[error("integrator step size underflow at t = {time} (dt = {dt:.3e})")]
    StepUnderflow { time: f64, dt: f64 },

    #[error("density matrix lost positivity at t = {time}: min eigenvalue {min_eig:.3e}")]
    PositivityViolation { time: f64, min_eig: f64 },

    #[error("phase-space grid too small: integrated weight {integral:.6} differs from 1 by more than {tol:.1e}")]
    GridTooSmall { integral: f64, tol: f64 },

    #[error("effective Hamiltonian undefined at (x, p) = ({x}, {p}): negative radicand {radicand:.3e}")]
    NegativeRadicand { x: f64, p: f64, radicand: f64 },

    #[error("no minimum of the series found within the run window")]
    MissingMinimum,

    #[error("least-squares fit is rank deficient: {reason}")]
    RankDeficient { reason: String },

    #[error("linear algebra backend failure: {0}")]
    Linalg(String),

    #[error("config error: {0}")]
    Config(String),
}

impl From<ndarray_linalg::error::LinalgError> for Error {
    fn from(e: ndarray_linalg::error::LinalgError) -> Self {
        Error::Linalg(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
