use thiserror::Error;

/// Errors raised by the oscillator engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value out of representable range: {0}")]
    Range(String),

    #[error("invalid quantum numbers (n = {n}, l = {l}): need |l| <= n and n - l even")]
    QuantumNumbers { n: i64, l: i64 },

    #[error("occupation ({n_plus}, {n_minus}) exceeds basis cutoff {cutoff}")]
    OutOfRange {
        n_plus: usize,
        n_minus: usize,
        cutoff: usize,
    },

    #[error("operator basis mismatch: cutoff {left} vs {right}")]
    BasisMismatch { left: usize, right: usize },

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("operator is not self-adjoint (max deviation {0:e})")]
    NotSelfAdjoint(f64),

    #[error("basis cutoff {cutoff} too small for coherent amplitudes; need at least {required}")]
    Truncation { cutoff: usize, required: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("finite-difference solve did not converge: {0}")]
    Convergence(String),
}

pub type Result<T> = std::result::Result<T, Error>;
