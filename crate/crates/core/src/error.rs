use thiserror::Error;

use crate::ns::SolverState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two")]
    NonPowerOfTwo(usize),

    #[error("unsupported spatial dimension {0} (expected 2 or 3)")]
    UnsupportedDimension(usize),

    #[error("box length must be positive and finite, got {0}")]
    InvalidLength(f64),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected {expected} components, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("Lebesgue exponent must lie in [1, inf], got {0}")]
    InvalidExponent(f64),

    #[error("field has a nonzero zero mode (|c_0| = {0:e})")]
    NonzeroMean(f64),

    #[error("multiplier is not finite at wavevector {0:?}")]
    NonFiniteMultiplier(Vec<f64>),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectral support violation: {0}")]
    SupportViolation(String),

    #[error("empty admissible interval: {0}")]
    EmptyInterval(String),

    #[error("need at least {needed} samples, got {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("non-positive norm {value} at sample {index}")]
    NonPositiveNorm { index: usize, value: f64 },

    #[error("solver produced non-finite values at t = {t}; blow-up suspected")]
    BlowupSuspected { t: f64, last_finite: Box<SolverState> },

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
