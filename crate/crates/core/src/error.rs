use thiserror::Error;

use crate::linalg::{LinalgError, C64};
use crate::protocol::{ClassicalMessage, CoefficientError, PreparationError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid coefficient vector: {0}")]
    Coefficient(#[from] CoefficientError),
    #[error("invalid preparation tensor: {0}")]
    Preparation(#[from] PreparationError),
    #[error("preparation annihilated the ensemble (trace {trace})")]
    Annihilated { trace: C64 },
    #[error("message {message:?} does not match preparation {preparation}")]
    MessageMismatch {
        message: ClassicalMessage,
        preparation: String,
    },
    #[error("transformation matrix is singular; Bob cannot invert it")]
    SingularTransformation,
    #[error("fidelity trace has imaginary part {imaginary:e}")]
    FidelityNotReal { imaginary: f64 },
    #[error("Bob's operator has trace {trace}, expected 1")]
    UnnormalizedState { trace: C64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
