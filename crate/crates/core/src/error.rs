//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by construction, diagonalization, and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input data (a spectrum, a pair of spectra, ...) is malformed.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The requested closed-form solution does not exist at these parameters.
    #[error("out of regime: {0}")]
    OutOfRegime(String),

    /// An iterative routine failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
