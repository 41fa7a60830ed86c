//! Crate-wide error type.
//!
//! Variants map onto the CLI exit codes: configuration/usage errors exit
//! with 2, I/O with 3, numeric failures (eigensolver or series
//! non-convergence) with 4, and domain errors (invalid parameter regions,
//! Carnot poles, gapless ramps) with 5.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter outside the region where the requested quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or malformed configuration (bad grid, wrong table shape,
    /// conflicting options, contract violations).
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical procedure failed to converge to its tolerance.
    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code associated with this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io(_) => 3,
            Error::Numeric(_) => 4,
            Error::Domain(_) => 5,
        }
    }
}
