// SPDX-License-Identifier: MIT OR Apache-2.0

use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Malformed data or parameters (lengths, ranges, non-finite values).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A residual sum of squares is numerically zero: the data lie in the
    /// polynomial span and the likelihood ratio is undefined.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    /// The design matrix lost rank in the orthogonal factorization,
    /// typically an (n, p) combination too extreme for f64 arithmetic.
    #[error("rank-deficient design: {0}")]
    RankDeficient(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::DegenerateFit(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
