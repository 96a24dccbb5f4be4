use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid discriminant {0}: must be <= -3 and congruent to 0 or 1 mod 4")]
    InvalidDiscriminant(i64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("N = {n} is not eligible: chi_{p}(N*A) = -1 for A = {a}")]
    Ineligible { p: u64, n: u64, a: u64 },

    #[error("degenerate quadratic: 3*delta - C^2 = {0} is not positive")]
    DegenerateQuadratic(f64),

    #[error("fundamental unit of Q(sqrt({0})) does not fit in double precision")]
    UnitTooLarge(u64),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
