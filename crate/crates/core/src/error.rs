use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}` = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{what} did not converge after {iterations} steps (last change {last_change:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("tridiagonal matrix is not factorizable as A^+A: negative radicand at index {index}")]
    NotFactorizable { index: usize },

    #[error("normalization series diverges: partial sum {partial_sum:e} after {terms} terms")]
    Divergent { terms: usize, partial_sum: f64 },

    #[error("ladder coefficients requested up to index {requested} but only {available} are available")]
    LadderTooShort { requested: usize, available: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Error {
    Error::InvalidArgument {
        name,
        value,
        reason,
    }
}
