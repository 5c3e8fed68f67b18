use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("metric not positive definite at node {node} (r = {r})")]
    NotPositiveDefinite { node: usize, r: f64 },
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("matrix is not positive definite (pivot {0})")]
    Factorization(usize),
    #[error("operator asymmetry {0:e} exceeds tolerance")]
    Asymmetric(f64),
    #[error("background is not stationary: residual {0:e}")]
    NotStationary(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
