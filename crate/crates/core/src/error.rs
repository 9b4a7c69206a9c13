use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),
    #[error("grid too small: {0}")]
    GridTooSmall(String),
    #[error("solver did not converge within {steps} steps (residual rate {residual:.3e})")]
    NonConverged { steps: usize, residual: f64 },
    #[error("no bracket found: {0}")]
    BracketNotFound(String),
    #[error("singular locus: {0}")]
    Singular(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
