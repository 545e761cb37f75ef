use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("root finder did not converge after {iterations} iterations ({context})")]
    NonConvergence { iterations: usize, context: String },

    #[error("curve length {length} is below the filling threshold 6L = {required}; dilate the curve first (e.g. by {required}/{length})")]
    CurveTooShort { length: f64, required: f64 },

    #[error("curve is not horizontal: {0}")]
    NotHorizontal(String),

    #[error("requested tolerance {tol} is unreachable at the built depth; achievable bound {bound}")]
    TolUnreachable { tol: f64, bound: f64 },

    #[error("construction check failed: {0}")]
    Construction(String),

    #[error("point outside the domain: {0}")]
    OutOfDomain(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
