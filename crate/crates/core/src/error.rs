use thiserror::Error;

/// Errors raised by the spectral formulas, quadratures and samplers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument outside the domain of a function (pole, non-positive scale, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// The deformed measure is not integrable for the requested parameters.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// A series or quadrature failed to reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// Iterative linear algebra or root finding failed.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// A requested moment does not exist for the given parameters.
    #[error("moment divergence: {0}")]
    MomentDivergence(String),
    /// The (beta, nu) combination has no closed form available.
    #[error("unsupported case: {0}")]
    Unsupported(String),
    /// Input data cannot be analysed (constant columns, identical values, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),
    /// A structural invariant of a computed object was violated.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
