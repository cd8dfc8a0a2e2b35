use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {function}: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("overflow in {0}")]
    Overflow(&'static str),

    #[error("{operation} is not supported on {manifold}")]
    UnsupportedManifold { operation: &'static str, manifold: String },

    #[error("index out of range: {0}")]
    Index(String),

    #[error("kernel diverges: {0}")]
    Divergence(String),

    #[error("truncation insufficient: tail bound {eps:e} not reached within {max_levels} levels")]
    TruncationInsufficient { eps: f64, max_levels: usize },

    #[error("extrapolation did not converge: last difference {difference:e} exceeds {tolerance:e}")]
    NonConvergence { difference: f64, tolerance: f64 },

    #[error("singular system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("root finding failed: {0}")]
    RootFinding(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain {
        function,
        detail: detail.into(),
    }
}
