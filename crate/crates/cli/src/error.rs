use manifold_rkhs::Error;
use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numeric failure: {0}")]
    Numeric(Error),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }

    /// Short machine-readable category for the diagnostic record.
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Output(_) => "output",
            CliError::Numeric(e) => match e {
                Error::Domain { .. } => "domain",
                Error::Overflow(_) => "overflow",
                Error::UnsupportedManifold { .. } => "unsupported-manifold",
                Error::Index(_) => "index",
                Error::Divergence(_) => "divergence",
                Error::TruncationInsufficient { .. } => "truncation-insufficient",
                Error::NonConvergence { .. } => "non-convergence",
                Error::Singular { .. } => "singular",
                Error::RootFinding(_) => "root-finding",
                Error::InvalidInput(_) => "invalid-input",
                Error::Io(_) => "io",
            },
        }
    }
}

/// Library errors that stem from user input are configuration errors; the
/// rest are numeric failures.
impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(msg) | Error::Io(msg) => CliError::Config(msg),
            Error::UnsupportedManifold { .. } => CliError::Config(e.to_string()),
            other => CliError::Numeric(other),
        }
    }
}
