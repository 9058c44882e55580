use thiserror::Error;

/// Errors raised by the computational kernel and the command-line layer.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of the gamma function at {0}")]
    Pole(String),
    #[error("indeterminate hypergeometric parameters: {0}")]
    IndeterminateParameters(String),
    #[error("series did not converge: {0}")]
    NonConvergence(String),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("extrapolation unstable: {0}")]
    ExtrapolationUnstable(String),
    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line tool and the C interface.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::Domain(_)
            | Error::Pole(_)
            | Error::IndeterminateParameters(_)
            | Error::NonConvergence(_)
            | Error::PrecisionExhausted(_)
            | Error::ExtrapolationUnstable(_)
            | Error::Eigensolver(_) => 3,
            Error::Verification(_) => 4,
            Error::Internal(_) | Error::Io(_) => 5,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Pole(_) => "pole",
            Error::IndeterminateParameters(_) => "indeterminate_parameters",
            Error::NonConvergence(_) => "nonconvergence",
            Error::PrecisionExhausted(_) => "precision_exhausted",
            Error::ExtrapolationUnstable(_) => "extrapolation_unstable",
            Error::Eigensolver(_) => "eigensolver",
            Error::Verification(_) => "verification",
            Error::Internal(_) => "internal",
            Error::Usage(_) => "usage",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
