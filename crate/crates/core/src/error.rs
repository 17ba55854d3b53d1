use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("index {index} outside the valid range {lo}..={hi}")]
    Index { index: usize, lo: usize, hi: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("zero or vanishing pivot in tridiagonal elimination at row {row}")]
    ZeroPivot { row: usize },

    #[error("series truncation reached {terms} terms with tail bound {tail:e} above {tol:e}")]
    Truncation { terms: usize, tail: f64, tol: f64 },

    #[error("problem `{0}` has no exact solution")]
    MissingExact(String),

    #[error("time step {step} failed: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
