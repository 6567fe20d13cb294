use thiserror::Error;

/// Errors raised by the solvers, the verification harness and configuration handling.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhlabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Capability(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("trial basis is degenerate (smallest Gram singular value {min_sv:e})")]
    GramDegenerate { min_sv: f64 },

    #[error("i/o: {0}")]
    Io(String),
}

impl PhlabError {
    /// Process exit code for this error: 2 for usage and configuration
    /// problems, 3 for numerical and I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PhlabError::InvalidArgument(_) | PhlabError::Capability(_) | PhlabError::Usage(_) => 2,
            _ => 3,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            PhlabError::InvalidArgument(_) => "invalid-argument",
            PhlabError::Capability(_) => "capability",
            PhlabError::Usage(_) => "usage",
            PhlabError::NotPositiveDefinite { .. } => "not-positive-definite",
            PhlabError::DimensionMismatch { .. } => "dimension-mismatch",
            PhlabError::Numerical(_) => "numerical",
            PhlabError::GramDegenerate { .. } => "gram-degenerate",
            PhlabError::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for PhlabError {
    fn from(e: std::io::Error) -> Self {
        PhlabError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PhlabError>;
