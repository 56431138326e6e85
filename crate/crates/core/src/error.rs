use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not symmetric (relative asymmetry {0:.3e})")]
    NotSymmetric(f64),

    #[error("matrix is singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    Singular { pivot: f64, threshold: f64 },

    #[error("odd dimension {0}; hafnian needs an even number of rows")]
    OddDimension(usize),

    #[error("unphysical state: {0}")]
    Unphysical(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cost guard exceeded: {0}")]
    CostGuard(String),

    #[error("target of {target} mean clicks is unreachable; supremum is {supremum:.6}")]
    Unreachable { target: f64, supremum: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Broad failure classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Validation,
    CostGuard,
    Numerical,
    Io,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::CostGuard(_) => ErrorClass::CostGuard,
            Error::NonFinite | Error::Singular { .. } | Error::Unphysical(_) => ErrorClass::Numerical,
            Error::Io(_) => ErrorClass::Io,
            _ => ErrorClass::Validation,
        }
    }

    /// Exit code: 0 success, 2 validation, 3 cost guard, 4 numerical/physicality.
    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Validation => 2,
            ErrorClass::CostGuard => 3,
            ErrorClass::Numerical => 4,
            ErrorClass::Io => 1,
        }
    }
}
