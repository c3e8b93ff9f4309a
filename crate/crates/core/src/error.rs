use std::path::PathBuf;

/// Everything that can go wrong while building, evolving or analysing a model.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian: max |A - A^H| = {defect:e}")]
    NotHermitian { defect: f64 },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("non-finite value in column `{column}`, row {row}")]
    NonFiniteOutput { column: String, row: usize },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("index {0} listed twice")]
    DuplicateIndex(usize),

    #[error("covariance left [0, 1] at t = {time}: eigenvalue {eigenvalue:e}")]
    Unphysical { time: f64, eigenvalue: f64 },

    #[error("Lyapunov operator is singular: drift spectral abscissa {abscissa:e}")]
    SingularLyapunov { abscissa: f64 },

    #[error("eigensolver failed to converge")]
    NoConvergence,

    #[error("{what} limited to {max} modes, got {modes}")]
    TooManyModes { what: &'static str, modes: usize, max: usize },

    #[error("config {path}: {reason}")]
    Config { path: PathBuf, reason: String },

    #[error("I/O on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. }
            | Error::DimensionMismatch { .. }
            | Error::IndexOutOfRange { .. }
            | Error::DuplicateIndex(_)
            | Error::TooManyModes { .. }
            | Error::Config { .. }
            | Error::Io { .. } => 1,
            _ => 2,
        }
    }
}
