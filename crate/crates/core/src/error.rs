use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A model, sector or config field lies outside its allowed range.
    #[error("invalid {field}: {reason}")]
    Range { field: String, reason: String },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("qubit count {qubits} exceeds cap of {cap}")]
    QubitCap { qubits: usize, cap: usize },

    #[error("operator is not Hermitian: imaginary residue {residue:e}")]
    NonHermitian { residue: f64 },

    #[error("eigensolver did not converge (residual norm {residual:e})")]
    NoConvergence { residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn range(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Range {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
