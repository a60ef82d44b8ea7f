use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },

    #[error("shape mismatch in {context}: expected {expected}, got {actual}")]
    Shape {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("ridgelet direction has (near) zero norm {0:e}")]
    DegenerateDirection(f64),

    #[error("degenerate scaling range: min {min} equals max {max}")]
    DegenerateScale { min: f64, max: f64 },

    #[error("operation not supported in this mode: {0}")]
    UnsupportedMode(&'static str),

    #[error("data file not found: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}: missing required column `{column}`", path.display())]
    MissingColumn { path: PathBuf, column: &'static str },

    #[error("{}: no valid rows", .0.display())]
    NoValidRows(PathBuf),

    #[error("{}: duplicate date {date}", path.display())]
    DuplicateDate { path: PathBuf, date: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Coarse error class used for process exit codes.
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) => ErrorClass::Config,
            Error::MissingFile(_)
            | Error::MissingColumn { .. }
            | Error::NoValidRows(_)
            | Error::DuplicateDate { .. }
            | Error::Csv(_)
            | Error::DegenerateScale { .. } => ErrorClass::Data,
            _ => ErrorClass::Runtime,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Config,
    Data,
    Runtime,
}

/// Process exit codes of the command-line tool. Usage errors exit with 2.
pub mod exit {
    pub const OK: i32 = 0;
    pub const RUNTIME: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const DATA: i32 = 4;
    /// Benchmark finished but at least one ticker failed.
    pub const PARTIAL: i32 = 5;
    /// At least one self-check identity failed.
    pub const CHECK_FAILED: i32 = 6;
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Config => exit::CONFIG,
            ErrorClass::Data => exit::DATA,
            ErrorClass::Runtime => exit::RUNTIME,
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::Shape {
            context,
            expected,
            actual,
        })
    }
}
