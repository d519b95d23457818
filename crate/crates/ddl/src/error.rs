//! Error type shared across the crate.

use thiserror::Error;

/// All failures surfaced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Incompatible matrix shapes for an operation.
    #[error("dimension mismatch in {op}: {detail}")]
    DimMismatch { op: &'static str, detail: String },

    /// A NaN or infinity crossed a public-operation boundary.
    #[error("non-finite value in {op}: entry ({row}, {col}) is {value}")]
    NonFinite {
        op: &'static str,
        row: usize,
        col: usize,
        value: f64,
    },

    /// An argument violates an operation's preconditions.
    #[error("invalid argument in {op}: {detail}")]
    InvalidArg { op: &'static str, detail: String },

    /// Requested layer widths cannot be realized for the given data.
    #[error("infeasible configuration: {0}")]
    InfeasibleConfig(String),

    /// Numerical breakdown (failed decomposition, non-finite intermediate).
    #[error("numeric failure in {op}: {detail}")]
    Numeric { op: &'static str, detail: String },

    /// A data file failed to parse.
    #[error("data error in {path}: {detail}")]
    Data { path: String, detail: String },

    /// Underlying I/O failure.
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the CLI: 1 usage, 2 data, 3 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArg { .. } | Error::InfeasibleConfig(_) => 1,
            Error::Data { .. } | Error::Io { .. } => 2,
            Error::DimMismatch { .. } | Error::NonFinite { .. } | Error::Numeric { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
