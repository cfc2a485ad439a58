//! File plumbing around [`qtomo_core`]: CSV ingestion, run configuration,
//! and contour emission as CSV or SVG.
//!
//! The binary in this crate is a thin wrapper; everything it does goes
//! through [`runner::run`], which reads one input table and returns the
//! output documents as strings. Keeping the pipeline addressable from
//! library code is what the integration tests rely on.

pub mod contours;
pub mod ingest;
pub mod runner;

use std::fmt;

use ingest::DataError;

/// One failure class per exit code, each rendered as a single
/// machine-parseable line `ERR <code>: <detail>`.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or an inconsistent configuration. Exit code 2.
    Config(String),
    /// The input file is missing, malformed, or lacks a needed column.
    /// Exit code 3.
    Data(DataError),
    /// The data was read fine but the requested computation has no
    /// answer on it. Exit code 4.
    Numeric(qtomo_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(detail) => write!(f, "ERR config: {detail}"),
            CliError::Data(e) => write!(f, "ERR data: {e}"),
            CliError::Numeric(e) => write!(f, "ERR numeric: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Data(e)
    }
}

impl From<qtomo_core::Error> for CliError {
    fn from(e: qtomo_core::Error) -> Self {
        CliError::Numeric(e)
    }
}
