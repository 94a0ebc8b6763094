//! Command-line front end: file parsing, deterministic reports, command
//! dispatch. The binary in `main.rs` is a thin wrapper over [`commands::run`]
//! so everything here is exercisable in-process.

use thiserror::Error;

pub mod commands;
pub mod report;
pub mod schema;

/// Exit codes: 0 valid/isomorphic/success, 1 violations/not isomorphic,
/// 2 undecided, 3 usage or malformed input, 4 I/O.
#[derive(Error, Debug)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{path}: invalid JSON: {message}")]
    Json { path: String, message: String },
    #[error("{field}: {message}")]
    Schema { field: String, message: String },
    #[error("expected a {expected} file, found kind {found:?}")]
    WrongKind {
        expected: &'static str,
        found: String,
    },
    #[error("unknown stratum {0:?}")]
    UnknownStratum(String),
    #[error("{0}")]
    BadArgument(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 4,
            _ => 3,
        }
    }
}
