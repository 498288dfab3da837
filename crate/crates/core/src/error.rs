//! Crate-wide error with exit-code mapping and JSON diagnostics.

use serde_json::{json, Value};
use thiserror::Error;

use crate::catalog::CatalogError;
use crate::darkstate::DarkStateError;
use crate::dressing::DressingError;
use crate::partition::PartitionError;
use crate::system_model::SystemError;
use crate::verifier::VerifierError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    System(#[from] SystemError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Dressing(#[from] DressingError),
    #[error(transparent)]
    DarkState(#[from] DarkStateError),
    #[error(transparent)]
    Verifier(#[from] VerifierError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("usage: {0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    #[error("expectation failed: {0}")]
    ExpectationFailed(String),
}

impl Error {
    pub fn io(path: impl Into<String>, err: std::io::Error) -> Self {
        Error::Io { path: path.into(), message: err.to_string() }
    }

    /// 2 invalid input, 3 numerical failure, 4 I/O, 1 a check that ran and failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::System(_) | Error::Partition(_) | Error::Catalog(_) | Error::Usage(_) => 2,
            Error::Dressing(DressingError::InvalidTolerance(..)) => 2,
            Error::Dressing(_) | Error::DarkState(_) | Error::Verifier(_) => 3,
            Error::Io { .. } => 4,
            Error::VerificationFailed(_) | Error::ExpectationFailed(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::System(e) => e.kind(),
            Error::Partition(e) => e.kind(),
            Error::Dressing(e) => e.kind(),
            Error::DarkState(e) => e.kind(),
            Error::Verifier(e) => e.kind(),
            Error::Catalog(e) => e.kind(),
            Error::Io { .. } => "IoError",
            Error::Usage(_) => "UsageError",
            Error::VerificationFailed(_) => "VerificationFailed",
            Error::ExpectationFailed(_) => "ExpectationFailed",
        }
    }

    /// Machine-readable one-line diagnostic.
    pub fn diagnostic(&self) -> Value {
        let mut v = json!({
            "error": self.kind(),
            "message": self.to_string(),
            "exit_code": self.exit_code(),
        });
        if let Error::System(SystemError::InconsistentDetunings(violations)) = self {
            v["violations"] = serde_json::to_value(violations).expect("violations serialise");
        }
        v
    }
}
