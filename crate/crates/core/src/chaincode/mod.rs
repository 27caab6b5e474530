//! Transaction processors: the smart-contract logic.
//!
//! A processor is a pure function of an immutable world-view snapshot and a
//! payload. It never mutates shared state; it produces a proposed read set
//! (every key it looked at, with the version it saw) and a write set.
//! Commit-time MVCC validation then decides whether the proposal still
//! applies. Denied or malformed proposals are rejected before ordering and
//! never reach the ledger.

pub mod commit;
pub mod context;
pub mod events;
pub mod kinds;
pub mod processors;
pub mod queries;
pub mod rules;

pub use commit::{commit_block, replay_committed, Replayed};
pub use context::{Effect, ProcessorContext};
pub use events::{Event, EventName};
pub use processors::execute;
pub use queries::{query_directory, query_history, query_operation, FileSummary};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChaincodeError {
    #[error("not found: {0}")]
    NotFound(String),
    #[error("access denied ({list})")]
    AccessDenied { list: String },
    #[error("conflict: {0}")]
    Conflict(String),
    #[error("invalid transition: {0}")]
    InvalidTransition(String),
    #[error("malformed result: missing {0}")]
    MalformedResult(String),
    #[error("rejected: {0}")]
    Rejected(String),
    #[error("bad request: {0}")]
    BadRequest(String),
}

impl ChaincodeError {
    pub fn denied(list: &str) -> ChaincodeError {
        ChaincodeError::AccessDenied { list: list.to_string() }
    }
}
