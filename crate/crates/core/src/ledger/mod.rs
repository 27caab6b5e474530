//! The append-only hash-chained ledger and its derived world state.
//!
//! Per-peer concurrency is single-writer: commits are strictly serialized,
//! values are immutable once committed and safe to share for reads.

pub mod block;
pub mod chain;
pub mod dump;
pub mod genesis;
pub mod state;
pub mod tx;

pub use block::{compute_block_hash, Block};
pub use chain::{ChainError, Ledger, VerificationReport};
pub use genesis::make_genesis;
pub use state::{ApplyReport, StateError, StoredEntry, WorldState};
pub use tx::{Endorsement, ReadSet, Transaction, TxShapeError, Version, WriteOp, WriteSet};
