//! Decentralized, provenance-metadata-driven data management engine.
//!
//! A permissioned, hash-chained ledger records and orders every data
//! operation; transaction processors enforce access-control and lifecycle
//! rules; simulated storage sites perform physical file actions only in
//! response to committed ledger transactions.
//!
//! Module map:
//!
//! - [`ledger`] — append-only block chain, MVCC world state, replay, dumps.
//! - [`assets`] — domain asset types, asset keys, ACL resolution.
//! - [`chaincode`] — transaction processors and read-only queries.
//! - [`sim`] — deterministic multi-peer pipeline with fault injection.
//! - [`storage`] — simulated storage sites and their DMS agents.
//! - [`config`] / [`scenario`] — JSON inputs driving a simulation run.

pub mod assets;
pub mod chaincode;
pub mod codec;
pub mod config;
pub mod digest;
pub mod ledger;
pub mod scenario;
pub mod sig;
pub mod sim;
pub mod storage;
pub mod value;

pub use digest::Digest;
pub use value::{Payload, Value};
