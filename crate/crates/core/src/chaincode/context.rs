//! Execution context handed to a processor.
//!
//! Every `get` is recorded into the read set with the version the snapshot
//! holds (`(0,0)` for absent keys), and every write goes through a recorded
//! read of the same key, so the resulting transaction satisfies the
//! write-implies-read shape by construction. Full scans are not recorded;
//! structural races they could miss are closed by name claims and by
//! directory touches (see `processors`).

use super::ChaincodeError;
use crate::assets::{Asset, AssetKey, AssetView};
use crate::codec::to_bytes;
use crate::ledger::tx::{ReadSet, Version, WriteOp, WriteSet};
use crate::ledger::WorldState;
use std::cell::RefCell;

/// Proposed effect of one processor run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Effect {
    pub read_set: ReadSet,
    pub write_set: WriteSet,
}

pub struct ProcessorContext<'a> {
    state: &'a WorldState,
    /// Authenticated participant id of the proposal submitter.
    pub submitter: String,
    /// Sequence hint: the height the next committed block will have, i.e.
    /// the snapshot's block count. Operation timeouts measure against it.
    pub logical_time: u64,
    /// Id the wrapping transaction will carry; recorded on operation
    /// assets as request/ack/response coordinates.
    pub tx_id: String,
    reads: RefCell<ReadSet>,
    writes: RefCell<WriteSet>,
}

impl<'a> ProcessorContext<'a> {
    pub fn new(state: &'a WorldState, submitter: &str, tx_id: &str) -> ProcessorContext<'a> {
        ProcessorContext {
            state,
            submitter: submitter.to_string(),
            logical_time: state.next_height(),
            tx_id: tx_id.to_string(),
            reads: RefCell::new(ReadSet::new()),
            writes: RefCell::new(WriteSet::new()),
        }
    }

    /// Height of the last committed block in the snapshot.
    pub fn committed_height(&self) -> u64 {
        self.state.height().unwrap_or(0)
    }

    /// Recorded read. Absent keys are recorded at version `(0,0)` so that
    /// creations conflict with concurrent creations of the same key.
    pub fn get(&self, key: &AssetKey) -> Option<Asset> {
        let version = self.state.version_of(key);
        self.reads.borrow_mut().entry(key.clone()).or_insert(version);
        self.state.get_asset(key)
    }

    pub fn put(&self, asset: &Asset) {
        let key = asset.key();
        let version = self.state.version_of(&key);
        self.reads.borrow_mut().entry(key.clone()).or_insert(version);
        self.writes.borrow_mut().insert(key, WriteOp::Put(to_bytes(asset)));
    }

    pub fn delete(&self, key: &AssetKey) {
        let version = self.state.version_of(key);
        self.reads.borrow_mut().entry(key.clone()).or_insert(version);
        self.writes.borrow_mut().insert(key.clone(), WriteOp::Delete);
    }

    /// Rewrites the current value of `key` unchanged. The version bump this
    /// produces at commit serializes structural changes under a directory.
    pub fn touch(&self, key: &AssetKey) -> Result<(), ChaincodeError> {
        let entry = self
            .state
            .get_raw(key)
            .ok_or_else(|| ChaincodeError::NotFound(key.to_string()))?;
        self.reads.borrow_mut().entry(key.clone()).or_insert(entry.version);
        self.writes.borrow_mut().insert(key.clone(), WriteOp::Put(entry.bytes.clone()));
        Ok(())
    }

    /// Unrecorded full scan of the snapshot; pending writes are not
    /// visible. Processors scan before they create.
    pub fn scan(&self) -> Vec<(AssetKey, Asset)> {
        self.state.scan_assets()
    }

    pub fn into_effect(self) -> Effect {
        Effect { read_set: self.reads.into_inner(), write_set: self.writes.into_inner() }
    }
}

impl AssetView for ProcessorContext<'_> {
    fn get_asset(&self, key: &AssetKey) -> Option<Asset> {
        self.get(key)
    }

    fn scan_assets(&self) -> Vec<(AssetKey, Asset)> {
        self.scan()
    }
}

/// Versions recorded for reads of missing keys.
pub const ABSENT: Version = Version::ZERO;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::{Asset, DirectoryAsset};
    use crate::digest::Digest;
    use crate::ledger::block::Block;
    use crate::ledger::tx::Transaction;
    use crate::value::Payload;

    fn dir_asset(id: &str) -> Asset {
        Asset::Dir(DirectoryAsset {
            dir_id: id.into(),
            name: id.into(),
            parent_id: None,
            owner: "alice".into(),
            read_acl: vec![],
            write_acl: vec![],
        })
    }

    fn state_with(assets: &[Asset]) -> WorldState {
        let txs: Vec<Transaction> = assets
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let key = a.key();
                Transaction {
                    tx_id: format!("t{i}"),
                    kind: "mkdir".into(),
                    submitter: "alice".into(),
                    payload: Payload::new(),
                    read_set: [(key.clone(), Version::ZERO)].into(),
                    write_set: [(key, WriteOp::Put(to_bytes(a)))].into(),
                    endorsements: vec![],
                }
            })
            .collect();
        let mut ws = WorldState::new();
        ws.apply_block(&Block::new(0, Digest::ZERO, txs)).unwrap();
        ws
    }

    #[test]
    fn reads_record_snapshot_versions() {
        let state = state_with(&[dir_asset("d1")]);
        let ctx = ProcessorContext::new(&state, "alice", "tx1");
        assert!(ctx.get(&AssetKey::dir("d1")).is_some());
        assert!(ctx.get(&AssetKey::dir("missing")).is_none());
        let effect = ctx.into_effect();
        assert_eq!(effect.read_set[&AssetKey::dir("d1")], Version::new(0, 0));
        assert_eq!(effect.read_set[&AssetKey::dir("missing")], ABSENT);
        assert!(effect.write_set.is_empty());
    }

    #[test]
    fn writes_imply_reads() {
        let state = state_with(&[dir_asset("d1")]);
        let ctx = ProcessorContext::new(&state, "alice", "tx1");
        ctx.put(&dir_asset("d2"));
        ctx.touch(&AssetKey::dir("d1")).unwrap();
        let effect = ctx.into_effect();
        for key in effect.write_set.keys() {
            assert!(effect.read_set.contains_key(key));
        }
        // Touch rewrites the existing bytes.
        assert!(matches!(effect.write_set[&AssetKey::dir("d1")], WriteOp::Put(_)));
    }

    #[test]
    fn touch_of_missing_key_fails() {
        let state = state_with(&[]);
        let ctx = ProcessorContext::new(&state, "alice", "tx1");
        assert!(ctx.touch(&AssetKey::dir("ghost")).is_err());
    }
}
