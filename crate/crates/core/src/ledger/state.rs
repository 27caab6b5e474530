//! The world state: a versioned key→asset map derived deterministically by
//! replaying the ledger.
//!
//! Commit-time validation is MVCC at whole-asset granularity. A
//! transaction is valid iff every entry of its read set still carries the
//! recorded version when the transaction's turn comes; valid transactions
//! apply their write sets at version `(block height, tx index)`, invalid
//! ones are flagged and write nothing. Within one block this means the
//! first writer of a key wins and later transactions that read the
//! pre-block version of that key are invalidated — commit order, fixed by
//! the ordering service, decides the winner.

use super::block::Block;
use super::tx::{Transaction, Version};
use crate::assets::{Asset, AssetKey, AssetView};
use crate::codec::{self, from_bytes, Canon};
use crate::digest::Digest;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StateError {
    #[error("block height {got} does not follow state height {expected}")]
    HeightMismatch { expected: u64, got: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoredEntry {
    pub bytes: Vec<u8>,
    pub version: Version,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WorldState {
    entries: BTreeMap<AssetKey, StoredEntry>,
    /// Height the next applied block must have.
    next_height: u64,
}

/// Outcome of applying one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplyReport {
    /// One flag per transaction, in block order.
    pub validity: Vec<bool>,
}

impl WorldState {
    pub fn new() -> WorldState {
        WorldState::default()
    }

    /// Height of the last applied block; `None` before genesis.
    pub fn height(&self) -> Option<u64> {
        self.next_height.checked_sub(1)
    }

    pub fn next_height(&self) -> u64 {
        self.next_height
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get_raw(&self, key: &AssetKey) -> Option<&StoredEntry> {
        self.entries.get(key)
    }

    /// Version of `key`, `(0,0)` when absent.
    pub fn version_of(&self, key: &AssetKey) -> Version {
        self.entries.get(key).map(|e| e.version).unwrap_or(Version::ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AssetKey, &StoredEntry)> {
        self.entries.iter()
    }

    /// Would `tx` pass the MVCC check right now?
    pub fn mvcc_valid(&self, tx: &Transaction) -> bool {
        tx.read_set.iter().all(|(key, read_version)| self.version_of(key) == *read_version)
    }

    /// Applies one block. Transactions are processed in block order; each
    /// is MVCC-checked against the state as left by its predecessors.
    pub fn apply_block(&mut self, block: &Block) -> Result<ApplyReport, StateError> {
        self.apply_block_observed(block, |_, _, _, _| {})
    }

    /// Like [`apply_block`](Self::apply_block), invoking `observe` after
    /// each transaction with `(tx, index, valid, state-after-tx)`. Event
    /// derivation hooks in here so it sees per-transaction post states.
    pub fn apply_block_observed(
        &mut self,
        block: &Block,
        mut observe: impl FnMut(&Transaction, u32, bool, &WorldState),
    ) -> Result<ApplyReport, StateError> {
        if block.height != self.next_height {
            return Err(StateError::HeightMismatch {
                expected: self.next_height,
                got: block.height,
            });
        }
        let mut validity = Vec::with_capacity(block.transactions.len());
        for (index, tx) in block.transactions.iter().enumerate() {
            let valid = self.mvcc_valid(tx);
            if valid {
                let version = Version::new(block.height, index as u32);
                for (key, write) in &tx.write_set {
                    match write {
                        super::tx::WriteOp::Put(bytes) => {
                            self.entries.insert(
                                key.clone(),
                                StoredEntry { bytes: bytes.clone(), version },
                            );
                        }
                        super::tx::WriteOp::Delete => {
                            self.entries.remove(key);
                        }
                    }
                }
            }
            validity.push(valid);
            observe(tx, index as u32, valid, self);
        }
        self.next_height += 1;
        Ok(ApplyReport { validity })
    }

    /// Digest over the full contents; equal states give equal digests.
    pub fn state_digest(&self) -> Digest {
        let mut buf = Vec::new();
        codec::put_u64(&mut buf, self.next_height);
        codec::put_u64(&mut buf, self.entries.len() as u64);
        for (key, entry) in &self.entries {
            key.encode(&mut buf);
            codec::put_bytes(&mut buf, &entry.bytes);
            entry.version.encode(&mut buf);
        }
        Digest::of(&buf)
    }
}

impl AssetView for WorldState {
    fn get_asset(&self, key: &AssetKey) -> Option<Asset> {
        self.entries.get(key).and_then(|e| from_bytes::<Asset>(&e.bytes).ok())
    }

    fn scan_assets(&self) -> Vec<(AssetKey, Asset)> {
        self.entries
            .iter()
            .filter_map(|(k, e)| from_bytes::<Asset>(&e.bytes).ok().map(|a| (k.clone(), a)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::to_bytes;
    use crate::digest::Digest;
    use crate::ledger::tx::{WriteOp, WriteSet};
    use crate::value::Payload;

    fn put_tx(id: &str, key: AssetKey, read_version: Version, value: &[u8]) -> Transaction {
        let mut write_set = WriteSet::new();
        write_set.insert(key.clone(), WriteOp::Put(value.to_vec()));
        Transaction {
            tx_id: id.into(),
            kind: "mkdir".into(),
            submitter: "alice".into(),
            payload: Payload::new(),
            read_set: [(key, read_version)].into(),
            write_set,
            endorsements: vec![],
        }
    }

    fn genesis_like() -> Block {
        Block::new(0, Digest::ZERO, vec![put_tx("g0", AssetKey::dir("root"), Version::ZERO, b"r")])
    }

    #[test]
    fn fresh_create_gets_block_version() {
        let mut ws = WorldState::new();
        ws.apply_block(&genesis_like()).unwrap();
        let key = AssetKey::file("f-1");
        let block = Block::new(
            1,
            Digest::ZERO,
            vec![put_tx("t1", key.clone(), Version::ZERO, b"v")],
        );
        let report = ws.apply_block(&block).unwrap();
        assert_eq!(report.validity, vec![true]);
        assert_eq!(ws.version_of(&key), Version::new(1, 0));
    }

    #[test]
    fn same_block_conflict_first_wins() {
        let mut ws = WorldState::new();
        ws.apply_block(&genesis_like()).unwrap();
        let key = AssetKey::file("f-1");
        // Both transactions read the pre-block version of the key.
        let block = Block::new(
            1,
            Digest::ZERO,
            vec![
                put_tx("t1", key.clone(), Version::ZERO, b"first"),
                put_tx("t2", key.clone(), Version::ZERO, b"second"),
            ],
        );
        let report = ws.apply_block(&block).unwrap();
        assert_eq!(report.validity, vec![true, false]);
        assert_eq!(ws.get_raw(&key).unwrap().bytes, b"first");
        assert_eq!(ws.version_of(&key), Version::new(1, 0));
    }

    #[test]
    fn stale_read_across_blocks_is_invalidated() {
        let mut ws = WorldState::new();
        ws.apply_block(&genesis_like()).unwrap();
        let key = AssetKey::file("f-1");
        ws.apply_block(&Block::new(
            1,
            Digest::ZERO,
            vec![put_tx("t1", key.clone(), Version::ZERO, b"v1")],
        ))
        .unwrap();
        ws.apply_block(&Block::new(
            2,
            Digest::ZERO,
            vec![put_tx("t2", key.clone(), Version::new(1, 0), b"v2")],
        ))
        .unwrap();
        // A transaction endorsed on the height-1 snapshot reads (1,0),
        // which block 2 already superseded.
        let stale = put_tx("t3", key.clone(), Version::new(1, 0), b"stale");
        let report = ws
            .apply_block(&Block::new(3, Digest::ZERO, vec![stale]))
            .unwrap();
        assert_eq!(report.validity, vec![false]);
        assert_eq!(ws.get_raw(&key).unwrap().bytes, b"v2");
    }

    #[test]
    fn height_gap_rejected() {
        let mut ws = WorldState::new();
        let err = ws
            .apply_block(&Block::new(3, Digest::ZERO, vec![]))
            .unwrap_err();
        assert_eq!(err, StateError::HeightMismatch { expected: 0, got: 3 });
    }

    #[test]
    fn state_digest_tracks_content() {
        let mut a = WorldState::new();
        let mut b = WorldState::new();
        let g = genesis_like();
        a.apply_block(&g).unwrap();
        b.apply_block(&g).unwrap();
        assert_eq!(a.state_digest(), b.state_digest());
        b.apply_block(&Block::new(
            1,
            Digest::ZERO,
            vec![put_tx("t", AssetKey::file("f"), Version::ZERO, b"x")],
        ))
        .unwrap();
        assert_ne!(a.state_digest(), b.state_digest());
    }

    #[test]
    fn deletes_remove_keys() {
        let mut ws = WorldState::new();
        ws.apply_block(&genesis_like()).unwrap();
        let key = AssetKey::file("f-1");
        ws.apply_block(&Block::new(
            1,
            Digest::ZERO,
            vec![put_tx("t1", key.clone(), Version::ZERO, b"v")],
        ))
        .unwrap();
        let mut del = put_tx("t2", key.clone(), Version::new(1, 0), b"");
        del.write_set.insert(key.clone(), WriteOp::Delete);
        ws.apply_block(&Block::new(2, Digest::ZERO, vec![del])).unwrap();
        assert!(ws.get_raw(&key).is_none());
        assert_eq!(ws.version_of(&key), Version::ZERO);
        let _ = to_bytes(&Version::ZERO);
    }
}
