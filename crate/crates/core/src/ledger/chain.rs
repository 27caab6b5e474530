//! The append-only block chain and its integrity checks.

use super::block::Block;
use super::state::{StateError, WorldState};
use crate::digest::Digest;
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("chain break at height {height}: expected height {expected_height}, got {got_height}")]
    HeightGap { height: u64, expected_height: u64, got_height: u64 },
    #[error("chain break at height {height}: expected prev_hash {expected}, got {got}")]
    PrevHashMismatch { height: u64, expected: Digest, got: Digest },
    #[error("ledger corrupt: first bad height {0}")]
    Corrupt(u64),
    #[error("duplicate transaction id {0}")]
    DuplicateTxId(String),
    #[error(transparent)]
    State(#[from] StateError),
}

/// Report produced by [`Ledger::verify_chain`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Height of the first corrupt block, or `None` for an intact chain.
    pub first_bad_height: Option<u64>,
    pub blocks_checked: u64,
}

impl VerificationReport {
    pub fn is_intact(&self) -> bool {
        self.first_bad_height.is_none()
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.first_bad_height {
            None => write!(f, "intact ({} blocks)", self.blocks_checked),
            Some(h) => write!(f, "corrupt: first bad height {h}"),
        }
    }
}

/// Append-only sequence of hash-chained blocks. Nothing in the public
/// surface mutates a block below the tip.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Ledger {
    blocks: Vec<Block>,
}

impl Ledger {
    pub fn new() -> Ledger {
        Ledger::default()
    }

    pub fn from_blocks(blocks: Vec<Block>) -> Ledger {
        Ledger { blocks }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn tip(&self) -> Option<&Block> {
        self.blocks.last()
    }

    pub fn tip_hash(&self) -> Digest {
        self.tip().map(|b| b.block_hash).unwrap_or(Digest::ZERO)
    }

    pub fn block_at(&self, height: u64) -> Option<&Block> {
        self.blocks.get(height as usize)
    }

    /// Extends the chain by one block after checking the height sequence
    /// and the hash link against the current tip.
    pub fn append_block(&mut self, block: Block) -> Result<(), ChainError> {
        let expected_height = self.blocks.len() as u64;
        if block.height != expected_height {
            return Err(ChainError::HeightGap {
                height: block.height,
                expected_height,
                got_height: block.height,
            });
        }
        let expected_prev = self.tip_hash();
        if block.prev_hash != expected_prev {
            return Err(ChainError::PrevHashMismatch {
                height: block.height,
                expected: expected_prev,
                got: block.prev_hash,
            });
        }
        self.blocks.push(block);
        Ok(())
    }

    /// Recomputes every block hash and link. Pure; corruption is a report
    /// outcome, not an error. An empty ledger is vacuously intact.
    pub fn verify_chain(&self) -> VerificationReport {
        let mut prev = Digest::ZERO;
        for (i, block) in self.blocks.iter().enumerate() {
            let bad = block.height != i as u64
                || block.prev_hash != prev
                || block.recompute_hash() != block.block_hash;
            if bad {
                return VerificationReport {
                    first_bad_height: Some(i as u64),
                    blocks_checked: i as u64,
                };
            }
            prev = block.block_hash;
        }
        VerificationReport { first_bad_height: None, blocks_checked: self.blocks.len() as u64 }
    }

    /// Deterministic fold of every block into a fresh world state.
    /// Verifies chain integrity and transaction-id uniqueness first.
    pub fn replay(&self) -> Result<WorldState, ChainError> {
        let report = self.verify_chain();
        if let Some(h) = report.first_bad_height {
            return Err(ChainError::Corrupt(h));
        }
        let mut seen = BTreeSet::new();
        for block in &self.blocks {
            for tx in &block.transactions {
                if !seen.insert(tx.tx_id.clone()) {
                    return Err(ChainError::DuplicateTxId(tx.tx_id.clone()));
                }
            }
        }
        let mut state = WorldState::new();
        for block in &self.blocks {
            state.apply_block(block)?;
        }
        Ok(state)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::AssetKey;
    use crate::ledger::tx::{Transaction, Version, WriteOp};
    use crate::value::Payload;

    fn tx(id: &str, key: &str) -> Transaction {
        let k = AssetKey::dir(key);
        Transaction {
            tx_id: id.into(),
            kind: "mkdir".into(),
            submitter: "a".into(),
            payload: Payload::new(),
            read_set: [(k.clone(), Version::ZERO)].into(),
            write_set: [(k, WriteOp::Put(vec![1]))].into(),
            endorsements: vec![],
        }
    }

    fn chain(n: u64) -> Ledger {
        let mut ledger = Ledger::new();
        for h in 0..n {
            let block = Block::new(h, ledger.tip_hash(), vec![tx(&format!("t{h}"), &format!("d{h}"))]);
            ledger.append_block(block).unwrap();
        }
        ledger
    }

    #[test]
    fn genesis_then_linked_blocks_accepted() {
        let ledger = chain(3);
        assert_eq!(ledger.len(), 3);
        assert!(ledger.verify_chain().is_intact());
    }

    #[test]
    fn height_gap_is_a_chain_break() {
        let mut ledger = chain(1);
        let block = Block::new(5, ledger.tip_hash(), vec![]);
        let err = ledger.append_block(block).unwrap_err();
        assert!(matches!(err, ChainError::HeightGap { expected_height: 1, .. }));
    }

    #[test]
    fn wrong_prev_hash_is_a_chain_break() {
        let mut ledger = chain(1);
        let block = Block::new(1, Digest::of(b"other"), vec![]);
        let err = ledger.append_block(block).unwrap_err();
        assert!(matches!(err, ChainError::PrevHashMismatch { height: 1, .. }));
    }

    #[test]
    fn verify_detects_payload_flip() {
        let mut ledger = chain(10);
        // Flip one byte inside block 4's first transaction.
        ledger.blocks[4].transactions[0].submitter = "b".into();
        let report = ledger.verify_chain();
        assert_eq!(report.first_bad_height, Some(4));
    }

    #[test]
    fn empty_ledger_is_vacuously_intact() {
        let report = Ledger::new().verify_chain();
        assert!(report.is_intact());
        assert_eq!(report.blocks_checked, 0);
    }

    #[test]
    fn replay_is_deterministic() {
        let ledger = chain(5);
        let a = ledger.replay().unwrap();
        let b = ledger.replay().unwrap();
        assert_eq!(a.state_digest(), b.state_digest());
        assert_eq!(a.height(), Some(4));
    }

    #[test]
    fn replay_propagates_corruption() {
        let mut ledger = chain(5);
        ledger.blocks[2].transactions[0].kind = "x".into();
        assert_eq!(ledger.replay().unwrap_err(), ChainError::Corrupt(2));
    }

    #[test]
    fn replay_rejects_duplicate_tx_ids() {
        let mut ledger = Ledger::new();
        let b0 = Block::new(0, Digest::ZERO, vec![tx("t0", "d0")]);
        ledger.append_block(b0).unwrap();
        let b1 = Block::new(1, ledger.tip_hash(), vec![tx("t0", "d1")]);
        ledger.append_block(b1).unwrap();
        assert_eq!(
            ledger.replay().unwrap_err(),
            ChainError::DuplicateTxId("t0".into())
        );
    }
}
