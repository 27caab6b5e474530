//! Hash-chained blocks.

use super::tx::Transaction;
use crate::codec::{self, Canon, CodecError, Reader};
use crate::digest::Digest;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub height: u64,
    pub prev_hash: Digest,
    pub transactions: Vec<Transaction>,
    /// Digest over `(height, prev_hash, transactions)` in canonical form.
    pub block_hash: Digest,
    /// Per-transaction MVCC outcome, set at commit time. Not part of the
    /// block hash and not part of dumps; replay recomputes it.
    #[serde(default)]
    pub validity_flags: Vec<bool>,
}

impl Block {
    pub fn new(height: u64, prev_hash: Digest, transactions: Vec<Transaction>) -> Block {
        let block_hash = compute_block_hash(height, &prev_hash, &transactions);
        Block { height, prev_hash, transactions, block_hash, validity_flags: Vec::new() }
    }

    /// Recomputed digest of the current contents; equal to `block_hash`
    /// for an untampered block.
    pub fn recompute_hash(&self) -> Digest {
        compute_block_hash(self.height, &self.prev_hash, &self.transactions)
    }
}

pub fn compute_block_hash(height: u64, prev_hash: &Digest, txs: &[Transaction]) -> Digest {
    let mut buf = Vec::new();
    codec::put_u64(&mut buf, height);
    buf.extend_from_slice(&prev_hash.0);
    codec::put_u64(&mut buf, txs.len() as u64);
    for tx in txs {
        tx.encode(&mut buf);
    }
    Digest::of(&buf)
}

// The dump encoding deliberately excludes validity flags so that every
// byte of a serialized block is covered by its hash.
impl Canon for Block {
    fn encode(&self, out: &mut Vec<u8>) {
        codec::put_u64(out, self.height);
        out.extend_from_slice(&self.prev_hash.0);
        out.extend_from_slice(&self.block_hash.0);
        codec::put_u64(out, self.transactions.len() as u64);
        for tx in &self.transactions {
            tx.encode(out);
        }
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let height = r.u64()?;
        let prev_hash = Digest(r.array32()?);
        let block_hash = Digest(r.array32()?);
        let n = r.seq_len()?;
        let mut transactions = Vec::with_capacity(n);
        for _ in 0..n {
            transactions.push(Transaction::decode(r)?);
        }
        Ok(Block { height, prev_hash, transactions, block_hash, validity_flags: Vec::new() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{from_bytes, to_bytes};
    use crate::ledger::tx::tests::sample_tx;

    #[test]
    fn hash_recomputes_exactly() {
        let b = Block::new(0, Digest::ZERO, vec![sample_tx("t1")]);
        assert_eq!(b.recompute_hash(), b.block_hash);
    }

    #[test]
    fn hash_depends_on_contents() {
        let a = Block::new(1, Digest::ZERO, vec![sample_tx("t1")]);
        let b = Block::new(1, Digest::ZERO, vec![sample_tx("t2")]);
        let c = Block::new(2, Digest::ZERO, vec![sample_tx("t1")]);
        assert_ne!(a.block_hash, b.block_hash);
        assert_ne!(a.block_hash, c.block_hash);
    }

    #[test]
    fn canon_round_trip_drops_flags() {
        let mut b = Block::new(0, Digest::ZERO, vec![sample_tx("t1")]);
        b.validity_flags = vec![true];
        let decoded = from_bytes::<Block>(&to_bytes(&b)).unwrap();
        assert_eq!(decoded.block_hash, b.block_hash);
        assert!(decoded.validity_flags.is_empty());
    }
}
