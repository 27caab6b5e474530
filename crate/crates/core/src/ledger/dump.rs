//! Ledger dumps.
//!
//! The binary dump is a magic header followed by length-prefixed canonical
//! block records; every byte of a record is covered by that block's hash
//! (or is the stored hash itself), so any single-byte mutation is caught by
//! `verify_chain`. The JSON export renders one block per line, including
//! the recomputed validity flags.

use super::block::Block;
use super::chain::{ChainError, Ledger};
use crate::codec::{self, to_bytes, Canon, Reader};
use thiserror::Error;

pub const DUMP_MAGIC: &[u8; 8] = b"PVLGDMP1";

#[derive(Debug, Error)]
pub enum DumpError {
    #[error("bad dump header")]
    BadMagic,
    #[error("truncated dump record at byte {0}")]
    Truncated(usize),
    #[error("block {height}: {source}")]
    BadBlock { height: u64, source: crate::codec::CodecError },
    #[error("tamper coordinates out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Chain(#[from] ChainError),
}

pub fn write_dump(ledger: &Ledger) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(DUMP_MAGIC);
    for block in ledger.blocks() {
        let bytes = to_bytes(block);
        codec::put_u64(&mut out, bytes.len() as u64);
        out.extend_from_slice(&bytes);
    }
    out
}

/// Splits a dump into per-block byte records without decoding them.
fn split_records(bytes: &[u8]) -> Result<Vec<&[u8]>, DumpError> {
    if bytes.len() < DUMP_MAGIC.len() || &bytes[..DUMP_MAGIC.len()] != DUMP_MAGIC {
        return Err(DumpError::BadMagic);
    }
    let mut records = Vec::new();
    let mut pos = DUMP_MAGIC.len();
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(DumpError::Truncated(pos));
        }
        let len = u64::from_be_bytes(bytes[pos..pos + 8].try_into().unwrap()) as usize;
        pos += 8;
        if pos + len > bytes.len() {
            return Err(DumpError::Truncated(pos));
        }
        records.push(&bytes[pos..pos + len]);
        pos += len;
    }
    Ok(records)
}

/// Decodes a dump into a ledger. Undecodable records surface as
/// `BadBlock { height }`, which `read_dump_lenient` converts into a
/// verification outcome instead.
pub fn read_dump(bytes: &[u8]) -> Result<Ledger, DumpError> {
    let records = split_records(bytes)?;
    let mut blocks = Vec::with_capacity(records.len());
    for (i, record) in records.iter().enumerate() {
        let mut r = Reader::new(record);
        let block = Block::decode(&mut r)
            .and_then(|b| r.finish().map(|_| b))
            .map_err(|source| DumpError::BadBlock { height: i as u64, source })?;
        blocks.push(block);
    }
    Ok(Ledger::from_blocks(blocks))
}

/// Verification over raw dump bytes: a record that fails to decode is
/// reported as the first bad height, matching how hash mismatches are
/// reported for decodable corruption.
pub fn verify_dump(bytes: &[u8]) -> Result<super::chain::VerificationReport, DumpError> {
    let records = split_records(bytes)?;
    for (i, record) in records.iter().enumerate() {
        let mut r = Reader::new(record);
        let decodes = Block::decode(&mut r).is_ok() && r.finish().is_ok();
        if !decodes {
            return Ok(super::chain::VerificationReport {
                first_bad_height: Some(i as u64),
                blocks_checked: i as u64,
            });
        }
    }
    // All records decode; defer to the chain-level checks.
    Ok(read_dump(bytes)?.verify_chain())
}

/// Flips one byte of the serialized block at `height`, `offset` bytes into
/// that block's record. Demonstration tooling: works on dump bytes only,
/// never on a live ledger.
pub fn tamper(bytes: &[u8], height: u64, offset: u64) -> Result<Vec<u8>, DumpError> {
    let records = split_records(bytes)?;
    let record = records
        .get(height as usize)
        .ok_or_else(|| DumpError::OutOfRange(format!("height {height} beyond tip")))?;
    if offset >= record.len() as u64 {
        return Err(DumpError::OutOfRange(format!(
            "offset {offset} beyond block length {}",
            record.len()
        )));
    }
    // Locate the absolute position of the target byte.
    let mut pos = DUMP_MAGIC.len();
    for r in records.iter().take(height as usize) {
        pos += 8 + r.len();
    }
    let absolute = pos + 8 + offset as usize;
    let mut out = bytes.to_vec();
    out[absolute] ^= 0x01;
    Ok(out)
}

/// Length of the serialized record for the block at `height`.
pub fn record_len(bytes: &[u8], height: u64) -> Result<usize, DumpError> {
    let records = split_records(bytes)?;
    records
        .get(height as usize)
        .map(|r| r.len())
        .ok_or_else(|| DumpError::OutOfRange(format!("height {height} beyond tip")))
}

/// One block per line, validity flags included (recomputed by replay when
/// the ledger was loaded from a dump).
pub fn export_jsonl(ledger: &Ledger) -> String {
    let mut out = String::new();
    for block in ledger.blocks() {
        out.push_str(&serde_json::to_string(block).expect("block serializes"));
        out.push('\n');
    }
    out
}

/// Loads a dump and recomputes per-block validity flags by replay.
pub fn load_committed(bytes: &[u8]) -> Result<Ledger, DumpError> {
    let ledger = read_dump(bytes)?;
    let report = ledger.verify_chain();
    if let Some(h) = report.first_bad_height {
        return Err(DumpError::Chain(ChainError::Corrupt(h)));
    }
    let mut state = super::state::WorldState::new();
    let mut blocks = ledger.blocks().to_vec();
    for block in &mut blocks {
        let report = state.apply_block(block).map_err(ChainError::from)?;
        block.validity_flags = report.validity;
    }
    Ok(Ledger::from_blocks(blocks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assets::AssetKey;
    use crate::digest::Digest;
    use crate::ledger::tx::{Transaction, Version, WriteOp};
    use crate::value::Payload;

    fn small_ledger(n: u64) -> Ledger {
        let mut ledger = Ledger::new();
        for h in 0..n {
            let key = AssetKey::dir(format!("d{h}"));
            let tx = Transaction {
                tx_id: format!("t{h}"),
                kind: "mkdir".into(),
                submitter: "a".into(),
                payload: Payload::new(),
                read_set: [(key.clone(), Version::ZERO)].into(),
                write_set: [(key, WriteOp::Put(vec![h as u8]))].into(),
                endorsements: vec![],
            };
            let block = Block::new(h, ledger.tip_hash(), vec![tx]);
            ledger.append_block(block).unwrap();
        }
        ledger
    }

    #[test]
    fn dump_round_trip() {
        let ledger = small_ledger(5);
        let bytes = write_dump(&ledger);
        let loaded = read_dump(&bytes).unwrap();
        assert_eq!(loaded.blocks(), ledger.blocks());
        assert!(verify_dump(&bytes).unwrap().is_intact());
    }

    #[test]
    fn tamper_is_detected_at_the_right_height() {
        let ledger = small_ledger(10);
        let bytes = write_dump(&ledger);
        let tampered = tamper(&bytes, 4, 3).unwrap();
        let report = verify_dump(&tampered).unwrap();
        assert!(report.first_bad_height.unwrap() <= 4);
    }

    #[test]
    fn tamper_genesis() {
        let ledger = small_ledger(3);
        let bytes = write_dump(&ledger);
        let record = record_len(&bytes, 0).unwrap();
        let tampered = tamper(&bytes, 0, (record - 1) as u64).unwrap();
        let report = verify_dump(&tampered).unwrap();
        assert_eq!(report.first_bad_height, Some(0));
    }

    #[test]
    fn tamper_out_of_range() {
        let ledger = small_ledger(3);
        let bytes = write_dump(&ledger);
        assert!(matches!(tamper(&bytes, 99, 0), Err(DumpError::OutOfRange(_))));
        let len = record_len(&bytes, 1).unwrap() as u64;
        assert!(matches!(tamper(&bytes, 1, len), Err(DumpError::OutOfRange(_))));
    }

    #[test]
    fn jsonl_has_one_line_per_block() {
        let ledger = small_ledger(4);
        let jsonl = export_jsonl(&ledger);
        assert_eq!(jsonl.lines().count(), 4);
        for line in jsonl.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(v.get("block_hash").is_some());
        }
    }

    #[test]
    fn load_committed_recomputes_flags() {
        let ledger = small_ledger(3);
        let bytes = write_dump(&ledger);
        let loaded = load_committed(&bytes).unwrap();
        for block in loaded.blocks() {
            assert_eq!(block.validity_flags, vec![true]);
        }
        let _ = Digest::ZERO;
    }
}
