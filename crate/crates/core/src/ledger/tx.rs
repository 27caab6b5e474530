//! Transactions: the mechanism of interaction of participants with assets.

use crate::assets::AssetKey;
use crate::codec::{self, Canon, CodecError, Reader};
use crate::digest::Digest;
use crate::value::{decode_payload, encode_payload, Payload};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use thiserror::Error;

/// World-state version of one asset key: the coordinates of the valid
/// transaction that last wrote it. `(0, 0)` is reserved for "not yet
/// existing" and is what creations record in their read sets.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct Version {
    pub block_height: u64,
    pub tx_index: u32,
}

impl Version {
    pub const ZERO: Version = Version { block_height: 0, tx_index: 0 };

    pub fn new(block_height: u64, tx_index: u32) -> Version {
        Version { block_height, tx_index }
    }
}

impl Canon for Version {
    fn encode(&self, out: &mut Vec<u8>) {
        codec::put_u64(out, self.block_height);
        codec::put_u32(out, self.tx_index);
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        Ok(Version { block_height: r.u64()?, tx_index: r.u32()? })
    }
}

/// One entry of a write set: a new asset value or a tombstone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum WriteOp {
    #[serde(rename = "put")]
    Put(#[serde(with = "hex_vec")] Vec<u8>),
    #[serde(rename = "delete")]
    Delete,
}

mod hex_vec {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[u8], s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<u8>, D::Error> {
        let s = String::deserialize(d)?;
        hex::decode(&s).map_err(serde::de::Error::custom)
    }
}

impl Canon for WriteOp {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            WriteOp::Put(bytes) => {
                codec::put_u8(out, 0);
                codec::put_bytes(out, bytes);
            }
            WriteOp::Delete => codec::put_u8(out, 1),
        }
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        match r.u8()? {
            0 => Ok(WriteOp::Put(r.bytes()?)),
            1 => Ok(WriteOp::Delete),
            tag => Err(CodecError::UnknownTag { tag, context: "WriteOp" }),
        }
    }
}

/// Endorsing peer's signature over the proposal effect.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Endorsement {
    pub peer_id: String,
    #[serde(with = "hex_vec")]
    pub token: Vec<u8>,
}

pub type ReadSet = BTreeMap<AssetKey, Version>;
pub type WriteSet = BTreeMap<AssetKey, WriteOp>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transaction {
    pub tx_id: String,
    /// Processor name; see `chaincode::kinds`.
    pub kind: String,
    pub submitter: String,
    pub payload: Payload,
    pub read_set: ReadSet,
    pub write_set: WriteSet,
    pub endorsements: Vec<Endorsement>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TxShapeError {
    #[error("transaction {0} has an empty write set")]
    EmptyWriteSet(String),
    #[error("transaction {tx} writes {key} without reading it")]
    WriteWithoutRead { tx: String, key: String },
}

impl Transaction {
    /// Structural invariants every committed transaction satisfies:
    /// a non-empty write set, and every written key present in the read
    /// set (version 0 for creations).
    pub fn check_shape(&self) -> Result<(), TxShapeError> {
        if self.write_set.is_empty() {
            return Err(TxShapeError::EmptyWriteSet(self.tx_id.clone()));
        }
        for key in self.write_set.keys() {
            if !self.read_set.contains_key(key) {
                return Err(TxShapeError::WriteWithoutRead {
                    tx: self.tx_id.clone(),
                    key: key.to_string(),
                });
            }
        }
        Ok(())
    }

    /// Digest of the canonical encoding, used for endorsement signatures.
    pub fn effect_digest(&self) -> Digest {
        let mut buf = Vec::new();
        codec::put_str(&mut buf, &self.kind);
        encode_payload(&self.payload, &mut buf);
        codec::put_u64(&mut buf, self.write_set.len() as u64);
        for (k, w) in &self.write_set {
            k.encode(&mut buf);
            w.encode(&mut buf);
        }
        Digest::of(&buf)
    }
}

impl Canon for Transaction {
    fn encode(&self, out: &mut Vec<u8>) {
        codec::put_str(out, &self.tx_id);
        codec::put_str(out, &self.kind);
        codec::put_str(out, &self.submitter);
        encode_payload(&self.payload, out);
        codec::put_u64(out, self.read_set.len() as u64);
        for (k, v) in &self.read_set {
            k.encode(out);
            v.encode(out);
        }
        codec::put_u64(out, self.write_set.len() as u64);
        for (k, w) in &self.write_set {
            k.encode(out);
            w.encode(out);
        }
        codec::put_u64(out, self.endorsements.len() as u64);
        for e in &self.endorsements {
            codec::put_str(out, &e.peer_id);
            codec::put_bytes(out, &e.token);
        }
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let tx_id = r.string()?;
        let kind = r.string()?;
        let submitter = r.string()?;
        let payload = decode_payload(r)?;
        let n_reads = r.seq_len()?;
        let mut read_set = ReadSet::new();
        for _ in 0..n_reads {
            let k = AssetKey::decode(r)?;
            let v = Version::decode(r)?;
            read_set.insert(k, v);
        }
        let n_writes = r.seq_len()?;
        let mut write_set = WriteSet::new();
        for _ in 0..n_writes {
            let k = AssetKey::decode(r)?;
            let w = WriteOp::decode(r)?;
            write_set.insert(k, w);
        }
        let n_endorsements = r.seq_len()?;
        let mut endorsements = Vec::with_capacity(n_endorsements);
        for _ in 0..n_endorsements {
            endorsements.push(Endorsement { peer_id: r.string()?, token: r.bytes()? });
        }
        Ok(Transaction { tx_id, kind, submitter, payload, read_set, write_set, endorsements })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::codec::{from_bytes, to_bytes};
    use crate::value::Value;

    pub(crate) fn sample_tx(id: &str) -> Transaction {
        let key = AssetKey::file("f-1");
        let mut payload = Payload::new();
        payload.insert("name".into(), Value::Str("a.dat".into()));
        Transaction {
            tx_id: id.into(),
            kind: "requestOp".into(),
            submitter: "alice".into(),
            payload,
            read_set: [(key.clone(), Version::ZERO)].into(),
            write_set: [(key, WriteOp::Put(vec![1, 2, 3]))].into(),
            endorsements: vec![Endorsement { peer_id: "p0".into(), token: vec![9] }],
        }
    }

    #[test]
    fn versions_order_lexicographically() {
        assert!(Version::new(1, 5) < Version::new(2, 0));
        assert!(Version::new(2, 0) < Version::new(2, 1));
        assert_eq!(Version::ZERO, Version::new(0, 0));
    }

    #[test]
    fn canon_round_trip() {
        let tx = sample_tx("t1");
        assert_eq!(from_bytes::<Transaction>(&to_bytes(&tx)).unwrap(), tx);
    }

    #[test]
    fn shape_checks() {
        let mut tx = sample_tx("t1");
        tx.check_shape().unwrap();

        let mut no_read = tx.clone();
        no_read.read_set.clear();
        assert!(matches!(
            no_read.check_shape(),
            Err(TxShapeError::WriteWithoutRead { .. })
        ));

        tx.write_set.clear();
        assert!(matches!(tx.check_shape(), Err(TxShapeError::EmptyWriteSet(_))));
    }

    #[test]
    fn effect_digest_ignores_read_versions() {
        let a = sample_tx("t1");
        let mut b = sample_tx("t2");
        b.read_set.insert(AssetKey::file("f-1"), Version::new(3, 1));
        b.endorsements.clear();
        // Same kind, payload and writes → same effect digest.
        assert_eq!(a.effect_digest(), b.effect_digest());
    }
}
