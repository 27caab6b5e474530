//! World-state keys.
//!
//! Every asset lives under `"<type-tag>/<id>"` where the tag is one of
//! `file`, `dir`, `grp`, `par`, `op`, `sto` and ids are lowercase UUID
//! strings. The additional internal tag `nix` holds name-reservation
//! entries (see [`claim_id`]); those entries never represent user assets
//! but participate in MVCC so that concurrent creates of the same name
//! conflict at commit time.

use crate::codec::{self, Canon, CodecError, Reader};
use crate::digest::Digest;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AssetTag {
    File,
    Dir,
    Grp,
    Par,
    Op,
    Sto,
    /// Internal name-reservation entries, not a user-visible asset type.
    Nix,
}

impl AssetTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            AssetTag::File => "file",
            AssetTag::Dir => "dir",
            AssetTag::Grp => "grp",
            AssetTag::Par => "par",
            AssetTag::Op => "op",
            AssetTag::Sto => "sto",
            AssetTag::Nix => "nix",
        }
    }

    pub fn parse(s: &str) -> Result<AssetTag, KeyError> {
        match s {
            "file" => Ok(AssetTag::File),
            "dir" => Ok(AssetTag::Dir),
            "grp" => Ok(AssetTag::Grp),
            "par" => Ok(AssetTag::Par),
            "op" => Ok(AssetTag::Op),
            "sto" => Ok(AssetTag::Sto),
            "nix" => Ok(AssetTag::Nix),
            other => Err(KeyError::UnknownTag(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KeyError {
    #[error("unknown asset type tag {0:?}")]
    UnknownTag(String),
    #[error("asset key {0:?} is missing the '/' separator")]
    MissingSeparator(String),
    #[error("asset key {0:?} has an empty id")]
    EmptyId(String),
}

/// `"<type-tag>/<id>"` key of one world-state entry.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AssetKey {
    pub tag: AssetTag,
    pub id: String,
}

impl AssetKey {
    pub fn new(tag: AssetTag, id: impl Into<String>) -> AssetKey {
        AssetKey { tag, id: id.into() }
    }

    pub fn file(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::File, id)
    }

    pub fn dir(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Dir, id)
    }

    pub fn group(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Grp, id)
    }

    pub fn participant(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Par, id)
    }

    pub fn operation(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Op, id)
    }

    pub fn storage(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Sto, id)
    }

    pub fn claim(id: impl Into<String>) -> AssetKey {
        AssetKey::new(AssetTag::Nix, id)
    }

    pub fn parse(s: &str) -> Result<AssetKey, KeyError> {
        let (tag, id) = s
            .split_once('/')
            .ok_or_else(|| KeyError::MissingSeparator(s.to_string()))?;
        if id.is_empty() {
            return Err(KeyError::EmptyId(s.to_string()));
        }
        Ok(AssetKey::new(AssetTag::parse(tag)?, id))
    }
}

impl fmt::Display for AssetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.tag.as_str(), self.id)
    }
}

impl fmt::Debug for AssetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for AssetKey {
    type Err = KeyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AssetKey::parse(s)
    }
}

impl Canon for AssetKey {
    fn encode(&self, out: &mut Vec<u8>) {
        codec::put_str(out, &self.to_string());
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        let s = r.string()?;
        AssetKey::parse(&s).map_err(|e| CodecError::Malformed(e.to_string()))
    }
}

impl Serialize for AssetKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AssetKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AssetKey::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Scope of a name reservation: a file name or a child-directory name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NameScope {
    File,
    Dir,
}

impl NameScope {
    fn prefix(&self) -> &'static str {
        match self {
            NameScope::File => "f",
            NameScope::Dir => "d",
        }
    }
}

/// Id of the reservation entry for `name` inside directory `parent_id`.
///
/// The name itself is hashed so arbitrary path components stay out of the
/// key space; the parent id keeps reservations per-directory.
pub fn claim_id(parent_id: &str, scope: NameScope, name: &str) -> String {
    let h = Digest::of_parts(&[b"name:", name.as_bytes()]);
    format!("{}.{}.{}", scope.prefix(), parent_id, &h.to_hex()[..32])
}

/// The claim key guarding `name` within `parent_id`.
pub fn claim_key(parent_id: &str, scope: NameScope, name: &str) -> AssetKey {
    AssetKey::claim(claim_id(parent_id, scope, name))
}

/// True if `id` is a claim for some name directly inside `parent_id`.
pub fn claim_belongs_to(id: &str, parent_id: &str) -> bool {
    id.split('.').nth(1) == Some(parent_id)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_and_parse() {
        let k = AssetKey::file("0a1b2c3d-0000-4111-8222-333344445555");
        let s = k.to_string();
        assert!(s.starts_with("file/"));
        assert_eq!(AssetKey::parse(&s).unwrap(), k);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(AssetKey::parse("nofile"), Err(KeyError::MissingSeparator(_))));
        assert!(matches!(AssetKey::parse("blob/x"), Err(KeyError::UnknownTag(_))));
        assert!(matches!(AssetKey::parse("file/"), Err(KeyError::EmptyId(_))));
    }

    #[test]
    fn claims_separate_scopes_and_parents() {
        let a = claim_key("p1", NameScope::File, "a.dat");
        let b = claim_key("p1", NameScope::Dir, "a.dat");
        let c = claim_key("p2", NameScope::File, "a.dat");
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert!(claim_belongs_to(&a.id, "p1"));
        assert!(!claim_belongs_to(&a.id, "p2"));
    }
}
