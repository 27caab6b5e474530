//! Domain asset types and the machinery to store them in the world state.
//!
//! Files, directories, operations, groups, participants and storage sites
//! are all ledger-tracked assets; a file's attributes are its provenance
//! metadata. Every asset has a canonical binary form (hashed, versioned,
//! dumped) and a JSON form (human-readable exports).

pub mod acl;
pub mod key;
pub mod view;

pub use acl::{check_access, expand_group, AccessOutcome};
pub use key::{claim_belongs_to, claim_id, claim_key, AssetKey, AssetTag, NameScope};
pub use view::AssetView;

use crate::codec::{self, Canon, CodecError, Reader};
use crate::digest::Digest;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssetError {
    #[error("group {0} not found")]
    UnknownGroup(String),
    #[error("asset {key} holds a {actual}, expected {expected}")]
    WrongType {
        key: String,
        expected: &'static str,
        actual: &'static str,
    },
}

/// Roles a participant may hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Role {
    #[serde(rename = "user")]
    User,
    #[serde(rename = "dms-service")]
    DmsService,
    #[serde(rename = "orderer-admin")]
    OrdererAdmin,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::User => "user",
            Role::DmsService => "dms-service",
            Role::OrdererAdmin => "orderer-admin",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "user" => Some(Role::User),
            "dms-service" => Some(Role::DmsService),
            "orderer-admin" => Some(Role::OrdererAdmin),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Participant {
    pub participant_id: String,
    pub display_name: String,
    pub org_id: String,
    /// Opaque identity token consumed by the pluggable signature check.
    pub verify_token: Vec<u8>,
    pub roles: BTreeSet<Role>,
}

impl Participant {
    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }
}

/// One entry of an access control list: a participant or a group.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct AclRef {
    pub kind: AclRefKind,
    pub id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum AclRefKind {
    Participant,
    Group,
}

impl AclRef {
    pub fn participant(id: impl Into<String>) -> AclRef {
        AclRef { kind: AclRefKind::Participant, id: id.into() }
    }

    pub fn group(id: impl Into<String>) -> AclRef {
        AclRef { kind: AclRefKind::Group, id: id.into() }
    }

    /// `"par:<id>"` / `"grp:<id>"`, the wire form used in payloads.
    pub fn parse(s: &str) -> Option<AclRef> {
        let (kind, id) = s.split_once(':')?;
        if id.is_empty() {
            return None;
        }
        match kind {
            "par" => Some(AclRef::participant(id)),
            "grp" => Some(AclRef::group(id)),
            _ => None,
        }
    }
}

impl fmt::Display for AclRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AclRefKind::Participant => write!(f, "par:{}", self.id),
            AclRefKind::Group => write!(f, "grp:{}", self.id),
        }
    }
}

impl Serialize for AclRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for AclRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        AclRef::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("bad acl ref {s:?}")))
    }
}

/// A data file in the distributed storage. Its attributes are the
/// provenance metadata tracked by the ledger.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileAsset {
    pub file_id: String,
    /// Path component; `(name, directory_id)` is unique among committed files.
    pub name: String,
    pub directory_id: String,
    pub owner: String,
    pub home_storage: String,
    pub replicas: BTreeSet<String>,
    pub size_bytes: u64,
    pub content_digest: Digest,
    /// Set between the upload request and the storage-side confirmation;
    /// temporary files are invisible to listings and unreadable.
    pub temporary: bool,
    pub read_acl: Vec<AclRef>,
    pub write_acl: Vec<AclRef>,
    pub exec_acl: Vec<AclRef>,
    pub created_by_op: String,
    pub last_op: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectoryAsset {
    pub dir_id: String,
    pub name: String,
    /// Absent exactly for the root directory `/`.
    pub parent_id: Option<String>,
    pub owner: String,
    pub read_acl: Vec<AclRef>,
    pub write_acl: Vec<AclRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupAsset {
    pub group_id: String,
    pub name: String,
    pub owner: String,
    pub members: Vec<AclRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpType {
    #[serde(rename = "upload")]
    Upload,
    #[serde(rename = "download")]
    Download,
    #[serde(rename = "copy_local")]
    CopyLocal,
    #[serde(rename = "delete")]
    Delete,
    #[serde(rename = "copy_remote")]
    CopyRemote,
    #[serde(rename = "transfer_remote")]
    TransferRemote,
    #[serde(rename = "process")]
    Process,
}

impl OpType {
    pub const ALL: [OpType; 7] = [
        OpType::Upload,
        OpType::Download,
        OpType::CopyLocal,
        OpType::Delete,
        OpType::CopyRemote,
        OpType::TransferRemote,
        OpType::Process,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            OpType::Upload => "upload",
            OpType::Download => "download",
            OpType::CopyLocal => "copy_local",
            OpType::Delete => "delete",
            OpType::CopyRemote => "copy_remote",
            OpType::TransferRemote => "transfer_remote",
            OpType::Process => "process",
        }
    }

    pub fn parse(s: &str) -> Option<OpType> {
        OpType::ALL.iter().copied().find(|t| t.as_str() == s)
    }

    /// Does a successful operation of this type end with a committed file?
    pub fn creates_file(&self) -> bool {
        matches!(
            self,
            OpType::Upload | OpType::CopyLocal | OpType::CopyRemote | OpType::Process
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OpState {
    #[serde(rename = "started")]
    Started,
    #[serde(rename = "pending")]
    Pending,
    #[serde(rename = "completed")]
    Completed,
    #[serde(rename = "error")]
    Error,
}

impl OpState {
    pub fn as_str(&self) -> &'static str {
        match self {
            OpState::Started => "started",
            OpState::Pending => "pending",
            OpState::Completed => "completed",
            OpState::Error => "error",
        }
    }

    /// started → pending → {completed, error}, plus started → error.
    pub fn can_transition_to(&self, next: OpState) -> bool {
        matches!(
            (self, next),
            (OpState::Started, OpState::Pending)
                | (OpState::Started, OpState::Error)
                | (OpState::Pending, OpState::Completed)
                | (OpState::Pending, OpState::Error)
        )
    }
}

/// First-class record of one data operation, with its own state machine.
///
/// A completed operation always has both a request and a response
/// transaction on the ledger; the delegate is the DMS service authorized
/// to act on the requester's behalf.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperationAsset {
    pub op_id: String,
    pub op_type: OpType,
    pub state: OpState,
    pub requester: String,
    pub delegate: Option<String>,
    pub subject_files: Vec<String>,
    pub src_storage: Option<String>,
    pub dst_storage: Option<String>,
    pub program_file: Option<String>,
    pub request_tx: Option<String>,
    pub ack_tx: Option<String>,
    pub response_tx: Option<String>,
    pub error_info: Option<String>,
    /// Chain height observed when the request was proposed; base of the
    /// timeout clock.
    pub request_height: u64,
    /// Name reservation held by an unfinished create, so failure and
    /// expiry paths can release it without knowing the reserved name.
    pub pending_claim: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageSite {
    pub storage_id: String,
    pub org_id: String,
    pub dms_participant: String,
    pub capacity_bytes: u64,
}

/// Internal name-reservation entry (see [`key::claim_key`]). Holds the key
/// of the asset the name is reserved for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NameClaim {
    pub claim_id: String,
    pub holder: AssetKey,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum Asset {
    #[serde(rename = "file")]
    File(FileAsset),
    #[serde(rename = "dir")]
    Dir(DirectoryAsset),
    #[serde(rename = "group")]
    Group(GroupAsset),
    #[serde(rename = "participant")]
    Participant(Participant),
    #[serde(rename = "operation")]
    Operation(OperationAsset),
    #[serde(rename = "storage")]
    Storage(StorageSite),
    #[serde(rename = "claim")]
    Claim(NameClaim),
}

impl Asset {
    pub fn key(&self) -> AssetKey {
        match self {
            Asset::File(f) => AssetKey::file(&f.file_id),
            Asset::Dir(d) => AssetKey::dir(&d.dir_id),
            Asset::Group(g) => AssetKey::group(&g.group_id),
            Asset::Participant(p) => AssetKey::participant(&p.participant_id),
            Asset::Operation(o) => AssetKey::operation(&o.op_id),
            Asset::Storage(s) => AssetKey::storage(&s.storage_id),
            Asset::Claim(c) => AssetKey::claim(&c.claim_id),
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            Asset::File(_) => "file",
            Asset::Dir(_) => "directory",
            Asset::Group(_) => "group",
            Asset::Participant(_) => "participant",
            Asset::Operation(_) => "operation",
            Asset::Storage(_) => "storage",
            Asset::Claim(_) => "claim",
        }
    }

    pub fn as_file(&self) -> Option<&FileAsset> {
        match self {
            Asset::File(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_dir(&self) -> Option<&DirectoryAsset> {
        match self {
            Asset::Dir(d) => Some(d),
            _ => None,
        }
    }

    pub fn as_group(&self) -> Option<&GroupAsset> {
        match self {
            Asset::Group(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_participant(&self) -> Option<&Participant> {
        match self {
            Asset::Participant(p) => Some(p),
            _ => None,
        }
    }

    pub fn as_operation(&self) -> Option<&OperationAsset> {
        match self {
            Asset::Operation(o) => Some(o),
            _ => None,
        }
    }

    pub fn as_storage(&self) -> Option<&StorageSite> {
        match self {
            Asset::Storage(s) => Some(s),
            _ => None,
        }
    }
}

// --- canonical encoding -------------------------------------------------

fn put_opt_str(out: &mut Vec<u8>, v: &Option<String>) {
    match v {
        None => codec::put_u8(out, 0),
        Some(s) => {
            codec::put_u8(out, 1);
            codec::put_str(out, s);
        }
    }
}

fn get_opt_str(r: &mut Reader<'_>) -> Result<Option<String>, CodecError> {
    match r.u8()? {
        0 => Ok(None),
        1 => Ok(Some(r.string()?)),
        tag => Err(CodecError::UnknownTag { tag, context: "Option<String>" }),
    }
}

fn put_str_seq<'a>(out: &mut Vec<u8>, items: impl ExactSizeIterator<Item = &'a String>) {
    codec::put_u64(out, items.len() as u64);
    for s in items {
        codec::put_str(out, s);
    }
}

fn get_str_vec(r: &mut Reader<'_>) -> Result<Vec<String>, CodecError> {
    let len = r.seq_len()?;
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        v.push(r.string()?);
    }
    Ok(v)
}

fn put_acl(out: &mut Vec<u8>, acl: &[AclRef]) {
    codec::put_u64(out, acl.len() as u64);
    for r in acl {
        codec::put_str(out, &r.to_string());
    }
}

fn get_acl(r: &mut Reader<'_>) -> Result<Vec<AclRef>, CodecError> {
    let len = r.seq_len()?;
    let mut v = Vec::with_capacity(len);
    for _ in 0..len {
        let s = r.string()?;
        v.push(
            AclRef::parse(&s)
                .ok_or_else(|| CodecError::Malformed(format!("bad acl ref {s:?}")))?,
        );
    }
    Ok(v)
}

impl Canon for Asset {
    fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Asset::File(f) => {
                codec::put_u8(out, 0);
                codec::put_str(out, &f.file_id);
                codec::put_str(out, &f.name);
                codec::put_str(out, &f.directory_id);
                codec::put_str(out, &f.owner);
                codec::put_str(out, &f.home_storage);
                put_str_seq(out, f.replicas.iter());
                codec::put_u64(out, f.size_bytes);
                out.extend_from_slice(&f.content_digest.0);
                codec::put_bool(out, f.temporary);
                put_acl(out, &f.read_acl);
                put_acl(out, &f.write_acl);
                put_acl(out, &f.exec_acl);
                codec::put_str(out, &f.created_by_op);
                codec::put_str(out, &f.last_op);
            }
            Asset::Dir(d) => {
                codec::put_u8(out, 1);
                codec::put_str(out, &d.dir_id);
                codec::put_str(out, &d.name);
                put_opt_str(out, &d.parent_id);
                codec::put_str(out, &d.owner);
                put_acl(out, &d.read_acl);
                put_acl(out, &d.write_acl);
            }
            Asset::Group(g) => {
                codec::put_u8(out, 2);
                codec::put_str(out, &g.group_id);
                codec::put_str(out, &g.name);
                codec::put_str(out, &g.owner);
                put_acl(out, &g.members);
            }
            Asset::Participant(p) => {
                codec::put_u8(out, 3);
                codec::put_str(out, &p.participant_id);
                codec::put_str(out, &p.display_name);
                codec::put_str(out, &p.org_id);
                codec::put_bytes(out, &p.verify_token);
                codec::put_u64(out, p.roles.len() as u64);
                for role in &p.roles {
                    codec::put_str(out, role.as_str());
                }
            }
            Asset::Operation(o) => {
                codec::put_u8(out, 4);
                codec::put_str(out, &o.op_id);
                codec::put_str(out, o.op_type.as_str());
                codec::put_str(out, o.state.as_str());
                codec::put_str(out, &o.requester);
                put_opt_str(out, &o.delegate);
                put_str_seq(out, o.subject_files.iter());
                put_opt_str(out, &o.src_storage);
                put_opt_str(out, &o.dst_storage);
                put_opt_str(out, &o.program_file);
                put_opt_str(out, &o.request_tx);
                put_opt_str(out, &o.ack_tx);
                put_opt_str(out, &o.response_tx);
                put_opt_str(out, &o.error_info);
                codec::put_u64(out, o.request_height);
                put_opt_str(out, &o.pending_claim);
            }
            Asset::Storage(s) => {
                codec::put_u8(out, 5);
                codec::put_str(out, &s.storage_id);
                codec::put_str(out, &s.org_id);
                codec::put_str(out, &s.dms_participant);
                codec::put_u64(out, s.capacity_bytes);
            }
            Asset::Claim(c) => {
                codec::put_u8(out, 6);
                codec::put_str(out, &c.claim_id);
                c.holder.encode(out);
            }
        }
    }

    fn decode(r: &mut Reader<'_>) -> Result<Self, CodecError> {
        match r.u8()? {
            0 => Ok(Asset::File(FileAsset {
                file_id: r.string()?,
                name: r.string()?,
                directory_id: r.string()?,
                owner: r.string()?,
                home_storage: r.string()?,
                replicas: get_str_vec(r)?.into_iter().collect(),
                size_bytes: r.u64()?,
                content_digest: Digest(r.array32()?),
                temporary: r.boolean()?,
                read_acl: get_acl(r)?,
                write_acl: get_acl(r)?,
                exec_acl: get_acl(r)?,
                created_by_op: r.string()?,
                last_op: r.string()?,
            })),
            1 => Ok(Asset::Dir(DirectoryAsset {
                dir_id: r.string()?,
                name: r.string()?,
                parent_id: get_opt_str(r)?,
                owner: r.string()?,
                read_acl: get_acl(r)?,
                write_acl: get_acl(r)?,
            })),
            2 => Ok(Asset::Group(GroupAsset {
                group_id: r.string()?,
                name: r.string()?,
                owner: r.string()?,
                members: get_acl(r)?,
            })),
            3 => {
                let participant_id = r.string()?;
                let display_name = r.string()?;
                let org_id = r.string()?;
                let verify_token = r.bytes()?;
                let n = r.seq_len()?;
                let mut roles = BTreeSet::new();
                for _ in 0..n {
                    let s = r.string()?;
                    roles.insert(
                        Role::parse(&s)
                            .ok_or_else(|| CodecError::Malformed(format!("bad role {s:?}")))?,
                    );
                }
                Ok(Asset::Participant(Participant {
                    participant_id,
                    display_name,
                    org_id,
                    verify_token,
                    roles,
                }))
            }
            4 => {
                let op_id = r.string()?;
                let ty = r.string()?;
                let st = r.string()?;
                Ok(Asset::Operation(OperationAsset {
                    op_id,
                    op_type: OpType::parse(&ty)
                        .ok_or_else(|| CodecError::Malformed(format!("bad op type {ty:?}")))?,
                    state: match st.as_str() {
                        "started" => OpState::Started,
                        "pending" => OpState::Pending,
                        "completed" => OpState::Completed,
                        "error" => OpState::Error,
                        other => {
                            return Err(CodecError::Malformed(format!("bad op state {other:?}")))
                        }
                    },
                    requester: r.string()?,
                    delegate: get_opt_str(r)?,
                    subject_files: get_str_vec(r)?,
                    src_storage: get_opt_str(r)?,
                    dst_storage: get_opt_str(r)?,
                    program_file: get_opt_str(r)?,
                    request_tx: get_opt_str(r)?,
                    ack_tx: get_opt_str(r)?,
                    response_tx: get_opt_str(r)?,
                    error_info: get_opt_str(r)?,
                    request_height: r.u64()?,
                    pending_claim: get_opt_str(r)?,
                }))
            }
            5 => Ok(Asset::Storage(StorageSite {
                storage_id: r.string()?,
                org_id: r.string()?,
                dms_participant: r.string()?,
                capacity_bytes: r.u64()?,
            })),
            6 => Ok(Asset::Claim(NameClaim {
                claim_id: r.string()?,
                holder: AssetKey::decode(r)?,
            })),
            tag => Err(CodecError::UnknownTag { tag, context: "Asset" }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{from_bytes, to_bytes};

    pub(crate) fn sample_file() -> FileAsset {
        FileAsset {
            file_id: "f-1".into(),
            name: "a.dat".into(),
            directory_id: "d-root".into(),
            owner: "alice".into(),
            home_storage: "s1".into(),
            replicas: ["s1".to_string()].into_iter().collect(),
            size_bytes: 1024,
            content_digest: Digest::of(b"contents"),
            temporary: false,
            read_acl: vec![AclRef::group("g1")],
            write_acl: vec![AclRef::participant("bob")],
            exec_acl: vec![],
            created_by_op: "op-1".into(),
            last_op: "op-1".into(),
        }
    }

    #[test]
    fn asset_codec_round_trip() {
        let a = Asset::File(sample_file());
        assert_eq!(from_bytes::<Asset>(&to_bytes(&a)).unwrap(), a);

        let op = Asset::Operation(OperationAsset {
            op_id: "op-2".into(),
            op_type: OpType::TransferRemote,
            state: OpState::Pending,
            requester: "alice".into(),
            delegate: Some("dms1".into()),
            subject_files: vec!["f-1".into()],
            src_storage: Some("s1".into()),
            dst_storage: Some("s2".into()),
            program_file: None,
            request_tx: Some("t1".into()),
            ack_tx: Some("t2".into()),
            response_tx: None,
            error_info: None,
            request_height: 3,
            pending_claim: None,
        });
        assert_eq!(from_bytes::<Asset>(&to_bytes(&op)).unwrap(), op);
    }

    #[test]
    fn acl_ref_wire_form() {
        assert_eq!(AclRef::parse("par:alice"), Some(AclRef::participant("alice")));
        assert_eq!(AclRef::parse("grp:g1"), Some(AclRef::group("g1")));
        assert_eq!(AclRef::parse("x:alice"), None);
        assert_eq!(AclRef::parse("par:"), None);
        assert_eq!(AclRef::group("g1").to_string(), "grp:g1");
    }

    #[test]
    fn op_state_machine_edges() {
        use OpState::*;
        assert!(Started.can_transition_to(Pending));
        assert!(Started.can_transition_to(Error));
        assert!(Pending.can_transition_to(Completed));
        assert!(Pending.can_transition_to(Error));
        assert!(!Started.can_transition_to(Completed));
        assert!(!Completed.can_transition_to(Error));
        assert!(!Error.can_transition_to(Pending));
    }
}
