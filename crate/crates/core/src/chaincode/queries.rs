//! Read-only provenance queries. Evaluated against a local snapshot and
//! ledger; never ordered, never committed.

use super::ChaincodeError;
use crate::assets::{acl, Asset, AssetKey, AssetView, OpState, OpType};
use crate::digest::Digest;
use crate::ledger::Ledger;
use serde::Serialize;

type Result<T> = std::result::Result<T, ChaincodeError>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FileSummary {
    pub file_id: String,
    pub name: String,
    pub size_bytes: u64,
    pub content_digest: Digest,
    pub owner: String,
    pub home_storage: String,
}

/// Directory listing: exactly the committed (non-temporary) files whose
/// directory attribute equals `dir_id`, sorted by name.
pub fn query_directory(
    view: &dyn AssetView,
    dir_id: &str,
    requester: &str,
) -> Result<Vec<FileSummary>> {
    let dir = match view.get_asset(&AssetKey::dir(dir_id)) {
        Some(Asset::Dir(d)) => d,
        _ => return Err(ChaincodeError::NotFound(format!("directory {dir_id}"))),
    };
    if !acl::check_access(view, requester, &dir.read_acl, &dir.owner) {
        return Err(ChaincodeError::denied("readACL"));
    }
    let mut files: Vec<FileSummary> = view
        .scan_assets()
        .into_iter()
        .filter_map(|(_, asset)| match asset {
            Asset::File(f) if f.directory_id == dir_id && !f.temporary => Some(FileSummary {
                file_id: f.file_id,
                name: f.name,
                size_bytes: f.size_bytes,
                content_digest: f.content_digest,
                owner: f.owner,
                home_storage: f.home_storage,
            }),
            _ => None,
        })
        .collect();
    files.sort_by(|a, b| a.name.cmp(&b.name).then_with(|| a.file_id.cmp(&b.file_id)));
    Ok(files)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HistoryEntry {
    pub height: u64,
    pub tx_index: u32,
    pub tx_id: String,
    pub kind: String,
    /// Operation the transaction belongs to, when it carries one.
    pub op_id: Option<String>,
    pub summary: String,
}

/// Chronological record of every valid committed transaction whose write
/// set touches the file key. Requires a ledger whose validity flags are
/// populated (a peer's ledger, or a dump loaded through replay).
pub fn query_history(ledger: &Ledger, file_id: &str) -> Result<Vec<HistoryEntry>> {
    let key = AssetKey::file(file_id);
    let mut entries = Vec::new();
    for block in ledger.blocks() {
        for (i, tx) in block.transactions.iter().enumerate() {
            let valid = block.validity_flags.get(i).copied().unwrap_or(false);
            if !valid || !tx.write_set.contains_key(&key) {
                continue;
            }
            let op_id = tx
                .payload
                .get("op")
                .and_then(crate::value::Value::as_str)
                .map(str::to_string);
            let summary = match tx.kind.as_str() {
                super::kinds::REQUEST_OP => format!(
                    "{} requested",
                    tx.payload
                        .get("op_type")
                        .and_then(crate::value::Value::as_str)
                        .unwrap_or("operation")
                ),
                super::kinds::CONFIRM_OP => format!(
                    "confirmed {}",
                    tx.payload
                        .get("outcome")
                        .and_then(crate::value::Value::as_str)
                        .unwrap_or("?")
                ),
                super::kinds::EXPIRE_OP => "expired".to_string(),
                super::kinds::MVFILE => "moved".to_string(),
                super::kinds::SETACL => format!(
                    "{} replaced",
                    tx.payload
                        .get("list")
                        .and_then(crate::value::Value::as_str)
                        .unwrap_or("acl")
                ),
                other => other.to_string(),
            };
            entries.push(HistoryEntry {
                height: block.height,
                tx_index: i as u32,
                tx_id: tx.tx_id.clone(),
                kind: tx.kind.clone(),
                op_id,
                summary,
            });
        }
    }
    if entries.is_empty() {
        return Err(ChaincodeError::NotFound(format!("file {file_id} never existed")));
    }
    Ok(entries)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TxCoordinates {
    pub tx_id: String,
    pub height: u64,
    pub tx_index: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OperationRecord {
    pub op_id: String,
    pub op_type: OpType,
    pub state: OpState,
    pub requester: String,
    pub delegate: Option<String>,
    pub subject_files: Vec<String>,
    pub error_info: Option<String>,
    pub request: Option<TxCoordinates>,
    pub ack: Option<TxCoordinates>,
    pub response: Option<TxCoordinates>,
}

fn locate_tx(ledger: &Ledger, tx_id: &str) -> Option<TxCoordinates> {
    for block in ledger.blocks() {
        for (i, tx) in block.transactions.iter().enumerate() {
            if tx.tx_id == tx_id {
                return Some(TxCoordinates {
                    tx_id: tx_id.to_string(),
                    height: block.height,
                    tx_index: i as u32,
                });
            }
        }
    }
    None
}

/// Current state of an operation plus the ledger coordinates of its
/// request/ack/response transactions.
pub fn query_operation(
    view: &dyn AssetView,
    ledger: &Ledger,
    op_id: &str,
) -> Result<OperationRecord> {
    let op = match view.get_asset(&AssetKey::operation(op_id)) {
        Some(Asset::Operation(o)) => o,
        _ => return Err(ChaincodeError::NotFound(format!("operation {op_id}"))),
    };
    Ok(OperationRecord {
        request: op.request_tx.as_deref().and_then(|id| locate_tx(ledger, id)),
        ack: op.ack_tx.as_deref().and_then(|id| locate_tx(ledger, id)),
        response: op.response_tx.as_deref().and_then(|id| locate_tx(ledger, id)),
        op_id: op.op_id,
        op_type: op.op_type,
        state: op.state,
        requester: op.requester,
        delegate: op.delegate,
        subject_files: op.subject_files,
        error_info: op.error_info,
    })
}
