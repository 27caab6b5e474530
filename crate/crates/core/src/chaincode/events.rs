//! Commit-time event derivation.
//!
//! Events inform external components (storage agents, subscribers) of
//! changes in the blockchain. They are emitted only for valid committed
//! transactions, in commit order, and are derived deterministically from
//! the transaction plus the post-application state, so every peer emits an
//! identical stream.

use super::kinds;
use crate::assets::{Asset, AssetKey, AssetView, OpState};
use crate::ledger::{Transaction, WorldState};
use crate::value::{Payload, Value};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum EventName {
    OperationRequested,
    OperationAcked,
    OperationCompleted,
    OperationFailed,
    FileCommitted,
}

impl EventName {
    pub fn as_str(&self) -> &'static str {
        match self {
            EventName::OperationRequested => "OperationRequested",
            EventName::OperationAcked => "OperationAcked",
            EventName::OperationCompleted => "OperationCompleted",
            EventName::OperationFailed => "OperationFailed",
            EventName::FileCommitted => "FileCommitted",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub name: EventName,
    pub payload: Payload,
    /// Commit coordinates; subscribers see events in `(height, tx_index)`
    /// order.
    pub height: u64,
    pub tx_index: u32,
}

/// Events a valid transaction at `(height, tx_index)` emits. `state` is the
/// world state immediately after the transaction applied.
pub fn derive_events(
    tx: &Transaction,
    height: u64,
    tx_index: u32,
    state: &WorldState,
) -> Vec<Event> {
    let make = |name: EventName, payload: Payload| Event { name, payload, height, tx_index };

    let op_payload = |op_id: &str| -> Payload {
        let mut payload = tx.payload.clone();
        if let Some(Asset::Operation(op)) = state.get_asset(&AssetKey::operation(op_id)) {
            payload.insert("op_type".into(), Value::Str(op.op_type.as_str().into()));
            payload.insert("requester".into(), Value::Str(op.requester.clone()));
            if let Some(d) = &op.delegate {
                payload.insert("delegate".into(), Value::Str(d.clone()));
            }
            if let Some(s) = &op.src_storage {
                payload.insert("src_storage".into(), Value::Str(s.clone()));
            }
            if let Some(s) = &op.dst_storage {
                payload.insert("dst_storage".into(), Value::Str(s.clone()));
            }
            payload.insert(
                "subject_files".into(),
                Value::List(op.subject_files.iter().map(|f| Value::Str(f.clone())).collect()),
            );
            if let Some(p) = &op.program_file {
                payload.insert("program".into(), Value::Str(p.clone()));
            }
        }
        payload
    };

    let op_id = tx.payload.get("op").and_then(Value::as_str);
    match tx.kind.as_str() {
        kinds::REQUEST_OP => {
            let Some(op_id) = op_id else { return vec![] };
            vec![make(EventName::OperationRequested, op_payload(op_id))]
        }
        kinds::ACK_OP => {
            let Some(op_id) = op_id else { return vec![] };
            vec![make(EventName::OperationAcked, op_payload(op_id))]
        }
        kinds::CONFIRM_OP | kinds::EXPIRE_OP => {
            let Some(op_id) = op_id else { return vec![] };
            let payload = op_payload(op_id);
            let op = match state.get_asset(&AssetKey::operation(op_id)) {
                Some(Asset::Operation(op)) => op,
                _ => return vec![],
            };
            match op.state {
                OpState::Completed => {
                    let mut events = vec![make(EventName::OperationCompleted, payload.clone())];
                    if op.op_type.creates_file() {
                        let file_id = op.subject_files.last().cloned().unwrap_or_default();
                        let mut fp = payload;
                        fp.insert("file".into(), Value::Str(file_id));
                        events.push(make(EventName::FileCommitted, fp));
                    }
                    events
                }
                OpState::Error => {
                    let mut fp = payload;
                    if let Some(reason) = &op.error_info {
                        fp.insert("reason".into(), Value::Str(reason.clone()));
                    }
                    vec![make(EventName::OperationFailed, fp)]
                }
                _ => vec![],
            }
        }
        _ => vec![],
    }
}
