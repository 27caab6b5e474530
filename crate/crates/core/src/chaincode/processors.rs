//! The transaction processors.
//!
//! Two-phase data operations (`requestOp` / `ackOp` / `confirmOp` /
//! `expireOp`) and single-phase administration (`mkdir`, `rmdir`, `mvfile`,
//! `group`, `setacl`).
//!
//! Structural concurrency rules, enforced here and validated by MVCC at
//! commit:
//!
//! - every name `(parent directory, name)` is reserved by a claim entry
//!   written when the create is requested and released when the file is
//!   deleted or the operation fails, so concurrent creates of one name
//!   conflict on the claim key even across batches;
//! - every transaction that adds an entry to a directory rewrites the
//!   directory asset ("touch"), and `rmdir` deletes it, so an emptiness
//!   check can never be overtaken by a concurrent create;
//! - `delete` and `transfer_remote` requests stamp `last_op` on the subject
//!   file, so two concurrent mutating requests for one file conflict and
//!   batch order picks the winner.

use super::context::ProcessorContext;
use super::kinds;
use super::rules::rule_for;
use super::ChaincodeError;
use crate::assets::{
    acl, claim_belongs_to, claim_key, AclRef, AclRefKind, Asset, AssetKey, DirectoryAsset,
    FileAsset, GroupAsset, NameClaim, NameScope, OpState, OpType, OperationAsset, Participant,
    Role, StorageSite,
};
use crate::digest::Digest;
use crate::ledger::WorldState;
use crate::value::{Payload, Value};

type Result<T> = std::result::Result<T, ChaincodeError>;

/// Runs the processor for `kind` on a snapshot and returns its proposed
/// effect. The submitter must be a registered participant.
pub fn execute(
    state: &WorldState,
    submitter: &str,
    tx_id: &str,
    kind: &str,
    payload: &Payload,
) -> Result<super::Effect> {
    let ctx = ProcessorContext::new(state, submitter, tx_id);
    get_participant(&ctx, submitter)?;
    match kind {
        kinds::REQUEST_OP => request_op(&ctx, payload)?,
        kinds::ACK_OP => ack_op(&ctx, payload)?,
        kinds::CONFIRM_OP => confirm_op(&ctx, payload)?,
        kinds::EXPIRE_OP => expire_op(&ctx, payload)?,
        kinds::MKDIR => mkdir(&ctx, payload)?,
        kinds::RMDIR => rmdir(&ctx, payload)?,
        kinds::MVFILE => mvfile(&ctx, payload)?,
        kinds::GROUP => group_admin(&ctx, payload)?,
        kinds::SETACL => setacl(&ctx, payload)?,
        other => return Err(ChaincodeError::BadRequest(format!("unknown processor {other:?}"))),
    }
    Ok(ctx.into_effect())
}

// --- payload access ------------------------------------------------------

fn need_str<'p>(payload: &'p Payload, key: &str) -> Result<&'p str> {
    payload
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ChaincodeError::BadRequest(format!("missing field {key:?}")))
}

fn opt_str<'p>(payload: &'p Payload, key: &str) -> Option<&'p str> {
    payload.get(key).and_then(Value::as_str)
}

fn result_str<'p>(payload: &'p Payload, key: &str) -> Result<&'p str> {
    payload
        .get(key)
        .and_then(Value::as_str)
        .ok_or_else(|| ChaincodeError::MalformedResult(key.to_string()))
}

fn result_u64(payload: &Payload, key: &str) -> Result<u64> {
    payload
        .get(key)
        .and_then(Value::as_u64)
        .ok_or_else(|| ChaincodeError::MalformedResult(key.to_string()))
}

fn result_digest(payload: &Payload, key: &str) -> Result<Digest> {
    let hex = result_str(payload, key)?;
    Digest::from_hex(hex).map_err(|_| ChaincodeError::MalformedResult(key.to_string()))
}

// --- typed lookups (recorded reads) ---------------------------------------

fn get_participant(ctx: &ProcessorContext, id: &str) -> Result<Participant> {
    match ctx.get(&AssetKey::participant(id)) {
        Some(Asset::Participant(p)) => Ok(p),
        _ => Err(ChaincodeError::NotFound(format!("participant {id}"))),
    }
}

fn get_storage(ctx: &ProcessorContext, id: &str) -> Result<StorageSite> {
    match ctx.get(&AssetKey::storage(id)) {
        Some(Asset::Storage(s)) => Ok(s),
        _ => Err(ChaincodeError::NotFound(format!("storage {id}"))),
    }
}

fn get_dir(ctx: &ProcessorContext, id: &str) -> Result<DirectoryAsset> {
    match ctx.get(&AssetKey::dir(id)) {
        Some(Asset::Dir(d)) => Ok(d),
        _ => Err(ChaincodeError::NotFound(format!("directory {id}"))),
    }
}

fn get_group(ctx: &ProcessorContext, id: &str) -> Result<GroupAsset> {
    match ctx.get(&AssetKey::group(id)) {
        Some(Asset::Group(g)) => Ok(g),
        _ => Err(ChaincodeError::NotFound(format!("group {id}"))),
    }
}

fn get_operation(ctx: &ProcessorContext, id: &str) -> Result<OperationAsset> {
    match ctx.get(&AssetKey::operation(id)) {
        Some(Asset::Operation(o)) => Ok(o),
        _ => Err(ChaincodeError::NotFound(format!("operation {id}"))),
    }
}

/// A file as request subjects see it: temporary files are invisible.
fn get_visible_file(ctx: &ProcessorContext, id: &str) -> Result<FileAsset> {
    match ctx.get(&AssetKey::file(id)) {
        Some(Asset::File(f)) if !f.temporary => Ok(f),
        _ => Err(ChaincodeError::NotFound(format!("file {id}"))),
    }
}

fn get_file_any(ctx: &ProcessorContext, id: &str) -> Result<FileAsset> {
    match ctx.get(&AssetKey::file(id)) {
        Some(Asset::File(f)) => Ok(f),
        _ => Err(ChaincodeError::NotFound(format!("file {id}"))),
    }
}

/// The DMS participant serving `storage_id`, i.e. the delegate recorded on
/// operations acting there.
fn delegate_for(ctx: &ProcessorContext, storage_id: &str) -> Result<(StorageSite, String)> {
    let storage = get_storage(ctx, storage_id)?;
    let dms = get_participant(ctx, &storage.dms_participant)?;
    if !dms.has_role(Role::DmsService) {
        return Err(ChaincodeError::Rejected(format!(
            "participant {} lacks the dms-service role",
            dms.participant_id
        )));
    }
    Ok((storage, dms.participant_id))
}

fn require_access(
    ctx: &ProcessorContext,
    list_name: &str,
    acl_list: &[AclRef],
    owner: &str,
) -> Result<()> {
    if acl::check_access(ctx, &ctx.submitter, acl_list, owner) {
        Ok(())
    } else {
        Err(ChaincodeError::denied(list_name))
    }
}

/// Reserves `(parent, scope, name)`; conflict if already claimed.
fn reserve_name(
    ctx: &ProcessorContext,
    parent_id: &str,
    scope: NameScope,
    name: &str,
    holder: AssetKey,
) -> Result<String> {
    let key = claim_key(parent_id, scope, name);
    if ctx.get(&key).is_some() {
        return Err(ChaincodeError::Conflict(format!("name {name:?} already in use")));
    }
    ctx.put(&Asset::Claim(NameClaim { claim_id: key.id.clone(), holder }));
    Ok(key.id)
}

/// Releases a claim by id if it is still present.
fn release_claim(ctx: &ProcessorContext, claim_id: &str) {
    let key = AssetKey::claim(claim_id);
    if ctx.get(&key).is_some() {
        ctx.delete(&key);
    }
}

// --- two-phase operation lifecycle ----------------------------------------

fn request_op(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let op_id = need_str(payload, "op")?;
    let op_type = OpType::parse(need_str(payload, "op_type")?)
        .ok_or_else(|| ChaincodeError::BadRequest("unknown op_type".into()))?;
    let rule = rule_for(op_type);
    for field in rule.request_params {
        need_str(payload, field)?;
    }
    if ctx.get(&AssetKey::operation(op_id)).is_some() {
        return Err(ChaincodeError::Conflict(format!("operation {op_id} already exists")));
    }

    let mut op = OperationAsset {
        op_id: op_id.to_string(),
        op_type,
        state: OpState::Started,
        requester: ctx.submitter.clone(),
        delegate: None,
        subject_files: vec![],
        src_storage: None,
        dst_storage: None,
        program_file: None,
        request_tx: Some(ctx.tx_id.clone()),
        ack_tx: None,
        response_tx: None,
        error_info: None,
        request_height: ctx.logical_time,
        pending_claim: None,
    };

    match op_type {
        OpType::Upload => {
            let file_id = need_str(payload, "file")?;
            let name = need_str(payload, "name")?;
            let dir_id = need_str(payload, "dir")?;
            let storage_id = need_str(payload, "storage")?;
            let dir = get_dir(ctx, dir_id)?;
            require_access(ctx, "writeACL", &dir.write_acl, &dir.owner)?;
            let (storage, delegate) = delegate_for(ctx, storage_id)?;
            if ctx.get(&AssetKey::file(file_id)).is_some() {
                return Err(ChaincodeError::Conflict(format!("file id {file_id} already exists")));
            }
            let claim = reserve_name(
                ctx,
                dir_id,
                NameScope::File,
                name,
                AssetKey::file(file_id),
            )?;
            // The provisional asset: hidden from listings and unreadable
            // until the storage side confirms the physical write.
            ctx.put(&Asset::File(FileAsset {
                file_id: file_id.to_string(),
                name: name.to_string(),
                directory_id: dir_id.to_string(),
                owner: ctx.submitter.clone(),
                home_storage: storage.storage_id.clone(),
                replicas: Default::default(),
                size_bytes: 0,
                content_digest: Digest::ZERO,
                temporary: true,
                read_acl: vec![],
                write_acl: vec![],
                exec_acl: vec![],
                created_by_op: op_id.to_string(),
                last_op: op_id.to_string(),
            }));
            ctx.touch(&AssetKey::dir(dir_id))?;
            op.delegate = Some(delegate);
            op.subject_files = vec![file_id.to_string()];
            op.dst_storage = Some(storage.storage_id);
            op.pending_claim = Some(claim);
        }
        OpType::Download => {
            let file_id = need_str(payload, "file")?;
            let file = get_visible_file(ctx, file_id)?;
            require_access(ctx, "readACL", &file.read_acl, &file.owner)?;
            let (_, delegate) = delegate_for(ctx, &file.home_storage)?;
            op.delegate = Some(delegate);
            op.subject_files = vec![file_id.to_string()];
            op.src_storage = Some(file.home_storage);
        }
        OpType::CopyLocal | OpType::CopyRemote => {
            let file_id = need_str(payload, "file")?;
            let new_file = need_str(payload, "new_file")?;
            let new_name = need_str(payload, "new_name")?;
            let file = get_visible_file(ctx, file_id)?;
            require_access(ctx, "readACL", &file.read_acl, &file.owner)?;
            let dst_storage = match op_type {
                OpType::CopyRemote => need_str(payload, "dst_storage")?.to_string(),
                _ => file.home_storage.clone(),
            };
            let (storage, delegate) = delegate_for(ctx, &dst_storage)?;
            if ctx.get(&AssetKey::file(new_file)).is_some() {
                return Err(ChaincodeError::Conflict(format!("file id {new_file} already exists")));
            }
            // The copy lands in the source file's directory under a new
            // client-chosen name.
            let claim = reserve_name(
                ctx,
                &file.directory_id,
                NameScope::File,
                new_name,
                AssetKey::file(new_file),
            )?;
            ctx.touch(&AssetKey::dir(&file.directory_id))?;
            op.delegate = Some(delegate);
            op.subject_files = vec![file_id.to_string(), new_file.to_string()];
            op.src_storage = Some(file.home_storage);
            op.dst_storage = Some(storage.storage_id);
            op.pending_claim = Some(claim);
        }
        OpType::Delete => {
            let file_id = need_str(payload, "file")?;
            let mut file = get_visible_file(ctx, file_id)?;
            require_access(ctx, "writeACL", &file.write_acl, &file.owner)?;
            let (_, delegate) = delegate_for(ctx, &file.home_storage)?;
            // Stamping last_op makes concurrent mutating requests for the
            // same file conflict; batch order decides the winner.
            file.last_op = op_id.to_string();
            ctx.put(&Asset::File(file.clone()));
            op.delegate = Some(delegate);
            op.subject_files = vec![file_id.to_string()];
            op.src_storage = Some(file.home_storage);
        }
        OpType::TransferRemote => {
            let file_id = need_str(payload, "file")?;
            let dst_storage = need_str(payload, "dst_storage")?;
            let mut file = get_visible_file(ctx, file_id)?;
            require_access(ctx, "writeACL", &file.write_acl, &file.owner)?;
            if file.home_storage == dst_storage {
                return Err(ChaincodeError::Rejected(
                    "transfer destination equals current home storage".into(),
                ));
            }
            let (storage, delegate) = delegate_for(ctx, dst_storage)?;
            file.last_op = op_id.to_string();
            ctx.put(&Asset::File(file.clone()));
            op.delegate = Some(delegate);
            op.subject_files = vec![file_id.to_string()];
            op.src_storage = Some(file.home_storage);
            op.dst_storage = Some(storage.storage_id);
        }
        OpType::Process => {
            let program_id = need_str(payload, "program")?;
            let input_id = need_str(payload, "input")?;
            let new_file = need_str(payload, "new_file")?;
            let output_name = need_str(payload, "output_name")?;
            let output_dir = need_str(payload, "output_dir")?;
            let program = get_visible_file(ctx, program_id)?;
            let input = get_visible_file(ctx, input_id)?;
            // exec is required on both sides: the program and the data it
            // is fed.
            require_access(ctx, "execACL", &program.exec_acl, &program.owner)?;
            require_access(ctx, "execACL", &input.exec_acl, &input.owner)?;
            let out_dir = get_dir(ctx, output_dir)?;
            require_access(ctx, "writeACL", &out_dir.write_acl, &out_dir.owner)?;
            // The service hosting the program performs the computation.
            let (storage, delegate) = delegate_for(ctx, &program.home_storage)?;
            if ctx.get(&AssetKey::file(new_file)).is_some() {
                return Err(ChaincodeError::Conflict(format!("file id {new_file} already exists")));
            }
            let claim = reserve_name(
                ctx,
                output_dir,
                NameScope::File,
                output_name,
                AssetKey::file(new_file),
            )?;
            ctx.touch(&AssetKey::dir(output_dir))?;
            op.delegate = Some(delegate);
            op.subject_files = vec![input_id.to_string(), new_file.to_string()];
            op.src_storage = Some(program.home_storage);
            op.dst_storage = Some(storage.storage_id);
            op.program_file = Some(program_id.to_string());
            op.pending_claim = Some(claim);
        }
    }

    ctx.put(&Asset::Operation(op));
    Ok(())
}

fn require_delegate(ctx: &ProcessorContext, op: &OperationAsset) -> Result<()> {
    if op.delegate.as_deref() != Some(ctx.submitter.as_str()) {
        return Err(ChaincodeError::denied("delegation"));
    }
    Ok(())
}

fn ack_op(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let op_id = need_str(payload, "op")?;
    let mut op = get_operation(ctx, op_id)?;
    require_delegate(ctx, &op)?;
    if op.state != OpState::Started {
        return Err(ChaincodeError::InvalidTransition(format!(
            "cannot ack operation in state {}",
            op.state.as_str()
        )));
    }
    op.state = OpState::Pending;
    op.ack_tx = Some(ctx.tx_id.clone());
    ctx.put(&Asset::Operation(op));
    Ok(())
}

fn confirm_op(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let op_id = need_str(payload, "op")?;
    let mut op = get_operation(ctx, op_id)?;
    require_delegate(ctx, &op)?;
    if !matches!(op.state, OpState::Started | OpState::Pending) {
        return Err(ChaincodeError::InvalidTransition(format!(
            "cannot confirm operation in state {}",
            op.state.as_str()
        )));
    }
    match need_str(payload, "outcome")? {
        "success" => confirm_success(ctx, &mut op, payload)?,
        "failure" => {
            let reason = need_str(payload, "reason")?;
            fail_operation(ctx, &mut op, reason);
        }
        other => {
            return Err(ChaincodeError::BadRequest(format!("unknown outcome {other:?}")))
        }
    }
    op.response_tx = Some(ctx.tx_id.clone());
    ctx.put(&Asset::Operation(op));
    Ok(())
}

fn confirm_success(
    ctx: &ProcessorContext,
    op: &mut OperationAsset,
    payload: &Payload,
) -> Result<()> {
    let rule = rule_for(op.op_type);
    for field in rule.success_result {
        if !payload.contains_key(*field) {
            return Err(ChaincodeError::MalformedResult(field.to_string()));
        }
    }
    match op.op_type {
        OpType::Upload => {
            let file_id = op.subject_files[0].clone();
            let mut file = get_file_any(ctx, &file_id)?;
            // Removing the temporary label turns the upload into a fully
            // valid asset.
            file.temporary = false;
            file.size_bytes = result_u64(payload, "size")?;
            file.content_digest = result_digest(payload, "digest")?;
            file.replicas = [file.home_storage.clone()].into_iter().collect();
            file.last_op = op.op_id.clone();
            ctx.put(&Asset::File(file));
            op.pending_claim = None;
        }
        OpType::Download => {
            // Provenance-only record; the file is unchanged.
        }
        OpType::CopyLocal | OpType::CopyRemote => {
            let src = get_visible_file(ctx, &op.subject_files[0])?;
            let new_id = op.subject_files[1].clone();
            let name = result_str(payload, "name")?;
            verify_reservation(ctx, &src.directory_id, name, &AssetKey::file(&new_id))?;
            let dst = op
                .dst_storage
                .clone()
                .ok_or_else(|| ChaincodeError::MalformedResult("dst_storage".into()))?;
            ctx.put(&Asset::File(FileAsset {
                file_id: new_id,
                name: name.to_string(),
                directory_id: src.directory_id.clone(),
                owner: op.requester.clone(),
                home_storage: dst.clone(),
                replicas: [dst].into_iter().collect(),
                size_bytes: result_u64(payload, "size")?,
                content_digest: result_digest(payload, "digest")?,
                temporary: false,
                read_acl: src.read_acl.clone(),
                write_acl: src.write_acl.clone(),
                exec_acl: src.exec_acl.clone(),
                created_by_op: op.op_id.clone(),
                last_op: op.op_id.clone(),
            }));
            op.pending_claim = None;
        }
        OpType::TransferRemote => {
            let mut file = get_visible_file(ctx, &op.subject_files[0])?;
            let dst = op
                .dst_storage
                .clone()
                .ok_or_else(|| ChaincodeError::MalformedResult("dst_storage".into()))?;
            result_digest(payload, "digest")?;
            // A move, not a copy: the single replica swaps storages.
            file.replicas = [dst.clone()].into_iter().collect();
            file.home_storage = dst;
            file.last_op = op.op_id.clone();
            ctx.put(&Asset::File(file));
        }
        OpType::Delete => {
            let file = get_visible_file(ctx, &op.subject_files[0])?;
            ctx.delete(&AssetKey::file(&file.file_id));
            let claim = claim_key(&file.directory_id, NameScope::File, &file.name);
            release_claim(ctx, &claim.id);
        }
        OpType::Process => {
            let new_id = op.subject_files[1].clone();
            let name = result_str(payload, "name")?;
            let dir_id = result_str(payload, "dir")?;
            verify_reservation(ctx, dir_id, name, &AssetKey::file(&new_id))?;
            let dst = op
                .dst_storage
                .clone()
                .ok_or_else(|| ChaincodeError::MalformedResult("dst_storage".into()))?;
            ctx.put(&Asset::File(FileAsset {
                file_id: new_id,
                name: name.to_string(),
                directory_id: dir_id.to_string(),
                owner: op.requester.clone(),
                home_storage: dst.clone(),
                replicas: [dst].into_iter().collect(),
                size_bytes: result_u64(payload, "size")?,
                content_digest: result_digest(payload, "digest")?,
                temporary: false,
                read_acl: vec![],
                write_acl: vec![],
                exec_acl: vec![],
                created_by_op: op.op_id.clone(),
                last_op: op.op_id.clone(),
            }));
            op.pending_claim = None;
        }
    }
    op.state = OpState::Completed;
    Ok(())
}

/// The confirmed name/directory must be exactly what the request reserved.
fn verify_reservation(
    ctx: &ProcessorContext,
    dir_id: &str,
    name: &str,
    holder: &AssetKey,
) -> Result<()> {
    let key = claim_key(dir_id, NameScope::File, name);
    match ctx.get(&key) {
        Some(Asset::Claim(c)) if c.holder == *holder => Ok(()),
        _ => Err(ChaincodeError::Rejected(format!("name {name:?} is not reserved for this operation"))),
    }
}

/// Moves an operation to the error state and removes whatever provisional
/// footprint its request left (temporary file, name reservation).
fn fail_operation(ctx: &ProcessorContext, op: &mut OperationAsset, reason: &str) {
    if op.op_type == OpType::Upload {
        let key = AssetKey::file(&op.subject_files[0]);
        if let Some(Asset::File(f)) = ctx.get(&key) {
            if f.temporary {
                ctx.delete(&key);
            }
        }
    }
    if let Some(claim) = op.pending_claim.take() {
        release_claim(ctx, &claim);
    }
    op.state = OpState::Error;
    op.error_info = Some(reason.to_string());
}

fn expire_op(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let op_id = need_str(payload, "op")?;
    let submitter = get_participant(ctx, &ctx.submitter)?;
    if !submitter.has_role(Role::OrdererAdmin) {
        return Err(ChaincodeError::denied("orderer-admin"));
    }
    let mut op = get_operation(ctx, op_id)?;
    if !matches!(op.state, OpState::Started | OpState::Pending) {
        return Err(ChaincodeError::InvalidTransition(format!(
            "cannot expire operation in state {}",
            op.state.as_str()
        )));
    }
    let timeout = payload
        .get("timeout_blocks")
        .and_then(Value::as_u64)
        .unwrap_or(crate::config::NetworkConfig::DEFAULT_OP_TIMEOUT);
    let age = ctx.committed_height().saturating_sub(op.request_height);
    if age <= timeout {
        return Err(ChaincodeError::Rejected(format!(
            "operation age {age} blocks has not exceeded timeout {timeout}"
        )));
    }
    fail_operation(ctx, &mut op, "timeout");
    op.response_tx = Some(ctx.tx_id.clone());
    ctx.put(&Asset::Operation(op));
    Ok(())
}

// --- single-phase administration -------------------------------------------

fn parse_acl_entries(ctx: &ProcessorContext, value: Option<&Value>) -> Result<Vec<AclRef>> {
    let Some(value) = value else { return Ok(vec![]) };
    let items = value
        .as_list()
        .ok_or_else(|| ChaincodeError::BadRequest("acl entries must be a list".into()))?;
    let mut refs = Vec::with_capacity(items.len());
    for item in items {
        let s = item
            .as_str()
            .ok_or_else(|| ChaincodeError::BadRequest("acl entry must be a string".into()))?;
        let r = AclRef::parse(s)
            .ok_or_else(|| ChaincodeError::BadRequest(format!("bad acl entry {s:?}")))?;
        let exists = match r.kind {
            AclRefKind::Participant => ctx.get(&AssetKey::participant(&r.id)).is_some(),
            AclRefKind::Group => ctx.get(&AssetKey::group(&r.id)).is_some(),
        };
        if !exists {
            return Err(ChaincodeError::NotFound(format!("acl target {r}")));
        }
        refs.push(r);
    }
    Ok(refs)
}

fn mkdir(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let dir_id = need_str(payload, "dir")?;
    let name = need_str(payload, "name")?;
    let parent_id = need_str(payload, "parent")?;
    let parent = get_dir(ctx, parent_id)?;
    require_access(ctx, "writeACL", &parent.write_acl, &parent.owner)?;
    if ctx.get(&AssetKey::dir(dir_id)).is_some() {
        return Err(ChaincodeError::Conflict(format!("directory id {dir_id} already exists")));
    }
    let claim_key = claim_key(parent_id, NameScope::Dir, name);
    if ctx.get(&claim_key).is_some() {
        return Err(ChaincodeError::Conflict(format!("directory {name:?} already exists")));
    }
    ctx.put(&Asset::Claim(NameClaim {
        claim_id: claim_key.id.clone(),
        holder: AssetKey::dir(dir_id),
    }));
    ctx.put(&Asset::Dir(DirectoryAsset {
        dir_id: dir_id.to_string(),
        name: name.to_string(),
        parent_id: Some(parent_id.to_string()),
        owner: ctx.submitter.clone(),
        read_acl: parse_acl_entries(ctx, payload.get("read_acl"))?,
        write_acl: parse_acl_entries(ctx, payload.get("write_acl"))?,
    }));
    ctx.touch(&AssetKey::dir(parent_id))?;
    Ok(())
}

fn rmdir(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let dir_id = need_str(payload, "dir")?;
    let dir = get_dir(ctx, dir_id)?;
    let Some(parent_id) = dir.parent_id.clone() else {
        return Err(ChaincodeError::Rejected("cannot delete the root directory".into()));
    };
    require_access(ctx, "writeACL", &dir.write_acl, &dir.owner)?;
    // Emptiness counts temporary files and in-flight name reservations as
    // occupying: a directory cannot vanish under an unconfirmed upload.
    for (key, asset) in ctx.scan() {
        let occupied = match &asset {
            Asset::File(f) => f.directory_id == dir_id,
            Asset::Dir(d) => d.parent_id.as_deref() == Some(dir_id),
            Asset::Claim(_) => claim_belongs_to(&key.id, dir_id),
            _ => false,
        };
        if occupied {
            return Err(ChaincodeError::Rejected("directory not empty".into()));
        }
    }
    ctx.delete(&AssetKey::dir(dir_id));
    release_claim(ctx, &claim_key(&parent_id, NameScope::Dir, &dir.name).id);
    Ok(())
}

fn mvfile(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let file_id = need_str(payload, "file")?;
    let dst_dir_id = need_str(payload, "dst_dir")?;
    let mut file = get_visible_file(ctx, file_id)?;
    require_access(ctx, "writeACL", &file.write_acl, &file.owner)?;
    let dst = get_dir(ctx, dst_dir_id)?;
    require_access(ctx, "writeACL", &dst.write_acl, &dst.owner)?;
    if file.directory_id == dst_dir_id {
        return Err(ChaincodeError::Conflict("file already in that directory".into()));
    }
    let new_claim = claim_key(dst_dir_id, NameScope::File, &file.name);
    if ctx.get(&new_claim).is_some() {
        return Err(ChaincodeError::Conflict(format!("name {:?} already in use", file.name)));
    }
    release_claim(ctx, &claim_key(&file.directory_id, NameScope::File, &file.name).id);
    ctx.put(&Asset::Claim(NameClaim {
        claim_id: new_claim.id.clone(),
        holder: AssetKey::file(file_id),
    }));
    // Only the placement attribute changes.
    file.directory_id = dst_dir_id.to_string();
    ctx.put(&Asset::File(file));
    ctx.touch(&AssetKey::dir(dst_dir_id))?;
    Ok(())
}

fn group_admin(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let action = need_str(payload, "action")?;
    let group_id = need_str(payload, "group")?;
    match action {
        "create" => {
            let name = need_str(payload, "name")?;
            if ctx.get(&AssetKey::group(group_id)).is_some() {
                return Err(ChaincodeError::Conflict(format!("group {group_id} already exists")));
            }
            ctx.put(&Asset::Group(GroupAsset {
                group_id: group_id.to_string(),
                name: name.to_string(),
                owner: ctx.submitter.clone(),
                members: vec![],
            }));
        }
        "add_member" => {
            let mut group = get_group(ctx, group_id)?;
            require_owner(ctx, &group.owner)?;
            let member = parse_member(ctx, payload)?;
            if member.kind == AclRefKind::Group {
                // Adding G2 to G1 creates a cycle iff G1 is reachable
                // from G2.
                if member.id == group.group_id
                    || acl::reachable_groups(ctx, &member.id).contains(&group.group_id)
                {
                    return Err(ChaincodeError::Rejected("membership cycle".into()));
                }
            }
            if !group.members.contains(&member) {
                group.members.push(member);
            }
            ctx.put(&Asset::Group(group));
        }
        "remove_member" => {
            let mut group = get_group(ctx, group_id)?;
            require_owner(ctx, &group.owner)?;
            let member = parse_member_lenient(payload)?;
            // Removing an absent member is an idempotent success; the
            // unchanged asset is still written as provenance.
            group.members.retain(|m| *m != member);
            ctx.put(&Asset::Group(group));
        }
        "delete" => {
            let group = get_group(ctx, group_id)?;
            require_owner(ctx, &group.owner)?;
            ctx.delete(&AssetKey::group(group_id));
        }
        other => return Err(ChaincodeError::BadRequest(format!("unknown group action {other:?}"))),
    }
    Ok(())
}

fn require_owner(ctx: &ProcessorContext, owner: &str) -> Result<()> {
    if ctx.submitter != owner {
        return Err(ChaincodeError::denied("owner"));
    }
    Ok(())
}

fn parse_member(ctx: &ProcessorContext, payload: &Payload) -> Result<AclRef> {
    let member = parse_member_lenient(payload)?;
    let exists = match member.kind {
        AclRefKind::Participant => ctx.get(&AssetKey::participant(&member.id)).is_some(),
        AclRefKind::Group => ctx.get(&AssetKey::group(&member.id)).is_some(),
    };
    if !exists {
        return Err(ChaincodeError::NotFound(format!("member {member}")));
    }
    Ok(member)
}

fn parse_member_lenient(payload: &Payload) -> Result<AclRef> {
    let s = need_str(payload, "member")?;
    AclRef::parse(s).ok_or_else(|| ChaincodeError::BadRequest(format!("bad member ref {s:?}")))
}

fn setacl(ctx: &ProcessorContext, payload: &Payload) -> Result<()> {
    let target = need_str(payload, "target")?;
    let list = need_str(payload, "list")?;
    let entries = parse_acl_entries(ctx, Some(
        payload
            .get("entries")
            .ok_or_else(|| ChaincodeError::BadRequest("missing field \"entries\"".into()))?,
    ))?;
    let key = AssetKey::parse(target)
        .map_err(|e| ChaincodeError::BadRequest(format!("bad target key: {e}")))?;
    match ctx.get(&key) {
        Some(Asset::File(mut f)) => {
            require_owner(ctx, &f.owner)?;
            match list {
                "readACL" => f.read_acl = entries,
                "writeACL" => f.write_acl = entries,
                "execACL" => f.exec_acl = entries,
                other => {
                    return Err(ChaincodeError::BadRequest(format!("unknown list {other:?}")))
                }
            }
            ctx.put(&Asset::File(f));
        }
        Some(Asset::Dir(mut d)) => {
            require_owner(ctx, &d.owner)?;
            match list {
                "readACL" => d.read_acl = entries,
                "writeACL" => d.write_acl = entries,
                "execACL" => {
                    return Err(ChaincodeError::Rejected(
                        "directories carry no execACL".into(),
                    ))
                }
                other => {
                    return Err(ChaincodeError::BadRequest(format!("unknown list {other:?}")))
                }
            }
            ctx.put(&Asset::Dir(d));
        }
        Some(other) => {
            return Err(ChaincodeError::Rejected(format!(
                "{} assets carry no ACLs",
                other.type_name()
            )))
        }
        None => return Err(ChaincodeError::NotFound(format!("asset {target}"))),
    }
    Ok(())
}
