//! Genesis block construction.
//!
//! The height-0 block registers every configured participant and storage
//! site and creates the root directory `/`, one transaction each. The root
//! directory is written first so that the only key versioned at the
//! reserved `(0,0)` coordinate is one that is never re-created and never
//! deleted.

use super::block::Block;
use super::tx::{Transaction, Version, WriteOp};
use crate::assets::{AclRef, Asset, DirectoryAsset, Participant, Role, StorageSite};
use crate::codec::to_bytes;
use crate::config::{self, ConfigError, NetworkConfig};
use crate::digest::Digest;
use crate::value::{Payload, Value};

pub const KIND_REGISTER_PARTICIPANT: &str = "registerParticipant";
pub const KIND_REGISTER_STORAGE: &str = "registerStorage";

/// Identity token participants sign with in the simulation.
pub fn verify_token_for(participant_id: &str) -> Vec<u8> {
    Digest::of_parts(&[b"key:", participant_id.as_bytes()]).0.to_vec()
}

fn genesis_tx(kind: &str, label: &str, submitter: &str, payload: Payload, asset: Asset) -> Transaction {
    let key = asset.key();
    Transaction {
        tx_id: config::derived_id("gtx", label),
        kind: kind.to_string(),
        submitter: submitter.to_string(),
        payload,
        read_set: [(key.clone(), Version::ZERO)].into(),
        write_set: [(key, WriteOp::Put(to_bytes(&asset)))].into(),
        endorsements: vec![],
    }
}

/// Builds the height-0 block from a validated network configuration.
pub fn make_genesis(cfg: &NetworkConfig) -> Result<Block, ConfigError> {
    cfg.validate()?;

    // Root directory owner: the first orderer-admin, else the first
    // participant. Every configured participant may read and write the
    // root so fresh networks are usable without ACL surgery.
    let owner_name = cfg
        .participants
        .iter()
        .find(|p| p.roles.iter().any(|r| r == "orderer-admin"))
        .unwrap_or(&cfg.participants[0])
        .name
        .clone();
    let submitter = config::participant_id(&owner_name);
    let everyone: Vec<AclRef> = cfg
        .participants
        .iter()
        .map(|p| AclRef::participant(config::participant_id(&p.name)))
        .collect();

    let mut txs = Vec::new();

    let root = DirectoryAsset {
        dir_id: config::root_dir_id(),
        name: "/".into(),
        parent_id: None,
        owner: submitter.clone(),
        read_acl: everyone.clone(),
        write_acl: everyone,
    };
    let mut payload = Payload::new();
    payload.insert("name".into(), Value::Str("/".into()));
    payload.insert("dir".into(), Value::Str(root.dir_id.clone()));
    txs.push(genesis_tx("mkdir", "dir:/", &submitter, payload, Asset::Dir(root)));

    for p in &cfg.participants {
        let id = config::participant_id(&p.name);
        let roles = p.roles.iter().filter_map(|r| Role::parse(r)).collect();
        let asset = Participant {
            participant_id: id.clone(),
            display_name: p.name.clone(),
            org_id: p.org.clone(),
            verify_token: verify_token_for(&id),
            roles,
        };
        let mut payload = Payload::new();
        payload.insert("name".into(), Value::Str(p.name.clone()));
        payload.insert("participant".into(), Value::Str(id));
        txs.push(genesis_tx(
            KIND_REGISTER_PARTICIPANT,
            &format!("par:{}", p.name),
            &submitter,
            payload,
            Asset::Participant(asset),
        ));
    }

    for s in &cfg.storages {
        let id = config::storage_id(&s.name);
        let asset = StorageSite {
            storage_id: id.clone(),
            org_id: s.org.clone(),
            dms_participant: config::participant_id(&s.dms),
            capacity_bytes: s.capacity_bytes,
        };
        let mut payload = Payload::new();
        payload.insert("name".into(), Value::Str(s.name.clone()));
        payload.insert("storage".into(), Value::Str(id));
        txs.push(genesis_tx(
            KIND_REGISTER_STORAGE,
            &format!("sto:{}", s.name),
            &submitter,
            payload,
            Asset::Storage(asset),
        ));
    }

    Ok(Block::new(0, Digest::ZERO, txs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests::two_org_config;
    use crate::config::{NetworkConfig, OrgConfig, ParticipantConfig};

    #[test]
    fn genesis_shape() {
        let block = make_genesis(&two_org_config()).unwrap();
        assert_eq!(block.height, 0);
        assert!(block.prev_hash.is_zero());
        // 1 root dir + 3 participants + 1 storage.
        assert_eq!(block.transactions.len(), 5);
        assert_eq!(block.transactions[0].kind, "mkdir");
    }

    #[test]
    fn registration_counts_follow_config() {
        let cfg = NetworkConfig {
            organizations: vec![
                OrgConfig { org_id: "org1".into(), peers: vec!["a0".into(), "a1".into()] },
                OrgConfig { org_id: "org2".into(), peers: vec!["b0".into(), "b1".into()] },
            ],
            participants: vec![
                ParticipantConfig { name: "u1".into(), org: "org1".into(), roles: vec!["user".into()] },
                ParticipantConfig { name: "u2".into(), org: "org1".into(), roles: vec!["user".into()] },
                ParticipantConfig { name: "u3".into(), org: "org2".into(), roles: vec!["user".into()] },
            ],
            storages: vec![],
            endorsement_policy: None,
            max_batch_size: 8,
            batch_ticks: 2,
            op_timeout_blocks: 10,
            timeouts_enabled: true,
            seed: 0,
        };
        let block = make_genesis(&cfg).unwrap();
        let registrations = block
            .transactions
            .iter()
            .filter(|t| t.kind == KIND_REGISTER_PARTICIPANT)
            .count();
        let dirs = block.transactions.iter().filter(|t| t.kind == "mkdir").count();
        assert_eq!(registrations, 3);
        assert_eq!(dirs, 1);
        assert_eq!(block.transactions.len(), 4);
    }

    #[test]
    fn empty_config_is_rejected() {
        let mut cfg = two_org_config();
        cfg.organizations.clear();
        let err = make_genesis(&cfg).unwrap_err();
        assert_eq!(err.to_string(), "empty network: no organizations");
    }

    #[test]
    fn genesis_is_deterministic() {
        let a = make_genesis(&two_org_config()).unwrap();
        let b = make_genesis(&two_org_config()).unwrap();
        assert_eq!(a.block_hash, b.block_hash);
    }
}
