//! Network configuration: organizations, peers, participants, storages and
//! simulation parameters, read from a JSON file.
//!
//! Human-readable names are used throughout the file; asset ids are derived
//! from them deterministically (`derived_id`) so that identical configs
//! produce identical genesis blocks.

use crate::digest::Digest;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("empty network: {0}")]
    EmptyNetwork(&'static str),
    #[error("duplicate {kind} name {name:?}")]
    Duplicate { kind: &'static str, name: String },
    #[error("{kind} {name:?} references unknown organization {org:?}")]
    UnknownOrg { kind: &'static str, name: String, org: String },
    #[error("storage {storage:?} references unknown dms participant {dms:?}")]
    UnknownDms { storage: String, dms: String },
    #[error("participant {dms:?} must hold the dms-service role to serve storage {storage:?}")]
    NotDmsService { storage: String, dms: String },
    #[error("dms participant {dms:?} is bound to more than one storage")]
    DmsBoundTwice { dms: String },
    #[error("endorsement policy: {0}")]
    BadPolicy(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrgConfig {
    pub org_id: String,
    pub peers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParticipantConfig {
    pub name: String,
    pub org: String,
    #[serde(default = "default_roles")]
    pub roles: Vec<String>,
}

fn default_roles() -> Vec<String> {
    vec!["user".to_string()]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StorageConfig {
    pub name: String,
    pub org: String,
    /// Participant name of this storage's data-management service agent.
    pub dms: String,
    #[serde(default = "default_capacity")]
    pub capacity_bytes: u64,
}

fn default_capacity() -> u64 {
    1 << 30
}

/// `k` of the named organizations must endorse. When absent, the default
/// policy is one endorser per involved organization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub k: usize,
    pub endorsers: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub organizations: Vec<OrgConfig>,
    pub participants: Vec<ParticipantConfig>,
    #[serde(default)]
    pub storages: Vec<StorageConfig>,
    #[serde(default)]
    pub endorsement_policy: Option<PolicyConfig>,
    #[serde(default = "default_batch_size")]
    pub max_batch_size: usize,
    /// The ordering service cuts a batch every this many simulation steps.
    #[serde(default = "default_batch_ticks")]
    pub batch_ticks: u64,
    /// Operations stuck in started/pending expire after this many
    /// committed blocks.
    #[serde(default = "default_op_timeout")]
    pub op_timeout_blocks: u64,
    #[serde(default = "default_true")]
    pub timeouts_enabled: bool,
    #[serde(default)]
    pub seed: u64,
}

fn default_batch_size() -> usize {
    8
}

fn default_batch_ticks() -> u64 {
    2
}

fn default_op_timeout() -> u64 {
    10
}

fn default_true() -> bool {
    true
}

/// Deterministic lowercase UUID for a named entity: the first 16 bytes of
/// `sha256("<namespace>:<name>")` formatted as a UUID.
pub fn derived_id(namespace: &str, name: &str) -> String {
    let d = Digest::of_parts(&[namespace.as_bytes(), b":", name.as_bytes()]);
    let mut bytes = [0u8; 16];
    bytes.copy_from_slice(&d.0[..16]);
    uuid::Uuid::from_bytes(bytes).hyphenated().to_string()
}

pub fn participant_id(name: &str) -> String {
    derived_id("par", name)
}

pub fn storage_id(name: &str) -> String {
    derived_id("sto", name)
}

/// Id of the root directory `/`.
pub fn root_dir_id() -> String {
    derived_id("dir", "/")
}

impl NetworkConfig {
    pub const DEFAULT_OP_TIMEOUT: u64 = 10;

    pub fn from_json(json: &str) -> Result<NetworkConfig, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.organizations.is_empty() {
            return Err(ConfigError::EmptyNetwork("no organizations"));
        }
        if self.participants.is_empty() {
            return Err(ConfigError::EmptyNetwork("no participants"));
        }
        let mut orgs = BTreeSet::new();
        for org in &self.organizations {
            if !orgs.insert(org.org_id.clone()) {
                return Err(ConfigError::Duplicate { kind: "organization", name: org.org_id.clone() });
            }
            if org.peers.is_empty() {
                return Err(ConfigError::EmptyNetwork("organization without peers"));
            }
        }
        let mut names = BTreeSet::new();
        for p in &self.participants {
            if !names.insert(p.name.clone()) {
                return Err(ConfigError::Duplicate { kind: "participant", name: p.name.clone() });
            }
            if !orgs.contains(&p.org) {
                return Err(ConfigError::UnknownOrg {
                    kind: "participant",
                    name: p.name.clone(),
                    org: p.org.clone(),
                });
            }
        }
        let mut storage_names = BTreeSet::new();
        let mut bound_dms = BTreeSet::new();
        for s in &self.storages {
            if !storage_names.insert(s.name.clone()) {
                return Err(ConfigError::Duplicate { kind: "storage", name: s.name.clone() });
            }
            if !orgs.contains(&s.org) {
                return Err(ConfigError::UnknownOrg {
                    kind: "storage",
                    name: s.name.clone(),
                    org: s.org.clone(),
                });
            }
            let dms = self
                .participants
                .iter()
                .find(|p| p.name == s.dms)
                .ok_or_else(|| ConfigError::UnknownDms {
                    storage: s.name.clone(),
                    dms: s.dms.clone(),
                })?;
            if !dms.roles.iter().any(|r| r == "dms-service") {
                return Err(ConfigError::NotDmsService {
                    storage: s.name.clone(),
                    dms: s.dms.clone(),
                });
            }
            if !bound_dms.insert(s.dms.clone()) {
                return Err(ConfigError::DmsBoundTwice { dms: s.dms.clone() });
            }
        }
        if let Some(policy) = &self.endorsement_policy {
            if policy.k == 0 || policy.k > policy.endorsers.len() {
                return Err(ConfigError::BadPolicy(format!(
                    "k={} must be within 1..={}",
                    policy.k,
                    policy.endorsers.len()
                )));
            }
            for org in &policy.endorsers {
                if !orgs.contains(org) {
                    return Err(ConfigError::BadPolicy(format!("unknown endorser org {org:?}")));
                }
            }
        }
        Ok(())
    }

    pub fn participant(&self, name: &str) -> Option<&ParticipantConfig> {
        self.participants.iter().find(|p| p.name == name)
    }

    pub fn storage(&self, name: &str) -> Option<&StorageConfig> {
        self.storages.iter().find(|s| s.name == name)
    }

    /// All peer ids, sorted org-first as configured.
    pub fn peer_ids(&self) -> Vec<String> {
        self.organizations.iter().flat_map(|o| o.peers.iter().cloned()).collect()
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn two_org_config() -> NetworkConfig {
        NetworkConfig {
            organizations: vec![
                OrgConfig { org_id: "org1".into(), peers: vec!["org1.p0".into()] },
                OrgConfig { org_id: "org2".into(), peers: vec!["org2.p0".into()] },
            ],
            participants: vec![
                ParticipantConfig {
                    name: "admin".into(),
                    org: "org1".into(),
                    roles: vec!["user".into(), "orderer-admin".into()],
                },
                ParticipantConfig { name: "alice".into(), org: "org1".into(), roles: default_roles() },
                ParticipantConfig {
                    name: "dms-s1".into(),
                    org: "org2".into(),
                    roles: vec!["dms-service".into()],
                },
            ],
            storages: vec![StorageConfig {
                name: "s1".into(),
                org: "org2".into(),
                dms: "dms-s1".into(),
                capacity_bytes: 4096,
            }],
            endorsement_policy: None,
            max_batch_size: 8,
            batch_ticks: 2,
            op_timeout_blocks: 10,
            timeouts_enabled: true,
            seed: 1,
        }
    }

    #[test]
    fn valid_config_passes() {
        two_org_config().validate().unwrap();
    }

    #[test]
    fn empty_network_rejected() {
        let mut cfg = two_org_config();
        cfg.organizations.clear();
        assert_eq!(cfg.validate().unwrap_err(), ConfigError::EmptyNetwork("no organizations"));
    }

    #[test]
    fn dms_must_hold_role() {
        let mut cfg = two_org_config();
        cfg.participants[2].roles = vec!["user".into()];
        assert!(matches!(cfg.validate().unwrap_err(), ConfigError::NotDmsService { .. }));
    }

    #[test]
    fn derived_ids_are_stable_and_distinct() {
        assert_eq!(participant_id("alice"), participant_id("alice"));
        assert_ne!(participant_id("alice"), participant_id("bob"));
        assert_ne!(participant_id("s1"), storage_id("s1"));
        // Lowercase UUID shape.
        let id = root_dir_id();
        assert_eq!(id.len(), 36);
        assert!(id.chars().all(|c| c == '-' || (c.is_ascii_hexdigit() && !c.is_ascii_uppercase())));
    }

    #[test]
    fn json_defaults_fill_in() {
        let cfg: NetworkConfig = serde_json::from_str(
            r#"{
                "organizations": [{"org_id": "org1", "peers": ["p0"]}],
                "participants": [{"name": "alice", "org": "org1"}]
            }"#,
        )
        .unwrap();
        assert_eq!(cfg.max_batch_size, 8);
        assert_eq!(cfg.op_timeout_blocks, 10);
        assert!(cfg.timeouts_enabled);
        assert_eq!(cfg.participants[0].roles, vec!["user".to_string()]);
        cfg.validate().unwrap();
    }
}
