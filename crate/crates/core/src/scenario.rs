//! Scenario files: an ordered list of steps driving a simulation run.
//!
//! Steps name participants, storages, groups and paths by their
//! human-readable names; the driver resolves them against the live world
//! state. Attached bytes (upload contents, program bodies) are base64
//! fields.

use crate::config::NetworkConfig;
use base64::Engine;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ScenarioError {
    #[error("step {step}: unknown actor {actor:?}")]
    UnknownActor { step: u64, actor: String },
    #[error("step numbers must be strictly increasing (step {0} out of order)")]
    StepOrder(u64),
    #[error("step {step}: bad attached bytes: {reason}")]
    BadBytes { step: u64, reason: String },
    #[error("step {step}: unknown command {command:?}")]
    UnknownCommand { step: u64, command: String },
}

/// Commands a scenario step may carry: processors, queries, and the fault
/// controls.
pub const STEP_COMMANDS: [&str; 16] = [
    "requestOp",
    "ackOp",
    "confirmOp",
    "expireOp",
    "mkdir",
    "rmdir",
    "mvfile",
    "group",
    "setacl",
    "ls",
    "history",
    "opstat",
    "crash_peer",
    "recover_peer",
    "drop_confirmation",
    "diverge_endorser",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioStep {
    pub step_no: u64,
    /// Participant name from the config.
    pub actor: String,
    pub command: String,
    #[serde(default)]
    pub args: serde_json::Map<String, serde_json::Value>,
    /// Base64-encoded blob for uploads and program bodies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attached_bytes: Option<String>,
}

impl ScenarioStep {
    pub fn decoded_bytes(&self) -> Result<Option<Vec<u8>>, ScenarioError> {
        match &self.attached_bytes {
            None => Ok(None),
            Some(b64) => base64::engine::general_purpose::STANDARD
                .decode(b64)
                .map(Some)
                .map_err(|e| ScenarioError::BadBytes {
                    step: self.step_no,
                    reason: e.to_string(),
                }),
        }
    }

    pub fn arg_str(&self, key: &str) -> Option<&str> {
        self.args.get(key).and_then(|v| v.as_str())
    }

    pub fn arg_u64(&self, key: &str) -> Option<u64> {
        self.args.get(key).and_then(|v| v.as_u64())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scenario {
    pub steps: Vec<ScenarioStep>,
}

impl Scenario {
    pub fn from_json(json: &str) -> Result<Scenario, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    /// Checks step ordering, actor existence and command names against a
    /// config.
    pub fn validate(&self, config: &NetworkConfig) -> Result<(), ScenarioError> {
        let mut last = None;
        for step in &self.steps {
            if let Some(prev) = last {
                if step.step_no <= prev {
                    return Err(ScenarioError::StepOrder(step.step_no));
                }
            }
            last = Some(step.step_no);
            if config.participant(&step.actor).is_none() {
                return Err(ScenarioError::UnknownActor {
                    step: step.step_no,
                    actor: step.actor.clone(),
                });
            }
            if !STEP_COMMANDS.contains(&step.command.as_str()) {
                return Err(ScenarioError::UnknownCommand {
                    step: step.step_no,
                    command: step.command.clone(),
                });
            }
            step.decoded_bytes()?;
        }
        Ok(())
    }
}

/// Convenience constructor used by tests and the generator.
pub fn step(
    step_no: u64,
    actor: &str,
    command: &str,
    args: &[(&str, serde_json::Value)],
) -> ScenarioStep {
    ScenarioStep {
        step_no,
        actor: actor.to_string(),
        command: command.to_string(),
        args: args
            .iter()
            .map(|(k, v)| (k.to_string(), v.clone()))
            .collect(),
        attached_bytes: None,
    }
}

pub fn step_with_bytes(
    step_no: u64,
    actor: &str,
    command: &str,
    args: &[(&str, serde_json::Value)],
    bytes: &[u8],
) -> ScenarioStep {
    let mut s = step(step_no, actor, command, args);
    s.attached_bytes = Some(base64::engine::general_purpose::STANDARD.encode(bytes));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::tests::two_org_config;
    use serde_json::json;

    #[test]
    fn validate_catches_unknown_actor() {
        let scenario = Scenario {
            steps: vec![step(1, "mallory", "mkdir", &[("name", json!("x"))])],
        };
        let err = scenario.validate(&two_org_config()).unwrap_err();
        assert!(matches!(err, ScenarioError::UnknownActor { .. }));
    }

    #[test]
    fn validate_requires_increasing_steps() {
        let scenario = Scenario {
            steps: vec![
                step(1, "alice", "mkdir", &[]),
                step(1, "alice", "mkdir", &[]),
            ],
        };
        assert_eq!(
            scenario.validate(&two_org_config()).unwrap_err(),
            ScenarioError::StepOrder(1)
        );
    }

    #[test]
    fn bytes_round_trip() {
        let s = step_with_bytes(1, "alice", "requestOp", &[], b"payload");
        assert_eq!(s.decoded_bytes().unwrap().unwrap(), b"payload");
    }

    #[test]
    fn json_round_trip() {
        let scenario = Scenario {
            steps: vec![step_with_bytes(
                1,
                "alice",
                "requestOp",
                &[("op_type", json!("upload")), ("name", json!("a.dat"))],
                b"x",
            )],
        };
        let parsed = Scenario::from_json(&scenario.to_json()).unwrap();
        assert_eq!(parsed, scenario);
    }
}
