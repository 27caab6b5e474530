//! Processor names, used bit-exact in `Transaction.kind` and scenario files.

pub const REQUEST_OP: &str = "requestOp";
pub const ACK_OP: &str = "ackOp";
pub const CONFIRM_OP: &str = "confirmOp";
pub const EXPIRE_OP: &str = "expireOp";
pub const MKDIR: &str = "mkdir";
pub const RMDIR: &str = "rmdir";
pub const MVFILE: &str = "mvfile";
pub const GROUP: &str = "group";
pub const SETACL: &str = "setacl";

/// Read-only queries; evaluated locally, never ordered or committed.
pub const QUERY_LS: &str = "ls";
pub const QUERY_HISTORY: &str = "history";
pub const QUERY_OPSTAT: &str = "opstat";

/// Every kind that may appear in a committed transaction. The two
/// `register*` kinds are emitted only by genesis construction and have no
/// scenario-invokable processor.
pub const COMMITTED_KINDS: [&str; 11] = [
    REQUEST_OP,
    ACK_OP,
    CONFIRM_OP,
    EXPIRE_OP,
    MKDIR,
    RMDIR,
    MVFILE,
    GROUP,
    SETACL,
    crate::ledger::genesis::KIND_REGISTER_PARTICIPANT,
    crate::ledger::genesis::KIND_REGISTER_STORAGE,
];
