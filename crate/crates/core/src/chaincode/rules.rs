//! Static per-operation-type rules: required request parameters, the ACL
//! each type is checked against, and the result fields a successful
//! confirmation must supply.

use crate::assets::OpType;

/// Which list the subject file check runs against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubjectAcl {
    /// No subject file at request time (upload: the target is a directory).
    None,
    Read,
    Write,
    /// exec on both the program file and the input file.
    Exec,
}

#[derive(Debug, Clone, Copy)]
pub struct OpRule {
    pub op_type: OpType,
    /// Payload fields `requestOp` requires for this type (besides `op` and
    /// `op_type` themselves).
    pub request_params: &'static [&'static str],
    pub subject_acl: SubjectAcl,
    /// Result fields a `confirmOp` success must carry.
    pub success_result: &'static [&'static str],
    /// Whether a successful operation leaves a new committed file.
    pub creates_file: bool,
}

pub const RULES: [OpRule; 7] = [
    OpRule {
        op_type: OpType::Upload,
        request_params: &["file", "name", "dir", "storage"],
        subject_acl: SubjectAcl::None,
        success_result: &["size", "digest"],
        creates_file: true,
    },
    OpRule {
        op_type: OpType::Download,
        request_params: &["file"],
        subject_acl: SubjectAcl::Read,
        success_result: &["size", "digest"],
        creates_file: false,
    },
    OpRule {
        op_type: OpType::CopyLocal,
        request_params: &["file", "new_file", "new_name"],
        subject_acl: SubjectAcl::Read,
        success_result: &["size", "digest", "name"],
        creates_file: true,
    },
    OpRule {
        op_type: OpType::Delete,
        request_params: &["file"],
        subject_acl: SubjectAcl::Write,
        success_result: &[],
        creates_file: false,
    },
    OpRule {
        op_type: OpType::CopyRemote,
        request_params: &["file", "new_file", "new_name", "dst_storage"],
        subject_acl: SubjectAcl::Read,
        success_result: &["size", "digest", "name"],
        creates_file: true,
    },
    OpRule {
        op_type: OpType::TransferRemote,
        request_params: &["file", "dst_storage"],
        subject_acl: SubjectAcl::Write,
        success_result: &["digest"],
        creates_file: false,
    },
    OpRule {
        op_type: OpType::Process,
        request_params: &["program", "input", "new_file", "output_name", "output_dir"],
        subject_acl: SubjectAcl::Exec,
        success_result: &["size", "digest", "name", "dir"],
        creates_file: true,
    },
];

pub fn rule_for(op_type: OpType) -> &'static OpRule {
    RULES
        .iter()
        .find(|r| r.op_type == op_type)
        .expect("every op type has exactly one rule row")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_op_type_has_exactly_one_row() {
        for t in OpType::ALL {
            assert_eq!(RULES.iter().filter(|r| r.op_type == t).count(), 1);
            assert_eq!(rule_for(t).op_type, t);
        }
        assert_eq!(RULES.len(), OpType::ALL.len());
    }

    #[test]
    fn creates_file_agrees_with_op_type() {
        for r in RULES {
            assert_eq!(r.creates_file, r.op_type.creates_file());
        }
    }
}
