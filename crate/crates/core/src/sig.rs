//! Pluggable signature verification.
//!
//! The network assumes identity but prescribes no PKI, so signatures are an
//! opaque contract: a signer id, a message, a token, and a predicate. The
//! default scheme accepts tokens equal to a keyed digest of the message,
//! where the key is derived from the signer id the same way genesis derives
//! participant identity tokens.

use crate::digest::Digest;
use crate::ledger::genesis::verify_token_for;

pub trait SignatureScheme: Send + Sync {
    /// Produces the token `signer_id` attaches to `message`.
    fn sign(&self, signer_id: &str, message: &[u8]) -> Vec<u8>;

    /// Accept/reject predicate for a presented token.
    fn verify(&self, signer_id: &str, message: &[u8], token: &[u8]) -> bool;
}

/// Default scheme: `token = sha256("sig" || key(signer) || message)`.
#[derive(Debug, Default, Clone, Copy)]
pub struct KeyedDigestScheme;

impl SignatureScheme for KeyedDigestScheme {
    fn sign(&self, signer_id: &str, message: &[u8]) -> Vec<u8> {
        let key = verify_token_for(signer_id);
        Digest::of_parts(&[b"sig", &key, message]).0.to_vec()
    }

    fn verify(&self, signer_id: &str, message: &[u8], token: &[u8]) -> bool {
        self.sign(signer_id, message) == token
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_verify_round_trip() {
        let scheme = KeyedDigestScheme;
        let token = scheme.sign("peer0", b"message");
        assert!(scheme.verify("peer0", b"message", &token));
        assert!(!scheme.verify("peer1", b"message", &token));
        assert!(!scheme.verify("peer0", b"other", &token));
        assert!(!scheme.verify("peer0", b"message", b"junk"));
    }
}
