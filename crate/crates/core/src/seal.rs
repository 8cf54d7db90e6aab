//! Key derivation and authenticated encryption.
//!
//! Keys are the SHA-256 digest of a canonical group encoding. Sealing uses
//! ChaCha20-Poly1305; the 96-bit AEAD nonce is the first 12 bytes of the
//! message's 128-bit nonce, and callers pass the associated data.

use alloc::vec::Vec;

use chacha20poly1305::aead::{Aead, KeyInit, Payload};
use chacha20poly1305::{ChaCha20Poly1305, Key, Nonce as AeadNonce};
use sha2::{Digest, Sha256};

use crate::algebra::PrimeOrderGroup;

/// 128-bit message nonce.
pub type Nonce = [u8; 16];

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("authenticated decryption failed")]
pub struct SealError;

/// A 256-bit symmetric key.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricKey([u8; 32]);

impl core::fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("SymmetricKey(..)")
    }
}

impl SymmetricKey {
    pub fn from_bytes(bytes: [u8; 32]) -> Self {
        Self(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }

    pub fn from_hash(material: &[u8]) -> Self {
        Self(Sha256::digest(material).into())
    }

    /// `SHA-256(encode(point))`.
    pub fn from_point<G: PrimeOrderGroup>(group: &G, point: &G::Point) -> Self {
        Self::from_hash(&group.encode_point(point))
    }

    /// `SHA-256(encode(scalar))`, used when a group key encrypts swarm traffic.
    pub fn from_scalar<G: PrimeOrderGroup>(group: &G, scalar: &G::Scalar) -> Self {
        Self::from_hash(&group.encode_scalar(scalar))
    }

    pub fn seal(&self, nonce: &Nonce, aad: &[u8], plaintext: &[u8]) -> Vec<u8> {
        let cipher = ChaCha20Poly1305::new(Key::from_slice(&self.0));
        cipher
            .encrypt(AeadNonce::from_slice(&nonce[..12]), Payload { msg: plaintext, aad })
            .expect("ChaCha20-Poly1305 encryption is infallible for in-memory buffers")
    }

    pub fn open(&self, nonce: &Nonce, aad: &[u8], ciphertext: &[u8]) -> Result<Vec<u8>, SealError> {
        let cipher = ChaCha20Poly1305::new(Key::from_slice(&self.0));
        cipher.decrypt(AeadNonce::from_slice(&nonce[..12]), Payload { msg: ciphertext, aad }).map_err(|_| SealError)
    }
}

pub fn sha256(data: &[u8]) -> [u8; 32] {
    Sha256::digest(data).into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seal_open_round_trip_and_tamper() {
        let key = SymmetricKey::from_hash(b"k");
        let nonce = [7u8; 16];
        let ct = key.seal(&nonce, b"aad", b"group key");
        assert_eq!(key.open(&nonce, b"aad", &ct).unwrap(), b"group key");
        assert_eq!(key.open(&nonce, b"other", &ct), Err(SealError));
        let mut flipped = ct.clone();
        flipped[0] ^= 1;
        assert_eq!(key.open(&nonce, b"aad", &flipped), Err(SealError));
        assert_eq!(SymmetricKey::from_hash(b"j").open(&nonce, b"aad", &ct), Err(SealError));
        let mut other_nonce = nonce;
        other_nonce[3] ^= 1;
        assert_eq!(key.open(&other_nonce, b"aad", &ct), Err(SealError));
    }
}
