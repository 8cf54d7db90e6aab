//! Pairwise ECDH keys and sealed group-key delivery.

use alloc::vec::Vec;

use crate::algebra::PrimeOrderGroup;
use crate::seal::{Nonce, SymmetricKey};
use crate::shares::{PrivateShare, PublicShare};

use super::drone::{Drone, Party};
use super::message::{Payload, ProtocolMessage};
use super::ProtocolError;

/// `KDF(encode(my.y · their.Y))`; both ends of a pair derive the same key.
pub fn derive_pairwise_key<G: PrimeOrderGroup>(
    group: &G,
    my: &PrivateShare<G>,
    their: &PublicShare<G>,
) -> SymmetricKey {
    SymmetricKey::from_point(group, &group.mul(&my.y, &their.point))
}

/// Associated data binding a ciphertext to its sender, receiver, and nonce.
pub fn associated_data(sender: &Party, receiver: &Party, nonce: &Nonce) -> Vec<u8> {
    let mut aad = sender.to_bytes();
    receiver.encode(&mut aad);
    aad.extend_from_slice(nonce);
    aad
}

/// Seals `guard`'s group key for `recipient` under their pairwise key.
/// `guard_credential` is the share the guard verified with (its own swarm's).
pub fn deliver_group_key<G: PrimeOrderGroup>(
    group: &G,
    guard: &Drone<G>,
    recipient: Party,
    recipient_public: &PublicShare<G>,
    nonce: Nonce,
) -> Result<ProtocolMessage, ProtocolError> {
    let key = guard.group_key.ok_or(ProtocolError::MissingGroupKey)?;
    let pairwise = derive_pairwise_key(group, &guard.share, recipient_public);
    let sender = guard.party();
    let ciphertext = pairwise.seal(&nonce, &associated_data(&sender, &recipient, &nonce), &group.encode_scalar(&key));
    let payload = Payload::EncryptedGroupKey { swarm: guard.id.swarm, guard: guard.public, ciphertext };
    Ok(ProtocolMessage::new(group, sender, nonce, &payload))
}

/// Opens an `EncryptedGroupKey` addressed to `me`, using `my` share.
pub fn open_group_key<G: PrimeOrderGroup>(
    group: &G,
    my: &PrivateShare<G>,
    me: Party,
    msg: &ProtocolMessage,
) -> Result<G::Scalar, ProtocolError> {
    let Payload::EncryptedGroupKey { guard, ciphertext, .. } = msg.payload(group)? else {
        return Err(ProtocolError::UnexpectedMessage(msg.kind));
    };
    let pairwise = derive_pairwise_key(group, my, &guard);
    let plain = pairwise
        .open(&msg.nonce, &associated_data(&msg.sender, &me, &msg.nonce), &ciphertext)
        .map_err(|_| ProtocolError::AuthenticationFailed)?;
    Ok(group.decode_scalar(&plain)?)
}
