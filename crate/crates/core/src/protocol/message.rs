//! Wire format.
//!
//! A message is `kind (1 byte) ‖ sender ‖ nonce (16 bytes) ‖ u16-length ‖ payload`.
//! Senders encode as `0x01 ‖ swarm (u32) ‖ x (u64)` for drones, `0x02` for the
//! core, `0x03 ‖ swarm` for a swarm broadcast address. Payload fields are the
//! fixed-width group encodings, length-prefixed.

use alloc::vec::Vec;
use core::fmt;

use crate::algebra::PrimeOrderGroup;
use crate::codec::{put_lp, FrameError, Reader};
use crate::seal::Nonce;
use crate::shares::{PublicShare, ShareError};

use super::drone::{Party, SwarmId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
#[repr(u8)]
pub enum MessageKind {
    SharePublish = 1,
    AuthVerdict = 2,
    KeyAgreementInit = 3,
    EncryptedGroupKey = 4,
    CrossIssueRequest = 5,
    CrossIssueResponse = 6,
    UnifiedKeyBroadcast = 7,
}

impl MessageKind {
    pub fn from_tag(tag: u8) -> Option<Self> {
        use MessageKind::*;
        Some(match tag {
            1 => SharePublish,
            2 => AuthVerdict,
            3 => KeyAgreementInit,
            4 => EncryptedGroupKey,
            5 => CrossIssueRequest,
            6 => CrossIssueResponse,
            7 => UnifiedKeyBroadcast,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        use MessageKind::*;
        match self {
            SharePublish => "share_publish",
            AuthVerdict => "auth_verdict",
            KeyAgreementInit => "key_agreement_init",
            EncryptedGroupKey => "encrypted_group_key",
            CrossIssueRequest => "cross_issue_request",
            CrossIssueResponse => "cross_issue_response",
            UnifiedKeyBroadcast => "unified_key_broadcast",
        }
    }
}

impl fmt::Display for MessageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MessageError {
    #[error("unknown message kind {0}")]
    UnknownKind(u8),
    #[error("payload does not match its kind")]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Share(#[from] ShareError),
}

/// A framed message. The payload is kept as bytes so it can be inspected,
/// tampered with, and digested without knowing the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProtocolMessage {
    pub kind: MessageKind,
    pub sender: Party,
    pub nonce: Nonce,
    pub payload: Vec<u8>,
}

impl ProtocolMessage {
    pub fn new<G: PrimeOrderGroup>(group: &G, sender: Party, nonce: Nonce, payload: &Payload<G>) -> Self {
        Self { kind: payload.kind(), sender, nonce, payload: payload.encode(group) }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(1 + 13 + 16 + 2 + self.payload.len());
        out.push(self.kind as u8);
        self.sender.encode(&mut out);
        out.extend_from_slice(&self.nonce);
        put_lp(&mut out, &self.payload);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, MessageError> {
        let mut r = Reader::new(bytes);
        let tag = r.u8()?;
        let kind = MessageKind::from_tag(tag).ok_or(MessageError::UnknownKind(tag))?;
        let sender = Party::decode(&mut r)?;
        let mut nonce = [0u8; 16];
        nonce.copy_from_slice(r.take(16)?);
        let payload = r.lp()?.to_vec();
        r.finish()?;
        Ok(Self { kind, sender, nonce, payload })
    }

    pub fn payload<G: PrimeOrderGroup>(&self, group: &G) -> Result<Payload<G>, MessageError> {
        Payload::decode(group, self.kind, &self.payload)
    }
}

/// Typed message bodies. Every round-related payload names the swarm whose
/// polynomial the round is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload<G: PrimeOrderGroup> {
    /// A participant's public share for a verification round.
    SharePublish { swarm: SwarmId, share: PublicShare<G> },
    /// A guard's accept/reject decision, sent to the candidate and the deliverer.
    AuthVerdict { swarm: SwarmId, accepted: bool },
    /// The accepted candidate asks for the group key, naming its ECDH share.
    KeyAgreementInit { swarm: SwarmId, share: PublicShare<G> },
    /// The group key sealed under the guard–candidate pairwise key.
    EncryptedGroupKey { swarm: SwarmId, guard: PublicShare<G>, ciphertext: Vec<u8> },
    /// A guard asks the core for a share of `target`'s polynomial.
    CrossIssueRequest { target: SwarmId },
    /// The share and commitment of `target`, sealed for the requesting guard.
    CrossIssueResponse { target: SwarmId, ciphertext: Vec<u8> },
    /// The unified key, sealed under the receiving swarm's current group key.
    UnifiedKeyBroadcast { swarm: SwarmId, ciphertext: Vec<u8> },
}

impl<G: PrimeOrderGroup> Payload<G> {
    pub fn kind(&self) -> MessageKind {
        match self {
            Payload::SharePublish { .. } => MessageKind::SharePublish,
            Payload::AuthVerdict { .. } => MessageKind::AuthVerdict,
            Payload::KeyAgreementInit { .. } => MessageKind::KeyAgreementInit,
            Payload::EncryptedGroupKey { .. } => MessageKind::EncryptedGroupKey,
            Payload::CrossIssueRequest { .. } => MessageKind::CrossIssueRequest,
            Payload::CrossIssueResponse { .. } => MessageKind::CrossIssueResponse,
            Payload::UnifiedKeyBroadcast { .. } => MessageKind::UnifiedKeyBroadcast,
        }
    }

    pub fn swarm(&self) -> SwarmId {
        match self {
            Payload::SharePublish { swarm, .. }
            | Payload::AuthVerdict { swarm, .. }
            | Payload::KeyAgreementInit { swarm, .. }
            | Payload::EncryptedGroupKey { swarm, .. }
            | Payload::UnifiedKeyBroadcast { swarm, .. } => *swarm,
            Payload::CrossIssueRequest { target } | Payload::CrossIssueResponse { target, .. } => *target,
        }
    }

    pub fn encode(&self, group: &G) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&self.swarm().0.to_be_bytes());
        match self {
            Payload::SharePublish { share, .. } | Payload::KeyAgreementInit { share, .. } => {
                put_lp(&mut out, &share.to_bytes(group));
            }
            Payload::AuthVerdict { accepted, .. } => out.push(u8::from(*accepted)),
            Payload::EncryptedGroupKey { guard, ciphertext, .. } => {
                put_lp(&mut out, &guard.to_bytes(group));
                put_lp(&mut out, ciphertext);
            }
            Payload::CrossIssueRequest { .. } => {}
            Payload::CrossIssueResponse { ciphertext, .. } | Payload::UnifiedKeyBroadcast { ciphertext, .. } => {
                put_lp(&mut out, ciphertext);
            }
        }
        out
    }

    pub fn decode(group: &G, kind: MessageKind, bytes: &[u8]) -> Result<Self, MessageError> {
        let mut r = Reader::new(bytes);
        let swarm = SwarmId(r.u32()?);
        let payload = match kind {
            MessageKind::SharePublish => {
                Payload::SharePublish { swarm, share: PublicShare::from_bytes(group, r.lp()?)? }
            }
            MessageKind::KeyAgreementInit => {
                Payload::KeyAgreementInit { swarm, share: PublicShare::from_bytes(group, r.lp()?)? }
            }
            MessageKind::AuthVerdict => {
                let accepted = match r.u8()? {
                    0 => false,
                    1 => true,
                    _ => return Err(FrameError.into()),
                };
                Payload::AuthVerdict { swarm, accepted }
            }
            MessageKind::EncryptedGroupKey => {
                let guard = PublicShare::from_bytes(group, r.lp()?)?;
                Payload::EncryptedGroupKey { swarm, guard, ciphertext: r.lp()?.to_vec() }
            }
            MessageKind::CrossIssueRequest => Payload::CrossIssueRequest { target: swarm },
            MessageKind::CrossIssueResponse => {
                Payload::CrossIssueResponse { target: swarm, ciphertext: r.lp()?.to_vec() }
            }
            MessageKind::UnifiedKeyBroadcast => Payload::UnifiedKeyBroadcast { swarm, ciphertext: r.lp()?.to_vec() },
        };
        r.finish()?;
        Ok(payload)
    }
}
