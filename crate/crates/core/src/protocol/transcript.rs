use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use crate::codec::Hex;
use crate::seal::sha256;
use crate::simnet::engine::SimTime;

use super::drone::Party;
use super::message::ProtocolMessage;

/// Why a receiver discarded a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MessageRejection {
    /// `(sender, nonce)` already seen by this receiver.
    Replay,
    /// Payload did not parse for its kind.
    Malformed,
    /// Not expected by the receiver in its current state.
    Unexpected,
    /// AEAD decryption or a key check failed.
    AuthenticationFailed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Disposition {
    Accepted,
    Rejected(MessageRejection),
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Disposition::Accepted => "ok",
            Disposition::Rejected(MessageRejection::Replay) => "rejected:replay",
            Disposition::Rejected(MessageRejection::Malformed) => "rejected:malformed",
            Disposition::Rejected(MessageRejection::Unexpected) => "rejected:unexpected",
            Disposition::Rejected(MessageRejection::AuthenticationFailed) => "rejected:auth",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RejectReason {
    /// At least one guard's Lagrange check failed.
    VerificationFailed,
    /// Verification passed but the group key never arrived intact.
    KeyDeliveryFailed,
    /// The core refused or the cross share could not be opened.
    CrossIssueFailed,
    /// The run stopped before every guard reached a verdict.
    Incomplete,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectReason::VerificationFailed => "verification-failed",
            RejectReason::KeyDeliveryFailed => "key-delivery-failed",
            RejectReason::CrossIssueFailed => "cross-issue-failed",
            RejectReason::Incomplete => "incomplete",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    Rejected(RejectReason),
}

impl Outcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Outcome::Accepted)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Accepted => f.write_str("accepted"),
            Outcome::Rejected(r) => write!(f, "rejected({r})"),
        }
    }
}

/// One delivered message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub at: SimTime,
    pub receiver: Party,
    pub message: ProtocolMessage,
    /// Re-injected by an adversary.
    pub injected: bool,
    pub disposition: Disposition,
}

/// Append-only log of a run, in delivery order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AuthTranscript {
    entries: Vec<TranscriptEntry>,
    outcome: Option<Outcome>,
}

impl AuthTranscript {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, entry: TranscriptEntry) {
        self.entries.push(entry);
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    pub fn outcome(&self) -> Option<Outcome> {
        self.outcome
    }

    /// Sets the outcome.
    ///
    /// # Panics
    /// If an outcome was already set.
    pub fn set_outcome(&mut self, outcome: Outcome) {
        assert!(self.outcome.is_none(), "transcript outcome set twice");
        self.outcome = Some(outcome);
    }

    /// Appends another transcript's entries (used to concatenate runs).
    pub fn extend_entries(&mut self, other: &AuthTranscript) {
        self.entries.extend_from_slice(&other.entries);
    }

    /// One line per delivery:
    /// `t_us=… kind=… from=… to=… nonce=… digest=… status=…`, then a final
    /// `outcome=…` line. The digest is the first 8 bytes of SHA-256(payload).
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let digest = sha256(&e.message.payload);
            let _ = writeln!(
                out,
                "t_us={}.{:03} kind={} from={} to={} nonce={} digest={} status={}{}",
                e.at.as_micros(),
                e.at.subsec_nanos() % 1000,
                e.message.kind,
                e.message.sender,
                e.receiver,
                Hex(&e.message.nonce),
                Hex(&digest[..8]),
                e.disposition,
                if e.injected { " injected" } else { "" },
            );
        }
        if let Some(o) = self.outcome {
            let _ = writeln!(out, "outcome={o}");
        }
        out
    }
}
