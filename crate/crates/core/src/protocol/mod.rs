//! Message-level protocol: new-drone inclusion, group-key delivery, and
//! two-swarm unification, run over the simulated network.
//!
//! Every message carries a fresh 128-bit nonce. Receivers remember
//! `(sender, nonce)` pairs and drop repeats, and every ciphertext binds
//! sender, receiver, and nonce as associated data.

mod core_network;
mod drone;
mod inclusion;
mod keys;
mod message;
mod session;
mod transcript;
mod unification;

pub use core_network::{open_cross_share, CoreNetwork, CrossIssueError};
pub use drone::{CrossCredential, Drone, DroneId, NonceCache, Party, Role, Swarm, SwarmId};
pub use inclusion::{run_inclusion, InclusionRun};
pub use keys::{associated_data, deliver_group_key, derive_pairwise_key, open_group_key};
pub use message::{MessageError, MessageKind, Payload, ProtocolMessage};
pub use session::{RunOptions, RunResult};
pub use transcript::{AuthTranscript, Disposition, MessageRejection, Outcome, RejectReason, TranscriptEntry};
pub use unification::run_unification;

use crate::algebra::AlgebraError;
use crate::codec::FrameError;
use crate::shares::ShareError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("need {needed} guards, swarm has {available}")]
    NotEnoughGuards { needed: usize, available: usize },
    #[error("candidate identifier collides with an existing member")]
    DuplicateIdentifier,
    #[error("candidate {0} does not belong to the target swarm")]
    WrongSwarm(DroneId),
    #[error("cannot unify swarm {0} with itself")]
    SameSwarm(SwarmId),
    #[error("guard holds no group key")]
    MissingGroupKey,
    #[error("unexpected {0} message")]
    UnexpectedMessage(MessageKind),
    #[error("authenticated decryption failed")]
    AuthenticationFailed,
    #[error("cross-share issuance denied: {0}")]
    CrossIssueDenied(#[from] CrossIssueError),
    #[error(transparent)]
    Message(#[from] MessageError),
    #[error(transparent)]
    Share(#[from] ShareError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

impl From<FrameError> for ProtocolError {
    fn from(e: FrameError) -> Self {
        ProtocolError::Share(ShareError::Frame(e))
    }
}
