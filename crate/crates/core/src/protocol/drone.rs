use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::PrimeOrderGroup;
use crate::codec::{FrameError, Reader};
use crate::seal::Nonce;
use crate::shares::{public_share, GroupCommitment, PrivateShare, PublicShare};

use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwarmId(pub u32);

/// A drone's identity: its swarm and its share identifier `x` (as an integer;
/// the share's scalar is `x mod q`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DroneId {
    pub swarm: SwarmId,
    pub x: u64,
}

impl DroneId {
    pub fn new(swarm: SwarmId, x: u64) -> Self {
        Self { swarm, x }
    }
}

/// Anything that can send or receive a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Party {
    Drone(DroneId),
    Core,
    /// All members of a swarm; only used as a receiver in associated data.
    Broadcast(SwarmId),
}

impl Party {
    pub fn encode(&self, out: &mut Vec<u8>) {
        match self {
            Party::Drone(id) => {
                out.push(0x01);
                out.extend_from_slice(&id.swarm.0.to_be_bytes());
                out.extend_from_slice(&id.x.to_be_bytes());
            }
            Party::Core => out.push(0x02),
            Party::Broadcast(s) => {
                out.push(0x03);
                out.extend_from_slice(&s.0.to_be_bytes());
            }
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.encode(&mut out);
        out
    }

    pub(crate) fn decode(r: &mut Reader<'_>) -> Result<Self, FrameError> {
        match r.u8()? {
            0x01 => {
                let swarm = SwarmId(r.u32()?);
                let x = r.u64()?;
                Ok(Party::Drone(DroneId { swarm, x }))
            }
            0x02 => Ok(Party::Core),
            0x03 => Ok(Party::Broadcast(SwarmId(r.u32()?))),
            _ => Err(FrameError),
        }
    }
}

impl fmt::Display for SwarmId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

impl fmt::Display for DroneId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.swarm, self.x)
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Party::Drone(id) => id.fmt(f),
            Party::Core => f.write_str("core"),
            Party::Broadcast(s) => write!(f, "{s}:*"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Guard,
    Member,
    NewArrival,
}

/// A share of another swarm's polynomial, issued by the core for unification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrossCredential<G: PrimeOrderGroup> {
    pub swarm: SwarmId,
    pub share: PrivateShare<G>,
    pub public: PublicShare<G>,
    pub commitment: GroupCommitment<G>,
}

/// Per-receiver memory of `(sender, nonce)` pairs already accepted.
#[derive(Debug, Clone, Default)]
pub struct NonceCache(BTreeSet<(Party, Nonce)>);

impl NonceCache {
    /// Records the pair; `false` if it was already seen.
    pub fn check_and_insert(&mut self, sender: Party, nonce: Nonce) -> bool {
        self.0.insert((sender, nonce))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct Drone<G: PrimeOrderGroup> {
    pub id: DroneId,
    pub role: Role,
    pub share: PrivateShare<G>,
    pub public: PublicShare<G>,
    /// The commitment `Q` of the swarm whose key this drone uses.
    pub commitment: GroupCommitment<G>,
    pub group_key: Option<G::Scalar>,
    /// The core network's public point, for cross-share requests.
    pub core_public: G::Point,
    pub cross: Option<CrossCredential<G>>,
    pub nonces: NonceCache,
}

impl<G: PrimeOrderGroup> Drone<G> {
    pub fn new(
        group: &G,
        id: DroneId,
        role: Role,
        share: PrivateShare<G>,
        commitment: GroupCommitment<G>,
        core_public: G::Point,
    ) -> Self {
        Self {
            id,
            role,
            public: public_share(group, &share),
            share,
            commitment,
            group_key: None,
            core_public,
            cross: None,
            nonces: NonceCache::default(),
        }
    }

    pub fn party(&self) -> Party {
        Party::Drone(self.id)
    }

    /// The credential this drone presents when authenticating to `swarm`.
    pub fn credential_for(&self, swarm: SwarmId) -> Option<(PrivateShare<G>, PublicShare<G>)> {
        if self.id.swarm == swarm {
            return Some((self.share, self.public));
        }
        self.cross.filter(|c| c.swarm == swarm).map(|c| (c.share, c.public))
    }
}

#[derive(Debug, Clone)]
pub struct Swarm<G: PrimeOrderGroup> {
    pub id: SwarmId,
    pub threshold: usize,
    pub commitment: GroupCommitment<G>,
    pub drones: BTreeMap<u64, Drone<G>>,
    pub guards: BTreeSet<u64>,
}

impl<G: PrimeOrderGroup> Swarm<G> {
    /// The `t − 1` lowest-identifier guards, which run every verification.
    pub fn participating_guards(&self) -> Result<Vec<DroneId>, ProtocolError> {
        let needed = self.threshold - 1;
        if self.guards.len() < needed {
            return Err(ProtocolError::NotEnoughGuards { needed, available: self.guards.len() });
        }
        Ok(self.guards.iter().take(needed).map(|x| DroneId::new(self.id, *x)).collect())
    }

    pub fn drone(&self, x: u64) -> Option<&Drone<G>> {
        self.drones.get(&x)
    }

    pub fn len(&self) -> usize {
        self.drones.len()
    }

    pub fn is_empty(&self) -> bool {
        self.drones.is_empty()
    }

    /// The key every member holds, if they all agree.
    pub fn common_key(&self) -> Option<G::Scalar> {
        let mut keys = self.drones.values().map(|d| d.group_key);
        let first = keys.next()??;
        keys.all(|k| k == Some(first)).then_some(first)
    }
}
