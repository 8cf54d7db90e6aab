//! The core network: dealer for every swarm's polynomial and issuer of
//! cross-swarm shares.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::algebra::PrimeOrderGroup;
use crate::codec::{put_lp, Reader};
use crate::seal::{Nonce, SymmetricKey};
use crate::shares::{public_share, Dealer, GroupCommitment, GroupPolynomial, PrivateShare, PublicShare, ShareError};

use super::drone::{CrossCredential, Drone, DroneId, NonceCache, Party, Role, Swarm, SwarmId};
use super::keys::associated_data;
use super::ProtocolError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum CrossIssueError {
    #[error("requester {0} is not registered with the core")]
    UnknownRequester(DroneId),
    #[error("requester {0} is not a guard")]
    NotAGuard(DroneId),
    #[error("no polynomial held for swarm {0}")]
    UnknownSwarm(SwarmId),
}

#[derive(Debug, Clone)]
struct Registration<G: PrimeOrderGroup> {
    public: PublicShare<G>,
    guard: bool,
}

#[derive(Debug, Clone)]
pub struct CoreNetwork<G: PrimeOrderGroup> {
    group: G,
    dealers: BTreeMap<SwarmId, Dealer<G>>,
    secret: G::Scalar,
    public: G::Point,
    registry: BTreeMap<DroneId, Registration<G>>,
    next_swarm: u32,
    pub nonces: NonceCache,
}

impl<G: PrimeOrderGroup> CoreNetwork<G> {
    pub fn new<R: RngCore + ?Sized>(group: G, rng: &mut R) -> Self {
        let secret = group.random_scalar(rng);
        Self {
            group,
            dealers: BTreeMap::new(),
            public: group.mul_base(&secret),
            secret,
            registry: BTreeMap::new(),
            next_swarm: 1,
            nonces: NonceCache::default(),
        }
    }

    pub fn group(&self) -> &G {
        &self.group
    }

    /// The core's public point, given to every drone at provisioning.
    pub fn public_point(&self) -> G::Point {
        self.public
    }

    pub fn dealer(&self, swarm: SwarmId) -> Option<&Dealer<G>> {
        self.dealers.get(&swarm)
    }

    /// Forms a swarm with a fresh threshold-`t` polynomial: `members` drones,
    /// the first `guards` of which (lowest identifiers) are guards. Every
    /// member receives its share, the commitment `Q`, and the group key.
    pub fn provision_swarm<R: RngCore + ?Sized>(
        &mut self,
        threshold: usize,
        members: usize,
        guards: usize,
        rng: &mut R,
    ) -> Result<Swarm<G>, ShareError> {
        let poly = GroupPolynomial::generate(&self.group, threshold, rng)?;
        Ok(self.provision_swarm_with(poly, members, guards))
    }

    /// As [`CoreNetwork::provision_swarm`] with a given polynomial. Two swarms
    /// provisioned from the same polynomial share a key and commitment.
    pub fn provision_swarm_with(&mut self, poly: GroupPolynomial<G>, members: usize, guards: usize) -> Swarm<G> {
        let id = SwarmId(self.next_swarm);
        self.next_swarm += 1;
        let key = poly.group_key();
        let threshold = poly.threshold();
        let mut dealer = Dealer::new(self.group, poly);
        let commitment = dealer.commitment();
        let mut swarm = Swarm { id, threshold, commitment, drones: BTreeMap::new(), guards: BTreeSet::new() };
        for i in 0..members {
            let (x, share) = dealer.issue_next_with_id();
            let role = if i < guards { Role::Guard } else { Role::Member };
            let mut drone = Drone::new(&self.group, DroneId::new(id, x), role, share, commitment, self.public);
            drone.group_key = Some(key);
            self.registry.insert(drone.id, Registration { public: drone.public, guard: role == Role::Guard });
            if role == Role::Guard {
                swarm.guards.insert(x);
            }
            swarm.drones.insert(x, drone);
        }
        self.dealers.insert(id, dealer);
        swarm
    }

    /// A new drone enrolled for `swarm`: it holds a genuine share and `Q`, but
    /// not the group key, which it obtains by passing inclusion.
    pub fn enroll_new_drone(&mut self, swarm: SwarmId) -> Result<Drone<G>, ProtocolError> {
        let dealer = self.dealers.get_mut(&swarm).ok_or(CrossIssueError::UnknownSwarm(swarm))?;
        let (x, share) = dealer.issue_next_with_id();
        let commitment = dealer.commitment();
        let drone = Drone::new(&self.group, DroneId::new(swarm, x), Role::NewArrival, share, commitment, self.public);
        self.registry.insert(drone.id, Registration { public: drone.public, guard: false });
        Ok(drone)
    }

    /// A drone claiming the next identifier of `swarm` with a made-up share.
    /// Nothing is registered.
    pub fn impostor<R: RngCore + ?Sized>(&self, swarm: SwarmId, rng: &mut R) -> Result<Drone<G>, ProtocolError> {
        let dealer = self.dealers.get(&swarm).ok_or(CrossIssueError::UnknownSwarm(swarm))?;
        let x = dealer.peek_next_id();
        let sx = self.group.scalar_from_u64(x);
        let genuine = dealer.polynomial().evaluate(sx);
        let y = loop {
            let y = self.group.random_scalar(rng);
            if y != genuine {
                break y;
            }
        };
        let share = PrivateShare { x: sx, y };
        Ok(Drone::new(&self.group, DroneId::new(swarm, x), Role::NewArrival, share, dealer.commitment(), self.public))
    }

    /// Key shared between the core and a registered drone: `KDF(c · Y_drone)`,
    /// which the drone computes as `KDF(y · C)`.
    fn requester_key(&self, public: &PublicShare<G>) -> SymmetricKey {
        SymmetricKey::from_point(&self.group, &self.group.mul(&self.secret, &public.point))
    }

    /// Issues `requester` a fresh share of `target`'s polynomial, sealed for it.
    pub fn core_issue_cross_share(
        &mut self,
        requester: DroneId,
        target: SwarmId,
        nonce: Nonce,
    ) -> Result<Vec<u8>, CrossIssueError> {
        let reg = self.registry.get(&requester).ok_or(CrossIssueError::UnknownRequester(requester))?;
        if !reg.guard {
            return Err(CrossIssueError::NotAGuard(requester));
        }
        let key = self.requester_key(&reg.public);
        let dealer = self.dealers.get_mut(&target).ok_or(CrossIssueError::UnknownSwarm(target))?;
        let share = dealer.issue_next();
        let mut plain = Vec::new();
        put_lp(&mut plain, &share.to_bytes(&self.group));
        put_lp(&mut plain, &dealer.commitment().to_bytes(&self.group));
        let aad = associated_data(&Party::Core, &Party::Drone(requester), &nonce);
        Ok(key.seal(&nonce, &aad, &plain))
    }
}

/// Opens a cross-issue response on the requesting guard.
pub fn open_cross_share<G: PrimeOrderGroup>(
    group: &G,
    guard: &Drone<G>,
    target: SwarmId,
    nonce: &Nonce,
    ciphertext: &[u8],
) -> Result<CrossCredential<G>, ProtocolError> {
    let key = SymmetricKey::from_point(group, &group.mul(&guard.share.y, &guard.core_public));
    let aad = associated_data(&Party::Core, &guard.party(), nonce);
    let plain = key.open(nonce, &aad, ciphertext).map_err(|_| ProtocolError::AuthenticationFailed)?;
    let mut r = Reader::new(&plain);
    let share = PrivateShare::from_bytes(group, r.lp()?)?;
    let commitment = GroupCommitment::from_bytes(group, r.lp()?)?;
    r.finish()?;
    Ok(CrossCredential { swarm: target, share, public: public_share(group, &share), commitment })
}
