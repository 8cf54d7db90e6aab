//! The event-driven protocol runner shared by inclusion and unification.
//!
//! A *round* verifies one candidate against one swarm's commitment `Q`. Its
//! participants are the candidate (slot 0) and the swarm's `t − 1`
//! participating guards (slots `1..t`, ascending identifier). Every public
//! share is broadcast over the drone link to all round guards, including the
//! publisher itself, and each guard folds each share into its Lagrange sum
//! with one point multiplication.
//!
//! In the default sequential mode the guard in slot `j` publishes once it has
//! folded slot `j − 1`'s share, so shares go out one after another and every
//! guard reaches its verdict after `t · (drone link + point multiplication)`.
//! In parallel mode every participant publishes at once.
//!
//! After all guards accept, the candidate sends `KeyAgreementInit` to the
//! round's deliverer (its lowest guard), which answers with the group key
//! sealed under their pairwise ECDH key. The candidate checks `key · P = Q`.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::algebra::PrimeOrderGroup;
use crate::codec::{put_lp, Reader};
use crate::seal::{Nonce, SymmetricKey};
use crate::shares::{lagrange_coeffs_at_zero, GroupCommitment, PublicShare};
use crate::simnet::engine::{Engine, Link, OpCount, Reaction, Stamp, Tap};
use crate::simnet::latency::LatencyModel;

use super::core_network::{open_cross_share, CoreNetwork};
use super::drone::{Drone, DroneId, Party, Role, SwarmId};
use super::keys::{associated_data, deliver_group_key, open_group_key};
use super::message::{Payload, ProtocolMessage};
use super::transcript::{AuthTranscript, Disposition, MessageRejection, Outcome, RejectReason, TranscriptEntry};

/// Knobs for a protocol run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub latency: LatencyModel,
    /// All participants publish their shares at once instead of in slot order.
    pub parallel_guards: bool,
    /// Unification only: also verify swarm B's designated guard under swarm A's
    /// polynomial before B releases its key.
    pub mutual: bool,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub outcome: Outcome,
    pub transcript: AuthTranscript,
    /// When the last guard verdict was reached: the authentication time.
    pub authenticated: Stamp,
    /// When the last drone came to hold the resulting key.
    pub completed: Stamp,
    pub ops: OpCount,
    pub transmissions: u32,
}

pub(crate) type Net<'t> = Engine<'t, Party, ProtocolMessage>;
pub(crate) type NetTap<'t> = dyn Tap<Party, ProtocolMessage> + 't;

pub(crate) fn link(a: &Party, b: &Party) -> Link {
    match (a, b) {
        (Party::Drone(_), Party::Drone(_)) => Link::Radio,
        (Party::Core, Party::Core) => Link::Local,
        _ => Link::Cellular,
    }
}

#[derive(Debug, Clone)]
pub(crate) struct RoundSpec<G: PrimeOrderGroup> {
    pub swarm: SwarmId,
    pub threshold: usize,
    pub commitment: GroupCommitment<G>,
    pub candidate: DroneId,
    pub guards: Vec<DroneId>,
    pub deliver_key: bool,
    /// The deliverer withholds the key until it has itself been accepted in
    /// the round for this swarm.
    pub gate: Option<SwarmId>,
}

impl<G: PrimeOrderGroup> RoundSpec<G> {
    fn deliverer(&self) -> DroneId {
        self.guards[0]
    }

    fn slot_of(&self, party: &Party) -> Option<usize> {
        let Party::Drone(id) = party else { return None };
        if *id == self.candidate {
            return Some(0);
        }
        self.guards.iter().position(|g| g == id).map(|i| i + 1)
    }

    fn guard_parties(&self) -> Vec<Party> {
        self.guards.iter().map(|g| Party::Drone(*g)).collect()
    }
}

#[derive(Debug, Clone)]
struct GuardRound<G: PrimeOrderGroup> {
    slot: usize,
    /// `(x_i, λ_i)` for the round's identifier set, once the candidate's
    /// identifier is known; empty if the set is invalid.
    weights: Option<Vec<(G::Scalar, G::Scalar)>>,
    received: BTreeSet<usize>,
    pending: Vec<PublicShare<G>>,
    folded: BTreeSet<usize>,
    pending_slots: Vec<usize>,
    sum: G::Point,
    tainted: bool,
    published: bool,
    verdict: Option<bool>,
    verdict_at: Option<Stamp>,
    candidate_share: Option<PublicShare<G>>,
    peer_verdicts: BTreeMap<DroneId, bool>,
    key_requested: bool,
    delivered: bool,
}

#[derive(Debug, Clone)]
struct CandidateRound<G: PrimeOrderGroup> {
    verdicts: BTreeMap<DroneId, bool>,
    concluded: Option<bool>,
    key_requested: bool,
    key: Option<G::Scalar>,
}

impl<G: PrimeOrderGroup> Default for CandidateRound<G> {
    fn default() -> Self {
        Self { verdicts: BTreeMap::new(), concluded: None, key_requested: false, key: None }
    }
}

/// Unification bookkeeping.
#[derive(Debug, Clone)]
pub(crate) struct MergePlan {
    pub a: SwarmId,
    pub b: SwarmId,
    pub d_a: DroneId,
    /// Swarm A members other than `d_a`, who receive the unified key.
    pub a_members: Vec<DroneId>,
}

enum Mark {
    Verdict(SwarmId, DroneId),
    Adopted(DroneId),
}

pub(crate) struct Session<'s, G: PrimeOrderGroup> {
    group: G,
    pub drones: BTreeMap<DroneId, Drone<G>>,
    core: Option<&'s mut CoreNetwork<G>>,
    rounds: BTreeMap<SwarmId, RoundSpec<G>>,
    guards: BTreeMap<(SwarmId, DroneId), GuardRound<G>>,
    candidates: BTreeMap<SwarmId, CandidateRound<G>>,
    plan: Option<MergePlan>,
    parallel: bool,
    rng: &'s mut dyn RngCore,
    transcript: AuthTranscript,
    adopted: BTreeMap<DroneId, Stamp>,
    cross_failed: bool,
    delivery_failed: bool,
}

impl<'s, G: PrimeOrderGroup> Session<'s, G> {
    pub fn new(
        group: G,
        drones: BTreeMap<DroneId, Drone<G>>,
        core: Option<&'s mut CoreNetwork<G>>,
        parallel: bool,
        rng: &'s mut dyn RngCore,
    ) -> Self {
        Self {
            group,
            drones,
            core,
            rounds: BTreeMap::new(),
            guards: BTreeMap::new(),
            candidates: BTreeMap::new(),
            plan: None,
            parallel,
            rng,
            transcript: AuthTranscript::new(),
            adopted: BTreeMap::new(),
            cross_failed: false,
            delivery_failed: false,
        }
    }

    pub fn add_round(&mut self, spec: RoundSpec<G>) {
        for (i, g) in spec.guards.iter().enumerate() {
            self.guards.insert(
                (spec.swarm, *g),
                GuardRound {
                    slot: i + 1,
                    weights: None,
                    received: BTreeSet::new(),
                    pending: Vec::new(),
                    folded: BTreeSet::new(),
                    pending_slots: Vec::new(),
                    sum: self.group.identity(),
                    tainted: false,
                    published: false,
                    verdict: None,
                    verdict_at: None,
                    candidate_share: None,
                    peer_verdicts: BTreeMap::new(),
                    key_requested: false,
                    delivered: false,
                },
            );
        }
        self.candidates.insert(spec.swarm, CandidateRound::default());
        self.rounds.insert(spec.swarm, spec);
    }

    pub fn set_plan(&mut self, plan: MergePlan) {
        self.plan = Some(plan);
    }

    fn nonce(&mut self) -> Nonce {
        let mut n = [0u8; 16];
        self.rng.fill_bytes(&mut n);
        n
    }

    fn message(&mut self, sender: Party, payload: &Payload<G>) -> ProtocolMessage {
        let nonce = self.nonce();
        ProtocolMessage::new(&self.group, sender, nonce, payload)
    }

    /// The candidate's opening move for `swarm`'s round.
    pub fn candidate_publish(&mut self, swarm: SwarmId) -> Reaction<Party, ProtocolMessage> {
        let spec = &self.rounds[&swarm];
        let to = spec.guard_parties();
        let cand = spec.candidate;
        let Some((_, public)) = self.drones[&cand].credential_for(swarm) else {
            return Reaction::idle();
        };
        let msg = self.message(Party::Drone(cand), &Payload::SharePublish { swarm, share: public });
        Reaction::idle().send(to, msg)
    }

    fn guard_publish(&mut self, swarm: SwarmId, guard: DroneId) -> Reaction<Party, ProtocolMessage> {
        let to = self.rounds[&swarm].guard_parties();
        let share = self.drones[&guard].public;
        self.guards.get_mut(&(swarm, guard)).expect("guard in round").published = true;
        let msg = self.message(Party::Drone(guard), &Payload::SharePublish { swarm, share });
        Reaction::idle().send(to, msg)
    }

    /// Opening moves at time zero.
    pub fn kickoff(&mut self, net: &mut Net<'_>, starts: Vec<(Party, Reaction<Party, ProtocolMessage>)>) {
        for (party, r) in starts {
            net.react(&party, Stamp::ZERO, r);
        }
        if self.parallel {
            let all: Vec<(SwarmId, DroneId)> = self.guards.keys().copied().collect();
            for (swarm, guard) in all {
                let r = self.guard_publish(swarm, guard);
                net.react(&Party::Drone(guard), Stamp::ZERO, r);
            }
        }
    }

    pub fn cross_request(&mut self, requester: DroneId, target: SwarmId) -> Reaction<Party, ProtocolMessage> {
        let msg = self.message(Party::Drone(requester), &Payload::CrossIssueRequest { target });
        Reaction::idle().send(vec![Party::Core], msg)
    }

    /// Drives the engine to quiescence.
    pub fn run(&mut self, net: &mut Net<'_>) {
        while let Some(d) = net.next_delivery() {
            let mut marks = Vec::new();
            let (disposition, reaction) = self.handle(&d.to, &d.msg, &mut marks);
            self.transcript.push(TranscriptEntry {
                at: d.stamp.at,
                receiver: d.to,
                message: d.msg,
                injected: d.injected,
                disposition,
            });
            let times = net.react(&d.to, d.stamp, reaction);
            for m in marks {
                match m {
                    Mark::Verdict(swarm, guard) => {
                        if let Some(g) = self.guards.get_mut(&(swarm, guard)) {
                            g.verdict_at = Some(times.sent);
                        }
                    }
                    Mark::Adopted(id) => {
                        self.adopted.insert(id, times.sent);
                    }
                }
            }
        }
    }

    fn handle(
        &mut self,
        to: &Party,
        msg: &ProtocolMessage,
        marks: &mut Vec<Mark>,
    ) -> (Disposition, Reaction<Party, ProtocolMessage>) {
        let fresh = match to {
            Party::Drone(id) => match self.drones.get_mut(id) {
                Some(d) => d.nonces.check_and_insert(msg.sender, msg.nonce),
                None => return (Disposition::Rejected(MessageRejection::Unexpected), Reaction::idle()),
            },
            Party::Core => match self.core.as_deref_mut() {
                Some(c) => c.nonces.check_and_insert(msg.sender, msg.nonce),
                None => return (Disposition::Rejected(MessageRejection::Unexpected), Reaction::idle()),
            },
            Party::Broadcast(_) => return (Disposition::Rejected(MessageRejection::Unexpected), Reaction::idle()),
        };
        if !fresh {
            return (Disposition::Rejected(MessageRejection::Replay), Reaction::idle());
        }
        let Ok(payload) = msg.payload(&self.group) else {
            return (Disposition::Rejected(MessageRejection::Malformed), Reaction::idle());
        };
        let result = match (to, payload) {
            (Party::Core, Payload::CrossIssueRequest { target }) => self.on_cross_request(msg, target),
            (Party::Drone(me), Payload::SharePublish { swarm, share }) => self.on_share(*me, msg, swarm, share, marks),
            (Party::Drone(me), Payload::AuthVerdict { swarm, accepted }) => self.on_verdict(*me, msg, swarm, accepted),
            (Party::Drone(me), Payload::KeyAgreementInit { swarm, share }) => {
                self.on_key_request(*me, msg, swarm, share)
            }
            (Party::Drone(me), Payload::EncryptedGroupKey { swarm, .. }) => self.on_group_key(*me, msg, swarm, marks),
            (Party::Drone(me), Payload::CrossIssueResponse { target, ciphertext }) => {
                self.on_cross_response(*me, msg, target, &ciphertext)
            }
            (Party::Drone(me), Payload::UnifiedKeyBroadcast { swarm, ciphertext }) => {
                self.on_unified_key(*me, msg, swarm, &ciphertext, marks)
            }
            _ => Err(MessageRejection::Unexpected),
        };
        match result {
            Ok(r) => (Disposition::Accepted, r),
            Err(why) => (Disposition::Rejected(why), Reaction::idle()),
        }
    }

    fn on_cross_request(
        &mut self,
        msg: &ProtocolMessage,
        target: SwarmId,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let Party::Drone(requester) = msg.sender else {
            return Err(MessageRejection::Unexpected);
        };
        let nonce = self.nonce();
        let core = self.core.as_deref_mut().ok_or(MessageRejection::Unexpected)?;
        match core.core_issue_cross_share(requester, target, nonce) {
            Ok(ciphertext) => {
                let reply = ProtocolMessage::new(
                    &self.group,
                    Party::Core,
                    nonce,
                    &Payload::CrossIssueResponse { target, ciphertext },
                );
                // One multiplication for the core-side key agreement.
                Ok(Reaction { work: OpCount::ec(1), ..Reaction::idle() }.send(vec![msg.sender], reply))
            }
            Err(_) => {
                self.cross_failed = true;
                Err(MessageRejection::AuthenticationFailed)
            }
        }
    }

    fn on_cross_response(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        target: SwarmId,
        ciphertext: &[u8],
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        if msg.sender != Party::Core {
            return Err(MessageRejection::Unexpected);
        }
        let waiting = self.rounds.get(&target).is_some_and(|r| r.candidate == me);
        let drone = self.drones.get_mut(&me).ok_or(MessageRejection::Unexpected)?;
        if !waiting || drone.cross.is_some() {
            return Err(MessageRejection::Unexpected);
        }
        match open_cross_share(&self.group, drone, target, &msg.nonce, ciphertext) {
            Ok(cred) => drone.cross = Some(cred),
            Err(_) => {
                self.cross_failed = true;
                return Err(MessageRejection::AuthenticationFailed);
            }
        }
        let mut r = self.candidate_publish(target);
        r.work = OpCount::ec(1);
        Ok(r)
    }

    fn on_share(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        swarm: SwarmId,
        share: PublicShare<G>,
        marks: &mut Vec<Mark>,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let spec = self.rounds.get(&swarm).ok_or(MessageRejection::Unexpected)?.clone();
        let group = self.group;
        let state = self.guards.get_mut(&(swarm, me)).ok_or(MessageRejection::Unexpected)?;
        let slot = spec.slot_of(&msg.sender).ok_or(MessageRejection::Unexpected)?;
        if !state.received.insert(slot) {
            return Err(MessageRejection::Unexpected);
        }
        if slot == 0 {
            state.candidate_share = Some(share);
            let mut xs = vec![share.x];
            xs.extend(spec.guards.iter().map(|g| group.scalar_from_u64(g.x)));
            state.weights = Some(match lagrange_coeffs_at_zero(&group, &xs) {
                Ok(lambdas) => xs.into_iter().zip(lambdas).collect(),
                Err(_) => Vec::new(),
            });
        } else if share.x != group.scalar_from_u64(spec.guards[slot - 1].x) {
            // A guard's share must sit at that guard's own identifier.
            state.tainted = true;
        }
        state.pending.push(share);
        state.pending_slots.push(slot);

        let mut work = 0;
        if let Some(weights) = &state.weights {
            for (share, slot) in state.pending.drain(..).zip(state.pending_slots.drain(..)) {
                match weights.iter().find(|(x, _)| *x == share.x) {
                    Some((_, lambda)) => state.sum = state.sum + group.mul(lambda, &share.point),
                    None => state.tainted = true,
                }
                state.folded.insert(slot);
                work += 1;
            }
        }

        let mut reaction = Reaction { work: OpCount::ec(work), ..Reaction::idle() };
        let my_turn = !state.published && state.folded.contains(&(state.slot - 1));
        let decided = state.verdict.is_none() && state.folded.len() == spec.threshold;
        if decided {
            let ok = !state.tainted && state.sum == spec.commitment.0;
            state.verdict = Some(ok);
            marks.push(Mark::Verdict(swarm, me));
        }
        if my_turn && !self.parallel {
            reaction.merge(self.guard_publish(swarm, me));
        }
        if decided {
            let ok = self.guards[&(swarm, me)].verdict == Some(true);
            let mut to = vec![Party::Drone(spec.candidate)];
            if spec.deliverer() != me {
                to.push(Party::Drone(spec.deliverer()));
            }
            let v = self.message(Party::Drone(me), &Payload::AuthVerdict { swarm, accepted: ok });
            reaction = reaction.send(to, v);
            if spec.deliverer() == me {
                reaction.merge(self.try_deliver(swarm));
            }
        }
        Ok(reaction)
    }

    fn on_verdict(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        swarm: SwarmId,
        accepted: bool,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let spec = self.rounds.get(&swarm).ok_or(MessageRejection::Unexpected)?.clone();
        let Party::Drone(from) = msg.sender else {
            return Err(MessageRejection::Unexpected);
        };
        if !spec.guards.contains(&from) {
            return Err(MessageRejection::Unexpected);
        }
        if spec.deliverer() == me {
            let state = self.guards.get_mut(&(swarm, me)).ok_or(MessageRejection::Unexpected)?;
            if state.peer_verdicts.insert(from, accepted).is_some() {
                return Err(MessageRejection::Unexpected);
            }
            return Ok(self.try_deliver(swarm));
        }
        if spec.candidate != me {
            return Err(MessageRejection::Unexpected);
        }
        let cand = self.candidates.get_mut(&swarm).ok_or(MessageRejection::Unexpected)?;
        if cand.verdicts.insert(from, accepted).is_some() {
            return Err(MessageRejection::Unexpected);
        }
        let mut reaction = Reaction::idle();
        if cand.verdicts.len() == spec.guards.len() && cand.concluded.is_none() {
            let ok = cand.verdicts.values().all(|v| *v);
            cand.concluded = Some(ok);
            if ok && spec.deliver_key {
                cand.key_requested = true;
                let (_, public) = self.drones[&me].credential_for(swarm).ok_or(MessageRejection::Unexpected)?;
                let kai = self.message(Party::Drone(me), &Payload::KeyAgreementInit { swarm, share: public });
                reaction = reaction.send(vec![Party::Drone(spec.deliverer())], kai);
            }
            // This candidate may be holding back a key in a gated round.
            let gated: Vec<SwarmId> = self
                .rounds
                .values()
                .filter(|r| r.gate == Some(swarm) && r.deliverer() == me)
                .map(|r| r.swarm)
                .collect();
            for g in gated {
                reaction.merge(self.try_deliver(g));
            }
        }
        Ok(reaction)
    }

    fn on_key_request(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        swarm: SwarmId,
        share: PublicShare<G>,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let spec = self.rounds.get(&swarm).ok_or(MessageRejection::Unexpected)?;
        if spec.deliverer() != me || msg.sender != Party::Drone(spec.candidate) || !spec.deliver_key {
            return Err(MessageRejection::Unexpected);
        }
        let state = self.guards.get_mut(&(swarm, me)).ok_or(MessageRejection::Unexpected)?;
        if state.key_requested {
            return Err(MessageRejection::Unexpected);
        }
        // The key only goes to the share that was actually verified.
        if state.candidate_share != Some(share) {
            return Err(MessageRejection::AuthenticationFailed);
        }
        state.key_requested = true;
        Ok(self.try_deliver(swarm))
    }

    /// Sends the group key once the deliverer has everything it needs.
    fn try_deliver(&mut self, swarm: SwarmId) -> Reaction<Party, ProtocolMessage> {
        let spec = &self.rounds[&swarm];
        let me = spec.deliverer();
        let candidate = spec.candidate;
        let state = &self.guards[&(swarm, me)];
        let peers_ok = state.peer_verdicts.len() == spec.guards.len() - 1 && state.peer_verdicts.values().all(|v| *v);
        let gate_open = spec.gate.is_none_or(|g| self.candidates.get(&g).and_then(|c| c.concluded) == Some(true));
        let ready = spec.deliver_key
            && !state.delivered
            && state.key_requested
            && state.verdict == Some(true)
            && peers_ok
            && gate_open;
        if !ready {
            return Reaction::idle();
        }
        let recipient_public = state.candidate_share.expect("verified candidate share");
        let nonce = self.nonce();
        self.guards.get_mut(&(swarm, me)).expect("deliverer state").delivered = true;
        match deliver_group_key(&self.group, &self.drones[&me], Party::Drone(candidate), &recipient_public, nonce) {
            Ok(msg) => Reaction { work: OpCount::ec(1), ..Reaction::idle() }.send(vec![Party::Drone(candidate)], msg),
            Err(_) => {
                self.delivery_failed = true;
                Reaction::idle()
            }
        }
    }

    fn on_group_key(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        swarm: SwarmId,
        marks: &mut Vec<Mark>,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let spec = self.rounds.get(&swarm).ok_or(MessageRejection::Unexpected)?;
        let commitment = spec.commitment;
        if spec.candidate != me || msg.sender != Party::Drone(spec.deliverer()) {
            return Err(MessageRejection::Unexpected);
        }
        let cand = self.candidates.get(&swarm).ok_or(MessageRejection::Unexpected)?;
        if !cand.key_requested || cand.key.is_some() {
            return Err(MessageRejection::Unexpected);
        }
        let (share, _) = self.drones[&me].credential_for(swarm).ok_or(MessageRejection::Unexpected)?;
        let key = open_group_key(&self.group, &share, Party::Drone(me), msg)
            .map_err(|_| MessageRejection::AuthenticationFailed)?;
        if self.group.mul_base(&key) != commitment.0 {
            return Err(MessageRejection::AuthenticationFailed);
        }
        self.candidates.get_mut(&swarm).expect("candidate state").key = Some(key);
        // ECDH plus the `key · P = Q` check.
        let mut reaction = Reaction { work: OpCount::ec(2), ..Reaction::idle() };
        marks.push(Mark::Adopted(me));

        let merging = self.plan.as_ref().filter(|p| p.b == swarm && p.d_a == me).cloned();
        let drone = self.drones.get_mut(&me).expect("candidate drone");
        match merging {
            None => {
                drone.group_key = Some(key);
                drone.role = Role::Member;
            }
            Some(plan) => {
                let old = drone.group_key.ok_or(MessageRejection::Unexpected)?;
                drone.group_key = Some(key);
                let nonce = self.nonce();
                let sender = Party::Drone(me);
                let aad = associated_data(&sender, &Party::Broadcast(plan.a), &nonce);
                let mut plain = Vec::new();
                put_lp(&mut plain, &self.group.encode_scalar(&key));
                let ciphertext = SymmetricKey::from_scalar(&self.group, &old).seal(&nonce, &aad, &plain);
                let msg = ProtocolMessage::new(
                    &self.group,
                    sender,
                    nonce,
                    &Payload::UnifiedKeyBroadcast { swarm, ciphertext },
                );
                let to = plan.a_members.iter().map(|m| Party::Drone(*m)).collect();
                reaction = reaction.send(to, msg);
            }
        }
        Ok(reaction)
    }

    fn on_unified_key(
        &mut self,
        me: DroneId,
        msg: &ProtocolMessage,
        swarm: SwarmId,
        ciphertext: &[u8],
        marks: &mut Vec<Mark>,
    ) -> Result<Reaction<Party, ProtocolMessage>, MessageRejection> {
        let plan = self.plan.as_ref().ok_or(MessageRejection::Unexpected)?;
        if swarm != plan.b || !plan.a_members.contains(&me) || msg.sender != Party::Drone(plan.d_a) {
            return Err(MessageRejection::Unexpected);
        }
        let a = plan.a;
        if self.adopted.contains_key(&me) {
            return Err(MessageRejection::Unexpected);
        }
        let drone = self.drones.get_mut(&me).ok_or(MessageRejection::Unexpected)?;
        let old = drone.group_key.ok_or(MessageRejection::Unexpected)?;
        let aad = associated_data(&msg.sender, &Party::Broadcast(a), &msg.nonce);
        let plain = SymmetricKey::from_scalar(&self.group, &old)
            .open(&msg.nonce, &aad, ciphertext)
            .map_err(|_| MessageRejection::AuthenticationFailed)?;
        let mut r = Reader::new(&plain);
        let key = r.lp().ok().and_then(|b| self.group.decode_scalar(b).ok()).ok_or(MessageRejection::Malformed)?;
        r.finish().map_err(|_| MessageRejection::Malformed)?;
        drone.group_key = Some(key);
        marks.push(Mark::Adopted(me));
        Ok(Reaction::idle())
    }

    /// Collapses the run into an outcome and timing.
    pub fn finish(mut self, net: &Net<'_>) -> (RunResult, BTreeMap<DroneId, Drone<G>>) {
        let mut authenticated = Stamp::ZERO;
        let mut verdict_missing = false;
        let mut verdict_failed = false;
        for g in self.guards.values() {
            match (g.verdict, g.verdict_at) {
                (Some(ok), Some(at)) => {
                    verdict_failed |= !ok;
                    authenticated = authenticated.later(at);
                }
                _ => verdict_missing = true,
            }
        }
        let keys_done = match &self.plan {
            None => self.rounds.values().filter(|r| r.deliver_key).all(|r| self.candidates[&r.swarm].key.is_some()),
            Some(p) => self.adopted.contains_key(&p.d_a) && p.a_members.iter().all(|m| self.adopted.contains_key(m)),
        };
        let outcome = if self.cross_failed {
            Outcome::Rejected(RejectReason::CrossIssueFailed)
        } else if verdict_failed {
            Outcome::Rejected(RejectReason::VerificationFailed)
        } else if verdict_missing {
            Outcome::Rejected(RejectReason::Incomplete)
        } else if self.delivery_failed || !keys_done {
            Outcome::Rejected(RejectReason::KeyDeliveryFailed)
        } else {
            Outcome::Accepted
        };
        let completed = self.adopted.values().fold(authenticated, |acc, s| acc.later(*s));
        self.transcript.set_outcome(outcome);
        let result = RunResult {
            outcome,
            transcript: self.transcript,
            authenticated,
            completed,
            ops: net.ops(),
            transmissions: net.transmissions(),
        };
        (result, self.drones)
    }
}
