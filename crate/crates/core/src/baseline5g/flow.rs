//! The baseline flow on the simulated network.
//!
//! ```text
//! UE ──AuthRequest(SUCI)──▶ SEAF ──▶ AUSF ──▶ UDM        decrypt, draw RAND
//! UE ◀──Challenge(RAND)──── SEAF ◀── AUSF ◀── UDM        AUSF: HXRES = H(XRES)
//! UE ──Response(RES)──────▶ SEAF ──▶ AUSF                SEAF: H(RES) = HXRES?
//! UE ◀──AuthResult───────── SEAF ◀── AUSF                AUSF: RES = XRES?
//! ```
//!
//! UE–SEAF hops cross the radio access network (half a round trip each); hops
//! inside the core are free. Several UEs authenticate one after another.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::{self, Write as _};

use rand_core::RngCore;

use super::{
    ausf_confirm, ausf_hxres, compute_suci, seaf_check, udm_challenge, ue_response, ChallengeState, HomeNetworkKey,
    Suci, Supi,
};
use crate::algebra::PrimeOrderGroup;
use crate::codec::{put_lp, Hex};
use crate::seal::sha256;
use crate::simnet::engine::{Engine, Link, OpCount, Reaction, Stamp, Tap};
use crate::simnet::latency::LatencyModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NrNode {
    Ue(u32),
    Seaf,
    Ausf,
    Udm,
}

impl fmt::Display for NrNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NrNode::Ue(i) => write!(f, "ue{i}"),
            NrNode::Seaf => f.write_str("seaf"),
            NrNode::Ausf => f.write_str("ausf"),
            NrNode::Udm => f.write_str("udm"),
        }
    }
}

fn link(a: &NrNode, b: &NrNode) -> Link {
    match (a, b) {
        (NrNode::Ue(_), _) | (_, NrNode::Ue(_)) => Link::Cellular,
        _ => Link::Local,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NrMessage {
    AuthRequest {
        ue: u32,
        suci: Suci,
    },
    AuthVector {
        ue: u32,
        rand: [u8; 16],
        xres: Vec<u8>,
        supi: Supi,
    },
    /// From the AUSF it carries `HXRES`; the SEAF strips it towards the UE.
    Challenge {
        ue: u32,
        rand: [u8; 16],
        hxres: Option<[u8; 32]>,
    },
    Response {
        ue: u32,
        res: Vec<u8>,
    },
    Confirm {
        ue: u32,
        supi: Option<Supi>,
    },
    AuthResult {
        ue: u32,
        accepted: bool,
    },
}

impl NrMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            NrMessage::AuthRequest { .. } => "auth_request",
            NrMessage::AuthVector { .. } => "auth_vector",
            NrMessage::Challenge { .. } => "challenge",
            NrMessage::Response { .. } => "response",
            NrMessage::Confirm { .. } => "confirm",
            NrMessage::AuthResult { .. } => "auth_result",
        }
    }

    /// Canonical bytes, for digests.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        match self {
            NrMessage::AuthRequest { ue, suci } => {
                out.push(1);
                out.extend_from_slice(&ue.to_be_bytes());
                put_lp(&mut out, suci.as_bytes());
            }
            NrMessage::AuthVector { ue, rand, xres, supi } => {
                out.push(2);
                out.extend_from_slice(&ue.to_be_bytes());
                out.extend_from_slice(rand);
                put_lp(&mut out, xres);
                put_lp(&mut out, supi.as_bytes());
            }
            NrMessage::Challenge { ue, rand, hxres } => {
                out.push(3);
                out.extend_from_slice(&ue.to_be_bytes());
                out.extend_from_slice(rand);
                put_lp(&mut out, hxres.as_ref().map_or(&[][..], |h| &h[..]));
            }
            NrMessage::Response { ue, res } => {
                out.push(4);
                out.extend_from_slice(&ue.to_be_bytes());
                put_lp(&mut out, res);
            }
            NrMessage::Confirm { ue, supi } => {
                out.push(5);
                out.extend_from_slice(&ue.to_be_bytes());
                put_lp(&mut out, supi.as_ref().map_or(&[][..], |s| s.as_bytes()));
            }
            NrMessage::AuthResult { ue, accepted } => {
                out.push(6);
                out.extend_from_slice(&ue.to_be_bytes());
                out.push(u8::from(*accepted));
            }
        }
        out
    }
}

/// Where a failed attempt was caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Checkpoint {
    /// The SUCI did not decrypt.
    Udm,
    /// `H(RES) ≠ HXRES`.
    Seaf,
    /// `RES ≠ XRES`.
    Ausf,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NrOutcome {
    /// The SEAF ended up holding this SUPI.
    Authenticated(Supi),
    Rejected(Checkpoint),
    /// Never finished (a message was lost).
    Incomplete,
}

/// Which field a [`TamperTap`] corrupts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TamperField {
    Suci,
    Rand,
    Res,
}

/// Flips one bit of `field` in its `occurrence`-th transmission (counting
/// from zero across all hops).
#[derive(Debug, Clone)]
pub struct TamperTap {
    pub field: TamperField,
    pub occurrence: usize,
    pub bit: usize,
    seen: usize,
    pub hit: bool,
}

impl TamperTap {
    pub fn new(field: TamperField, occurrence: usize, bit: usize) -> Self {
        Self { field, occurrence, bit, seen: 0, hit: false }
    }

    /// How many transmissions carry `field` in one honest attempt.
    pub fn occurrences(field: TamperField) -> usize {
        match field {
            TamperField::Suci => 3,
            TamperField::Rand => 3,
            TamperField::Res => 2,
        }
    }
}

fn flip(bytes: &mut [u8], bit: usize) {
    let i = (bit / 8) % bytes.len();
    bytes[i] ^= 1 << (bit % 8);
}

impl Tap<NrNode, NrMessage> for TamperTap {
    fn on_send(&mut self, _from: &NrNode, _to: &NrNode, mut msg: NrMessage) -> Option<NrMessage> {
        let target: Option<&mut [u8]> = match (&mut msg, self.field) {
            (NrMessage::AuthRequest { suci, .. }, TamperField::Suci) => Some(&mut suci.0),
            (NrMessage::AuthVector { rand, .. } | NrMessage::Challenge { rand, .. }, TamperField::Rand) => Some(rand),
            (NrMessage::Response { res, .. }, TamperField::Res) => Some(res),
            _ => None,
        };
        if let Some(bytes) = target {
            if self.seen == self.occurrence {
                flip(bytes, self.bit);
                self.hit = true;
            }
            self.seen += 1;
        }
        Some(msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrLogEntry {
    pub at: Stamp,
    pub from: NrNode,
    pub to: NrNode,
    pub message: NrMessage,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NrFlowResult {
    pub outcomes: Vec<NrOutcome>,
    /// When each UE learned its result.
    pub finished: Vec<Option<Stamp>>,
    /// When the last UE learned its result.
    pub completed: Stamp,
    pub ops: OpCount,
    /// UE–core round trips (two radio legs each).
    pub round_trips: u32,
    /// SUCI decryptions performed by the UDM.
    pub core_decryptions: u32,
    pub log: Vec<NrLogEntry>,
}

impl NrFlowResult {
    pub fn all_authenticated(&self) -> bool {
        self.outcomes.iter().all(|o| matches!(o, NrOutcome::Authenticated(_)))
    }

    /// One line per delivery: `t_us=… kind=… from=… to=… digest=…`.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for e in &self.log {
            let d = sha256(&e.message.to_bytes());
            let _ = writeln!(
                out,
                "t_us={}.{:03} kind={} from={} to={} digest={}",
                e.at.at.as_micros(),
                e.at.at.subsec_nanos() % 1000,
                e.message.kind(),
                e.from,
                e.to,
                Hex(&d[..8]),
            );
        }
        out
    }
}

struct Ue {
    supi: Supi,
    suci: Option<Suci>,
}

/// Authenticates each SUPI in turn; the next UE starts when the previous one
/// has its result.
pub fn run_nr_flow<G: PrimeOrderGroup>(
    group: &G,
    supis: &[Supi],
    model: LatencyModel,
    rng: &mut dyn RngCore,
    tap: &mut dyn Tap<NrNode, NrMessage>,
) -> NrFlowResult {
    let home = HomeNetworkKey::generate(group, rng);
    let mut ues: Vec<Ue> = supis.iter().map(|s| Ue { supi: s.clone(), suci: None }).collect();
    let mut seaf_hxres: Vec<Option<[u8; 32]>> = alloc::vec![None; supis.len()];
    let mut ausf_state: Vec<Option<ChallengeState>> = alloc::vec![None; supis.len()];
    let mut outcomes = alloc::vec![NrOutcome::Incomplete; supis.len()];
    let mut finished = alloc::vec![None; supis.len()];
    let mut core_decryptions = 0;
    let mut cellular = 0;
    let mut log = Vec::new();

    let mut net: Engine<'_, NrNode, NrMessage> = Engine::new(model, link, tap);
    let start = |ues: &mut Vec<Ue>, i: usize, rng: &mut dyn RngCore| -> Reaction<NrNode, NrMessage> {
        let suci = compute_suci(group, &ues[i].supi, &home.public, rng);
        ues[i].suci = Some(suci.clone());
        Reaction { work: OpCount { asym_encrypt: 1, ..OpCount::NONE }, ..Reaction::idle() }
            .send(alloc::vec![NrNode::Seaf], NrMessage::AuthRequest { ue: i as u32, suci })
    };
    if !ues.is_empty() {
        let r = start(&mut ues, 0, rng);
        net.react(&NrNode::Ue(0), Stamp::ZERO, r);
    }

    while let Some(d) = net.next_delivery() {
        if matches!(d.from, NrNode::Ue(_)) || matches!(d.to, NrNode::Ue(_)) {
            cellular += 1;
        }
        log.push(NrLogEntry { at: d.stamp, from: d.from, to: d.to, message: d.msg.clone() });
        // Rejections are reported straight to the UE from wherever they happen.
        let reject =
            |ue: u32| Reaction::idle().send(alloc::vec![NrNode::Ue(ue)], NrMessage::AuthResult { ue, accepted: false });
        let reaction: Reaction<NrNode, NrMessage> = match (d.to, d.msg) {
            (NrNode::Seaf, NrMessage::AuthRequest { ue, suci }) => {
                Reaction::idle().send(alloc::vec![NrNode::Ausf], NrMessage::AuthRequest { ue, suci })
            }
            (NrNode::Ausf, NrMessage::AuthRequest { ue, suci }) => {
                Reaction::idle().send(alloc::vec![NrNode::Udm], NrMessage::AuthRequest { ue, suci })
            }
            (NrNode::Udm, NrMessage::AuthRequest { ue, suci }) => {
                core_decryptions += 1;
                let work = OpCount { asym_decrypt: 1, ..OpCount::NONE };
                match udm_challenge(group, &home, &suci, rng) {
                    Ok(state) => Reaction { work, ..Reaction::idle() }.send(
                        alloc::vec![NrNode::Ausf],
                        NrMessage::AuthVector { ue, rand: state.rand, xres: state.xres, supi: state.supi },
                    ),
                    Err(_) => {
                        outcomes[ue as usize] = NrOutcome::Rejected(Checkpoint::Udm);
                        let mut r = reject(ue);
                        r.work = work;
                        r
                    }
                }
            }
            (NrNode::Ausf, NrMessage::AuthVector { ue, rand, xres, supi }) => {
                let state = ChallengeState { rand, xres, supi };
                let hxres = ausf_hxres(&state);
                ausf_state[ue as usize] = Some(state);
                Reaction { work: OpCount { hash: 1, ..OpCount::NONE }, ..Reaction::idle() }
                    .send(alloc::vec![NrNode::Seaf], NrMessage::Challenge { ue, rand, hxres: Some(hxres) })
            }
            (NrNode::Seaf, NrMessage::Challenge { ue, rand, hxres }) => {
                seaf_hxres[ue as usize] = hxres;
                Reaction::idle().send(alloc::vec![NrNode::Ue(ue)], NrMessage::Challenge { ue, rand, hxres: None })
            }
            (NrNode::Ue(i), NrMessage::Challenge { ue, rand, .. }) if i == ue => {
                let res = ues[ue as usize].suci.as_ref().map(|s| ue_response(s, &rand)).unwrap_or_default();
                Reaction::idle().send(alloc::vec![NrNode::Seaf], NrMessage::Response { ue, res })
            }
            (NrNode::Seaf, NrMessage::Response { ue, res }) => {
                let work = OpCount { hash: 1, ..OpCount::NONE };
                let ok = seaf_hxres[ue as usize].is_some_and(|h| seaf_check(&res, &h));
                if ok {
                    Reaction { work, ..Reaction::idle() }
                        .send(alloc::vec![NrNode::Ausf], NrMessage::Response { ue, res })
                } else {
                    outcomes[ue as usize] = NrOutcome::Rejected(Checkpoint::Seaf);
                    let mut r = reject(ue);
                    r.work = work;
                    r
                }
            }
            (NrNode::Ausf, NrMessage::Response { ue, res }) => {
                let supi = ausf_state[ue as usize].as_ref().and_then(|s| ausf_confirm(&res, s));
                if supi.is_none() {
                    outcomes[ue as usize] = NrOutcome::Rejected(Checkpoint::Ausf);
                }
                Reaction::idle().send(alloc::vec![NrNode::Seaf], NrMessage::Confirm { ue, supi })
            }
            (NrNode::Seaf, NrMessage::Confirm { ue, supi }) => {
                let accepted = supi.is_some();
                if let Some(supi) = supi {
                    outcomes[ue as usize] = NrOutcome::Authenticated(supi);
                }
                Reaction::idle().send(alloc::vec![NrNode::Ue(ue)], NrMessage::AuthResult { ue, accepted })
            }
            (NrNode::Ue(i), NrMessage::AuthResult { ue, .. }) if i == ue => {
                finished[ue as usize] = Some(d.stamp);
                let next = ue as usize + 1;
                if next < ues.len() {
                    let r = start(&mut ues, next, rng);
                    net.react(&NrNode::Ue(next as u32), d.stamp, r);
                }
                Reaction::idle()
            }
            _ => Reaction::idle(),
        };
        net.react(&d.to, d.stamp, reaction);
    }

    let completed = finished.iter().flatten().fold(Stamp::ZERO, |acc, s| acc.later(*s));
    NrFlowResult { outcomes, finished, completed, ops: net.ops(), round_trips: cellular / 2, core_decryptions, log }
}
