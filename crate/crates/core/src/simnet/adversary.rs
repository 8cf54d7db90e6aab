//! A network adversary that can read, store, replay, and alter messages in
//! transit but holds no private share, and the checks that its attacks fail.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::engine::Tap;
use super::scenario::{ConfigError, GroupChoice, ScenarioConfig, ScenarioError, Setup};
use crate::algebra::{P256Group, PrimeOrderGroup, ToyGroup};
use crate::protocol::{
    associated_data, Disposition, MessageRejection, Outcome, Party, Payload, ProtocolMessage, RunResult,
};
use crate::seal::SymmetricKey;
use crate::shares::PublicShare;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum AdversaryMode {
    #[default]
    None,
    /// Re-deliver every captured message once the network goes quiet.
    Replay,
    /// Record only.
    Eavesdrop,
    /// Substitute the presented public share with a random point.
    Mitm,
}

impl AdversaryMode {
    pub const ATTACKS: [AdversaryMode; 3] = [AdversaryMode::Replay, AdversaryMode::Eavesdrop, AdversaryMode::Mitm];

    pub fn name(self) -> &'static str {
        match self {
            AdversaryMode::None => "none",
            AdversaryMode::Replay => "replay",
            AdversaryMode::Eavesdrop => "eavesdrop",
            AdversaryMode::Mitm => "mitm",
        }
    }
}

impl fmt::Display for AdversaryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryMode {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [AdversaryMode::None, AdversaryMode::Replay, AdversaryMode::Eavesdrop, AdversaryMode::Mitm]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                ConfigError::new("adversary", format!("unknown mode `{s}` (expected none, replay, eavesdrop, or mitm)"))
            })
    }
}

/// What a man in the middle alters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MitmTarget {
    /// The victim's published public share.
    PublicShare,
    /// The sealed group key.
    Ciphertext,
}

/// Captured traffic: `(from, to, message)` in transmission order.
pub type Capture = Vec<(Party, Party, ProtocolMessage)>;

/// The adversary as a network tap.
#[derive(Debug, Clone)]
pub struct Adversary<G: PrimeOrderGroup> {
    group: G,
    pub mode: AdversaryMode,
    pub mitm_target: MitmTarget,
    /// Whose public share a man in the middle replaces.
    pub victim: Party,
    pub capture: Capture,
    /// Messages altered in transit.
    pub altered: usize,
    replayed: bool,
    rng: ChaCha20Rng,
}

impl<G: PrimeOrderGroup> Adversary<G> {
    pub fn new(group: G, mode: AdversaryMode, victim: Party, seed: u64) -> Self {
        Self {
            group,
            mode,
            mitm_target: MitmTarget::PublicShare,
            victim,
            capture: Vec::new(),
            altered: 0,
            replayed: false,
            rng: ChaCha20Rng::seed_from_u64(seed ^ 0x6164_7665_7273_6172),
        }
    }

    fn alter(&mut self, from: &Party, msg: &mut ProtocolMessage) {
        let Ok(payload) = msg.payload(&self.group) else { return };
        let forged = match (self.mitm_target, payload) {
            (MitmTarget::PublicShare, Payload::SharePublish { swarm, share }) if *from == self.victim => {
                let point = self.group.random_point(&mut self.rng);
                Payload::SharePublish { swarm, share: PublicShare { x: share.x, point } }
            }
            (MitmTarget::Ciphertext, Payload::EncryptedGroupKey { swarm, guard, mut ciphertext }) => {
                if let Some(b) = ciphertext.first_mut() {
                    *b ^= 0x01;
                }
                Payload::EncryptedGroupKey { swarm, guard, ciphertext }
            }
            _ => return,
        };
        msg.payload = forged.encode(&self.group);
        self.altered += 1;
    }
}

impl<G: PrimeOrderGroup> Tap<Party, ProtocolMessage> for Adversary<G> {
    fn on_send(&mut self, from: &Party, to: &Party, mut msg: ProtocolMessage) -> Option<ProtocolMessage> {
        if self.mode == AdversaryMode::None {
            return Some(msg);
        }
        if self.mode == AdversaryMode::Mitm {
            self.alter(from, &mut msg);
        }
        self.capture.push((*from, *to, msg.clone()));
        Some(msg)
    }

    fn on_quiescent(&mut self) -> Vec<(Party, Party, ProtocolMessage)> {
        if self.mode != AdversaryMode::Replay || core::mem::replace(&mut self.replayed, true) {
            return Vec::new();
        }
        self.capture.clone()
    }
}

/// Whether an attack was thwarted, and why.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackReport {
    pub mode: AdversaryMode,
    pub thwarted: bool,
    /// Outcome of the (last) attacked run.
    pub outcome: Outcome,
    /// Human-readable findings, one per line.
    pub details: Vec<String>,
}

/// Runs the configured scenario under attack and checks the prevention:
///
/// - replay: every re-delivered message is dropped as a replay and the
///   legitimate run still succeeds;
/// - mitm: substituting the presented public share, and separately
///   corrupting the sealed group key, each make the run fail;
/// - eavesdrop: the capture contains no private scalar, and no key derivable
///   from captured or public material opens any captured ciphertext.
pub fn inject_adversary(cfg: &ScenarioConfig, mode: AdversaryMode) -> Result<AttackReport, ScenarioError> {
    if mode == AdversaryMode::None {
        return Err(ConfigError::new("adversary", "no attack mode selected").into());
    }
    let mut cfg = cfg.clone();
    cfg.adversary = mode;
    cfg.validate()?;
    match cfg.group {
        GroupChoice::P256 => attack_in(P256Group, &cfg),
        GroupChoice::Toy(q) => attack_in(
            ToyGroup::new(q).map_err(|e| ConfigError::new("group", alloc::string::ToString::to_string(&e)))?,
            &cfg,
        ),
    }
}

fn attack_in<G: PrimeOrderGroup>(group: G, cfg: &ScenarioConfig) -> Result<AttackReport, ScenarioError> {
    let mode = cfg.adversary;
    let mut details = Vec::new();
    let (thwarted, outcome) = match mode {
        AdversaryMode::Replay => {
            let (_, adv, result) = attacked_run(group, cfg, MitmTarget::PublicShare)?;
            let injected: Vec<_> = result.transcript.entries().iter().filter(|e| e.injected).collect();
            let dropped =
                injected.iter().filter(|e| e.disposition == Disposition::Rejected(MessageRejection::Replay)).count();
            details.push(format!("replayed {} captured messages, {} dropped as replays", adv.capture.len(), dropped));
            details.push(format!("legitimate run outcome: {}", result.outcome));
            let ok = !injected.is_empty()
                && injected.len() == adv.capture.len()
                && dropped == injected.len()
                && result.outcome.is_accepted();
            (ok, result.outcome)
        }
        AdversaryMode::Mitm => {
            let mut ok = true;
            let mut last = Outcome::Accepted;
            for target in [MitmTarget::PublicShare, MitmTarget::Ciphertext] {
                let (_, adv, result) = attacked_run(group, cfg, target)?;
                details.push(format!("{target:?}: altered {} messages, outcome {}", adv.altered, result.outcome));
                ok &= adv.altered > 0 && !result.outcome.is_accepted();
                last = result.outcome;
            }
            (ok, last)
        }
        AdversaryMode::Eavesdrop => {
            let (run, adv, result) = attacked_run(group, cfg, MitmTarget::PublicShare)?;
            let findings = analyze_capture(&group, &adv.capture, &run.secrets, &run.public_points);
            details.push(format!("captured {} messages", adv.capture.len()));
            details.push(format!("private scalars found in capture: {}", findings.leaked));
            details.push(format!(
                "{} decryption attempts with {} candidate keys on {} ciphertexts, {} succeeded",
                findings.attempts, findings.keys, findings.ciphertexts, findings.opened
            ));
            let ok = result.outcome.is_accepted()
                && findings.leaked == 0
                && findings.opened == 0
                && findings.ciphertexts > 0;
            (ok, result.outcome)
        }
        AdversaryMode::None => unreachable!("rejected above"),
    };
    Ok(AttackReport { mode, thwarted, outcome, details })
}

struct Exposure<G: PrimeOrderGroup> {
    /// Private scalars held before or after the run.
    secrets: Vec<G::Scalar>,
    public_points: Vec<G::Point>,
}

fn attacked_run<G: PrimeOrderGroup>(
    group: G,
    cfg: &ScenarioConfig,
    target: MitmTarget,
) -> Result<(Exposure<G>, Adversary<G>, RunResult), ScenarioError> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut setup = Setup::build(group, cfg, &mut rng)?;
    let mut secrets = setup.secrets();
    let mut adv = Adversary::new(group, cfg.adversary, setup.victim(), cfg.seed);
    adv.mitm_target = target;
    let result = setup.run(cfg, &mut rng, &mut adv)?;
    secrets.extend(setup.secrets());
    secrets.sort();
    secrets.dedup();
    Ok((Exposure { secrets, public_points: setup.public_points() }, adv, result))
}

/// What a passive listener could extract.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CaptureFindings {
    /// Private scalars whose encoding appears verbatim in the capture.
    pub leaked: usize,
    pub keys: usize,
    pub ciphertexts: usize,
    pub attempts: usize,
    /// Ciphertexts opened with some candidate key.
    pub opened: usize,
}

/// Tries every key an outsider can derive from captured and public material
/// on every captured ciphertext.
///
/// Candidate keys: KDF of every captured or public point, of every pairwise
/// sum of those points, and of the generator; a hash of every payload and
/// nonce; and every scalar-sized window of every payload read as a scalar.
pub fn analyze_capture<G: PrimeOrderGroup>(
    group: &G,
    capture: &Capture,
    secrets: &[G::Scalar],
    public_points: &[G::Point],
) -> CaptureFindings {
    let mut findings = CaptureFindings::default();

    let wire: Vec<Vec<u8>> = capture.iter().map(|(_, _, m)| m.encode()).collect();
    findings.leaked = secrets
        .iter()
        .filter(|s| {
            let enc = group.encode_scalar(s);
            wire.iter().any(|w| w.windows(enc.len()).any(|win| win == enc.as_slice()))
        })
        .count();

    let mut points: Vec<G::Point> = public_points.to_vec();
    points.push(group.generator());
    let mut ciphertexts = Vec::new();
    for (_, to, msg) in capture {
        match msg.payload(group) {
            Ok(Payload::SharePublish { share, .. } | Payload::KeyAgreementInit { share, .. }) => {
                points.push(share.point)
            }
            Ok(Payload::EncryptedGroupKey { swarm, guard, ciphertext }) => {
                points.push(guard.point);
                ciphertexts.push((msg.sender, *to, Party::Broadcast(swarm), msg.nonce, ciphertext));
            }
            Ok(Payload::CrossIssueResponse { target, ciphertext }) => {
                ciphertexts.push((msg.sender, *to, Party::Broadcast(target), msg.nonce, ciphertext));
            }
            Ok(Payload::UnifiedKeyBroadcast { swarm, ciphertext }) => {
                ciphertexts.push((msg.sender, *to, Party::Broadcast(swarm), msg.nonce, ciphertext));
            }
            _ => {}
        }
    }
    points.sort_by_key(|p| group.encode_point(p));
    points.dedup();

    let mut keys: Vec<SymmetricKey> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        keys.push(SymmetricKey::from_point(group, p));
        for q in &points[i..] {
            keys.push(SymmetricKey::from_point(group, &(*p + *q)));
        }
    }
    for (_, _, msg) in capture {
        keys.push(SymmetricKey::from_hash(&msg.payload));
        keys.push(SymmetricKey::from_hash(&msg.nonce));
        for win in msg.payload.windows(group.scalar_len()) {
            if let Ok(s) = group.decode_scalar(win) {
                keys.push(SymmetricKey::from_scalar(group, &s));
            }
        }
    }
    findings.keys = keys.len();
    findings.ciphertexts = ciphertexts.len();

    for (sender, to, broadcast, nonce, ct) in &ciphertexts {
        let aads = [associated_data(sender, to, nonce), associated_data(sender, broadcast, nonce)];
        let opened = keys.iter().any(|k| {
            aads.iter().any(|aad| {
                findings.attempts += 1;
                k.open(nonce, aad, ct).is_ok()
            })
        });
        findings.opened += usize::from(opened);
    }
    findings
}
