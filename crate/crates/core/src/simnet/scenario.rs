//! Scenario configuration, execution, and timing reports.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;
use core::time::Duration;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

use super::adversary::{Adversary, AdversaryMode};
use super::analytic::bulk_admission_paths;
use super::engine::{Breakdown, PassThrough, Stamp, Tap};
use super::latency::LatencyModel;
use crate::algebra::{P256Group, PrimeOrderGroup, ToyGroup};
use crate::baseline5g::{run_nr_flow, NrMessage, NrNode, NrOutcome, Supi, DEFAULT_SUPI_LEN};
use crate::protocol::{
    run_inclusion, run_unification, CoreNetwork, Drone, Outcome, Party, ProtocolError, ProtocolMessage, RejectReason,
    RunOptions, RunResult, Swarm,
};
use crate::shares::ShareError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ScenarioKind {
    /// One newcomer joins a swarm.
    Inclusion,
    /// Swarm A adopts swarm B's key.
    Unification,
    /// The cellular baseline, `n_drones` UEs one after another.
    Nr5g,
    /// `n_drones` newcomers join a swarm; compared against the baseline.
    Bulk,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] =
        [ScenarioKind::Inclusion, ScenarioKind::Unification, ScenarioKind::Nr5g, ScenarioKind::Bulk];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Inclusion => "inclusion",
            ScenarioKind::Unification => "unification",
            ScenarioKind::Nr5g => "nr5g",
            ScenarioKind::Bulk => "bulk",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            ConfigError::new(
                "scenario",
                format!("unknown scenario `{s}` (expected inclusion, unification, nr5g, or bulk)"),
            )
        })
    }
}

/// Which authentication method a report times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Method {
    Nr5g,
    GroupAuth,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Nr5g => "nr-5g",
            Method::GroupAuth => "group-auth",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The group the protocol runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupChoice {
    P256,
    /// `(Z_q, +)`; fast, but offers no secrecy.
    Toy(u64),
}

impl FromStr for GroupChoice {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "p256" {
            return Ok(GroupChoice::P256);
        }
        s.strip_prefix("toy:")
            .and_then(|q| q.parse().ok())
            .map(GroupChoice::Toy)
            .ok_or_else(|| ConfigError::new("group", format!("unknown group `{s}` (expected p256 or toy:<prime>)")))
    }
}

impl fmt::Display for GroupChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupChoice::P256 => f.write_str("p256"),
            GroupChoice::Toy(q) => write!(f, "toy:{q}"),
        }
    }
}

/// Whether the newcomer in an inclusion holds a genuine share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    Genuine,
    /// A fresh identifier with a random value that is not `f(x)`.
    Impostor,
}

impl FromStr for CandidateKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "genuine" => Ok(CandidateKind::Genuine),
            "impostor" => Ok(CandidateKind::Impostor),
            _ => Err(ConfigError::new("candidate", format!("unknown candidate `{s}` (expected genuine or impostor)"))),
        }
    }
}

/// An invalid configuration field.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &str, reason: impl Into<String>) -> Self {
        Self { field: field.to_string(), reason: reason.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("protocol precondition failed: {0}")]
    Protocol(#[from] ProtocolError),
}

impl From<ShareError> for ScenarioError {
    fn from(e: ShareError) -> Self {
        ScenarioError::Protocol(e.into())
    }
}

/// Everything needed to run one scenario.
///
/// `n_drones` is the size of the existing swarm for inclusion, the size of
/// each swarm for unification, the number of UEs for `nr5g`, and the number
/// of newcomers for `bulk`. `guards` is the number of guards per swarm.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    pub threshold: usize,
    pub n_drones: usize,
    pub guards: usize,
    pub seed: u64,
    pub adversary: AdversaryMode,
    pub latency: LatencyModel,
    pub group: GroupChoice,
    pub parallel_guards: bool,
    pub mutual: bool,
    pub candidate: CandidateKind,
}

impl ScenarioConfig {
    /// Defaults: `t = 5`, guards `t − 1`, and a swarm of exactly the guards
    /// (one UE / one newcomer for the baseline and bulk runs).
    pub fn new(kind: ScenarioKind) -> Self {
        let threshold = 5;
        let n_drones = match kind {
            ScenarioKind::Inclusion | ScenarioKind::Unification => threshold - 1,
            ScenarioKind::Nr5g | ScenarioKind::Bulk => 1,
        };
        Self {
            kind,
            threshold,
            n_drones,
            guards: threshold - 1,
            seed: 0,
            adversary: AdversaryMode::None,
            latency: LatencyModel::default(),
            group: GroupChoice::P256,
            parallel_guards: false,
            mutual: false,
            candidate: CandidateKind::Genuine,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let t = self.threshold;
        if t < 2 {
            return Err(ConfigError::new("threshold", format!("must be at least 2, got {t}")));
        }
        let swarm_based = matches!(self.kind, ScenarioKind::Inclusion | ScenarioKind::Unification);
        if matches!(self.kind, ScenarioKind::Inclusion | ScenarioKind::Unification | ScenarioKind::Bulk) {
            if self.guards < t - 1 {
                return Err(ConfigError::new(
                    "guards",
                    format!("need at least t - 1 = {} guards, got {}", t - 1, self.guards),
                ));
            }
            if swarm_based && self.n_drones < self.guards {
                return Err(ConfigError::new(
                    "n_drones",
                    format!("swarm of {} cannot hold {} guards", self.n_drones, self.guards),
                ));
            }
        }
        if let GroupChoice::Toy(q) = self.group {
            ToyGroup::new(q).map_err(|e| ConfigError::new("group", e.to_string()))?;
            let ids = 2 * (self.n_drones.max(self.guards) as u64 + 2);
            if q <= ids {
                return Err(ConfigError::new("group", format!("order {q} too small for {ids} identifiers")));
            }
        }
        if self.adversary != AdversaryMode::None {
            if !swarm_based {
                return Err(ConfigError::new("adversary", "attacks apply to inclusion and unification scenarios"));
            }
            if self.adversary == AdversaryMode::Eavesdrop && matches!(self.group, GroupChoice::Toy(_)) {
                return Err(ConfigError::new(
                    "adversary",
                    "eavesdropping needs the p256 group; toy groups have no secrecy",
                ));
            }
        }
        if self.candidate == CandidateKind::Impostor && self.kind != ScenarioKind::Inclusion {
            return Err(ConfigError::new("candidate", "impostors apply to inclusion scenarios"));
        }
        Ok(())
    }

    pub(crate) fn run_options(&self) -> RunOptions {
        RunOptions { latency: self.latency, parallel_guards: self.parallel_guards, mutual: self.mutual }
    }
}

/// Milliseconds with three decimals, rounded to the nearest microsecond.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Millis(pub Duration);

impl fmt::Display for Millis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let us = (self.0.as_nanos() + 500) / 1000;
        write!(f, "{}.{:03}", us / 1000, us % 1000)
    }
}

/// Timing of one method in one scenario.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingReport {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub t: usize,
    pub n_drones: usize,
    /// Time to the authentication decision, along the critical path.
    pub total_time: Duration,
    /// Where `total_time` went; sums to it.
    pub breakdown: Breakdown,
    /// When the run went quiet, including key delivery.
    pub completed: Duration,
    pub outcome: Outcome,
}

impl TimingReport {
    fn from_stamps(cfg: &ScenarioConfig, method: Method, decided: Stamp, completed: Stamp, outcome: Outcome) -> Self {
        Self {
            scenario: cfg.kind,
            method,
            t: cfg.threshold,
            n_drones: cfg.n_drones,
            total_time: decided.at,
            breakdown: decided.path,
            completed: completed.at.max(decided.at),
            outcome,
        }
    }
}

impl fmt::Display for TimingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scenario={} method={} t={} n_drones={} total_ms={} completed_ms={} outcome={}",
            self.scenario,
            self.method,
            self.t,
            self.n_drones,
            Millis(self.total_time),
            Millis(self.completed),
            self.outcome
        )?;
        for (phase, d) in self.breakdown.iter() {
            write!(f, " {}_ms={}", phase.name(), Millis(d))?;
        }
        Ok(())
    }
}

/// The reports and transcript of one scenario run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioRun {
    /// One report per method timed (two for `bulk`).
    pub reports: Vec<TimingReport>,
    /// One line per delivered message.
    pub transcript: String,
}

impl ScenarioRun {
    /// Accepted iff every report is.
    pub fn outcome(&self) -> Outcome {
        self.reports.iter().map(|r| r.outcome).find(|o| !o.is_accepted()).unwrap_or(Outcome::Accepted)
    }
}

/// Runs `cfg` deterministically: the same config always yields the same
/// reports and transcript.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    cfg.validate()?;
    match cfg.group {
        GroupChoice::P256 => run_in(P256Group, cfg),
        GroupChoice::Toy(q) => run_in(ToyGroup::new(q).map_err(|e| ConfigError::new("group", e.to_string()))?, cfg),
    }
}

fn run_in<G: PrimeOrderGroup>(group: G, cfg: &ScenarioConfig) -> Result<ScenarioRun, ScenarioError> {
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    match cfg.kind {
        ScenarioKind::Inclusion | ScenarioKind::Unification => {
            let mut setup = Setup::build(group, cfg, &mut rng)?;
            let mut adversary = Adversary::new(group, cfg.adversary, setup.victim(), cfg.seed);
            let result = setup.run(cfg, &mut rng, &mut adversary)?;
            let report = TimingReport::from_stamps(
                cfg,
                Method::GroupAuth,
                result.authenticated,
                result.completed,
                result.outcome,
            );
            Ok(ScenarioRun { reports: alloc::vec![report], transcript: result.transcript.to_lines() })
        }
        ScenarioKind::Nr5g => {
            let (report, transcript) = nr5g_report(group, cfg, &mut rng);
            Ok(ScenarioRun { reports: alloc::vec![report], transcript })
        }
        ScenarioKind::Bulk => run_bulk(group, cfg, &mut rng),
    }
}

fn nr5g_report<G: PrimeOrderGroup>(group: G, cfg: &ScenarioConfig, rng: &mut ChaCha20Rng) -> (TimingReport, String) {
    let supis: Vec<Supi> =
        (0..cfg.n_drones).map(|_| Supi::random(DEFAULT_SUPI_LEN, rng).expect("nonempty SUPI length")).collect();
    let mut tap = PassThrough;
    let flow = run_nr_flow(&group, &supis, cfg.latency, rng, &mut tap as &mut dyn Tap<NrNode, NrMessage>);
    let outcome = if flow.all_authenticated() {
        Outcome::Accepted
    } else if flow.outcomes.contains(&NrOutcome::Incomplete) {
        Outcome::Rejected(RejectReason::Incomplete)
    } else {
        Outcome::Rejected(RejectReason::VerificationFailed)
    };
    let mut transcript = flow.to_lines();
    transcript.push_str(&format!("outcome={outcome}\n"));
    let report = TimingReport::from_stamps(cfg, Method::Nr5g, flow.completed, flow.completed, outcome);
    (report, transcript)
}

/// Admits every newcomer functionally, then reports the closed-form times:
/// one broadcast per newcomer plus a single threshold verification.
fn run_bulk<G: PrimeOrderGroup>(
    group: G,
    cfg: &ScenarioConfig,
    rng: &mut ChaCha20Rng,
) -> Result<ScenarioRun, ScenarioError> {
    let mut core = CoreNetwork::new(group, rng);
    let mut swarm = core.provision_swarm(cfg.threshold, cfg.guards, cfg.guards, rng)?;
    let mut outcome = Outcome::Accepted;
    let mut transcript = String::new();
    for _ in 0..cfg.n_drones {
        let candidate = core.enroll_new_drone(swarm.id)?;
        let run = run_inclusion(&group, &mut swarm, candidate, &cfg.run_options(), rng, &mut PassThrough)?;
        transcript.push_str(&run.result.transcript.to_lines());
        if outcome.is_accepted() {
            outcome = run.result.outcome;
        }
    }
    let (group_path, _) = bulk_admission_paths(cfg.n_drones, cfg.threshold, &cfg.latency);
    let group_report = TimingReport::from_stamps(cfg, Method::GroupAuth, group_path, group_path, outcome);
    let (nr_report, nr_transcript) = nr5g_report(group, cfg, rng);
    transcript.push_str(&nr_transcript);
    Ok(ScenarioRun { reports: alloc::vec![group_report, nr_report], transcript })
}

/// Provisioned state for a swarm-based scenario.
pub(crate) enum Setup<G: PrimeOrderGroup> {
    Inclusion { group: G, swarm: Swarm<G>, candidate: Drone<G> },
    Unification { core: CoreNetwork<G>, a: Swarm<G>, b: Swarm<G> },
}

impl<G: PrimeOrderGroup> Setup<G> {
    pub(crate) fn build(group: G, cfg: &ScenarioConfig, rng: &mut ChaCha20Rng) -> Result<Self, ScenarioError> {
        let mut core = CoreNetwork::new(group, rng);
        let t = cfg.threshold;
        Ok(match cfg.kind {
            ScenarioKind::Unification => {
                let a = core.provision_swarm(t, cfg.n_drones, cfg.guards, rng)?;
                let b = core.provision_swarm(t, cfg.n_drones, cfg.guards, rng)?;
                Setup::Unification { core, a, b }
            }
            _ => {
                let swarm = core.provision_swarm(t, cfg.n_drones, cfg.guards, rng)?;
                let candidate = match cfg.candidate {
                    CandidateKind::Genuine => core.enroll_new_drone(swarm.id)?,
                    CandidateKind::Impostor => core.impostor(swarm.id, rng)?,
                };
                Setup::Inclusion { group, swarm, candidate }
            }
        })
    }

    /// The party whose credentials are presented to the guards.
    pub(crate) fn victim(&self) -> Party {
        match self {
            Setup::Inclusion { candidate, .. } => candidate.party(),
            Setup::Unification { a, .. } => {
                let d_a = a.guards.first().expect("validated swarms have guards");
                Party::Drone(a.drones[d_a].id)
            }
        }
    }

    pub(crate) fn run(
        &mut self,
        cfg: &ScenarioConfig,
        rng: &mut ChaCha20Rng,
        tap: &mut dyn Tap<Party, ProtocolMessage>,
    ) -> Result<RunResult, ScenarioError> {
        let group = self.group();
        let opts = cfg.run_options();
        match self {
            Setup::Inclusion { swarm, candidate, .. } => {
                let run = run_inclusion(&group, swarm, candidate.clone(), &opts, rng, tap)?;
                *candidate = run.candidate;
                Ok(run.result)
            }
            Setup::Unification { core, a, b } => Ok(run_unification(&group, a, b, core, &opts, rng, tap)?),
        }
    }

    fn group(&self) -> G {
        match self {
            Setup::Inclusion { group, .. } => *group,
            Setup::Unification { core, .. } => *core.group(),
        }
    }

    /// Every private scalar held anywhere: shares, cross shares, group keys.
    pub(crate) fn secrets(&self) -> Vec<G::Scalar> {
        let mut out = Vec::new();
        let mut add = |d: &Drone<G>| {
            out.push(d.share.y);
            out.extend(d.group_key);
            if let Some(c) = &d.cross {
                out.push(c.share.y);
            }
        };
        match self {
            Setup::Inclusion { swarm, candidate, .. } => {
                swarm.drones.values().for_each(&mut add);
                add(candidate);
            }
            Setup::Unification { a, b, .. } => {
                a.drones.values().chain(b.drones.values()).for_each(&mut add);
            }
        }
        out
    }

    /// Public values an outsider knows without listening: commitments and the
    /// core's public point.
    pub(crate) fn public_points(&self) -> Vec<G::Point> {
        match self {
            Setup::Inclusion { swarm, candidate, .. } => alloc::vec![swarm.commitment.0, candidate.core_public],
            Setup::Unification { core, a, b } => alloc::vec![a.commitment.0, b.commitment.0, core.public_point()],
        }
    }
}
