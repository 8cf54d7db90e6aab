//! Deterministic network simulation: event engine, latency model, scenarios.

pub mod adversary;
pub mod analytic;
pub mod engine;
pub mod latency;
pub mod scenario;

pub use adversary::{inject_adversary, Adversary, AdversaryMode, AttackReport};
pub use analytic::{crossover_threshold, time_5g, time_bulk_admission, time_group_auth, CrossoverReport};
pub use engine::{Breakdown, OpCount, Phase, Stamp};
pub use latency::LatencyModel;
pub use scenario::{
    run_scenario, CandidateKind, ConfigError, GroupChoice, Method, Millis, ScenarioConfig, ScenarioError, ScenarioKind,
    ScenarioRun, TimingReport,
};
