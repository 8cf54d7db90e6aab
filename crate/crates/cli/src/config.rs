//! Scenario files: TOML with the scenario parameters at top level and
//! latency overrides in a `[latency]` table.
//!
//! ```toml
//! scenario = "inclusion"   # inclusion | unification | nr5g | bulk
//! threshold = 5
//! n_drones = 4
//! guards = 4
//! seed = 7
//! adversary = "none"       # none | replay | eavesdrop | mitm
//!
//! [latency]
//! hash_op = "0.2ms"
//! drone_to_drone = "600us"
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::Deserialize;
use swarmauth_core::simnet::{ConfigError, LatencyModel, ScenarioConfig, ScenarioKind};

/// The file as written. Every field but `scenario` is optional.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    scenario: String,
    threshold: Option<usize>,
    n_drones: Option<usize>,
    guards: Option<usize>,
    seed: Option<u64>,
    adversary: Option<String>,
    group: Option<String>,
    candidate: Option<String>,
    parallel_guards: Option<bool>,
    mutual: Option<bool>,
    #[serde(default)]
    latency: BTreeMap<String, String>,
}

/// Parses and validates a scenario file's contents.
///
/// Omitted `guards` defaults to `threshold − 1`; omitted `n_drones` defaults
/// to the guard count for swarm scenarios and to 1 otherwise.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::new("file", e.message()))?;
    let kind: ScenarioKind = file.scenario.parse()?;
    let mut cfg = ScenarioConfig::new(kind);
    if let Some(t) = file.threshold {
        cfg.threshold = t;
    }
    cfg.guards = file.guards.unwrap_or(cfg.threshold.saturating_sub(1));
    cfg.n_drones = file.n_drones.unwrap_or(match kind {
        ScenarioKind::Inclusion | ScenarioKind::Unification => cfg.guards,
        ScenarioKind::Nr5g | ScenarioKind::Bulk => 1,
    });
    if let Some(seed) = file.seed {
        cfg.seed = seed;
    }
    if let Some(a) = file.adversary {
        cfg.adversary = a.parse()?;
    }
    if let Some(g) = file.group {
        cfg.group = g.parse()?;
    }
    if let Some(c) = file.candidate {
        cfg.candidate = c.parse()?;
    }
    cfg.parallel_guards = file.parallel_guards.unwrap_or(false);
    cfg.mutual = file.mutual.unwrap_or(false);
    cfg.latency = parse_latency(&file.latency)?;
    cfg.validate()?;
    Ok(cfg)
}

/// Reads and parses a scenario file.
pub fn load_config(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("file", format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text)
}

fn parse_latency(overrides: &BTreeMap<String, String>) -> Result<LatencyModel, ConfigError> {
    let mut model = LatencyModel::default();
    for (name, value) in overrides {
        let field = format!("latency.{name}");
        let d = parse_duration(value).map_err(|reason| ConfigError::new(&field, reason))?;
        model.set(name, d).map_err(|_| {
            ConfigError::new(
                &field,
                format!("unknown latency field (expected one of {})", LatencyModel::FIELDS.join(", ")),
            )
        })?;
    }
    Ok(model)
}

/// Parses a nonnegative decimal duration with a `us` (or `µs`) or `ms`
/// suffix, exactly, down to the nanosecond.
pub fn parse_duration(text: &str) -> Result<Duration, String> {
    let s = text.trim();
    let (number, nanos_per_unit, max_frac) = if let Some(n) = s.strip_suffix("ms") {
        (n, 1_000_000u64, 6)
    } else if let Some(n) = s.strip_suffix("us").or_else(|| s.strip_suffix("µs")) {
        (n, 1_000u64, 3)
    } else {
        return Err(format!("`{text}` needs a unit suffix, us or ms"));
    };
    let number = number.trim();
    let (int, frac) = number.split_once('.').unwrap_or((number, ""));
    let digits_ok = |d: &str| d.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !digits_ok(int) || !digits_ok(frac) {
        return Err(format!("`{text}` is not a nonnegative decimal"));
    }
    if frac.len() > max_frac {
        return Err(format!("`{text}` is finer than a nanosecond"));
    }
    let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| format!("`{text}` is too large"))? };
    let frac_nanos = if frac.is_empty() {
        0
    } else {
        frac.parse::<u64>().expect("digits") * nanos_per_unit / 10u64.pow(frac.len() as u32)
    };
    int.checked_mul(nanos_per_unit)
        .and_then(|n| n.checked_add(frac_nanos))
        .map(Duration::from_nanos)
        .ok_or_else(|| format!("`{text}` is too large"))
}
