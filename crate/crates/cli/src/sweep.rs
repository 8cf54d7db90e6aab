//! Parameter sweeps: authentication time against the threshold, or against
//! the number of drones admitted at once, for both methods.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Duration;

use swarmauth_core::simnet::{
    run_scenario, ConfigError, CrossoverReport, Method, Millis, ScenarioConfig, ScenarioError, ScenarioKind,
};

pub const CSV_HEADER: [&str; 5] = ["scenario", "method", "t", "n_drones", "time_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    Threshold,
    NDrones,
}

impl FromStr for SweepVariable {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "threshold" | "t" => Ok(SweepVariable::Threshold),
            "n_drones" => Ok(SweepVariable::NDrones),
            _ => Err(ConfigError::new("variable", format!("unknown variable `{s}` (expected threshold or n_drones)"))),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::Threshold => "threshold",
            SweepVariable::NDrones => "n_drones",
        })
    }
}

/// An inclusive integer range over one variable; everything else comes from
/// `base` (latency model, seed, group, and the threshold for drone sweeps).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub from: usize,
    pub to: usize,
    pub step: usize,
    pub base: ScenarioConfig,
}

impl SweepSpec {
    /// Default ranges: thresholds 2..=20, or 25..=100 drones in steps of 25.
    pub fn new(variable: SweepVariable, base: ScenarioConfig) -> Self {
        let (from, to, step) = match variable {
            SweepVariable::Threshold => (2, 20, 1),
            SweepVariable::NDrones => (25, 100, 25),
        };
        Self { variable, from, to, step, base }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.step == 0 {
            return Err(ConfigError::new("step", "must be at least 1"));
        }
        if self.from > self.to {
            return Err(ConfigError::new("from", format!("empty range {}..={}", self.from, self.to)));
        }
        if self.variable == SweepVariable::Threshold && self.from < 2 {
            return Err(ConfigError::new("from", "thresholds start at 2"));
        }
        Ok(())
    }

    pub fn points(&self) -> impl Iterator<Item = usize> {
        (self.from..=self.to).step_by(self.step.max(1))
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow {
    pub scenario: ScenarioKind,
    pub method: Method,
    pub t: usize,
    pub n_drones: usize,
    pub time: Duration,
}

/// Runs every point of the sweep, in order. Each point yields one row per
/// method: a threshold point runs an inclusion and a single baseline
/// authentication; a drone-count point runs a bulk admission.
pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>, ScenarioError> {
    spec.validate()?;
    let mut rows = Vec::new();
    for v in spec.points() {
        let configs = match spec.variable {
            SweepVariable::Threshold => {
                let mut group = spec.base.clone();
                group.kind = ScenarioKind::Inclusion;
                group.threshold = v;
                group.guards = v - 1;
                group.n_drones = v - 1;
                let mut nr = spec.base.clone();
                nr.kind = ScenarioKind::Nr5g;
                nr.threshold = v;
                nr.n_drones = 1;
                vec![group, nr]
            }
            SweepVariable::NDrones => {
                let mut bulk = spec.base.clone();
                bulk.kind = ScenarioKind::Bulk;
                bulk.n_drones = v;
                bulk.guards = bulk.guards.max(bulk.threshold - 1);
                vec![bulk]
            }
        };
        for mut cfg in configs {
            cfg.adversary = Default::default();
            for r in run_scenario(&cfg)?.reports {
                rows.push(SweepRow {
                    scenario: r.scenario,
                    method: r.method,
                    t: r.t,
                    n_drones: r.n_drones,
                    time: r.total_time,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes rows as CSV, times in milliseconds with three decimals.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.scenario.name().to_string(),
            r.method.name().to_string(),
            r.t.to_string(),
            r.n_drones.to_string(),
            Millis(r.time).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Human-readable crossover summary for threshold sweeps.
pub fn crossover_summary(report: &CrossoverReport) -> String {
    let base = Millis(report.baseline);
    let mut out = match report.crossover {
        Some(t) => format!(
            "crossover: group auth is slower than the nr-5g baseline ({base} ms) from t={t}; faster for t<={}",
            t - 1
        ),
        None => format!("crossover: group auth never exceeds the nr-5g baseline ({base} ms)"),
    };
    let bound = swarmauth_core::simnet::analytic::QUOTED_BOUND;
    if !report.quoted_bound_holds {
        out.push_str(&format!("\nwarning: the rule of thumb t<{bound} does NOT hold under this latency model"));
    } else if report.quoted_bound_conservative {
        out.push_str(&format!(
            "\nnote: the rule of thumb t<{bound} holds but is conservative; the model favours group auth up to the crossover"
        ));
    } else {
        out.push_str(&format!("\nnote: the rule of thumb t<{bound} holds"));
    }
    out
}
