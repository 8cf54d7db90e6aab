//! The `run`, `sweep`, and `attack` subcommands.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use swarmauth_core::simnet::{
    inject_adversary, run_scenario, AdversaryMode, CrossoverReport, ScenarioConfig, ScenarioError, ScenarioKind,
};

use crate::config::load_config;
use crate::sweep::{crossover_summary, run_sweep, write_csv, SweepSpec, SweepVariable};

/// Success, or the attack was thwarted.
pub const EXIT_OK: u8 = 0;
/// Bad configuration, usage, or I/O.
pub const EXIT_CONFIG: u8 = 1;
/// The protocol rejected the run, or an attack succeeded.
pub const EXIT_REJECTED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "swarmauth", version, about = "Swarm group-authentication scenarios, sweeps, and attacks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one scenario and print its timing report.
    Run(RunArgs),
    /// Sweep threshold or drone count and write CSV.
    Sweep(SweepArgs),
    /// Attack a scenario and check that the attack is thwarted.
    Attack(AttackArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Override the file's seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the message transcript here, one line per message.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// `threshold` or `n_drones`.
    #[arg(long)]
    pub variable: String,
    #[arg(long)]
    pub from: Option<usize>,
    #[arg(long)]
    pub to: Option<usize>,
    #[arg(long)]
    pub step: Option<usize>,
    /// Base scenario for fixed parameters (latency, group, threshold, seed).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; standard output if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    /// `replay`, `eavesdrop`, or `mitm`.
    #[arg(long)]
    pub mode: String,
    /// Scenario to attack; a default inclusion if omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Runs a parsed command, writing results to `out` and diagnostics to `err`.
pub fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a, out),
        Command::Sweep(a) => cmd_sweep(&a, out),
        Command::Attack(a) => cmd_attack(&a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Anything that ends a command with [`EXIT_CONFIG`].
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("invalid configuration: {0}")]
    Config(#[from] swarmauth_core::simnet::ConfigError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

fn io_error(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn base_config(path: Option<&PathBuf>, default: ScenarioKind, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let mut cfg = match path {
        Some(p) => load_config(p)?,
        None => ScenarioConfig::new(default),
    };
    if let Some(s) = seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let cfg = base_config(Some(&args.config), ScenarioKind::Inclusion, args.seed)?;
    let run = run_scenario(&cfg)?;
    for r in &run.reports {
        let _ = writeln!(out, "{r}");
    }
    if let Some(path) = &args.out {
        std::fs::write(path, &run.transcript).map_err(io_error(path))?;
    }
    Ok(if run.outcome().is_accepted() { EXIT_OK } else { EXIT_REJECTED })
}

pub fn cmd_sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let variable: SweepVariable = args.variable.parse()?;
    let base = base_config(args.config.as_ref(), ScenarioKind::Inclusion, args.seed)?;
    let mut spec = SweepSpec::new(variable, base);
    spec.from = args.from.unwrap_or(spec.from);
    spec.to = args.to.unwrap_or(spec.to);
    spec.step = args.step.unwrap_or(spec.step);
    let rows = run_sweep(&spec)?;
    match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(io_error(path))?;
            write_csv(&rows, BufWriter::new(file))?;
            let _ = writeln!(out, "wrote {} rows to {}", rows.len(), path.display());
        }
        None => write_csv(&rows, &mut *out)?,
    }
    if variable == SweepVariable::Threshold {
        let _ = writeln!(out, "{}", crossover_summary(&CrossoverReport::new(&spec.base.latency)));
    }
    Ok(EXIT_OK)
}

pub fn cmd_attack(args: &AttackArgs, out: &mut dyn Write) -> Result<u8, CliError> {
    let mode: AdversaryMode = args.mode.parse()?;
    if mode == AdversaryMode::None {
        return Err(swarmauth_core::simnet::ConfigError::new("mode", "expected replay, eavesdrop, or mitm").into());
    }
    let mut cfg = base_config(args.config.as_ref(), ScenarioKind::Inclusion, args.seed)?;
    cfg.adversary = AdversaryMode::None;
    let report = inject_adversary(&cfg, mode)?;
    for line in &report.details {
        let _ = writeln!(out, "{line}");
    }
    let verdict = if report.thwarted { "thwarted" } else { "SUCCEEDED" };
    let _ = writeln!(out, "attack={} scenario={} outcome={} result={verdict}", mode, cfg.kind, report.outcome);
    Ok(if report.thwarted { EXIT_OK } else { EXIT_REJECTED })
}
