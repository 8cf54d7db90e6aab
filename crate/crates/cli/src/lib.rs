//! Command-line front end for `swarmauth-core`: runs scenario files, sweeps
//! parameters into CSV, and checks that attacks are thwarted.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 protocol
//! rejection (or, for `attack`, an attack that was not thwarted).

pub mod commands;
pub mod config;
pub mod sweep;

pub use commands::{execute, Cli, EXIT_CONFIG, EXIT_OK, EXIT_REJECTED};
