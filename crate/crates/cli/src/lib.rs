//! `dpsim`: parse an experiment config, run it, write its artifacts.
//!
//! Exit codes: 0 success, 1 a verification or check failed, 2 invalid
//! configuration or command line, 3 runtime failure.

pub mod commands;
pub mod config;

pub use commands::{dispatch, oracle_checks, oracle_query, CliError, ExitCode, Outcome, Overrides, Report};
pub use config::{load_config, parse_config, Command, ConfigError, ExperimentConfig};
