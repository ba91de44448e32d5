//! Command-line front end for the reaction-diffusion solver: JSON scenario
//! configs, initial-datum construction, subcommand drivers, and bit-stable
//! CSV emission.
//!
//! The binary is `rds` with subcommands `run`, `classify`, `verify-lemmas`,
//! `sweep`, and `convergence`; the global `--quiet` flag suppresses summary
//! lines.  Exit codes: 0 success, 1 config error, 2 suspected blow-up,
//! 3 time-step underflow, 4 out-of-band verification result.

pub mod commands;
pub mod config;
pub mod csvio;
pub mod error;
pub mod initial;

pub use commands::{cmd_classify, cmd_convergence, cmd_run, cmd_sweep, cmd_verify_lemmas};
pub use config::{Scenario, ScenarioConfig, SweepConfig};
pub use error::CliError;
