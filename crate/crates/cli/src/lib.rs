//! Command-line driver: configuration, invariant suites, runs, analysis,
//! reports and parameter sweeps.

pub mod commands;
pub mod config;
pub mod output;
pub mod suites;
pub mod svg;

pub use commands::{cmd_analyze, cmd_report, cmd_run, cmd_sweep, cmd_verify, Outcome};
pub use config::{parse_config, ConfigError, RunConfig};
pub use output::{CliError, CliResult, OutputLock};
