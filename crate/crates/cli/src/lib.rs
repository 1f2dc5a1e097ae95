//! Library side of the `prepsim` command-line tool: scenario files, the four
//! commands and their reports.
//!
//! Every command returns a [`Report`]; the process exits 0 when all of its
//! checks pass, 1 when any fails and 2 on errors.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod scenario;

pub use commands::{run_command, run_scenario};
pub use config::{Cli, Command, OutputFormat, RunConfig};
pub use error::{CliError, Result};
pub use report::{Check, Payload, Report};
pub use scenario::{load_scenario, parse_scenario, parse_scenario_str, spec_to_scenario, Scenario, ScenarioFile, Setup};
