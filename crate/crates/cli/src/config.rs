use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Run,
    RaioCheck,
    Sweep,
    Validate,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Run => "run",
            Self::RaioCheck => "raio-check",
            Self::Sweep => "sweep",
            Self::Validate => "validate",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Pretty-printed JSON document.
    #[default]
    Json,
    /// Tab-separated `path value` rows.
    Table,
}

/// Everything one invocation needs; built from the command line or by hand.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub scenario_path: PathBuf,
    /// Root seed. `None` means 0 for sweeps and the scenario's own seed otherwise.
    pub seed: Option<u64>,
    pub trials: u64,
    pub output_format: OutputFormat,
    pub tolerance_overrides: Vec<(String, f64)>,
    pub out: Option<PathBuf>,
    /// Worker threads for sweeps; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, scenario_path: impl Into<PathBuf>) -> Self {
        Self {
            command,
            scenario_path: scenario_path.into(),
            seed: None,
            trials: 1,
            output_format: OutputFormat::Json,
            tolerance_overrides: Vec::new(),
            out: None,
            threads: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_tolerance(mut self, name: &str, value: f64) -> Self {
        self.tolerance_overrides.push((name.to_string(), value));
        self
    }
}

#[derive(Debug, Parser)]
#[command(name = "prepsim", version, about = "Run preparator scenarios, RAIO checks and seeded property sweeps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run the preparation and report the prepared and evolved states.
    Run(CommonArgs),
    /// Check the RAIO conditions and equality for the scenario.
    RaioCheck(CommonArgs),
    /// Seeded randomized sweep; trial t uses seed + t.
    Sweep(CommonArgs),
    /// Load the scenario and audit every operator invariant.
    Validate(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, env = "PREPSIM_SEED")]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    /// Tolerance override, e.g. `identity_eps=1e-8`; repeatable.
    #[arg(long = "tolerance", value_name = "NAME=VALUE", value_parser = parse_tolerance)]
    pub tolerances: Vec<(String, f64)>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sweep worker threads.
    #[arg(long)]
    pub threads: Option<usize>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let name = name.trim();
    if !matches!(name, "validation_eps" | "identity_eps" | "certainty_eps") {
        return Err(format!(
            "unknown tolerance `{name}` (validation_eps, identity_eps, certainty_eps)"
        ));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value for {name}: {e}"))?;
    Ok((name.to_string(), value))
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        let (command, args) = match cli.command {
            CliCommand::Run(a) => (Command::Run, a),
            CliCommand::RaioCheck(a) => (Command::RaioCheck, a),
            CliCommand::Sweep(a) => (Command::Sweep, a),
            CliCommand::Validate(a) => (Command::Validate, a),
        };
        Self {
            command,
            scenario_path: args.scenario,
            seed: args.seed,
            trials: args.trials,
            output_format: args.format,
            tolerance_overrides: args.tolerances,
            out: args.out,
            threads: args.threads,
        }
    }
}
