//! `qgdm` — batch runner for the quantum-game driving experiments.
//!
//! The single subcommand, `run`, loads a JSON experiment config, applies any
//! command-line narrowing (scenario/policy filters, episode count, seed,
//! output directory, format, tracing), executes the sweep, and writes the
//! report files. Exit code 0 on success, nonzero on any abort. The binary
//! reads no environment variables; everything comes from the config file
//! and the flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qgdm_core::harness::{emit_report, run_batch, ExperimentConfig, ReportFormat};
use qgdm_core::policy::PolicyKind;
use qgdm_core::sim::ScenarioKind;

#[derive(Parser)]
#[command(
    name = "qgdm",
    version,
    about = "Monte-Carlo driving experiments with quantum-game decision policies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment described by a JSON config file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Experiment config file (JSON).
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Replace the config's scenario list (repeatable).
    #[arg(long = "scenario", value_name = "S")]
    scenarios: Vec<ScenarioKind>,
    /// Replace the config's policy list (repeatable).
    #[arg(long = "policy", value_name = "P")]
    policies: Vec<PolicyKind>,
    /// Episodes per (scenario, policy) cell.
    #[arg(long, value_name = "N")]
    episodes: Option<u64>,
    /// Base seed.
    #[arg(long, value_name = "K")]
    seed: Option<u64>,
    /// Output directory for report and trace files.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Report format.
    #[arg(long, value_name = "csv|json")]
    format: Option<ReportFormat>,
    /// Additionally write per-episode JSON-lines decision traces.
    #[arg(long)]
    trace: bool,
}

/// Minimal stderr logger so library warnings (e.g. a quantum provider
/// falling back to equal probabilities) reach the operator without any
/// environment-variable configuration.
struct StderrLogger;

impl log::Log for StderrLogger {
    fn enabled(&self, metadata: &log::Metadata) -> bool {
        metadata.level() <= log::Level::Warn
    }

    fn log(&self, record: &log::Record) {
        if self.enabled(record.metadata()) {
            eprintln!("{}: {}", record.level().to_string().to_lowercase(), record.args());
        }
    }

    fn flush(&self) {}
}

static LOGGER: StderrLogger = StderrLogger;

fn main() -> ExitCode {
    let _ = log::set_logger(&LOGGER);
    log::set_max_level(log::LevelFilter::Warn);
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}

fn run(args: RunArgs) -> Result<(), String> {
    let mut config = ExperimentConfig::from_path(&args.config)
        .map_err(|e| format!("{}: {e}", args.config.display()))?;
    if !args.scenarios.is_empty() {
        config.scenarios = args.scenarios;
    }
    if !args.policies.is_empty() {
        config.policies = args.policies;
    }
    if let Some(n) = args.episodes {
        config.episodes = Some(n);
    }
    if let Some(k) = args.seed {
        config.seed = k;
    }
    if args.out.is_some() {
        config.out_dir = args.out;
    }
    if let Some(format) = args.format {
        config.format = format;
    }
    if args.trace {
        config.trace = true;
    }
    config.validate().map_err(|e| e.to_string())?;

    let report = run_batch(&config).map_err(|e| e.to_string())?;
    let dir = config.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let written = emit_report(&report, config.format, &dir).map_err(|e| e.to_string())?;
    print!("{}", qgdm_core::harness::render_csv(&report.rows));
    for path in &written {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
