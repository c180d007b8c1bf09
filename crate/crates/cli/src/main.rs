//! `qcantor`: runs coherence checks, test evaluations, classical
//! extraction, compression and entropy experiments from JSON configurations
//! and writes deterministic JSON or CSV reports.
//!
//! Exit codes: 0 when every checked property holds, 1 when a property is
//! violated or a verdict is negative, 2 on usage or configuration errors.

mod commands;
mod config;
mod demo;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{CliError, Params};
use config::ExperimentConfig;
use report::{Format, Outcome};

#[derive(Parser, Debug)]
#[command(name = "qcantor", version, about = "Quantum algorithmic randomness experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Number of qubits to work at.
    #[arg(long, global = true)]
    depth: Option<usize>,

    /// Orders δ as rationals, e.g. `1/4`; repeat or separate with commas.
    #[arg(long, global = true, value_delimiter = ',')]
    delta: Vec<String>,

    /// Accuracy ε in (0,1).
    #[arg(long, global = true)]
    epsilon: Option<f64>,

    /// Seed for randomized fixtures.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Largest number of qubits any run may use.
    #[arg(long, global = true, env = "QCANTOR_MAX_QUBITS", default_value_t = 12, hide = true)]
    max_qubits: usize,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Check the partial-trace identities of a state.
    Coherence,
    /// Evaluate a state against a test and report verdicts.
    TestEval,
    /// Extract a classical test from a quantum one.
    Bridge,
    /// Compression experiments (`mode`: qc, part1, part2).
    Compress,
    /// Entropy rate and cross-entropy profiles.
    Entropy,
    /// Run the full scenario suite.
    Demo,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Coherence => "coherence",
            Command::TestEval => "test-eval",
            Command::Bridge => "bridge",
            Command::Compress => "compress",
            Command::Entropy => "entropy",
            Command::Demo => "demo",
        }
    }
}

fn load_config(cli: &Cli) -> Result<ExperimentConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Usage(format!("invalid configuration: {e}")))?
        }
        None => ExperimentConfig::default(),
    };
    config.command = Some(cli.command.name().to_string());
    if let Some(d) = cli.depth {
        config.depth = Some(d);
    }
    if !cli.delta.is_empty() {
        config.deltas = cli.delta.clone();
    }
    if let Some(e) = cli.epsilon {
        config.epsilon = Some(e);
    }
    if let Some(s) = cli.seed {
        config.seed = s;
    }
    Ok(config)
}

fn execute(cli: &Cli) -> Result<(ExperimentConfig, Outcome), CliError> {
    let config = load_config(cli)?;
    let default_depth = if cli.command == Command::Demo { 8 } else { 6 };
    let depth = config.depth.unwrap_or(default_depth);
    if depth > cli.max_qubits {
        return Err(CliError::Usage(format!(
            "depth cap exceeded: {depth} qubits requested, at most {} allowed",
            cli.max_qubits
        )));
    }
    let params = Params {
        depth,
        deltas: commands::parse_deltas(&config.deltas)?,
        epsilon: config.epsilon.unwrap_or(0.1),
        seed: config.seed,
    };
    let outcome = match cli.command {
        Command::Coherence => commands::coherence(&config, &params),
        Command::TestEval => commands::test_eval(&config, &params),
        Command::Bridge => commands::bridge(&config, &params),
        Command::Compress => commands::compress(&config, &params),
        Command::Entropy => commands::entropy(&config, &params),
        Command::Demo => demo::demo(params.seed).map_err(CliError::from),
    };
    match outcome {
        Ok(o) => Ok((config, o)),
        Err(CliError::Violation(detail)) => Ok((config, Outcome::violation(detail))),
        Err(e) => Err(e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (config, outcome) = match execute(&cli) {
        Ok(done) => done,
        Err(CliError::Usage(msg)) | Err(CliError::Violation(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let bytes = report::render(cli.format, &config, &outcome);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).map_err(|e| e.to_string())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if outcome.violation {
        for note in &outcome.notes {
            eprintln!("{note}");
        }
        if let Some(detail) = outcome.result.get("error").and_then(|e| e.as_str()) {
            eprintln!("violation: {detail}");
        }
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
