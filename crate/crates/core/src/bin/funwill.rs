use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use funwill_core::agents::{agent_unpredictability, archetype, AgentProfile, Archetype, ArchetypeKind};
use funwill_core::experiment::emit::{render_concentration, write_file};
use funwill_core::experiment::{
    render, run_collapse, run_distort, run_lln, run_power, ExperimentConfig, ExperimentError,
    OutputFormat,
};

const SEED_ENV: &str = "FUNWILL_SEED";

#[derive(Parser)]
#[command(name = "funwill", version, about = "Will-distorted choice and Born-rule deviation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed; overrides the config's seed. Falls back to $FUNWILL_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output file; overrides the config's output. Defaults to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format; overrides the config's format.
    #[arg(long, global = true)]
    format: Option<OutputFormat>,

    /// Suppress the summary line on stderr.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// σ-sweep of the distorted distribution, its entropy and gradient.
    Distort,
    /// Directed collapse sampling through the will-prepared POVM.
    Collapse,
    /// Detection power over the (σ, trials, noise) grid.
    Power,
    /// Print the canonical agent profiles.
    Archetypes,
    /// Weak-law concentration of the sample mean.
    Lln,
}

#[derive(Serialize)]
struct ArchetypeSummary {
    #[serde(flatten)]
    profile: AgentProfile,
    effective: Vec<f64>,
    xi_bits: f64,
}

fn resolve_seed(cli: Option<u64>, config: Option<u64>) -> Result<u64, ExperimentError> {
    if let Some(s) = cli.or(config) {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| ExperimentError::ConfigInvalid {
            field: SEED_ENV.into(),
            message: format!("{v:?} is not an unsigned 64-bit integer"),
        }),
        Err(_) => Ok(0),
    }
}

fn load(cli: &Cli) -> Result<ExperimentConfig, ExperimentError> {
    match &cli.config {
        Some(path) => ExperimentConfig::load(path),
        None => Err(ExperimentError::ConfigInvalid {
            field: "--config".into(),
            message: "this subcommand needs a config file".into(),
        }),
    }
}

fn run(cli: &Cli) -> Result<(), ExperimentError> {
    let config = match (cli.command, &cli.config) {
        (Command::Archetypes, None) => None,
        _ => Some(load(cli)?),
    };
    let out = cli.out.clone().or_else(|| config.as_ref().and_then(|c| c.output.clone()));
    let format = cli
        .format
        .or_else(|| config.as_ref().and_then(|c| c.format))
        .or_else(|| {
            out.as_ref()
                .filter(|p| p.extension().is_some_and(|e| e == "json"))
                .map(|_| OutputFormat::Json)
        })
        .unwrap_or(OutputFormat::Csv);
    let seed = resolve_seed(cli.seed, config.as_ref().and_then(|c| c.seed))?;

    let (text, rows) = match (cli.command, &config) {
        (Command::Archetypes, _) => {
            let particle = config.as_ref().map(|c| c.nature.clone());
            let profiles: Vec<ArchetypeSummary> = ArchetypeKind::ALL
                .into_iter()
                .map(|k| {
                    let profile = archetype(&Archetype::from_kind(k, particle.clone()));
                    ArchetypeSummary {
                        effective: profile.effective().weights().to_vec(),
                        xi_bits: agent_unpredictability(&profile),
                        profile,
                    }
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&profiles).expect("profiles serialize");
            s.push('\n');
            (s, profiles.len())
        }
        (Command::Lln, Some(c)) => {
            let points = run_lln(c, seed)?;
            (render_concentration(&points, format), points.len())
        }
        (cmd, Some(c)) => {
            let record = match cmd {
                Command::Distort => run_distort(c, seed)?,
                Command::Collapse => run_collapse(c, seed)?,
                _ => run_power(c, seed)?,
            };
            (render(&record, format)?, record.rows.len())
        }
        (_, None) => unreachable!("config loaded for every other subcommand"),
    };

    match &out {
        Some(path) => {
            write_file(path, &text)?;
            if !cli.quiet {
                eprintln!("wrote {rows} rows to {} (seed {seed})", path.display());
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
