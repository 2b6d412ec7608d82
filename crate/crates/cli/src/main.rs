use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use qdgen_core::campaign::{self, CampaignSpec};
use qdgen_core::EvolverConfig;

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

/// Evolve TSP instances that separate two construction heuristics.
#[derive(Debug, Parser)]
#[command(name = "qdgen", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write random uniform instances.
    Generate {
        /// Cities per instance.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Number of instances.
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance file format: json or tsp.
        #[arg(long, default_value = "json")]
        format: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one evolver from a config file.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run every combination of a campaign file.
    Campaign {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Master seed the per-run seeds are derived from.
        #[arg(long)]
        seed: Option<u64>,
        /// Parallel runs; does not affect results.
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Summarize a campaign (or run) directory into tables and tidy CSVs.
    Analyze {
        /// Campaign or run directory.
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Overrides {
    /// Replace the configured budget.
    #[arg(long)]
    budget: Option<u64>,
    /// Replace the configured snapshot interval.
    #[arg(long)]
    snapshot_every: Option<u64>,
}

enum Outcome {
    Done,
    Partial,
}

/// Error class deciding the exit code.
enum Failure {
    Usage(anyhow::Error),
    Validation(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Validation(e.into())
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QDGEN_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::Partial) => ExitCode::from(EXIT_PARTIAL),
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Validation(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}

fn execute(command: Command) -> Result<Outcome, Failure> {
    match command {
        Command::Generate {
            n,
            count,
            seed,
            format,
            out,
        } => {
            if count == 0 {
                return Err(Failure::Usage(anyhow::anyhow!("--count must be at least 1")));
            }
            let paths = campaign::generate_instances(n, count, seed, &format, &out)?;
            println!("wrote {} instances to {}", paths.len(), out.display());
            Ok(Outcome::Done)
        }
        Command::Evolve {
            config,
            out,
            seed,
            overrides,
        } => {
            let text = read(&config)?;
            let mut cfg = EvolverConfig::from_json_str(&text)
                .with_context(|| format!("invalid config {}", config.display()))?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            if let Some(b) = overrides.budget {
                cfg.budget = b;
            }
            if let Some(s) = overrides.snapshot_every {
                cfg.snapshot_every = s;
            }
            cfg.validate()
                .with_context(|| format!("invalid config {}", config.display()))?;
            let manifest = campaign::run_to_dir(&cfg, &out)?;
            println!(
                "{}: {} boxes covered after {} evaluations -> {}",
                manifest.run_id,
                manifest.boxes_covered,
                manifest.evaluations,
                out.display()
            );
            Ok(Outcome::Done)
        }
        Command::Campaign {
            config,
            out,
            seed,
            workers,
            overrides,
        } => {
            let text = read(&config)?;
            let mut spec = CampaignSpec::from_json_str(&text)
                .with_context(|| format!("invalid campaign {}", config.display()))?;
            if let Some(seed) = seed {
                spec.master_seed = seed;
            }
            if let Some(w) = workers {
                spec.workers = w;
            }
            if let Some(b) = overrides.budget {
                spec.budget = b;
            }
            if let Some(s) = overrides.snapshot_every {
                spec.snapshot_every = s;
            }
            let report = campaign::run_campaign(&spec, &out, spec.workers)?;
            println!(
                "{} runs completed, {} failed -> {}",
                report.completed.len(),
                report.failed.len(),
                out.display()
            );
            for (id, e) in &report.failed {
                eprintln!("run {id} failed: {e}");
            }
            Ok(if report.failed.is_empty() {
                Outcome::Done
            } else {
                Outcome::Partial
            })
        }
        Command::Analyze { dir, out } => {
            let analysis = campaign::analyze(&dir)?;
            analysis.write(&out)?;
            print!("{}", analysis.table.to_text());
            for (path, reason) in &analysis.skipped {
                eprintln!("skipped {}: {reason}", path.display());
            }
            Ok(if analysis.skipped.is_empty() {
                Outcome::Done
            } else {
                Outcome::Partial
            })
        }
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}
