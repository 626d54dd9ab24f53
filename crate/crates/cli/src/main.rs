use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tomgame_cli::pipeline::{estimate_kind, pipeline, PipelineOptions};
use tomgame_cli::{load_logs, run_tournament, TournamentConfig};
use tomgame_core::analytics::DEFAULT_BLOCK;
use tomgame_core::rating::{bootstrap_ci, power_plan};
use tomgame_core::{Axis, Error, GameKind};

const EXIT_USAGE: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_PARTIAL: u8 = 3;

#[derive(Parser)]
#[command(name = "tomgame", version, about = "Strategic-reasoning game tournaments and estimators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum EstGame {
    Sc,
    Rpd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Jsonl,
}

#[derive(Subcommand)]
enum Command {
    /// Run a tournament described by a TOML config file.
    Tournament { config: PathBuf },
    /// Per-agent rationality estimates from a log file or directory.
    Estimate {
        logs: PathBuf,
        #[arg(long)]
        game: EstGame,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        /// Write to this file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// ELO ratings with bootstrap intervals on one axis.
    Rate {
        logs: PathBuf,
        #[arg(long)]
        axis: String,
        #[arg(long, default_value_t = 1000)]
        boot: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full report bundle: estimates, ratings, convergence, correlations, runs tests, power.
    Analyze {
        logs: PathBuf,
        /// Bundle directory (default: `<logs>/report`).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1000)]
        boot: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50.0)]
        elo_gap: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_BLOCK)]
        block: u32,
    },
    /// Games needed to detect an ELO gap.
    Power {
        #[arg(long)]
        elo_gap: f64,
        #[arg(long, default_value_t = 0.05)]
        alpha: f64,
    },
}

enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<u8, Failure>;

fn emit_rows<T: Serialize>(rows: &[T], format: Format, out: Option<&Path>) -> Result<(), Error> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut w = std::io::BufWriter::new(sink);
            for r in rows {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Tournament { config } => {
            let cfg = TournamentConfig::load(&config)?;
            let summary = run_tournament(&cfg)?;
            for k in &summary.manifest.kinds {
                println!("{}: {} games, {} forfeits -> {}", k.game_kind, k.games, k.forfeits, k.log);
            }
            println!("logs in {}", cfg.output_dir.display());
            Ok(0)
        }
        Command::Estimate { logs, game, format, out } => {
            let kind = match game {
                EstGame::Sc => GameKind::StrategicClaim,
                EstGame::Rpd => GameKind::RepeatedPD,
            };
            let records = load_logs(&logs)?;
            if !records.iter().any(|r| r.game_kind == kind) {
                eprintln!("no {kind} games in {}", logs.display());
                return Ok(EXIT_PARTIAL);
            }
            let (rows, notes) = estimate_kind(&records, kind);
            emit_rows(&rows, format, out.as_deref())?;
            for n in &notes {
                eprintln!("{n}");
            }
            Ok(if notes.is_empty() { 0 } else { EXIT_PARTIAL })
        }
        Command::Rate { logs, axis, boot, seed, out } => {
            let axis: Axis = axis.parse().map_err(|e: Error| Failure::Usage(e.to_string()))?;
            let records = load_logs(&logs)?;
            if !records.iter().any(|r| r.axis == axis) {
                eprintln!("no games on axis {axis} in {}", logs.display());
                return Ok(EXIT_PARTIAL);
            }
            let table = bootstrap_ci(&records, axis, boot, seed)?;
            emit_rows(&table.rows, Format::Csv, out.as_deref())?;
            for n in &table.notes {
                eprintln!("{n}");
            }
            Ok(0)
        }
        Command::Analyze {
            logs,
            out,
            boot,
            seed,
            elo_gap,
            alpha,
            block,
        } => {
            let out = out.unwrap_or_else(|| {
                if logs.is_dir() {
                    logs.join("report")
                } else {
                    logs.with_extension("report")
                }
            });
            let opts = PipelineOptions {
                elo_gap,
                alpha,
                n_boot: boot,
                seed,
                block,
            };
            let outcome = pipeline(&logs, &out, &opts)?;
            for r in &outcome.manifest.reports {
                match &r.note {
                    None => println!("{:<14} written", r.report),
                    Some(n) => println!("{:<14} skipped: {n}", r.report),
                }
            }
            println!("bundle in {}", out.display());
            Ok(if outcome.partial() { EXIT_PARTIAL } else { 0 })
        }
        Command::Power { elo_gap, alpha } => {
            let plan = power_plan(elo_gap, alpha)?;
            println!("{}", serde_json::to_string_pretty(&plan).map_err(Error::from)?);
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_VALIDATION)
        }
    }
}
