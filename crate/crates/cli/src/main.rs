//! `absa-forge`: build, sample, emit, parse and score instruction-tuning
//! data for aspect-based sentiment analysis.

mod commands;
mod config;
mod error;
mod manifest;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{emit, eval, fewshot, import, inspect, parse, pipeline, report};
use crate::config::Config;

pub const SUBCOMMANDS: [&str; 8] = ["import", "inspect", "fewshot", "emit", "parse", "eval", "report", "pipeline"];

const AFTER_HELP: &str = "\
Formats:
  canonical   JSON lines; header {\"format\":\"absa-forge/canonical\",\"version\":1,...},
              then one {\"id\",\"text\",\"quads\"} object per example.
  targets     tuples are rendered with clause templates and joined by the exact
              five-byte string \" [SSEP] \" (space, [SSEP], space).
  mtl corpus  JSON lines; header {\"format\":\"absa-forge/mtl\",\"version\":1,...},
              then {\"id\",\"task\",\"template_index\",\"input\",\"target\"} records.

Config:
  --config FILE reads a TOML file with one table per subcommand ([emit], [pipeline], ...)
  whose keys are long flag names. Flags given on the command line override the file;
  switches can only be turned on. No environment variables are read.

Exit status: 0 success, 1 data error (per-line diagnostics on stderr), 2 usage error.";

#[derive(Debug, Parser)]
#[command(name = "absa-forge", version, about, after_help = AFTER_HELP)]
struct Cli {
    /// TOML config file with per-subcommand defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Log progress to stderr (repeat for debug output).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Convert a raw quad or aste annotation file into the canonical format.
    Import(import::ImportArgs),
    /// Print dataset statistics.
    Inspect(inspect::InspectArgs),
    /// Select a stratified k-shot subset of canonical splits.
    Fewshot(fewshot::FewshotArgs),
    /// Emit a text, instruction or multi-task training corpus.
    Emit(emit::EmitArgs),
    /// Parse generated text into tuples.
    #[command(after_help = "Generated text is split on [SSEP]; each segment is decoded right to left \
(sentiment word, then category or `means it`, then the first `is`). Segments that cannot be \
decoded are kept with a reason code: no_sentiment_word, unknown_category, missing_means, \
missing_is, empty_term, sentiment_mismatch.")]
    Parse(parse::ParseArgs),
    /// Score parsed predictions against gold tuples (micro P/R/F1).
    Eval(eval::EvalArgs),
    /// Aggregate evaluation reports across runs and seeds.
    Report(report::ReportArgs),
    /// Run the few-shot × seed grid: sample, emit and optionally score each cell.
    Pipeline(pipeline::PipelineArgs),
}

fn run(cli: Cli, argv: Vec<String>) -> error::Result<()> {
    let mut config = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    config.check_unused()?;
    match cli.command {
        Command::Import(a) => import::run(config.resolve("import", &a)?, &argv),
        Command::Inspect(a) => inspect::run(config.resolve("inspect", &a)?, &argv),
        Command::Fewshot(a) => fewshot::run(config.resolve("fewshot", &a)?, &argv),
        Command::Emit(a) => emit::run(config.resolve("emit", &a)?, &argv),
        Command::Parse(a) => parse::run(config.resolve("parse", &a)?, &argv),
        Command::Eval(a) => eval::run(config.resolve("eval", &a)?, &argv),
        Command::Report(a) => report::run(config.resolve("report", &a)?, &argv),
        Command::Pipeline(a) => pipeline::run(config.resolve("pipeline", &a)?, &argv),
    }
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .format_target(false)
        .init();
    match run(cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => ExitCode::from(error::report(&e) as u8),
    }
}
