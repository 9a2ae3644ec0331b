mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use simsmooth::evaluation::{BaseModelId, Method};
use simsmooth::similarity::{Measure, Neighborhood};

use config::Format;

#[derive(Debug, Parser)]
#[command(
    name = "simsmooth",
    version,
    about = "Similarity-based smoothing for sparse noun/verb pair estimates"
)]
struct Cli {
    /// More log output (repeatable); RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read pair counts, print corpus statistics, optionally write a snapshot.
    Ingest(IngestArgs),
    /// List the nearest nouns of a word under each similarity measure.
    Neighbors(NeighborsArgs),
    /// Run the pseudo-word disambiguation experiment.
    Evaluate(EvaluateArgs),
    /// Query the estimates for one noun/verb pair.
    Prob(ProbArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Tab-separated `noun verb [count]` lines, or a JSON snapshot.
    #[arg(long)]
    input: PathBuf,
    /// Where to write the JSON snapshot.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = simsmooth::basemodel::DEFAULT_GT_CUTOFF)]
    gt_cutoff: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Debug, Args)]
struct NeighborsArgs {
    #[arg(long)]
    input: PathBuf,
    /// Target noun.
    #[arg(long)]
    word: String,
    /// Comma-separated measures.
    #[arg(long, default_value = "KL,AVG,L1,CONFUSION", value_delimiter = ',')]
    measures: Vec<Measure>,
    /// How many neighbors to list per measure.
    #[arg(short, long, default_value_t = 10)]
    n: usize,
    #[arg(long, default_value = "MLE-1")]
    model: BaseModelId,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = simsmooth::basemodel::DEFAULT_GT_CUTOFF)]
    gt_cutoff: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// TOML config, or a JSON config or report whose config is reused.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated subset of MLE-1, MLE-o1, BO-1, BO-o1.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<BaseModelId>>,
    /// Comma-separated subset of MLE, KATZ, RAND, KL, AVG, L1, CONFUSION.
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<Method>>,
    /// `start:step:end` or a comma-separated list.
    #[arg(long)]
    beta_grid: Option<String>,
    /// `all`, `top:K`, `threshold:T` or `top:K,threshold:T`.
    #[arg(long)]
    neighborhood: Option<Neighborhood>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    gt_cutoff: Option<u64>,
    /// Worker threads; does not affect the report.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ProbArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    noun: String,
    #[arg(long)]
    verb: String,
    #[arg(long, default_value = "AVG")]
    measure: Measure,
    #[arg(long, default_value = "MLE-1")]
    model: BaseModelId,
    #[arg(long, default_value_t = 4.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma: f64,
    #[arg(long, default_value = "all")]
    neighborhood: Neighborhood,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = simsmooth::basemodel::DEFAULT_GT_CUTOFF)]
    gt_cutoff: u64,
    #[arg(long, value_enum, default_value_t = Format::Tsv)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(3),
            };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let result = match cli.command {
        Command::Ingest(a) => commands::ingest(a),
        Command::Neighbors(a) => commands::neighbors(a),
        Command::Evaluate(a) => commands::evaluate(a),
        Command::Prob(a) => commands::prob(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
