//! `xmarket`: descriptive statistics, correlation, feature tables and
//! regression experiments for a pair of index series.
//!
//! Exit codes: 0 success, 1 invalid arguments or configuration, 2 unreadable
//! or malformed input, 3 no overlapping dates, 4 anything else.

mod commands;
mod output;
mod source;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use xmarket_core::Error;

#[derive(Parser, Debug)]
#[command(name = "xmarket", version, about = "Cross-market index statistics and regression experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Worker threads for model fitting (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Summary statistics of one or more price series.
    Stats(commands::StatsArgs),
    /// Pearson correlation of the OHLC columns of two date-aligned series.
    Corr(commands::CorrArgs),
    /// Lag / rolling-window feature table with the target column.
    Features(commands::FeaturesArgs),
    /// Fit and score the regressors on one train/test split.
    Run(commands::RunArgs),
    /// Repeat `run` over several split seeds and summarize each metric.
    Sweep(commands::SweepArgs),
    /// Least-squares line of the target close on the predictor close with a confidence band.
    FitLine(commands::FitLineArgs),
    /// Row counts, date ranges and alignment of the embedded corpus as JSON.
    Manifest(OutputArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Output format (each command has its own default).
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout; relative paths resolve against $XMARKET_OUT_DIR when set.
    #[arg(long, short)]
    output: Option<std::path::PathBuf>,
}

/// Failure carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn config(problems: Vec<String>) -> Self {
        Failure { code: 1, message: problems.join("\n") }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_) => 1,
            Error::Io { .. } | Error::Parse { .. } | Error::MissingColumn { .. } | Error::EmptySeries(_) => 2,
            Error::EmptyIntersection { .. } => 3,
            _ => 4,
        };
        Failure { code, message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(1);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(4);
        }
    }
    let result = match cli.command {
        Command::Stats(a) => commands::stats(a),
        Command::Corr(a) => commands::corr(a),
        Command::Features(a) => commands::features(a),
        Command::Run(a) => commands::run(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::FitLine(a) => commands::fit_line(a),
        Command::Manifest(o) => commands::manifest(o),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            for line in f.message.lines() {
                eprintln!("error: {line}");
            }
            ExitCode::from(f.code)
        }
    }
}
