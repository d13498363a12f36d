//! The `psp` command-line front end.
//!
//! Exit codes: 0 success, 1 validation divergence, 2 bad input or usage,
//! 3 size guard, 4 internal error or infeasible result.

pub mod commands;
pub mod problem;
pub mod report;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use psp_core::PspError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] PspError),
    #[error("{0}")]
    Divergence(String),
    #[error("{0}")]
    Infeasible(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Divergence(_) => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Infeasible(_) => 4,
            CliError::Core(e) => match e {
                PspError::TooLarge { .. } => 3,
                PspError::Internal(_) | PspError::NonMonotone => 4,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmArg {
    Par,
    Da,
    Kolmogorov,
    Distr,
    Brute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RateModel {
    Asymptotic,
    Integral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TreeFormat {
    Json,
    Dot,
    Newick,
}

#[derive(Debug, Clone, Copy, Default, clap::Args)]
pub struct OutputArgs {
    /// One compact JSON document on stdout.
    #[arg(long, conflicts_with = "pretty")]
    pub json: bool,
    /// Indented JSON on stdout.
    #[arg(long)]
    pub pretty: bool,
}

#[derive(Debug, Parser)]
#[command(name = "psp", version, about = "Principal sequence of partitions, omniscience rates and clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the sequence and everything derived from it.
    Psp {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "par")]
        algorithm: AlgorithmArg,
        /// Comma-separated user labels; defaults to the file's order.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        /// Write the DistrPAR message log to this file (distr only).
        #[arg(long)]
        trace: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Minimum sum-rate and an optimal rate vector.
    Omniscience {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "asymptotic")]
        model: RateModel,
        /// Positive weights in user order; picks the weighted-optimal vector.
        #[arg(long, value_delimiter = ',', conflicts_with = "order")]
        weights: Option<Vec<String>>,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<String>>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Network strength of a graph and its critical attack partition.
    Strength {
        file: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Info-clustering dendrogram.
    Cluster {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: TreeFormat,
    },
    /// Cross-check every algorithm and invariant on one instance.
    Validate { file: PathBuf },
}

/// Runs one command, returning what goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Psp { file, algorithm, order, trace, output } => {
            commands::psp(file, *algorithm, order.as_deref(), trace.as_deref(), *output)
        }
        Command::Omniscience { file, model, weights, order, output } => {
            commands::omniscience(file, *model, weights.as_deref(), order.as_deref(), *output)
        }
        Command::Strength { file, output } => commands::strength(file, *output),
        Command::Cluster { file, format } => commands::cluster(file, *format),
        Command::Validate { file } => commands::validate(file),
    }
}
