//! `ncd` command-line driver: distance/kernel matrices, axiom audits,
//! grid-searched training, evaluation, benchmarks and comparison reports.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use ncd_core::{CompressorKind, KernelKind, SymmetrisationPolicy};

pub use crate::config::{Overrides, RunConfig};
pub use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "ncd",
    version,
    about = "Normalised compression distance toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute and write a distance matrix (and optionally kernels).
    Matrix {
        /// Column samples from a second file in the dataset's format.
        #[arg(long)]
        against: Option<PathBuf>,
    },
    /// Check the metric axioms and report witnesses.
    Audit,
    /// Grid search with cross-validation, refit, test predictions.
    Train,
    /// Re-score a trained model on the test split.
    Evaluate,
    /// Time matrix construction per compressor and policy.
    Bench,
    /// Best kernelised model against best distance KNN, per policy.
    Report,
}

fn parse_penalty(s: &str) -> Result<f64, String> {
    match s {
        "none" | "0" => Ok(0.0),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

#[derive(Debug, Args)]
pub struct Flags {
    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Dataset file; overrides the configured path.
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// ncd, levenshtein, hamming or ratio.
    #[arg(long, global = true)]
    pub metric: Option<String>,
    #[arg(long, global = true)]
    pub compressor: Option<CompressorKind>,
    #[arg(long, global = true)]
    pub level: Option<u32>,
    #[arg(long, global = true)]
    pub symmetrisation: Option<SymmetrisationPolicy>,
    #[arg(long, global = true)]
    pub kernel: Option<KernelKind>,
    /// Comma-separated kernel parameters.
    #[arg(long, global = true, value_delimiter = ',')]
    pub lambda: Option<Vec<f64>>,
    /// knn, kernel_knn, kernel_logreg or kernel_svc.
    #[arg(long, global = true)]
    pub model: Option<String>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub k: Option<Vec<usize>>,
    /// Comma-separated l2 penalties; "none" for no penalty.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_penalty)]
    pub penalty: Option<Vec<f64>>,
    #[arg(long = "C", global = true, value_delimiter = ',')]
    pub c: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub folds: Option<usize>,
    #[arg(long = "test-size", global = true)]
    pub test_size: Option<usize>,
    #[arg(long = "train-size", global = true)]
    pub train_size: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Sample count for bench and audit.
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    #[arg(long = "no-cache", global = true)]
    pub no_cache: bool,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

impl Flags {
    fn overrides(&self) -> Overrides {
        Overrides {
            data: self.data.clone(),
            metric: self.metric.clone(),
            compressor: self.compressor,
            level: self.level,
            symmetrisation: self.symmetrisation,
            kernel: self.kernel,
            lambda: self.lambda.clone(),
            model: self.model.clone(),
            k: self.k.clone(),
            penalty: self.penalty.clone(),
            c: self.c.clone(),
            folds: self.folds,
            test_size: self.test_size,
            train_size: self.train_size,
            seed: self.seed,
            workers: self.workers,
            no_cache: self.no_cache,
            out: self.out.clone(),
            samples: self.samples,
        }
    }
}

/// Effective configuration: defaults, then the file, then the flags.
pub fn resolve_config(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.apply(&flags.overrides());
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one parsed invocation and returns its stdout summary.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = resolve_config(&cli.flags)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| CliError::Internal(e.to_string()))?;
    let run = || match &cli.command {
        Command::Matrix { against } => commands::cmd_matrix(&cfg, against.as_deref()),
        Command::Audit => commands::cmd_audit(&cfg),
        Command::Train => commands::cmd_train(&cfg),
        Command::Evaluate => commands::cmd_evaluate(&cfg),
        Command::Bench => commands::cmd_bench(&cfg),
        Command::Report => commands::cmd_report(&cfg),
    };
    match panic::catch_unwind(AssertUnwindSafe(|| pool.install(run))) {
        Ok(r) => r,
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(CliError::Internal(msg))
        }
    }
}

/// Parses `args`, runs, prints, and returns the process exit code.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("ncd: {e}");
            e.exit_code()
        }
    }
}
