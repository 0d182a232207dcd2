//! Command-line driver: ingestion, statistics, sampling, training,
//! generation, and ERGM workflows over on-disk graph bundles.
//!
//! Every command is reproducible: identical config and inputs produce
//! byte-identical artifacts. Set `SYNTHNET_THREADS` to bound the thread
//! pool used by the parallel statistics.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use synthnet_cli::config::WorkspaceConfig;
use synthnet_cli::error::CliResult;
use synthnet_cli::{commands, formats};

#[derive(Parser)]
#[command(name = "synthnet", version, about = "Synthetic social-network generation toolkit")]
struct Cli {
    /// Workspace configuration (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override the configured global seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the configured output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read a bundle, densify external ids, and write the canonical form.
    Ingest,
    /// Network statistics report for a bundle.
    Stats,
    /// Side-by-side statistics of two bundles.
    Compare,
    /// Draw a star / neighborhood / snowball / random-walk sample.
    Sample,
    /// Train a node classifier for a categorical target.
    TrainNodeclass,
    /// Fill missing target values with a trained classifier.
    Impute,
    /// Train a link predictor.
    TrainLinkpred,
    /// Fit a tabular generator and sample a population.
    GenAttrs,
    /// Rewire a random graph over a population with a trained link
    /// predictor.
    Generate,
    /// Fit an exponential random graph model by pseudo-likelihood.
    ErgmFit,
    /// Simulate graphs from a fitted model.
    ErgmSim,
    /// Degree goodness-of-fit of a fitted model against a reference.
    ErgmGof,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Ingest => "ingest",
            Command::Stats => "stats",
            Command::Compare => "compare",
            Command::Sample => "sample",
            Command::TrainNodeclass => "train-nodeclass",
            Command::Impute => "impute",
            Command::TrainLinkpred => "train-linkpred",
            Command::GenAttrs => "gen-attrs",
            Command::Generate => "generate",
            Command::ErgmFit => "ergm-fit",
            Command::ErgmSim => "ergm-sim",
            Command::ErgmGof => "ergm-gof",
        }
    }
}

fn init_thread_pool() {
    if let Ok(value) = std::env::var("SYNTHNET_THREADS") {
        if let Ok(threads) = value.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
}

fn execute(cli: &Cli) -> CliResult<serde_json::Value> {
    let mut config = match &cli.config {
        Some(path) => WorkspaceConfig::load(path)?,
        None => WorkspaceConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out_dir.clone_from(out);
    }
    commands::run(cli.command.name(), &config)
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(summary) => {
            if formats::print_summary(&summary).is_err() {
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("{}", err.to_json());
            ExitCode::FAILURE
        }
    }
}
