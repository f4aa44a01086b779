use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::commands;
use crate::config::Overrides;
use crate::error::CliResult;

#[derive(Parser)]
#[command(
    name = "curricle",
    version,
    about = "Curriculum-learning workbench: train a small attention classifier under different pacing regimes and analyze forgetting and attention movement"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Collapse 5-class TSVs into SST-2/3/4 (and SST-5 passthrough) variants
    Prepare {
        /// 5-class train TSV (label, tab, sentence)
        #[arg(long)]
        train: PathBuf,
        /// 5-class dev TSV
        #[arg(long)]
        dev: PathBuf,
        /// 5-class test TSV
        #[arg(long)]
        test: PathBuf,
        /// Target class counts
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        classes: Vec<u32>,
        /// Output directory for the collapsed TSVs
        #[arg(long)]
        out: PathBuf,
    },
    /// Score the train split by difficulty and write the ranked CSV
    Score {
        #[arg(long)]
        config: PathBuf,
        /// Difficulty strategy: auxiliary|length
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        classes: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        /// Epochs per phase (the auxiliary model trains k times this)
        #[arg(long)]
        epochs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output CSV path (default scores.csv)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also print the 50 easiest and 50 hardest sentences
        #[arg(long)]
        dump: bool,
    },
    /// Run the experiment for every seed and persist a run directory
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Pacing mode: baby_steps|one_pass|individual|none
        #[arg(long)]
        mode: Option<String>,
        /// Difficulty strategy: auxiliary|length
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        classes: Option<u32>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        epochs: Option<usize>,
        /// Base seed, expanded to 5 runs (seed..seed+4)
        #[arg(long)]
        seed: Option<u64>,
        /// Explicit comma-separated seed list (wins over --seed)
        #[arg(long)]
        seeds: Option<String>,
        /// Parent directory for the run directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Emit forgetting and movement artifacts for a finished run
    Analyze {
        /// Run directory created by `train`
        run_dir: PathBuf,
        /// File with one sentence per line for movement heatmaps
        #[arg(long)]
        sentences: Option<PathBuf>,
    },
    /// Regenerate comparison tables from run manifests (no recompute)
    Report {
        /// Run directories created by `train`
        #[arg(required = true)]
        run_dirs: Vec<PathBuf>,
        /// Directory for report.txt and report.csv (default .)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn dispatch(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Prepare {
            train,
            dev,
            test,
            classes,
            out,
        } => commands::prepare::run(&train, &dev, &test, &classes, &out),
        Command::Score {
            config,
            strategy,
            classes,
            k,
            epochs,
            seed,
            out,
            dump,
        } => {
            let overrides = Overrides {
                strategy,
                classes,
                k,
                epochs,
                seed,
                ..Default::default()
            };
            commands::score::run(&config, &overrides, out, dump)
        }
        Command::Train {
            config,
            mode,
            strategy,
            classes,
            k,
            epochs,
            seed,
            seeds,
            out,
        } => {
            let overrides = Overrides {
                mode,
                strategy,
                classes,
                k,
                epochs,
                seed,
                seeds,
                out,
            };
            commands::train::run(&config, &overrides)
        }
        Command::Analyze { run_dir, sentences } => {
            commands::analyze::run(&run_dir, sentences.as_deref())
        }
        Command::Report { run_dirs, out } => commands::report::run(&run_dirs, out),
    }
}

/// Parses arguments and runs; returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
