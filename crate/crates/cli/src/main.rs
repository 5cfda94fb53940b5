//! `hopforge`: builds interaction graphs from tubelets and synthesizes,
//! validates and profiles multi-hop QA workloads over them.
//!
//! Exit codes: 0 success, 1 validation violations, 2 input or config
//! errors, 3 synthesis infeasibility.

mod commands;
mod config;
mod exit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::Config;
use exit::{Failure, OrExit, INPUT};

#[derive(Parser)]
#[command(name = "hopforge", version, about)]
struct Cli {
    /// Worker threads for the parallel stages. Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat TOML config file; absent keys take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random scene script and render it into tubelets.
    GenScene {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory for script.json and tubelets.jsonl.
        #[arg(long)]
        out: PathBuf,
    },
    /// Build the interaction graph of a tubelet file.
    BuildGraph {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        tubelets: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Synthesize a QA dataset from a graph file.
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Verify depths and audit a dataset against its graph.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        dataset: PathBuf,
        /// Report file.
        #[arg(long)]
        out: PathBuf,
        /// Also write the dataset with verified depths filled in.
        #[arg(long)]
        dataset_out: Option<PathBuf>,
    },
    /// Summary statistics of a dataset.
    Profile {
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score predicted spans against a dataset's evidence spans.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        dataset: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage and write all artifacts plus a manifest.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        seed: Option<u64>,
        /// Ingest this tubelet file instead of generating a scene.
        #[arg(long)]
        tubelets: Option<PathBuf>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

fn dispatch(command: Command) -> Result<(), Failure> {
    let load = |common: &Common| Config::load(common.config.as_deref());
    match command {
        Command::GenScene { common, seed, out } => commands::gen_scene(&load(&common)?, seed, &out),
        Command::BuildGraph {
            common,
            tubelets,
            out,
        } => commands::build_graph_cmd(&load(&common)?, &tubelets, &out),
        Command::Synth {
            common,
            seed,
            graph,
            out,
        } => commands::synth_cmd(&load(&common)?, seed, &graph, &out),
        Command::Validate {
            common,
            graph,
            dataset,
            out,
            dataset_out,
        } => commands::validate_cmd(
            &load(&common)?,
            &graph,
            &dataset,
            &out,
            dataset_out.as_deref(),
        ),
        Command::Profile { dataset, out } => commands::profile_cmd(&dataset, &out),
        Command::Eval {
            common,
            dataset,
            predictions,
            out,
        } => commands::eval_cmd(&load(&common)?, &dataset, &predictions, &out),
        Command::Run {
            common,
            seed,
            tubelets,
            out,
        } => commands::run_cmd(
            &load(&common)?,
            common.config.as_deref(),
            seed,
            tubelets,
            &out,
        ),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let pool = match cli.threads {
        Some(0) => Err(Failure::input("--threads must be positive")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .or_exit(INPUT),
        None => Ok(()),
    };
    match pool.and_then(|()| dispatch(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {:#}", failure.error);
            failure.exit_code()
        }
    }
}
