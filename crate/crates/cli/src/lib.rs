//! Command-line front end: `run`, `run-graph`, `tune`, `arena`,
//! `tournament` and `viz` over the registered example models.
//!
//! Exit codes are a stable contract: 0 on success, 2 for configuration or
//! usage errors, 3 for failures while simulating or searching.

pub mod commands;
pub mod config;
mod error;
pub mod graph;
pub mod manifest;
pub mod svg;
pub mod viz;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

pub use error::CliError;

use commands::{Global, MatchArgs, TuneArgs};
use config::Algo;
use viz::VizKind;

#[derive(Debug, Parser)]
#[command(name = "strata", version, about = "Layered agent-based simulation, evolutionary tuning and tournaments")]
pub struct Cli {
    /// Worker threads for evaluations and tournament cells (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Run seed; overrides the configuration's seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, env = "HEAS_OUT", default_value = "out")]
    pub out: PathBuf,
    /// Suppress progress messages.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one episode and write its trace.
    Run {
        /// Example configuration (JSON)
        config: PathBuf,
        /// Ticks to simulate; overrides the configuration
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Export the layered stream graph as JSON and SVG.
    RunGraph {
        /// Example configuration (JSON)
        config: PathBuf,
    },
    /// Optimize the example's strategy.
    Tune {
        /// Example configuration (JSON)
        config: PathBuf,
        /// Search algorithm [default: nsga2]
        #[arg(long, value_enum)]
        algo: Option<Algo>,
        /// Population size [default: 20]
        #[arg(long)]
        pop: Option<usize>,
        /// Generations [default: 5]
        #[arg(long)]
        ngen: Option<usize>,
    },
    /// Play all participants on a single scenario.
    Arena {
        /// Example configuration (JSON)
        config: PathBuf,
        /// Episodes per scenario and participant [default: 4]
        #[arg(long)]
        episodes: Option<usize>,
        /// Ticks per episode; defaults to the model's episode length
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Play all participants on every scenario of the grid.
    Tournament {
        /// Example configuration (JSON)
        config: PathBuf,
        /// Episodes per scenario and participant [default: 4]
        #[arg(long)]
        episodes: Option<usize>,
        /// Ticks per episode; defaults to the model's episode length
        #[arg(long)]
        steps: Option<u64>,
    },
    /// Plot a trace, archive, logbook or tournament result as SVG.
    Viz {
        /// trace.csv, hof.json, logbook.jsonl or tournament.json
        artifact: PathBuf,
        /// Plot type; must match the artifact
        #[arg(long, value_enum)]
        kind: VizKind,
    },
}

pub fn execute(cli: Cli, args: Vec<String>) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::config("--jobs must be positive"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(CliError::runtime)?;
    }
    let g = Global {
        seed: cli.seed,
        out: cli.out,
        quiet: cli.quiet,
        args,
    };
    match cli.command {
        Command::Run { config, steps } => commands::run(&g, &config, steps),
        Command::RunGraph { config } => commands::run_graph(&g, &config),
        Command::Tune { config, algo, pop, ngen } => commands::tune(&g, &config, TuneArgs { algo, pop, ngen }),
        Command::Arena { config, episodes, steps } => {
            commands::tournament(&g, &config, MatchArgs { episodes, steps }, true)
        }
        Command::Tournament { config, episodes, steps } => {
            commands::tournament(&g, &config, MatchArgs { episodes, steps }, false)
        }
        Command::Viz { artifact, kind } => commands::viz(&g, &artifact, kind),
    }
}

/// Parse `argv` and run; usage errors exit with 2 through clap.
pub fn main_with(argv: Vec<OsString>) -> ExitCode {
    let args = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("strata: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
