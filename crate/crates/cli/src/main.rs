//! `fedl-lab`: generate datasets, train with FEDL or FedAvg, and solve the
//! wireless allocation problem from the command line.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure.

mod allocate;
mod datagen;
mod failure;
mod output;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "fedl-lab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic non-iid dataset, one CSV per UE.
    Datagen {
        /// Dataset spec (TOML or JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train on a dataset directory and write the per-round trace.
    Train {
        /// Training config (TOML or JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Dataset directory; overrides `data` in the config.
        #[arg(long)]
        data: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Algo::Fedl)]
        algo: Algo,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Solve the allocation problem at one κ.
    Allocate {
        /// Instance file (TOML or JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `system.kappa` in the instance.
        #[arg(long)]
        kappa: Option<f64>,
    },
    /// Sweep κ and write the energy/time frontier.
    Pareto {
        /// Instance file (TOML or JSON).
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// `MIN:MAX:COUNT[:log|lin]`.
        #[arg(long, value_parser = allocate::KappaGrid::parse)]
        kappa_grid: allocate::KappaGrid,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algo {
    Fedl,
    Fedavg,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Fedl => "fedl",
            Algo::Fedavg => "fedavg",
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("FEDL_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        Failure::input(format!(
            "FEDL_LAB_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::input(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    match cli.command {
        Command::Datagen { config, out, seed } => datagen::run(&config, &out, seed),
        Command::Train {
            config,
            out,
            data,
            algo,
            seed,
        } => train::run(&config, &out, data.as_deref(), algo, seed),
        Command::Allocate { config, out, kappa } => allocate::run_allocate(&config, &out, kappa),
        Command::Pareto {
            config,
            out,
            kappa_grid,
        } => allocate::run_pareto(&config, &out, &kappa_grid),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code())
        }
    }
}
