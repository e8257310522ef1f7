//! `npe`: coefficient tables, verification suites, trajectories and stabilization runs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ExperimentConfig;

#[derive(Parser, Debug)]
#[command(name = "npe", version, about = "Spectral laboratory for normal parabolic equations on the 3-torus")]
struct Cli {
    /// JSON experiment configuration (defaults are used when omitted).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (overrides the configuration).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker-pool size. Computations currently run on one worker.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Writes the c, d, a₁, b₁, A, B tables for the configured p.
    Coeffs,
    /// Runs a verification suite; exit status 0 iff every check passes.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
    },
    /// Writes an NPE trajectory CSV.
    Simulate {
        /// control | single-mode:k1,k2,k3 | file:<path>
        #[arg(long, default_value = "control")]
        initial: String,
        /// Multiplier applied to the initial datum.
        #[arg(long)]
        mu: Option<f64>,
        /// Sets μ = factor / I(∞) of the datum instead of --mu.
        #[arg(long)]
        threshold_factor: Option<f64>,
    },
    /// Runs the feedback-plus-control stabilization and writes a JSON report.
    Stabilize {
        /// blowup | zero | random | single-mode:k1,k2,k3 | file:<path>
        #[arg(long, default_value = "blowup")]
        y0: String,
        /// Cache directory for assembled feedback systems (default: $NPE_CACHE_DIR).
        #[arg(long)]
        cache_dir: Option<PathBuf>,
    },
    /// Compares the 3D functional with the 1D product formula.
    ReductionCheck,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Signs,
    Ratios,
    Odes,
    Certificates,
    Reduction,
    All,
}

/// Process outcome: 0 pass, 1 verification failure, 2 input or I/O error.
pub enum Outcome {
    Pass,
    Fail(String),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    if cli.threads != 1 {
        log::info!("--threads {} requested; computations run on a single worker", cli.threads);
    }
    let mut cfg = match ExperimentConfig::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    let result = match cli.command {
        Command::Coeffs => commands::coeffs(&cfg),
        Command::Verify { suite } => commands::verify(&cfg, suite),
        Command::Simulate { initial, mu, threshold_factor } => commands::simulate(&cfg, &initial, mu, threshold_factor),
        Command::Stabilize { y0, cache_dir } => commands::stabilize(&cfg, &y0, cache_dir),
        Command::ReductionCheck => commands::reduction(&cfg),
    };
    match result {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::Fail(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
