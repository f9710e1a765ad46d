//! Thin command line wrapper over the library operations.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use curtain::cli::{run, Command, RunConfig};

#[derive(Parser)]
#[command(
    name = "curtain",
    about = "Left-curtain martingale couplings and robust American put bounds"
)]
struct Args {
    #[command(subcommand)]
    command: Cli,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON spec of the initial law mu.
    #[arg(long)]
    mu: PathBuf,
    /// JSON spec of the target law nu.
    #[arg(long)]
    nu: PathBuf,
    /// Output path (base path for commands writing several files).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cli {
    /// Build the coupling triple and export it as CSV and JSON.
    Build {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every certification; exits nonzero on any failure.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Re-ingest a previously built triple JSON instead of rebuilding.
        #[arg(long)]
        triple: Option<PathBuf>,
        /// Number of interior grid points for the envelope checks.
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Draw seeded samples from the coupling.
    Sample {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
    },
    /// Price the two-date American put and write the report JSON.
    Price {
        #[command(flatten)]
        common: CommonArgs,
        /// First-date strike.
        #[arg(long)]
        k1: f64,
        /// Maturity strike, below the first-date strike.
        #[arg(long)]
        k2: f64,
    },
    /// Refinement study of discretized initial laws against a fixed target.
    Probe {
        #[command(flatten)]
        common: CommonArgs,
        /// Finest discretization level; decades below it are included.
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Number of interior grid points.
        #[arg(long, default_value_t = 19)]
        grid: usize,
    },
    /// Export the tangent table for one point-mass embedding.
    Upsilon {
        /// JSON spec of the target law.
        #[arg(long)]
        nu: PathBuf,
        /// Base point of the embedding.
        #[arg(long)]
        w: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = match args.command {
        Cli::Build { common } => RunConfig {
            command: Command::Build,
            mu_path: common.mu,
            nu_path: common.nu,
            triple_path: None,
            out: common.out,
            seed: 0,
            n: 0,
            k1: None,
            k2: None,
            grid: 20,
        },
        Cli::Verify {
            common,
            triple,
            grid,
        } => RunConfig {
            command: Command::Verify,
            mu_path: common.mu,
            nu_path: common.nu,
            triple_path: triple,
            out: common.out,
            seed: 0,
            n: 0,
            k1: None,
            k2: None,
            grid,
        },
        Cli::Sample { common, seed, n } => RunConfig {
            command: Command::Sample,
            mu_path: common.mu,
            nu_path: common.nu,
            triple_path: None,
            out: common.out,
            seed,
            n,
            k1: None,
            k2: None,
            grid: 20,
        },
        Cli::Price { common, k1, k2 } => RunConfig {
            command: Command::Price,
            mu_path: common.mu,
            nu_path: common.nu,
            triple_path: None,
            out: common.out,
            seed: 0,
            n: 0,
            k1: Some(k1),
            k2: Some(k2),
            grid: 20,
        },
        Cli::Probe { common, n, grid } => RunConfig {
            command: Command::Probe,
            mu_path: common.mu,
            nu_path: common.nu,
            triple_path: None,
            out: common.out,
            seed: 0,
            n,
            k1: None,
            k2: None,
            grid,
        },
        Cli::Upsilon { nu, w, out } => RunConfig {
            command: Command::Upsilon,
            mu_path: nu.clone(),
            nu_path: nu,
            triple_path: None,
            out: Some(out),
            seed: 0,
            n: 0,
            k1: Some(w),
            k2: None,
            grid: 20,
        },
    };
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message);
            ExitCode::from(err.code as u8)
        }
    }
}
