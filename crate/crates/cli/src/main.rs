//! fixlab: certify contraction conditions, analyze hybrid pairs of
//! maps, and solve the bundled functional-equation and
//! integral-inclusion instances.

mod commands;
mod config;
mod output;
mod repro;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use commands::CmdResult;
use config::Config;
use output::Format;

#[derive(Parser)]
#[command(
    name = "fixlab",
    version,
    about = "Set-valued fixed-point laboratory on the real line"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct CommonArgs {
    /// Config file with `key: value` entries
    #[arg(long)]
    input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify a contraction condition over sampled point pairs
    Certify {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the sample grid size
        #[arg(long)]
        grid: Option<usize>,
        /// Override the exponent p
        #[arg(long)]
        p: Option<f64>,
        /// Override tau
        #[arg(long)]
        tau: Option<f64>,
        /// Seed for sampled certifications (accepted for uniformity)
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Report hybrid-pair properties for the maps in a config
    Pairs {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the scan resolution as a point count over the domain
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Solve a functional-equation instance by successive approximation
    SolveDp {
        #[command(flatten)]
        common: CommonArgs,
        /// Override both state and decision grid sizes
        #[arg(long)]
        grid: Option<usize>,
        /// Override the convergence tolerance
        #[arg(long)]
        tol: Option<f64>,
        /// Seed for the sampled growth-hypothesis check
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Solve a Volterra integral-inclusion instance
    SolveVolterra {
        #[command(flatten)]
        common: CommonArgs,
        /// Override the node count n
        #[arg(long)]
        grid: Option<usize>,
        /// Override the convergence tolerance
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Recompute the bundled worked-example quantities and compare
    ReproPaper {
        #[arg(long, value_enum, default_value = "human")]
        format: Format,
        /// Accepted for uniformity; the reproduction is deterministic
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Inject one failing row (harness self-test)
        #[arg(long, hide = true)]
        self_test_fail: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<CmdResult> {
    match cli.cmd {
        Cmd::Certify {
            common,
            grid,
            p,
            tau,
            seed: _,
        } => {
            let cfg = Config::load(&common.input)?;
            commands::cmd_certify(&cfg, grid, p, tau, common.format)
        }
        Cmd::Pairs { common, grid } => {
            let cfg = Config::load(&common.input)?;
            commands::cmd_pairs(&cfg, grid, common.format)
        }
        Cmd::SolveDp {
            common,
            grid,
            tol,
            seed,
        } => {
            let cfg = Config::load(&common.input)?;
            commands::cmd_solve_dp(&cfg, grid, tol, seed, common.format)
        }
        Cmd::SolveVolterra { common, grid, tol } => {
            let cfg = Config::load(&common.input)?;
            commands::cmd_solve_volterra(&cfg, grid, tol, common.format)
        }
        Cmd::ReproPaper {
            format,
            seed: _,
            self_test_fail,
        } => commands::cmd_repro_paper(format, self_test_fail),
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(result) => {
            print!("{}", result.output);
            std::process::exit(result.exit);
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(2);
        }
    }
}
