use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};

use warpflow::diagnostics::DimensionConstant;
use warpflow::par::Execution;

mod commands;

/// Exit codes shared by every subcommand.
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_BLOW_UP: u8 = 2;
pub const EXIT_CHECK_FAILED: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "warpflow",
    version,
    about = "Ricci flow of warped-product metrics on R+ x S^n"
)]
struct Cli {
    /// Run every data-parallel stage on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Constant {
    SphereN,
    CorrectedNPlus1,
}

impl From<Constant> for DimensionConstant {
    fn from(c: Constant) -> Self {
        match c {
            Constant::SphereN => DimensionConstant::SphereN,
            Constant::CorrectedNPlus1 => DimensionConstant::CorrectedNPlus1,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evolve a configuration, check the invariants and write every output.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides the config and the environment.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fixed step size in place of the stability bound.
        #[arg(long)]
        force_dt: Option<f64>,
        /// Constant gating the scalar lower bound.
        #[arg(long, value_enum, default_value = "corrected-n-plus1")]
        dimension_constant: Constant,
    },
    /// Re-run the diagnostics on a stored trajectory.
    Invariants {
        /// Directory written by `run`.
        #[arg(long)]
        dir: PathBuf,
        /// Where to write the new tables; defaults to `<dir>/invariants`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "corrected-n-plus1")]
        dimension_constant: Constant,
    },
    /// Residuals of the evolution equations and their refinement orders on M/4, M/2, M.
    Residuals {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sample times per run.
        #[arg(long, default_value_t = 8)]
        samples: usize,
    },
    /// Compare the rescaled modified flow against a plain run.
    CompareModified {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the initial-data presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result: Result<u8> = match cli.command {
        Command::Run {
            config,
            out,
            force_dt,
            dimension_constant,
        } => commands::run(&config, out, force_dt, dimension_constant.into(), exec),
        Command::Invariants {
            dir,
            out,
            dimension_constant,
        } => commands::invariants(&dir, out, dimension_constant.into(), exec),
        Command::Residuals { config, out, samples } => commands::residuals(&config, out, samples, exec),
        Command::CompareModified { config, out } => commands::compare_modified(&config, out),
        Command::Presets => commands::presets(),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
