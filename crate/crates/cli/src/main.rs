//! `macrocat`: characteristic functions, non-classicality scans and
//! entanglement certificates for cat states, emitted as CSV or JSON.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "macrocat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Flags shared by every subcommand.
#[derive(Debug, Args)]
pub struct Common {
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format; each subcommand has its own default.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Recompute through the truncated-Fock oracle and report the discrepancy.
    #[arg(long)]
    pub verify: bool,
    /// Worker threads for grid evaluation (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Characteristic function and its normal-ordered version.
    Chi(commands::ChiArgs),
    /// Non-classicality certificate over a grid of test amplitudes.
    Ncregion(commands::NcRegionArgs),
    /// |chi_N| of a decohering state over a grid of gamma t.
    Decay(commands::DecayArgs),
    /// Smallest partial-transpose eigenvalue of the 9x9 moment matrix.
    Ptmin(commands::PtMinArgs),
    /// Witness expectation over a grid of cat sizes.
    Witness(commands::WitnessArgs),
    /// Ramsey outcome probabilities, conditional states and sampled shots.
    Ramsey(commands::RamseyArgs),
    /// Conditional preparation of a two-mode state from a qubit Bell pair.
    Prepare(commands::PrepareArgs),
    /// The 9x9 moment matrix at the standard settings.
    Moments(commands::MomentsArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Chi(a) => &a.common,
        Command::Ncregion(a) => &a.common,
        Command::Decay(a) => &a.common,
        Command::Ptmin(a) => &a.common,
        Command::Witness(a) => &a.common,
        Command::Ramsey(a) => &a.common,
        Command::Prepare(a) => &a.common,
        Command::Moments(a) => &a.common,
    };
    if let Some(n) = common.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let report = match &cli.command {
        Command::Chi(a) => commands::chi(a)?,
        Command::Ncregion(a) => commands::ncregion(a)?,
        Command::Decay(a) => commands::decay(a)?,
        Command::Ptmin(a) => commands::ptmin(a)?,
        Command::Witness(a) => commands::witness(a)?,
        Command::Ramsey(a) => commands::ramsey(a)?,
        Command::Prepare(a) => commands::prepare(a)?,
        Command::Moments(a) => commands::moments(a)?,
    };
    output::emit(common.out.as_deref(), &report.text)?;
    if let Some(delta) = report.oracle_delta {
        eprintln!("oracle discrepancy: {delta:.3e} (tolerance {:.0e})", commands::VERIFY_TOL);
        if !(delta <= commands::VERIFY_TOL) {
            return Err(CliError::Numeric(format!(
                "oracle discrepancy {delta:.3e} exceeds {:.0e}",
                commands::VERIFY_TOL
            )));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
