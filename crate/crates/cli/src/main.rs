use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

mod commands;
mod error;
mod report;
mod svg;
mod sysfile;

use commands::{Common, DiskMode, MarginArgs, MarginMode, Session, SimArgs};
use error::CliError;

/// Dominance margins and Lure system analysis.
#[derive(Debug, Parser)]
#[command(name = "domargin", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample the shifted Nyquist curve to CSV, optionally plotting it.
    Nyquist {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<f64>,
        /// Write an SVG plot of the curve (and the disk, if k1 and k2 are known).
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Gain, phase or disk margins, or the circle criterion.
    Margins {
        #[command(flatten)]
        common: Common,
        #[arg(value_enum)]
        mode: MarginMode,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k1: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        k2: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
        /// Reading of the disk condition for sign-changing sectors.
        #[arg(long, value_enum, default_value_t = DiskMode::Literal)]
        disk_mode: DiskMode,
    },
    /// Simulate the closed loop and classify each trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Comma-separated initial state; repeat for several trajectories.
        #[arg(long, allow_hyphen_values = true)]
        x0: Vec<String>,
        /// Horizon in seconds.
        #[arg(long = "T")]
        t_final: Option<f64>,
        #[arg(long)]
        dt: Option<f64>,
        /// Include the states in trace files.
        #[arg(long)]
        states: bool,
    },
    /// Upper 1-gain margin over a grid of rates and damping coefficients.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        lambda_range: String,
        /// Values substituted for the s^1 denominator coefficient.
        #[arg(long)]
        d_range: String,
    },
    /// Dominance certificate for the (linearized) closed loop.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        k: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<i64>,
    },
    /// Peak gain of the shifted transfer function along the imaginary axis.
    Norm {
        #[command(flatten)]
        common: Common,
    },
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("DOMARGIN_THREADS") else { return Ok(()) };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Invalid(format!("DOMARGIN_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Invalid(e.to_string()))
}

fn run(cli: Cli, echo: String) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Nyquist { common, k1, k2, svg } => commands::nyquist(Session::open(common, echo)?, k1, k2, svg.as_deref()),
        Command::Margins { common, mode, k, k1, k2, p, disk_mode } => {
            commands::margins(Session::open(common, echo)?, MarginArgs { mode, k, k1, k2, p, disk_mode })
        }
        Command::Simulate { common, x0, t_final, dt, states } => {
            commands::simulate_cmd(Session::open(common, echo)?, SimArgs { x0, t_final, dt, states })
        }
        Command::Sweep { common, lambda_range, d_range } => {
            commands::sweep(Session::open(common, echo)?, &lambda_range, &d_range)
        }
        Command::Certify { common, k, p } => commands::certify(Session::open(common, echo)?, k, p),
        Command::Norm { common } => commands::norm(Session::open(common, echo)?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let echo = std::iter::once("domargin".to_string()).chain(std::env::args().skip(1)).collect::<Vec<_>>().join(" ");
    match run(cli, echo) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
