mod commands;
mod output;
mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "robin-shell", version, about = "Principal eigenvalues and optimal favourable sets for indefinite-weight Robin problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Where the problem lives: an interval or a spherical shell.
#[derive(Args, Debug, Clone)]
struct Geometry {
    /// Interval endpoints.
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true, conflicts_with = "shell")]
    domain: Option<Vec<f64>>,
    /// Shell dimension and radii.
    #[arg(long, num_args = 3, value_names = ["N", "R1", "R2"])]
    shell: Option<Vec<f64>>,
}

#[derive(Subcommand)]
enum Command {
    /// Principal eigenvalue and eigenfunction for a given favourable set.
    Eigen {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        beta: f64,
        /// Right-end Robin coefficient for intervals (defaults to --beta).
        #[arg(long)]
        beta_right: Option<f64>,
        /// Favourable interval; repeat for a union.
        #[arg(long = "set", num_args = 2, value_names = ["S", "E"], action = clap::ArgAction::Append, required = true, allow_negative_numbers = true)]
        sets: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical Robin coefficient and regime.
    Threshold {
        #[arg(long)]
        c: f64,
        #[arg(long)]
        kappa: f64,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        domain: Option<Vec<f64>>,
        /// Classify this coefficient against the threshold.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// λ over all placements of a single favourable interval.
    Sweep {
        #[command(flatten)]
        geometry: Geometry,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        beta_right: Option<f64>,
        /// Length fraction of the favourable interval (in t for shells).
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        /// Shells only: hold the radial length fixed instead of the t-length.
        #[arg(long)]
        raw_length: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Threshold, predicted optimal sets and reduction data for a shell.
    Shell {
        #[arg(long, num_args = 3, value_names = ["N", "R1", "R2"], required = true)]
        shell: Vec<f64>,
        #[arg(long)]
        kappa: f64,
        #[arg(long)]
        m0: f64,
        #[arg(long)]
        beta: f64,
        /// Free parameter of the reduction (default: twice its lower bound).
        #[arg(long)]
        q: Option<f64>,
        /// Also sweep placements with the radial solver.
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 101)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the acceptance suites.
    Verify {
        /// Suite name or number; all suites when omitted.
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Line chart of a two-column CSV as SVG.
    Plot {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = PlotKind::Sweep)]
        kind: PlotKind,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotKind {
    Sweep,
    Eigenfunction,
}

/// Exit statuses: 1 usage, 2 computation, 3 verification.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Solver(robin_shell::Error),
    Computation(String),
    Verification(Vec<u32>),
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Computation(format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Solver(_) | Failure::Computation(_) => 2,
            Failure::Verification(_) => 3,
        }
    }
}

impl From<robin_shell::Error> for Failure {
    fn from(e: robin_shell::Error) -> Self {
        Failure::Solver(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Eigen { geometry, kappa, beta, beta_right, sets, out } => {
            commands::eigen(&geometry, kappa, beta, beta_right, &sets, out.as_deref())
        }
        Command::Threshold { c, kappa, domain, beta, out } => commands::threshold(c, kappa, domain.as_deref(), beta, out.as_deref()),
        Command::Sweep { geometry, kappa, beta, beta_right, c, grid, raw_length, out } => {
            commands::sweep(&geometry, kappa, beta, beta_right, c, grid, raw_length, out.as_deref())
        }
        Command::Shell { shell, kappa, m0, beta, q, check, grid, out } => {
            commands::shell(&shell, kappa, m0, beta, q, check, grid, out.as_deref())
        }
        Command::Verify { suite, out } => commands::verify(suite.as_deref(), out.as_deref()),
        Command::Plot { input, out, kind } => commands::plot(&input, &out, kind),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}\n\nFor more information, try '--help'."),
                Failure::Solver(e) => eprintln!("error: {}: {e}", e.name()),
                Failure::Computation(msg) => eprintln!("error: {msg}"),
                Failure::Verification(ids) => eprintln!("verification failed: criteria {ids:?}"),
            }
            ExitCode::from(failure.code())
        }
    }
}
