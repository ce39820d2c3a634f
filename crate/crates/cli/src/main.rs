mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::FileConfig;

/// Exact χ̃^(3) series generation, ODE guessing and Fuchsian analysis.
#[derive(Parser, Debug)]
#[command(name = "holonomy", version, about)]
struct Cli {
    /// File of `key=value` defaults for any flag (flags win).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads (0 = all cores). Never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate (or resume) the χ̃^(3)/8 series cache.
    GenSeries {
        #[arg(long)]
        order: Option<usize>,
        /// Output file (default: $HOLONOMY_CACHE_DIR/chi3_<order>.txt).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a linear ODE annihilating a series.
    Guess {
        #[arg(long)]
        series: Option<PathBuf>,
        #[arg(long)]
        max_order: Option<usize>,
        /// Degree bounds, highest derivative first: `47,46,45,44,43,42,41,36`.
        #[arg(long)]
        degrees: Option<String>,
        #[arg(long)]
        min_surplus: Option<usize>,
        /// Operator output file (printed when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singular points, exponents, apparent points and monodromy structure.
    Analyze {
        #[arg(long)]
        op: Option<PathBuf>,
    },
    /// Divide by first-order factors given by solution log-derivatives.
    Factor {
        #[arg(long)]
        op: Option<PathBuf>,
        /// Also look for a left factor through rational solutions of the adjoint.
        #[arg(long)]
        adjoint: bool,
        /// Series each quotient is tested against.
        #[arg(long)]
        series: Option<PathBuf>,
        /// Directory for quotient operator files.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Log-derivatives `y'/y` as `num ; den`, coefficients lowest degree first.
        /// Give these after all options.
        #[arg(value_name = "LOGDERIV", allow_hyphen_values = true)]
        solutions: Vec<String>,
    },
    /// Remove every apparent singularity.
    Desingularize {
        #[arg(long)]
        op: Option<PathBuf>,
        /// Operator output file; the companion system goes to `<out>.system`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate χ̃^(3) by quadrature at a point.
    Oracle {
        #[arg(allow_negative_numbers = true)]
        w: f64,
        #[arg(long)]
        tol: Option<f64>,
        /// Series to compare the partial sum against.
        #[arg(long)]
        series: Option<PathBuf>,
    },
}

/// Exit statuses: 0 success, 2 no result, 3 precondition, 4 inconsistency.
#[derive(Debug)]
pub enum Failure {
    NoResult(String),
    Precondition(anyhow::Error),
    Internal(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::NoResult(_) => 2,
            Failure::Precondition(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Precondition(e)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    let threads = file.pick(cli.threads, "threads")?.unwrap_or(0);
    let ctx = commands::Context { file, threads };
    match cli.command {
        Command::GenSeries { order, out } => commands::gen_series(&ctx, order, out),
        Command::Guess { series, max_order, degrees, min_surplus, out } => {
            commands::guess(&ctx, series, max_order, degrees, min_surplus, out)
        }
        Command::Analyze { op } => commands::analyze(&ctx, op),
        Command::Factor { op, adjoint, series, out, solutions } => {
            commands::factor(&ctx, op, adjoint, series, out, &solutions)
        }
        Command::Desingularize { op, out } => commands::desingularize(&ctx, op, out),
        Command::Oracle { w, tol, series } => commands::oracle(&ctx, w, tol, series),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::NoResult(m) => eprintln!("no result: {m}"),
                Failure::Precondition(e) => eprintln!("error: {e:#}"),
                Failure::Internal(e) => eprintln!("internal inconsistency: {e:#}"),
            }
            ExitCode::from(f.code())
        }
    }
}
