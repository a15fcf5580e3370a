//! `branchpoint`: command-line front end for the desingularization pipeline.
//!
//! Exit codes: 0 success, 1 usage or I/O error, 2 invalid input data or
//! parameters, 3 no generic parameters found, 4 double-point identity
//! violated, 5 knot extraction failed.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use branchpoint::{Error, Orientation};
use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(
    name = "branchpoint",
    version,
    about = "Branch points of minimal disks in R^4: deformations, double points and knots"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Weierstrass data file: {"fprime": [[[re,im],...] x4], "conf_tol": 1e-12}
    #[arg(long)]
    pub input: PathBuf,
    /// Print the report as JSON instead of text
    #[arg(long)]
    pub json: bool,
    /// Directory for output files
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Family {
    /// Perturbation scale for sampling generic parameters
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// "+" or "-"
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub orientation: Orientation,
    /// Explicit parameters {"A": [...], "B": [...], "orientation": "+", "t": ...}; overrides sampling
    #[arg(long)]
    pub params: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct Search {
    /// Working disk radius of the double-point search
    #[arg(long, default_value_t = 0.5)]
    pub radius: f64,
    /// Grid points per side on each search level
    #[arg(long, default_value_t = 160)]
    pub grid_n: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Orders, branching, branch points, Gauss maps and symplectic positivity
    Analyze {
        #[command(flatten)]
        common: Common,
    },
    /// Sample (or read) perturbation parameters and build the family member
    Deform {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        search: Search,
    },
    /// Double points of the deformed map, or of the input map without --t/--params
    DoublePoints {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        search: Search,
    },
    /// Trace the slice at radius eta and compute its braid invariants
    Knot {
        #[command(flatten)]
        common: Common,
        /// Slice radius; scanned automatically when omitted
        #[arg(long)]
        eta: Option<f64>,
    },
    /// Check 2D = e(K) - (N - 1) for one family member
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        family: Family,
        #[command(flatten)]
        search: Search,
        #[arg(long, default_value_t = 1e-2)]
        eta: f64,
    },
}

#[derive(Debug)]
pub enum CliError {
    Io(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::ZeroPolynomial
                | Error::RootResidual { .. }
                | Error::EmptyData
                | Error::ConformalityViolation { .. }
                | Error::OrderMismatch { .. }
                | Error::NotNormalForm { .. }
                | Error::DegeneratePlane { .. }
                | Error::IndeterminateGauss
                | Error::OrderViolation(_)
                | Error::ParameterShape(_)
                | Error::BranchPointInRegion { .. }
                | Error::InvalidArgument(_) => 2,
                Error::SamplingExhausted { .. } => 3,
                Error::FormulaViolation(_) => 4,
                Error::TraceFailure(_)
                | Error::OpenCurve { .. }
                | Error::BranchOnSlice
                | Error::NonMonotoneFiberAngle { .. }
                | Error::WindingMismatch { .. }
                | Error::StrandCollision { .. }
                | Error::PushoffCollision { .. }
                | Error::ProjectionPoleOnCurve
                | Error::EtaSelection(_) => 5,
            },
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Io(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Analyze { common } => commands::analyze(&common),
        Command::Deform {
            common,
            family,
            search,
        } => commands::deform(&common, &family, &search),
        Command::DoublePoints {
            common,
            family,
            search,
        } => commands::double_points(&common, &family, &search),
        Command::Knot { common, eta } => commands::knot(&common, eta),
        Command::Verify {
            common,
            family,
            search,
            eta,
        } => commands::verify(&common, &family, &search, eta),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
