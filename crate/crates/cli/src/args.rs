//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wy_skew::search::Objective;
use wy_skew::skew::DEFAULT_VIOLATION_TOL;
use wy_skew::InequalityId;

use crate::suites::Suite;

#[derive(Debug, Clone, Parser)]
#[command(name = "wy-skew", version, about = "Wigner-Yanase entropy subadditivity: checks, evaluation and counterexample search")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Reproduce every number of the three-qubit counterexample.
    VerifyPaper(VerifyArgs),
    /// Evaluate one inequality on a state file.
    Eval(EvalArgs),
    /// Search for states violating the symmetric or per-site inequality.
    Search(SearchArgs),
    /// Run a randomized property suite.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Check this three-qubit state instead of the built-in witness.
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Observable to use with --state (default: projector onto up).
    #[arg(long)]
    pub observable: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
    /// Also write the report to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub state: PathBuf,
    /// Observable file; repeat for one observable per site.
    #[arg(long, required = true)]
    pub observable: Vec<PathBuf>,
    #[arg(long, default_value = "symmetric", value_parser = parse_inequality)]
    pub mode: InequalityId,
    #[arg(long, default_value_t = DEFAULT_VIOLATION_TOL)]
    pub violation_tol: f64,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ObjectiveArg {
    Symmetric,
    #[value(name = "n_partite", alias = "n-partite")]
    NPartite,
}

impl From<ObjectiveArg> for Objective {
    fn from(o: ObjectiveArg) -> Self {
        match o {
            ObjectiveArg::Symmetric => Objective::Symmetric,
            ObjectiveArg::NPartite => Objective::NPartite,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    #[arg(long, default_value_t = 3)]
    pub sites: usize,
    #[arg(long, default_value_t = 2)]
    pub dim: usize,
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 4000)]
    pub max_iters: usize,
    /// Simplex convergence tolerance.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = ObjectiveArg::Symmetric)]
    pub objective: ObjectiveArg,
    /// Search over complex amplitudes.
    #[arg(long)]
    pub complex: bool,
    /// Single-site observable (default: projector onto local index 0).
    #[arg(long)]
    pub observable: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_VIOLATION_TOL)]
    pub violation_tol: f64,
    /// Worker threads for the restarts; does not change the result.
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Args)]
pub struct CheckArgs {
    #[arg(value_parser = parse_suite)]
    pub suite: Suite,
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Where reproducers of failed trials are written.
    #[arg(long, default_value = "wy-skew-failures")]
    pub dump_dir: PathBuf,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_inequality(s: &str) -> Result<InequalityId, String> {
    s.parse()
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}
