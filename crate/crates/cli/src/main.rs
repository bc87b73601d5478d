//! `cvbell`: sweeps, single optimizations, figure datasets and the acceptance
//! checks, written as CSV or JSON.

mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvbell::bell::{DisplacementDomain, EvalPath, Formalism};
use cvbell::figures::FigureId;
use cvbell::optimize::Direction;
use serde::Serialize;

pub const OUT_DIR_ENV: &str = "CVBELL_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "cvbell", version, about = "Bell-CHSH and Bell-CH functionals for continuous-variable states")]
pub struct Cli {
    /// Omit the timestamp line, making output byte-identical across runs.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimize one Bell functional at a single state parameter.
    Optimize(OptimizeArgs),
    /// Optimize over a grid of state parameters.
    Sweep(SweepArgs),
    /// Emit the data behind one of the standard plots.
    Figure(FigureArgs),
    /// Run the acceptance checks and print a pass/fail table.
    Verify(VerifyArgs),
    /// Compare the parity-rotation fidelity with K(gamma).
    Fidelity(FidelityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    Tmss,
    Ecs,
    #[value(name = "single_photon")]
    SinglePhoton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DirectionArg {
    Max,
    Min,
    #[value(name = "max_abs")]
    MaxAbs,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Max => Direction::Max,
            DirectionArg::Min => Direction::Min,
            DirectionArg::MaxAbs => Direction::MaxAbs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Complex,
    Imaginary,
}

impl From<DomainArg> for DisplacementDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Complex => DisplacementDomain::Complex,
            DomainArg::Imaginary => DisplacementDomain::Imaginary,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathArg {
    Analytic,
    Matrix,
}

impl From<PathArg> for EvalPath {
    fn from(p: PathArg) -> Self {
        match p {
            PathArg::Analytic => EvalPath::Analytic,
            PathArg::Matrix => EvalPath::Matrix,
        }
    }
}

fn parse_formalism(s: &str) -> Result<Formalism, String> {
    s.parse::<Formalism>().map_err(|e| e.to_string())
}

fn parse_figure(s: &str) -> Result<FigureId, String> {
    s.parse::<FigureId>().map_err(|e| e.to_string())
}

/// Options shared by `optimize` and `sweep`.
#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    #[arg(long, value_enum)]
    pub state: StateKind,

    /// pseudospin, bw, gbw, gisin_peres, ch_qubit, ch_q, ch_q_bw or ch_parity.
    #[arg(long, value_parser = parse_formalism)]
    pub formalism: Formalism,

    /// Fock cutoff n_max for matrix evaluation.
    #[arg(long)]
    pub cutoff: Option<usize>,

    #[arg(long, default_value_t = 32)]
    pub restarts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Defaults to max_abs for CHSH, max for CH on tmss and min otherwise.
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,

    #[arg(long, value_enum, default_value = "complex")]
    pub domain: DomainArg,

    #[arg(long, value_enum, default_value = "analytic")]
    pub path: PathArg,

    /// Half-width of the displacement box.
    #[arg(long)]
    pub displacement_box: Option<f64>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; defaults to $CVBELL_OUT_DIR/<name> if set, else stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct OptimizeArgs {
    /// r for tmss, gamma for ecs; ignored for single_photon.
    #[arg(long, default_value_t = 1.0)]
    pub param: f64,

    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub from: f64,

    #[arg(long)]
    pub to: f64,

    #[arg(long, default_value_t = 61)]
    pub points: usize,

    #[command(flatten)]
    pub problem: ProblemArgs,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    /// 1a, 1b, 2a, 2b, 3a or 3b.
    #[arg(long, value_parser = parse_figure)]
    pub id: FigureId,

    #[arg(long, default_value_t = 61)]
    pub points: usize,

    #[arg(long, default_value_t = 16)]
    pub restarts: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = cvbell::verify::DEFAULT_SEED)]
    pub seed: u64,

    #[arg(long, default_value_t = cvbell::verify::DEFAULT_RESTARTS)]
    pub restarts: usize,

    /// Run only these checks (repeatable).
    #[arg(long = "check", value_parser = clap::value_parser!(u8).range(1..=12))]
    pub checks: Vec<u8>,

    /// Write the report as JSON instead of the plain-text table.
    #[arg(long)]
    pub json: bool,

    /// Output file; defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct FidelityArgs {
    /// Coherent amplitude gamma.
    #[arg(long, num_args = 1.., required = true)]
    pub param: Vec<f64>,

    #[arg(long)]
    pub cutoff: Option<usize>,

    #[command(flatten)]
    pub output: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    run::run(&cli)
}
