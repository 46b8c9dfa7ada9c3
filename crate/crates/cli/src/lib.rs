//! The `symbreak` command line: verification battery, phase diagrams, Ising
//! training runs and the graph demo. Every command writes its outputs and a
//! `<command>.config.json` echo into `--out`.

pub mod commands;
pub mod verify;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use symbreak_core::toynet::{Variant, EVAL_SAMPLES};

#[derive(Debug, Parser)]
#[command(name = "symbreak", version, about = "Probabilistic symmetry breaking: checks and experiments")]
pub struct Cli {
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output directory, created if absent.
    #[arg(long, global = true, default_value = "symbreak-out")]
    pub out: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the invariant battery and write a JSONL report.
    Verify(VerifyArgs),
    /// Tabulate the analytic ground-state phase over a (Jy, h) grid.
    PhaseDiagram(PhaseArgs),
    /// Train the toy network on an Ising corpus and evaluate it.
    IsingTrain(TrainArgs),
    /// Compare equivariant and SymPE link prediction on small graphs.
    GraphDemo(GraphArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct VerifyArgs {
    /// Significance level of the distributional tests.
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Draws per sampled check.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    /// Test hook: always use the fixed canonical element instead of sampling
    /// the inversion kernel.
    #[arg(long)]
    pub break_kernel: bool,
    /// Skip the two training runs.
    #[arg(long)]
    pub no_train: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct PhaseArgs {
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub jx: f64,
    /// `lo:hi`.
    #[arg(long, default_value = "-3:3", allow_hyphen_values = true)]
    pub jy_range: Range,
    #[arg(long, default_value = "0:2", allow_hyphen_values = true)]
    pub h_range: Range,
    /// `<jy steps>x<h steps>`.
    #[arg(long, default_value = "61x41")]
    pub resolution: Resolution,
    /// Lattice side used for the order parameters.
    #[arg(long, default_value_t = 4)]
    pub l: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TrainArgs {
    #[arg(long, default_value = "sympe")]
    pub variant: Variant,
    #[arg(long, default_value_t = 8)]
    pub l: usize,
    #[arg(long, default_value_t = 500)]
    pub epochs: usize,
    /// Training corpus size.
    #[arg(long, default_value_t = 64)]
    pub count: usize,
    /// Spin samples per test instance.
    #[arg(long, default_value_t = EVAL_SAMPLES)]
    pub samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphArgs {
    #[arg(long, default_value_t = 7)]
    pub n: usize,
    #[arg(long, default_value_t = 0.25)]
    pub p: f64,
    #[arg(long, default_value_t = 500)]
    pub count: usize,
    /// Run a named fixture instead of a random corpus (`c4`).
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = (parse(lo)?, parse(hi)?);
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(format!("range {s:?} must be finite with lo < hi"));
        }
        Ok(Self { lo, hi })
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.lo, self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Resolution {
    pub jy: usize,
    pub h: usize,
}

impl FromStr for Resolution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s.split_once('x').ok_or_else(|| format!("expected <jy>x<h>, got {s:?}"))?;
        let parse = |t: &str| t.parse::<usize>().map_err(|e| format!("{t:?}: {e}"));
        let (jy, h) = (parse(a)?, parse(b)?);
        if jy < 2 || h < 2 {
            return Err(format!("resolution {s:?} must be at least 2x2"));
        }
        Ok(Self { jy, h })
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.jy, self.h)
    }
}

/// Process exit statuses.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const USAGE: i32 = 2;
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags or configuration.
    Usage(String),
    /// A check failed or training diverged.
    Check(String),
    Io(std::io::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => exit::USAGE,
            Failure::Check(_) | Failure::Io(_) => exit::FAILURE,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "configuration error: {m}"),
            Failure::Check(m) => f.write_str(m),
            Failure::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Caps the global rayon pool at `SYMBREAK_THREADS` when set.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SYMBREAK_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SYMBREAK_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("thread pool: {e}")))
}

/// Runs one parsed invocation; the returned summary goes to stdout.
pub fn run(cli: &Cli) -> Result<String, Failure> {
    std::fs::create_dir_all(&cli.out)?;
    match &cli.command {
        Command::Verify(args) => commands::verify(cli, args),
        Command::PhaseDiagram(args) => commands::phase_diagram(cli, args),
        Command::IsingTrain(args) => commands::ising_train(cli, args),
        Command::GraphDemo(args) => commands::graph_demo(cli, args),
    }
}
