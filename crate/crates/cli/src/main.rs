//! `carleson`: experiment runner for the maximal and Carleson functionals.
//!
//! Exit codes: 0 on success, 1 when a checked inequality fails, 2 on usage
//! errors (bad flags, bad exponents, malformed input files).

mod commands;
mod files;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use carleson_core::duality::DEFAULT_STOPPING_THRESHOLD;
use carleson_core::{GeometryConfig, TreeConfig};
use clap::{Args, Parser, Subcommand, ValueEnum};

use report::Format;

#[derive(Parser)]
#[command(name = "carleson", version, about = "Maximal and Carleson functionals on truncated dyadic trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every functional norm of a field or grid file.
    Norms(NormsOpts),
    /// Pairing bound, both extremizers and (on small trees) the oracle.
    Duality(DualityOpts),
    /// Dyadic versus continuum norm ratios and their stability under refinement.
    Equivalence(EquivalenceOpts),
    /// Carleson functional versus area integral.
    Tent(TentOpts),
    /// Lower estimates of multiplier norms.
    Multiplier(MultiplierOpts),
    /// Write a seeded random field or grid file.
    Generate(GenerateOpts),
}

/// `inf` or a number.
fn parse_exponent(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "infinity" | "Inf" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| e.to_string()),
    }
}

#[derive(Args, Debug, Clone)]
pub struct TreeOpts {
    /// Dimension of the base cube.
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    /// Finest dyadic level.
    #[arg(long, default_value_t = 4)]
    pub depth: usize,
}

impl TreeOpts {
    pub fn tree(&self) -> anyhow::Result<TreeConfig> {
        Ok(TreeConfig::new(self.n, self.depth)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct SuiteOpts {
    /// First seed; trial `k` uses `seed + k`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
}

impl SuiteOpts {
    pub fn seeds(&self) -> Vec<u64> {
        (0..self.trials).map(|k| self.seed + k).collect()
    }
}

#[derive(Args, Debug, Clone)]
pub struct GeometryOpts {
    /// Cone aperture.
    #[arg(long, default_value_t = 1.0)]
    pub aperture: f64,
    /// Vertical stretch of the continuum Whitney boxes.
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    /// Horizontal radius factor of the continuum Whitney boxes.
    #[arg(long, default_value_t = 0.5)]
    pub c1: f64,
    /// Corner stride of the test-cube family, in leaf units.
    #[arg(long, default_value_t = 2)]
    pub stride: u32,
}

impl GeometryOpts {
    pub fn geometry(&self) -> anyhow::Result<GeometryConfig> {
        Ok(GeometryConfig::new(self.aperture, self.c0, self.c1)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct OutputOpts {
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Args, Debug, Clone)]
pub struct NormsOpts {
    /// Field or grid file.
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub p: f64,
    /// Carleson-side outer exponent; the conjugate of `p` by default.
    #[arg(long, value_parser = parse_exponent)]
    pub pprime: Option<f64>,
    /// Whitney-average exponent (grid files).
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub q: f64,
    /// Carleson-side Whitney exponent; the conjugate of `q` by default.
    #[arg(long, value_parser = parse_exponent)]
    pub qprime: Option<f64>,
    /// Power of the Carleson functional (grid files).
    #[arg(long, default_value_t = 1.0, value_parser = parse_exponent)]
    pub r: f64,
    #[command(flatten)]
    pub geometry: GeometryOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct DualityOpts {
    #[command(flatten)]
    pub tree: TreeOpts,
    #[command(flatten)]
    pub suite: SuiteOpts,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub p: f64,
    /// Stopping threshold of the `p = 1` construction.
    #[arg(long = "c-stopping", default_value_t = DEFAULT_STOPPING_THRESHOLD)]
    pub c_stopping: f64,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct EquivalenceOpts {
    #[command(flatten)]
    pub tree: TreeOpts,
    /// Cells per axis of each Whitney region.
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub suite: SuiteOpts,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub q: f64,
    #[command(flatten)]
    pub geometry: GeometryOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct TentOpts {
    #[command(flatten)]
    pub tree: TreeOpts,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub suite: SuiteOpts,
    /// Outer exponent, `2 < p < ∞`.
    #[arg(long, default_value_t = 4.0, value_parser = parse_exponent)]
    pub p: f64,
    #[command(flatten)]
    pub geometry: GeometryOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Args, Debug, Clone)]
pub struct MultiplierOpts {
    #[command(flatten)]
    pub tree: TreeOpts,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[command(flatten)]
    pub suite: SuiteOpts,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub p: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub q: f64,
    #[arg(long, default_value_t = 2.0, value_parser = parse_exponent)]
    pub r: f64,
    /// Candidate functions tried per estimate.
    #[arg(long, default_value_t = 8)]
    pub budget: usize,
    #[command(flatten)]
    pub geometry: GeometryOpts,
    #[command(flatten)]
    pub output: OutputOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Field,
    Grid,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateOpts {
    #[arg(long, value_enum, default_value_t = Kind::Field)]
    pub kind: Kind,
    #[command(flatten)]
    pub tree: TreeOpts,
    #[arg(long, default_value_t = 2)]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Value distribution: `zero`, `constant:C`, `uniform:LO:HI`,
    /// `lognormal:MU:SIGMA`, `sparse:DENSITY[:SIGMA]` or
    /// `delta(LEVEL;K1,...,Kn)`. Cycles through uniform, log-normal and sparse
    /// by seed when absent.
    #[arg(long)]
    pub dist: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// How a command ended when it did not hit a usage error.
pub enum Status {
    Ok,
    /// A checked inequality failed; the message names the seeds.
    Violated(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Norms(o) => commands::norms(&o),
        Command::Duality(o) => commands::duality(&o),
        Command::Equivalence(o) => commands::equivalence(&o),
        Command::Tent(o) => commands::tent(&o),
        Command::Multiplier(o) => commands::multiplier(&o),
        Command::Generate(o) => commands::generate(&o),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Violated(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
