use std::path::PathBuf;

use annulus_rk::verify::SUITES;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

#[derive(Debug, Parser)]
#[command(name = "annulus-rk", version, about = "Polyanalytic reproducing kernels on the annulus 1 < |z| < R")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the admissible Landau levels and the available evaluation paths.
    Info(Common),
    /// Evaluate K_m(z, w) along one or more paths.
    Eval(EvalArgs),
    /// Tabulate K_m(z, w) for fixed w on a log-radial by uniform-angular grid.
    Grid(GridArgs),
    /// Run a verification suite and report its residuals.
    Verify(VerifyArgs),
}

/// Options shared by every subcommand. Flags override values from `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    /// Outer radius of the annulus.
    #[arg(long = "R", allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Magnetic weight.
    #[arg(long = "B", allow_negative_numbers = true)]
    pub b: Option<f64>,
    /// Landau level.
    #[arg(long)]
    pub m: Option<usize>,
    /// Relative truncation tolerance of the series.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Maximum number of series terms per direction.
    #[arg(long = "max-terms")]
    pub max_terms: Option<usize>,
    /// Angular quadrature nodes.
    #[arg(long = "n-ang")]
    pub n_ang: Option<usize>,
    /// Radial quadrature nodes.
    #[arg(long = "n-rad")]
    pub n_rad: Option<usize>,
    /// Seed of the sampled verification points.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long)]
    pub workers: Option<usize>,
    /// JSON file with default values for these options.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the output to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PathKind {
    Closed,
    Oracle,
    Theta,
    Product,
}

impl PathKind {
    pub fn name(self) -> &'static str {
        match self {
            PathKind::Closed => "closed",
            PathKind::Oracle => "oracle",
            PathKind::Theta => "theta",
            PathKind::Product => "product",
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// First point, e.g. "1.5+0.7i".
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub z: Complex64,
    /// Second point.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Complex64,
    /// Evaluation paths; repeat to compare several.
    #[arg(long = "path", value_enum, default_values_t = [PathKind::Closed])]
    pub paths: Vec<PathKind>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    /// The fixed second point.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    pub w: Complex64,
    /// Number of radii, equispaced in ln|z|.
    #[arg(long = "n-r", default_value_t = 32)]
    pub n_r: usize,
    /// Number of angles.
    #[arg(long = "n-theta", default_value_t = 64)]
    pub n_theta: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(SUITES))]
    pub suite: String,
    #[command(flatten)]
    pub common: Common,
    /// Gram window: indices with |j + B| <= window.
    #[arg(long)]
    pub window: Option<i64>,
}

/// Parses `a+bi`, `a-bi`, `a`, `bi` and `i`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    cleaned.parse::<Complex64>().map_err(|_| format!("`{s}` is not a complex number of the form a+bi")).and_then(|z| {
        if z.re.is_finite() && z.im.is_finite() {
            Ok(z)
        } else {
            Err(format!("`{s}` is not finite"))
        }
    })
}
