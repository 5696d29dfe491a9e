//! Command-line definitions.

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mixjitter::estimators::Kernel;

#[derive(Debug, Parser)]
#[command(name = "mixjitter", version, about = "Jittering estimators for mixed discrete-continuous data")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Add noise to the discrete columns of a CSV file.
    Jitter(JitterArgs),
    /// Fit a jittered KDE or local linear model and save it as JSON.
    Fit(FitArgs),
    /// Evaluate a density or conditional functional of a saved model.
    Eval(EvalArgs),
    /// Check the noise family and the convolution identities.
    Verify(VerifyArgs),
    /// Draw a sample from a synthetic model.
    Simulate(SimulateArgs),
    /// Error of the jittered KDE against a synthetic model over a grid of n.
    Benchmark(BenchmarkArgs),
}

/// `--seed` value: a number or `entropy`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedArg {
    Fixed(u64),
    Entropy,
}

impl FromStr for SeedArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("entropy") {
            return Ok(SeedArg::Entropy);
        }
        s.parse()
            .map(SeedArg::Fixed)
            .map_err(|_| format!("`{s}` is neither an unsigned integer nor `entropy`"))
    }
}

#[derive(Debug, Clone, Args)]
pub struct SchemaArgs {
    /// Integer-valued ordered columns.
    #[arg(long, value_delimiter = ',')]
    pub discrete: Vec<String>,
    /// Real-valued columns.
    #[arg(long, value_delimiter = ',')]
    pub continuous: Vec<String>,
    /// Unordered categorical columns (dummy coded).
    #[arg(long, value_delimiter = ',')]
    pub categorical: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct NoiseArgs {
    /// Noise mixing weight θ in [0, 1). Default 0.8.
    #[arg(long)]
    pub theta: Option<f64>,
    /// Beta shape ν ≥ 1. Default 5.
    #[arg(long)]
    pub nu: Option<u32>,
    /// Random seed, or `entropy`. Default 0.
    #[arg(long)]
    pub seed: Option<SeedArg>,
    /// JSON settings file; flags take precedence over it.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct JitterArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Output CSV; stdout when absent.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    /// Which independent jitter replicate to draw.
    #[arg(long, default_value_t = 0)]
    pub replicate: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EstimatorKind {
    Kde,
    Loclin,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, short)]
    pub input: PathBuf,
    /// Model artifact path.
    #[arg(long, short)]
    pub output: PathBuf,
    #[command(flatten)]
    pub schema: SchemaArgs,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = EstimatorKind::Kde)]
    pub estimator: EstimatorKind,
    /// Response column (local linear only).
    #[arg(long)]
    pub response: Option<String>,
    /// Jitter a discrete response too (local linear only).
    #[arg(long)]
    pub jitter_response: bool,
    /// `gaussian` or `epanechnikov`. Default gaussian.
    #[arg(long)]
    pub kernel: Option<Kernel>,
    /// Number of jitter replicates to average. Default 1.
    #[arg(long)]
    pub jitters: Option<usize>,
    /// Per-column bandwidths on the standardized scale.
    #[arg(long, value_delimiter = ',')]
    pub bandwidth: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FunctionalKind {
    Density,
    Mean,
    Cdf,
    Quantile,
    Classify,
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Model artifact written by `fit`.
    #[arg(long, short)]
    pub model: PathBuf,
    #[arg(long, value_enum)]
    pub functional: FunctionalKind,
    /// Response column for mean, cdf, quantile and classify.
    #[arg(long)]
    pub response: Option<String>,
    /// CDF threshold.
    #[arg(long)]
    pub threshold: Option<f64>,
    /// Quantile level.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Comma-separated point: every column for density, the non-response
    /// columns otherwise. Repeatable.
    #[arg(long, allow_hyphen_values = true)]
    pub at: Vec<String>,
    /// CSV of points whose header names the needed columns.
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Print the full noise report for every spec.
    #[arg(long)]
    pub verbose: bool,
    /// Replace the noise density by a corrupted one (negative control).
    #[arg(long, hide = true)]
    pub corrupt_noise: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Synthetic model JSON file.
    #[arg(long)]
    pub model_config: PathBuf,
    #[arg(long, short)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<SeedArg>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum BenchFunctional {
    /// Mean absolute error of the KDE over the atoms of Z.
    KdeMae,
    /// Absolute error of the estimated mean of Z.
    CondMean,
    /// Mean absolute error of the corrected CDF over the atoms of Z.
    CdfMae,
}

impl BenchFunctional {
    pub fn name(self) -> &'static str {
        match self {
            BenchFunctional::KdeMae => "kde_mae",
            BenchFunctional::CondMean => "cond_mean",
            BenchFunctional::CdfMae => "cdf_mae",
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct BenchmarkArgs {
    /// Synthetic model JSON file. Default Binomial(4, 0.3).
    #[arg(long)]
    pub model_config: Option<PathBuf>,
    /// Explicit sample sizes.
    #[arg(long = "n", value_delimiter = ',')]
    pub sizes: Vec<usize>,
    /// Smallest n of a geometric grid (used when `--n` is absent).
    #[arg(long, default_value_t = 500)]
    pub n_min: usize,
    /// Grid ratio.
    #[arg(long, default_value_t = 4.0)]
    pub ratio: f64,
    /// Number of grid points.
    #[arg(long, default_value_t = 3)]
    pub steps: usize,
    /// Seeds per grid point.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_values_t = [BenchFunctional::KdeMae, BenchFunctional::CondMean, BenchFunctional::CdfMae]
    )]
    pub functionals: Vec<BenchFunctional>,
    #[command(flatten)]
    pub noise: NoiseArgs,
    #[arg(long)]
    pub kernel: Option<Kernel>,
    #[arg(long)]
    pub jitters: Option<usize>,
    /// Long-format error CSV; stdout when absent (the summary then goes to
    /// stderr).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}
