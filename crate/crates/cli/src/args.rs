use clap::{Args, Parser, Subcommand, ValueEnum};
use riskfield::inference::MantelVariant;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "riskfield", version, about = "Continuous risk-factor model toolkit")]
pub struct Cli {
    /// Worker threads for the parallel stages (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate a synthetic sector world and its returns.
    Simulate(SimulateArgs),
    /// Relate a distance matrix to return co-movement and project the assets.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Dirac,
    Constant,
    Se,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 8)]
    pub assets: usize,
    #[arg(long, default_value_t = 2)]
    pub sectors: usize,
    /// Grid points over the factor space.
    #[arg(long, default_value_t = 513)]
    pub grid: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub lower: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub upper: f64,
    #[arg(long, value_enum, default_value_t = KernelArg::Dirac)]
    pub kernel: KernelArg,
    /// Premium variance σ².
    #[arg(long, default_value_t = 0.04)]
    pub sigma2: f64,
    /// Length scale of the squared-exponential kernel.
    #[arg(long, default_value_t = 0.05)]
    pub length_scale: f64,
    /// Expected premium at every node.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub premium_mean: f64,
    #[arg(long, default_value_t = 5000)]
    pub horizon: usize,
    /// Idiosyncratic return volatility.
    #[arg(long, default_value_t = 0.01)]
    pub idio: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value = "simulation")]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistanceArg {
    /// Energy distance between sensitivity profiles (needs --profiles).
    Energy,
    /// Angular distance between mean document embeddings.
    Angular,
    /// Energy distance between per-asset embedding clouds.
    EnergySamples,
}

impl DistanceArg {
    pub fn name(self) -> &'static str {
        match self {
            DistanceArg::Energy => "energy",
            DistanceArg::Angular => "angular",
            DistanceArg::EnergySamples => "energy-samples",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbeddingFormatArg {
    Jsonl,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Raw,
    Centered,
}

impl From<VariantArg> for MantelVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Raw => MantelVariant::Raw,
            VariantArg::Centered => MantelVariant::Centered,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Returns CSV (`date,SYM1,SYM2,...`).
    #[arg(long)]
    pub returns: PathBuf,
    /// Document embeddings (JSONL or CSV).
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Embedding file format; guessed from the extension when omitted.
    #[arg(long, value_enum)]
    pub embeddings_format: Option<EmbeddingFormatArg>,
    /// Sensitivity profiles CSV (`omega,SYM1,...`).
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// Source of the asset distance matrix W. Defaults to `angular` with
    /// --embeddings, otherwise `energy`.
    #[arg(long, value_enum)]
    pub distance: Option<DistanceArg>,
    /// Use D (1) or D² (2) as W.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub w_power: u8,
    /// Risk-free column to subtract from every asset.
    #[arg(long)]
    pub risk_free: Option<String>,
    /// `asset,label` CSV used for silhouettes and plot colours.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = riskfield::inference::DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, value_enum, default_value_t = VariantArg::Raw)]
    pub mantel_variant: VariantArg,
    #[arg(long, default_value_t = 500)]
    pub mds_max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub mds_tol: f64,
    #[arg(long, default_value_t = 5)]
    pub mds_restarts: usize,
    #[arg(long, default_value = "analysis")]
    pub out: PathBuf,
}
