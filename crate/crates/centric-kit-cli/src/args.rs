//! Command-line surface.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "centric-kit",
    version,
    about = "Cluster-preserving dataset transformations for k-means: generate, perturb, \
             cluster, verify, experiment, plot"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a labeled synthetic dataset CSV
    Generate(GenerateArgs),
    /// Apply a JSON transform pipeline to a dataset CSV
    Transform(TransformArgs),
    /// Cluster a dataset CSV with Lloyd's algorithm or the exhaustive oracle
    Cluster(ClusterArgs),
    /// Check that centric transforms preserve the exhaustive k-means optimum
    Verify(VerifyArgs),
    /// Run a repeated perturb-and-cluster experiment from a config
    Experiment(ExperimentArgs),
    /// Render a dataset CSV as an SVG scatter plot
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeneratorKind {
    #[value(name = "two-squares-3d")]
    TwoSquares3d,
    #[value(name = "gaussian-blobs")]
    GaussianBlobs,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Generator family (or use --config)
    #[arg(long, value_enum)]
    pub kind: Option<GeneratorKind>,
    /// Total points (two-squares-3d)
    #[arg(long)]
    pub n: Option<usize>,
    /// Square edge length (two-squares-3d)
    #[arg(long, default_value_t = 1.0)]
    pub edge: f64,
    /// Number of blobs (gaussian-blobs)
    #[arg(long)]
    pub k: Option<usize>,
    /// Points per blob (gaussian-blobs)
    #[arg(long)]
    pub n_per: Option<usize>,
    /// Dimension (gaussian-blobs)
    #[arg(long)]
    pub dim: Option<usize>,
    /// Blob standard deviation (gaussian-blobs)
    #[arg(long, default_value_t = 1.0)]
    pub spread: f64,
    /// Minimum distance between blob centers (gaussian-blobs)
    #[arg(long, default_value_t = 10.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Generator spec as a JSON file instead of flags
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output CSV path
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    /// Input dataset CSV (labels required for cluster-aware transforms)
    #[arg(long)]
    pub input: PathBuf,
    /// Pipeline JSON: {"schema":1,"transforms":[...]}
    #[arg(long, alias = "config")]
    pub spec: PathBuf,
    /// Output CSV path; a provenance sidecar is appended next to it
    #[arg(short, long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    #[value(name = "kmeans-plus-plus")]
    KMeansPlusPlus,
    #[value(name = "uniform-random-assignment")]
    UniformRandomAssignment,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub k: usize,
    /// Use the exhaustive oracle instead of Lloyd (small instances only)
    #[arg(long)]
    pub ideal: bool,
    #[arg(long, default_value_t = 20)]
    pub restarts: usize,
    #[arg(long, default_value_t = 300)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value = "kmeans-plus-plus")]
    pub init: InitArg,
    /// Also report the clustering error against the input's label column
    #[arg(long)]
    pub reference: bool,
    /// Output CSV with the computed labels
    #[arg(short, long)]
    pub out: PathBuf,
    /// Optional JSON result path
    #[arg(long)]
    pub result: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    #[value(name = "gamma-plus-plus")]
    GammaPlusPlus,
    #[value(name = "gamma-star")]
    GammaStar,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Verify one explicit instance from a dataset CSV
    #[arg(long, conflicts_with = "random_suite")]
    pub input: Option<PathBuf>,
    /// Run a seeded randomized instance suite instead
    #[arg(long)]
    pub random_suite: bool,
    #[arg(long, value_enum, default_value = "gamma-plus-plus")]
    pub theorem: TheoremArg,
    /// Cluster count(s); single-instance mode uses the first
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3])]
    pub k: Vec<usize>,
    /// Contraction factor(s); single-instance mode uses the first
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75])]
    pub lambda: Vec<f64>,
    /// Subset for Γ⁺⁺ in single-instance mode, e.g. --p-indices 0,1,2
    #[arg(long, value_delimiter = ',')]
    pub p_indices: Vec<usize>,
    /// Cluster for Γ* in single-instance mode
    #[arg(long, default_value_t = 0)]
    pub cluster: usize,
    /// Suite: number of instances
    #[arg(long, default_value_t = 200)]
    pub instances: usize,
    /// Suite: points per instance
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    /// Suite: dimension(s)
    #[arg(long, value_delimiter = ',', default_values_t = vec![2, 3])]
    pub dim: Vec<usize>,
    /// Suite: Γ⁺⁺ subset size bounds
    #[arg(long, default_value_t = 2)]
    pub subset_min: usize,
    #[arg(long, default_value_t = 5)]
    pub subset_max: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Optional JSON verdict summary path
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StockArm {
    #[value(name = "gamma")]
    Gamma,
    #[value(name = "gamma-plus-plus")]
    GammaPlusPlus,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// Experiment config JSON ({"schema":1,...})
    #[arg(long, required_unless_present = "stock")]
    pub config: Option<PathBuf>,
    /// Use a stock two-squares comparison arm instead of a config file
    #[arg(long, value_enum, conflicts_with = "config")]
    pub stock: Option<StockArm>,
    /// With --stock: 10 000 points instead of the 2 000-point desk scale
    #[arg(long)]
    pub full_scale: bool,
    /// Report JSON path
    #[arg(short, long)]
    pub out: PathBuf,
    /// Optional per-run CSV path
    #[arg(long)]
    pub runs_csv: Option<PathBuf>,
    /// Write the effective config JSON here and exit without running
    #[arg(long)]
    pub emit_config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Take point colors from this CSV's label column instead of the input's
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// 1-based coordinate columns to plot, e.g. --columns 1,3
    #[arg(long, value_delimiter = ',')]
    pub columns: Vec<usize>,
    /// Output SVG path
    #[arg(short, long)]
    pub out: PathBuf,
}
