use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "hyperdev",
    version,
    about = "Edge-count deviations of random vertex subsets in uniform hypergraphs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a hypergraph and print it.
    Gen(GenArgs),
    /// Degree statistics.
    Stats(StatsArgs),
    /// Martingale decomposition along one random ordering, one row per step and order.
    Decompose(DecomposeArgs),
    /// Predicted rate, normalizer and window for a deviation.
    Rate(RateArgs),
    /// The three candidate exponents for 3-term progressions in the binomial model.
    Regimes(RegimesArgs),
    /// Monte Carlo tail frequencies against predicted exponents.
    Tail(TailArgs),
    /// Monte Carlo moments and normality diagnostics.
    Moments(MomentsArgs),
    /// Exact distribution of the edge count by enumeration.
    Enumerate(EnumerateArgs),
    /// Run the exact-identity self-check suite.
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum GraphFormat {
    Json,
    Text,
}

#[derive(Args, Debug, Clone)]
pub struct InputArgs {
    /// Hypergraph file (`.json`, or whitespace-separated text).
    #[arg(conflicts_with = "gen")]
    pub file: Option<PathBuf>,
    /// Generator spec: `ap:N,k`, `sidon:N` or `random:N,k,E`.
    #[arg(long)]
    pub gen: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SeedArgs {
    /// Integer seed, or `random` for a fresh one (default: a fixed constant).
    #[arg(long)]
    pub seed: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    /// `m:<size>` or `p:<probability>`.
    #[arg(long)]
    pub model: String,
    #[arg(long, default_value_t = 100_000)]
    pub samples: u64,
    /// Worker threads (default: all cores).
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
    #[arg(long, default_value_t = 4096)]
    pub batch_size: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub gen: String,
    #[arg(long, value_enum, default_value_t = GraphFormat::Json)]
    pub graph_format: GraphFormat,
    /// Seed for `random:` specs.
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Prefix length.
    #[arg(long)]
    pub m: u32,
    /// Exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct RateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long)]
    pub model: String,
    /// Absolute deviation `a` (uniform model).
    #[arg(long, conflicts_with_all = ["delta", "normalizers"])]
    pub a: Option<f64>,
    /// Relative deviation `δ` (binomial model).
    #[arg(long, conflicts_with = "normalizers")]
    pub delta: Option<f64>,
    /// Deviation as a multiple of the predicted normalizer.
    #[arg(long)]
    pub normalizers: Option<f64>,
    /// Order `r` for the window check (default: smallest with bounded set degree).
    #[arg(long)]
    pub r: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub slack_low: f64,
    #[arg(long, default_value_t = 1.0)]
    pub slack_high: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct RegimesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Number of vertices, when no hypergraph is given.
    #[arg(long)]
    pub n: Option<u32>,
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub delta: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct TailArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Comma-separated ascending thresholds.
    #[arg(long, value_delimiter = ',', required = true)]
    pub thresholds: Vec<f64>,
    /// Read thresholds as multiples of the predicted normalizer.
    #[arg(long)]
    pub in_normalizers: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub sim: SimArgs,
    /// Also compute the Kolmogorov–Smirnov distance to N(0,1).
    #[arg(long)]
    pub ks: bool,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct EnumerateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// `m:<size>` or `p:<rational>` such as `p:1/2`.
    #[arg(long)]
    pub model: String,
    /// Maximum number of subsets to visit.
    #[arg(long, env = "HYPERDEV_ENUM_LIMIT", default_value_t = 20_000_000)]
    pub limit: u128,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Fewer cases, for a smoke test.
    #[arg(long)]
    pub quick: bool,
    #[command(flatten)]
    pub seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
}
