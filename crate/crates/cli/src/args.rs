use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ergoblock", version, about = "Ergodic block decompositions of symbolic sequences and planar fields")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Write one of the example sequences, a random baseline or a planar field.
    Generate(GenerateArgs),
    /// d* between a sequence and another sequence or a list of measures.
    Distance(DistanceArgs),
    /// Greedy decomposition into ergodic blocks and filler.
    Decompose(DecomposeArgs),
    /// Classify the blocks of a given partition.
    Audit(AuditArgs),
    /// Banach density estimates of a coordinate set over a range of horizons.
    Density(DensityArgs),
    /// Tile selection or fixed-level tile audit of a planar field.
    Tiles(TilesArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    Csv,
}

#[derive(Args, Serialize)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    pub emit: Emit,
    /// Directory for the output files; standard output if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Example {
    Nested,
    Toeplitz,
    Runs,
    /// Planar field of vertical Bernoulli stripes.
    Striped,
    /// Planar i.i.d. Bernoulli field.
    Field,
}

#[derive(Args, Serialize)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub example: Option<Example>,
    #[arg(long)]
    pub length: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub half_width: Option<usize>,
    /// Probability of the symbol `1`.
    #[arg(long)]
    pub bernoulli: Option<f64>,
    /// Word repeated up to `--length`.
    #[arg(long)]
    pub periodic: Option<String>,
    /// Alphabet labels for `--periodic`, space separated.
    #[arg(long)]
    pub alphabet: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub side: Option<usize>,
    #[arg(long, default_value_t = 128)]
    pub stripe_width: usize,
    /// Probabilities of `1` on even and odd stripes.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.05, 0.95])]
    pub stripe_probs: Vec<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct SequenceInput {
    /// Sequence file, or pattern file for planar commands.
    #[arg(long)]
    pub input: PathBuf,
    /// Labels for input files without an `alphabet:` header.
    #[arg(long)]
    pub alphabet: Option<String>,
}

#[derive(Args, Serialize)]
pub struct DistanceArgs {
    #[command(flatten)]
    pub source: SequenceInput,
    /// Second sequence or pattern to compare against.
    #[arg(long)]
    pub against: Option<PathBuf>,
    /// Measure as inline JSON or a path; repeat for a set of measures.
    #[arg(long)]
    pub spec: Vec<String>,
    #[arg(long, default_value_t = 6)]
    pub depth: usize,
    /// Treat inputs as planar patterns.
    #[arg(long)]
    pub planar: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub source: SequenceInput,
    /// Region as inline JSON or a path.
    #[arg(long)]
    pub region: String,
    #[arg(long)]
    pub m: usize,
    /// Upper bound on block length; unbounded if absent.
    #[arg(long)]
    pub n: Option<usize>,
    /// Double n from m until the filler density target is met.
    #[arg(long)]
    pub sweep_n: bool,
    #[arg(long, default_value_t = 0.05)]
    pub target: f64,
    /// Largest n tried by the sweep; defaults to the horizon.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Half-open window `lo:hi` for the densities (and the decomposition
    /// itself unless sweeping).
    #[arg(long)]
    pub window: Option<String>,
    /// Decompose both ways from this coordinate.
    #[arg(long)]
    pub origin: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct AuditArgs {
    #[command(flatten)]
    pub source: SequenceInput,
    #[arg(long)]
    pub region: String,
    /// Comma-separated cut positions, or a file holding them.
    #[arg(long)]
    pub cuts: Option<String>,
    /// Build the cuts around the series of B_k of a `runs` sequence.
    #[arg(long)]
    pub runs_k: Option<usize>,
    /// Annotation file written by `generate`, needed by `--runs-k`.
    #[arg(long)]
    pub annotations: Option<PathBuf>,
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct DensityArgs {
    /// Decomposition or audit output, annotation file, or a JSON list of
    /// coordinates or `[start, end)` spans.
    #[arg(long)]
    pub set: PathBuf,
    /// Annotation to read from an annotation file.
    #[arg(long)]
    pub annotation: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub horizon: Vec<usize>,
    #[arg(long)]
    pub window: Option<String>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct TilesArgs {
    #[command(flatten)]
    pub source: SequenceInput,
    #[arg(long)]
    pub region: String,
    #[arg(long, default_value_t = 3)]
    pub level_min: u32,
    #[arg(long, default_value_t = 5)]
    pub level_max: u32,
    /// Audit every tile of this level instead of selecting tiles.
    #[arg(long)]
    pub audit_level: Option<u32>,
    #[arg(long, default_value_t = 2)]
    pub base: usize,
    /// Square side for the density estimates.
    #[arg(long)]
    pub horizon: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Serialize)]
pub struct VerifyArgs {
    /// Smaller inputs and sample counts.
    #[arg(long)]
    pub quick: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub output: OutputArgs,
}
