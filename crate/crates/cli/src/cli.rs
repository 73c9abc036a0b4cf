use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "crackecon",
    version,
    about = "Economics of offline password cracking"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a Zipf model to a frequency corpus.
    Fit(FitArgs),
    /// Crack-everything threshold for CDF-Zipf parameters.
    Threshold(ThresholdArgs),
    /// All-crack threshold, bracket and fraction bounds for PDF-Zipf.
    PdfThreshold(PdfThresholdArgs),
    /// Optimal attacker against a distribution.
    Attack(AttackArgs),
    /// Model-independent crack bounds for a corpus.
    Bounds(BoundsArgs),
    /// Key-stretching cost curves and value conversions.
    Cost(CostArgs),
    /// Add calibrated noise to a corpus.
    Perturb(PerturbArgs),
    /// Fit robustness under repeated perturbation.
    DpStudy(DpStudyArgs),
    /// Fits on random subsamples of a corpus.
    Stability(StabilityArgs),
    /// Sample a corpus from a distribution.
    Sample(SampleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    RawCounts,
    RunlengthPairs,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON file with parameter defaults; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args)]
pub struct CorpusInput {
    /// Frequency corpus file.
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMethod {
    CdfLls,
    CdfGss,
    PdfLls,
    All,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: CorpusInput,
    #[arg(long, value_enum)]
    pub method: Option<FitMethod>,
    /// Minimum frequency used by the PDF fit.
    #[arg(long)]
    pub cutoff: Option<u64>,
    /// Bracket tolerance of the golden-section search on `r`.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    /// CSV of `dataset,y,r` rows; emits `dataset,y,r,T_a1,T_a08`.
    #[arg(long, conflicts_with_all = ["y", "r"])]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PdfThresholdArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: f64,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    /// Comma-separated log10(v/k) values; emits one row of bounds each.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub log10_vk: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    BruteForce,
    MarginalScan,
    Both,
}

#[derive(Debug, Args)]
pub struct AttackArgs {
    #[command(flatten)]
    pub common: Common,
    /// `cdf_zipf:y,r[,n_max]`, `pdf_zipf:z,s[,n_max]` or `empirical:<path>`.
    #[arg(long)]
    pub dist: String,
    #[arg(long)]
    pub v: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Comma-separated values of `v`; emits a crack curve.
    #[arg(long, value_delimiter = ',')]
    pub v_grid: Option<Vec<f64>>,
    /// Also report the competition lower bound with this many grid points.
    #[arg(long)]
    pub competition_grid: Option<usize>,
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: CorpusInput,
    /// Name for the `dataset` column; defaults to the file stem.
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, value_delimiter = ',')]
    pub j: Option<Vec<u64>>,
    #[arg(long = "L", value_delimiter = ',')]
    pub l: Option<Vec<f64>>,
    /// Comma-separated V/k values; `L` is derived per value instead.
    #[arg(long, value_delimiter = ',', conflicts_with = "l")]
    pub vk: Option<Vec<f64>>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Head rank for the concentration term.
    #[arg(long)]
    pub t: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Iterated,
    Mhf,
}

#[derive(Debug, Args)]
pub struct CostArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Comma-separated hash iteration counts.
    #[arg(long, value_delimiter = ',')]
    pub tau: Option<Vec<f64>>,
    /// Distribution for the crack curve, as for `attack --dist`.
    #[arg(long)]
    pub dist: Option<String>,
    /// Value of one cracked password in dollars.
    #[arg(long)]
    pub v_dollars: Option<f64>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub c_hash: Option<f64>,
    #[arg(long)]
    pub c_mem: Option<f64>,
    /// Emit the value conversion chart for these market prices instead.
    #[arg(long, value_delimiter = ',')]
    pub price: Option<Vec<f64>>,
    /// Fraction of the corpus sold at the market price.
    #[arg(long)]
    pub q: Option<f64>,
    /// Exponents for the value conversion chart.
    #[arg(long, value_delimiter = ',')]
    pub a_values: Option<Vec<f64>>,
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: CorpusInput,
    #[arg(long)]
    pub epsilon_dp: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyFit {
    CdfLls,
    PdfLls,
}

#[derive(Debug, Args)]
pub struct DpStudyArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: CorpusInput,
    #[arg(long)]
    pub epsilon_dp: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub fit: Option<StudyFit>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub input: CorpusInput,
    /// Comma-separated subsample sizes.
    #[arg(long, value_delimiter = ',')]
    pub sizes: Option<Vec<u64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub fit: Option<StudyFit>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub dist: String,
    /// Number of users to draw.
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum)]
    pub input_format: Option<InputFormat>,
}
