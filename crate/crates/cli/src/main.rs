//! `unembed`: command-line analysis of softmax unembedding geometry.
//!
//! Exit codes: 0 success, 1 a requested check failed, 2 I/O or parse failure,
//! 3 invalid arguments or unmet preconditions, 4 internal consistency failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use unembed::fixtures::ExampleName;
use unembed::geometry::{Metric, DEFAULT_RESOLUTION, DEFAULT_TIE_EPS};
use unembed::io::ModelFormat;
use unembed::transforms::CosineTarget;

mod commands;
mod reproduce;

#[derive(Debug, Parser)]
#[command(name = "unembed", version, about = "Inspect and transform softmax unembeddings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pairwise similarity matrix of the unembeddings.
    Similarity(SimilarityArgs),
    /// Translate the unembeddings so two labels reach cosine -1 or +1.
    ForceCosine(ForceCosineArgs),
    /// Center, normalise, translate or scale a model.
    Transform(TransformArgs),
    /// Which label pairs can tie for the highest probability.
    Ties(TiesArgs),
    /// Argmax label on a regular 2D grid, as CSV.
    Regions(RegionsArgs),
    /// Recompute a built-in example and compare with its stated values.
    Reproduce(ReproduceArgs),
    /// Compare the probabilities of two models on a batch of points.
    VerifyEquivalence(VerifyArgs),
}

/// Where the model comes from.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["input", "example"])))]
pub struct ModelArgs {
    /// Model file (CSV unembeddings or JSON).
    #[arg(long, short)]
    pub input: Option<PathBuf>,
    /// Use a built-in example instead of a file.
    #[arg(long)]
    pub example: Option<ExampleName>,
    /// Input format; guessed from the extension when omitted.
    #[arg(long)]
    pub format: Option<ModelFormat>,
    /// CSV of embeddings to attach to a CSV model.
    #[arg(long, requires = "input")]
    pub embeddings: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimilarityArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value = "cosine")]
    pub metric: Metric,
    /// Report path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ForceCosineArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, num_args = 2, value_names = ["I", "J"], required = true)]
    pub pair: Vec<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub target: CosineTarget,
    /// Transformed model path.
    #[arg(long, short)]
    pub output: PathBuf,
    /// Report path; stdout when omitted.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Seed for probe points when the model has no embeddings.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransformOp {
    Center,
    Normalize,
    Translate,
    Scale,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub op: TransformOp,
    /// Translation vector for `--op translate`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub vector: Option<Vec<f64>>,
    /// Factor for `--op scale`: unembeddings times c, embeddings divided by c.
    #[arg(long)]
    pub scale: Option<f64>,
    #[arg(long, short)]
    pub output: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("which").required(true).args(["label", "all"])))]
pub struct TiesArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Index of the label whose tie partners are wanted.
    #[arg(long)]
    pub label: Option<usize>,
    /// Every unordered pair.
    #[arg(long)]
    pub all: bool,
    /// Smallest margin counted as a tie.
    #[arg(long, default_value_t = DEFAULT_TIE_EPS)]
    pub eps: f64,
    /// Accept any margin above the noise floor.
    #[arg(long)]
    pub weak: bool,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    /// `x_min,x_max,y_min,y_max`; defaults to the inflated point cloud.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub bounds: Option<Vec<f64>>,
    /// Grid CSV path; stdout when omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub name: ExampleName,
    #[arg(long)]
    pub outdir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Size of the synthetic embedding cloud.
    #[arg(long, default_value_t = 500)]
    pub points: usize,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// The model to compare against.
    #[arg(long)]
    pub other: PathBuf,
    #[arg(long)]
    pub other_format: Option<ModelFormat>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(commands::EXIT_USAGE),
            };
        }
    };
    let outcome = match cli.command {
        Command::Similarity(a) => commands::similarity(a),
        Command::ForceCosine(a) => commands::force_cosine(a),
        Command::Transform(a) => commands::transform(a),
        Command::Ties(a) => commands::ties(a),
        Command::Regions(a) => commands::regions(a),
        Command::Reproduce(a) => reproduce::run(a),
        Command::VerifyEquivalence(a) => commands::verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
