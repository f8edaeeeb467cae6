use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::pipeline::Mode;

#[derive(Debug, Parser)]
#[command(
    name = "segproj",
    version,
    about = "Recover word boundaries in noisy Chinese text by projecting them from a corrected reference"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Align each source sentence to its target, character by character.
    Align(AlignArgs),
    /// Project target word boundaries onto the source through given alignments.
    Project(ProjectArgs),
    /// Emit the initial source segmentation as predictions (the direct baseline).
    Segment(SegmentArgs),
    /// Build noisy benchmarks from a clean segmented corpus, one directory per ratio.
    GenNoise(GenNoiseArgs),
    /// Score prediction files against gold segmentations.
    Evaluate(EvaluateArgs),
    /// Pick one target among several corrections, or defer the entry.
    SelectReference(SelectReferenceArgs),
    /// Stamp an evaluation report into a viewer bundle.
    ExportReport(ExportReportArgs),
    /// Fit the IBM Model 2 baseline and write it as JSON.
    TrainIbm(TrainIbmArgs),
    /// Grid-search the residual weights and threshold with cross-validation.
    Tune(TuneArgs),
    /// Estimate substitution/deletion/insertion rates from learner pairs.
    EstimateDistribution(EstimateArgs),
}

#[derive(Debug, Args)]
pub struct ScoringArgs {
    #[arg(long)]
    pub glyph_table: Option<PathBuf>,
    #[arg(long)]
    pub pinyin_table: Option<PathBuf>,
    /// Per-character vectors, JSON Lines keyed by pair id.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Weights and threshold; omitted fields take the submitted setting.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AlignArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum, default_value = "p2")]
    pub mode: Mode,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    /// EM iterations when the IBM model is trained on the corpus itself.
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    /// Use a model written by `train-ibm` instead of training one.
    #[arg(long)]
    pub ibm_model: Option<PathBuf>,
    /// Word list for pairs lacking target tokens (ibm mode).
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub alignments: PathBuf,
    /// Word list for pairs lacking source or target tokens.
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SegmentArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenNoiseArgs {
    /// Segmented text: one sentence per line, tokens separated by spaces.
    #[arg(long)]
    pub corpus: PathBuf,
    /// A single noise ratio, as a fraction (0.05) or percentage (5%).
    #[arg(long, conflicts_with = "ratios")]
    pub ratio: Option<String>,
    /// Comma-separated ratios; defaults to 1%..10% in 1% steps.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<String>>,
    /// Base seed; each ratio derives its own seed from it.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Edit-kind weights `substitution,deletion,insertion`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub distribution: Option<Vec<f64>>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Corpus carrying gold source tokens.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Prediction files as `name=path`, in report order.
    #[arg(long = "predictions", required = true, value_parser = parse_named)]
    pub predictions: Vec<(String, PathBuf)>,
    /// Alignment files as `name=path` for coverage statistics.
    #[arg(long = "alignments", value_parser = parse_named)]
    pub alignments: Vec<(String, PathBuf)>,
    /// Run pairwise significance tests between all systems.
    #[arg(long)]
    pub compare: bool,
    #[arg(long, default_value_t = 10_000)]
    pub resamples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelectReferenceArgs {
    /// JSON Lines with `id`, `source` and candidate `targets`.
    #[arg(long)]
    pub corpus: PathBuf,
    /// JSON Lines with `id`, `source_vectors` and `candidate_vectors`.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Directory receiving `selected.jsonl` and `undecided.jsonl`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExportReportArgs {
    #[arg(long)]
    pub report: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TrainIbmArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub iterations: usize,
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridChoice {
    /// Weights 0..1 in steps of 0.1, thresholds 0.30..0.90 in steps of 0.05.
    Full,
    /// Only the submitted setting.
    Submitted,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[command(flatten)]
    pub scoring: ScoringArgs,
    #[arg(long)]
    pub dictionary: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "full")]
    pub grid: GridChoice,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Evaluate configurations that can never add a link as well.
    #[arg(long)]
    pub no_prune: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_named(s: &str) -> Result<(String, PathBuf), String> {
    match s.split_once('=') {
        Some((name, path)) if !name.is_empty() && !path.is_empty() => {
            Ok((name.to_string(), PathBuf::from(path)))
        }
        _ => Err(format!("expected name=path, found {s:?}")),
    }
}

/// `0.05` or `5%`.
pub fn parse_ratio(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.strip_suffix('%') {
        Some(pct) => pct.trim().parse::<f64>().map(|p| p / 100.0),
        None => s.parse::<f64>(),
    };
    value.map_err(|e| format!("bad ratio {s:?}: {e}"))
}
