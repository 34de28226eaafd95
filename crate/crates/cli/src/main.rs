use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use emolex::eval::{MinMaxMode, UncoveredPolicy};
use emolex::{AmbiguityPolicy, ColumnNorm, NfLength, WeightingScheme};

mod commands;
mod provenance;

/// Build emotion lexicons from vote-annotated corpora and evaluate them on
/// headline emotion scores.
#[derive(Debug, Parser)]
#[command(name = "emolex", version, about)]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build a word-emotion lexicon from a corpus.
    Build(BuildArgs),
    /// Evaluate a lexicon against headline gold scores.
    Eval(EvalArgs),
    /// Score free-text lines with a lexicon.
    Score(ScoreArgs),
    /// Summarize a corpus: sizes and mean vote per emotion.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// JSONL corpus, one document per line.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated emotion labels (default: the eight Rappler moods).
    #[arg(long)]
    pub emotions: Option<String>,
    /// Lemma table used for records carrying raw `text`.
    #[arg(long)]
    pub lemma_table: Option<PathBuf>,
    #[arg(long, default_value_t = AmbiguityPolicy::All)]
    pub ambiguity: AmbiguityPolicy,
    /// Skip documents whose raw vote sum is below this value.
    #[arg(long, default_value_t = 0.0)]
    pub min_votes_sum: f64,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Vocabulary of admissible `lemma#pos` keys, one per line.
    #[arg(long)]
    pub vocab: PathBuf,
    #[arg(long, default_value_t = WeightingScheme::Normalized)]
    pub weighting: WeightingScheme,
    #[arg(long, default_value_t = ColumnNorm::Sum)]
    pub col_norm: ColumnNorm,
    /// Drop words occurring in fewer documents.
    #[arg(long, default_value_t = 1)]
    pub min_df: u32,
    #[arg(long, default_value_t = NfLength::Filtered)]
    pub nf_length: NfLength,
    /// Lexicon output (default: standard output).
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the weighted word-document matrix as triples.
    #[arg(long)]
    pub matrix_dump: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// Gold scores: `id<TAB>text<TAB>EMOTION...` with a header line.
    #[arg(long)]
    pub gold: PathBuf,
    /// Gold labels for classification: `id<TAB>LABEL[,LABEL...]`.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// `semeval`, `identity`, or a `TARGET<TAB>SOURCE` file.
    #[arg(long, default_value = "semeval")]
    pub mapping: String,
    #[arg(long)]
    pub lemma_table: Option<PathBuf>,
    #[arg(long, default_value_t = AmbiguityPolicy::All)]
    pub ambiguity: AmbiguityPolicy,
    #[arg(long, default_value_t = UncoveredPolicy::Zero)]
    pub uncovered: UncoveredPolicy,
    #[arg(long, default_value_t = MinMaxMode::PerEmotion)]
    pub minmax: MinMaxMode,
    /// Predict an emotion when its normalized score is strictly above this.
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
    /// Human-readable report (default: standard output).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Tab-separated report.
    #[arg(long)]
    pub tsv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    #[arg(long)]
    pub lexicon: PathBuf,
    /// `id<TAB>text` lines; a line without a tab is text keyed by its line number.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub lemma_table: Option<PathBuf>,
    #[arg(long, default_value_t = AmbiguityPolicy::All)]
    pub ambiguity: AmbiguityPolicy,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    /// Optional vocabulary licensing lemmas of raw-text records.
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();

    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.workers {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: worker pool: {e}");
            return ExitCode::FAILURE;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Eval(a) => commands::eval(a),
        Command::Score(a) => commands::score(a),
        Command::Stats(a) => commands::stats(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
