use std::fmt;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Demand-weighted coverage metrics for language technology.
#[derive(Debug, Parser)]
#[command(name = "langequity", version)]
pub struct Cli {
    /// Directory holding languages.tsv, results.tsv and optional tables.
    #[arg(long, global = true, env = "LANGEQUITY_DATA", default_value = "data")]
    pub data_dir: PathBuf,

    /// Output format; each command accepts a subset.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write files into this directory instead of printing to stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Count only first-language speakers.
    #[arg(long, global = true)]
    pub exclude_l2: bool,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Csv,
    Json,
    Svg,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Tsv => "tsv",
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Global metric per task and tau.
    Metric(MetricArgs),
    /// Metric over a grid of tau values.
    Curve(CurveArgs),
    /// Languages whose improvement would raise the metric most.
    Rank(RankArgs),
    /// Pivot estimates for translation pairs.
    Pivot(PivotArgs),
    /// Language mentions and citation statistics for a paper corpus.
    Pubscan(PubscanArgs),
    /// Every table and chart for the data directory.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct TaskArgs {
    /// Task id: dep, inflection, nli, qa, tts, mt-to-<code> or mt-from-<code>.
    #[arg(long, required = true, value_delimiter = ',')]
    pub task: Vec<String>,

    /// Restrict demand to a subset: <macro>-vernaculars or a list of codes.
    #[arg(long)]
    pub subset: Option<String>,

    /// Fill unevaluated translation pairs with pivot estimates.
    #[arg(long)]
    pub pivot: bool,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[command(flatten)]
    pub task: TaskArgs,

    /// Demand exponent in [0, 1]; repeatable. Defaults to 1.
    #[arg(long)]
    pub tau: Vec<f64>,

    /// Comma-separated tau values, added to --tau.
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub task: TaskArgs,

    /// Comma-separated tau grid; defaults to 0, 0.1, ..., 1.
    #[arg(long, value_delimiter = ',')]
    pub taus: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub task: TaskArgs,

    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,

    /// Number of languages to list.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    pub top: u32,
}

#[derive(Debug, Args)]
pub struct PivotArgs {
    /// Source language; with --target gives one estimate, else all pairs.
    #[arg(long, requires = "target")]
    pub source: Option<String>,

    #[arg(long, requires = "source")]
    pub target: Option<String>,
}

#[derive(Debug, Args)]
pub struct PubscanArgs {
    /// Directory of <paper_id>.txt files.
    #[arg(long)]
    pub corpus: PathBuf,

    /// Metadata table; defaults to metadata.tsv inside the corpus.
    #[arg(long)]
    pub metadata: Option<PathBuf>,

    /// Lexicon table; defaults to lexicon.tsv in the data directory if
    /// present, else the names in languages.tsv.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,

    /// Extra deny-list forms, one per line, added to the built-in list.
    #[arg(long)]
    pub denylist: Option<PathBuf>,

    /// Treat papers that mention no language as English papers.
    #[arg(long)]
    pub english_default: bool,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Corpus to scan; defaults to corpus/ in the data directory if present.
    #[arg(long)]
    pub corpus: Option<PathBuf>,

    #[arg(long)]
    pub english_default: bool,
}

/// A flag combination the command cannot honour.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}
