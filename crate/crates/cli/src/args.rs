use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use morphtok::pipeline::Method;

#[derive(Debug, Parser)]
#[command(
    name = "morphtok",
    version,
    about = "Morphology-aware subword tokenization for Hebrew"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a raw corpus to one sentence per line, optionally holding out a split.
    Ingest(IngestArgs),
    /// Print marked pre-tokens, one sentence per line.
    Pretokenize(PretokenizeArgs),
    /// Train a WordPiece vocabulary.
    Train(TrainArgs),
    /// Encode text into subwords or ids.
    Encode(EncodeArgs),
    /// Fertility, UNK rate and host overlap of one vocabulary on a corpus.
    Analyze(AnalyzeArgs),
    /// Generate paradigm forms, optionally with their encodings and host overlap.
    Paradigm(ParadigmArgs),
    /// Train and evaluate every method × vocabulary size.
    Compare(CompareArgs),
    /// Write or check segmentation files.
    Segment(SegmentArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Baseline,
    Prefsuf,
    Morphseg,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::Baseline => Method::Baseline,
            MethodArg::Prefsuf => Method::PrefSuf,
            MethodArg::Morphseg => Method::MorphSeg,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Flat `key = value` file of flag defaults; flags on the command line win.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Worker threads.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub threads: u64,
}

#[derive(Debug, Clone, Args)]
pub struct Normalization {
    /// Skip NFC normalization.
    #[arg(long)]
    pub no_nfc: bool,

    /// Remove Hebrew points and cantillation marks.
    #[arg(long)]
    pub strip_diacritics: bool,
}

#[derive(Debug, Clone, Args)]
pub struct PipelineArgs {
    #[arg(long, value_enum, default_value_t = MethodArg::Prefsuf)]
    pub method: MethodArg,

    /// Minimum host length left after affix stripping.
    #[arg(long, default_value_t = morphtok::inventory::DEFAULT_MIN_HOST)]
    pub min_host: usize,

    #[command(flatten)]
    pub normalization: Normalization,

    /// Segmentation file supplying morphemes for morphseg.
    #[arg(long, value_name = "FILE")]
    pub seg_file: Option<PathBuf>,

    /// Segment with prefix-suffix separation when no segmentation file is given.
    #[arg(long)]
    pub fallback_segmenter: bool,

    /// Break כש, מש and נו into single-letter affixes under morphseg.
    #[arg(long)]
    pub decompose_overlapping: bool,
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub normalization: Normalization,

    /// Raw text, `-` for stdin.
    #[arg(long, short, default_value = "-")]
    pub input: String,

    /// Normalized corpus, `-` for stdout.
    #[arg(long, short, default_value = "-")]
    pub output: String,

    /// Fraction of lines to hold out.
    #[arg(long, default_value_t = 0.0)]
    pub holdout: f64,

    /// Destination of held-out lines; required when holding out.
    #[arg(long, value_name = "PATH")]
    pub heldout_output: Option<String>,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PretokenizeArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Text, `-` for stdin. Under morphseg with a segmentation file, omit to
    /// take sentences from the file itself.
    #[arg(long, short)]
    pub input: Option<String>,

    #[arg(long, short, default_value = "-")]
    pub output: String,
}

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Training corpus, `-` for stdin.
    #[arg(long, short)]
    pub input: Option<String>,

    /// Vocabulary file.
    #[arg(long, short)]
    pub output: String,

    #[arg(long, default_value_t = 32_000)]
    pub vocab_size: usize,

    /// Pairs seen fewer times are never merged.
    #[arg(long, default_value_t = 2)]
    pub min_frequency: u64,

    #[arg(long, default_value_t = morphtok::wordpiece::DEFAULT_MAX_WORD_LENGTH)]
    pub max_word_length: usize,

    #[arg(long, default_value = morphtok::wordpiece::DEFAULT_CONTINUATION_MARKER)]
    pub continuation_marker: String,
}

#[derive(Debug, Clone, Args)]
pub struct EncodeArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[arg(long)]
    pub vocab: PathBuf,

    #[arg(long, short)]
    pub input: Option<String>,

    #[arg(long, short, default_value = "-")]
    pub output: String,

    /// Print ids instead of subword strings.
    #[arg(long)]
    pub ids: bool,

    #[arg(long, default_value = morphtok::wordpiece::DEFAULT_CONTINUATION_MARKER)]
    pub continuation_marker: String,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    #[arg(long)]
    pub vocab: PathBuf,

    /// Evaluation corpus, `-` for stdin.
    #[arg(long, short, default_value = "-")]
    pub input: String,

    /// Paradigm file for host overlap.
    #[arg(long, value_name = "FILE")]
    pub paradigms: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Tsv)]
    pub format: ReportFormat,

    #[arg(long, short, default_value = "-")]
    pub output: String,

    #[arg(long, default_value = morphtok::wordpiece::DEFAULT_CONTINUATION_MARKER)]
    pub continuation_marker: String,
}

#[derive(Debug, Clone, Args)]
pub struct ParadigmArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Host word; combined with --prefixes and --suffixes.
    #[arg(long, conflicts_with = "file")]
    pub host: Option<String>,

    /// Comma-separated prefix stacks, `-` for none, `all` for every stack.
    #[arg(long, default_value = "all", allow_hyphen_values = true)]
    pub prefixes: String,

    /// Comma-separated suffixes, `-` for none, `all` for every suffix.
    #[arg(long, default_value = "all", allow_hyphen_values = true)]
    pub suffixes: String,

    /// Paradigm file: `host<TAB>prefixes<TAB>suffixes` per line.
    #[arg(long, value_name = "FILE")]
    pub file: Option<PathBuf>,

    /// Encode forms and report host overlap with this vocabulary.
    #[arg(long)]
    pub vocab: Option<PathBuf>,

    #[arg(long, short, default_value = "-")]
    pub output: String,

    #[arg(long, default_value = morphtok::wordpiece::DEFAULT_CONTINUATION_MARKER)]
    pub continuation_marker: String,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub pipeline: PipelineArgs,

    /// Training corpus.
    #[arg(long)]
    pub train: String,

    /// Evaluation corpus; defaults to the training corpus.
    #[arg(long)]
    pub eval: Option<String>,

    #[arg(long, value_delimiter = ',', default_value = "16000,32000,64000")]
    pub sizes: Vec<usize>,

    #[arg(
        long,
        value_enum,
        value_delimiter = ',',
        default_value = "baseline,prefsuf,morphseg"
    )]
    pub methods: Vec<MethodArg>,

    #[arg(long, value_name = "FILE")]
    pub paradigms: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = ReportFormat::Tsv)]
    pub format: ReportFormat,

    #[arg(long, short, default_value = "-")]
    pub output: String,

    #[arg(long, default_value_t = 2)]
    pub min_frequency: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SegmentArgs {
    #[command(flatten)]
    pub common: Common,

    #[command(flatten)]
    pub normalization: Normalization,

    #[arg(long, default_value_t = morphtok::inventory::DEFAULT_MIN_HOST)]
    pub min_host: usize,

    /// Text to segment with the fallback segmenter, `-` for stdin.
    #[arg(long, short, conflicts_with = "check")]
    pub input: Option<String>,

    /// Validate a segmentation file and report non-concatenative records.
    #[arg(long, value_name = "FILE")]
    pub check: Option<PathBuf>,

    #[arg(long, short, default_value = "-")]
    pub output: String,
}
