use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use morphtok::analysis::{
    self, corpus_stats, overlap_report, parse_paradigms, GridSpec, MetricsReport, ParadigmSpec,
};
use morphtok::pipeline::{pretokenize_sentence, Method, Pipeline};
use morphtok::pretokenize::{format_marked, PreToken, Pretokenizer, PretokenizerConfig, Role};
use morphtok::segmentation::{
    discrepancies, parse_segmentation_file, serialize_segmentation, FallbackSegmenter,
    LexiconSegmenter, MorphRole, Morpheme, MorphsegOptions, SegmentationRecord, Segmenter,
};
use morphtok::wordpiece::{train_from_counts, TrainerConfig, Vocabulary, WordCounts};

use crate::args::*;
use crate::error::{usage, CliError, CliResult};
use crate::io::{
    create_output, map_ordered, open_input, read_lines, read_to_string, write_line, Lines,
};

type Sentences = Vec<Vec<SegmentationRecord>>;

pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Ingest(a) => ingest(&a),
        Command::Pretokenize(a) => pretokenize(&a),
        Command::Train(a) => train(&a),
        Command::Encode(a) => encode(&a),
        Command::Analyze(a) => analyze(&a),
        Command::Paradigm(a) => paradigm(&a),
        Command::Compare(a) => compare(&a),
        Command::Segment(a) => segment(&a),
    }
}

fn thread_pool(common: &Common) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(common.threads as usize)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", common.threads)))
}

fn make_pretokenizer(min_host: usize, normalization: &Normalization) -> Pretokenizer {
    Pretokenizer::new(PretokenizerConfig {
        min_host,
        nfc: !normalization.no_nfc,
        strip_diacritics: normalization.strip_diacritics,
    })
}

fn load_segmentation(path: &Path) -> CliResult<Sentences> {
    let file = File::open(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    parse_segmentation_file(BufReader::new(file))
        .map_err(|e| CliError::from(e).context(path.display()))
}

fn load_vocab(path: &Path, marker: &str) -> CliResult<Vocabulary> {
    Vocabulary::load_with_marker(path, marker).map_err(|e| match e {
        morphtok::Error::File { .. } => CliError::from(e),
        e => CliError::from(e).context(path.display()),
    })
}

/// How a segmentation file is used.
#[derive(Clone, Copy, PartialEq, Eq)]
enum SegUse {
    /// Its sentences are the input (or are aligned with the input lines).
    Sentences,
    /// Its records form a lookup table for segmenting arbitrary text.
    Lexicon,
}

struct Setup {
    pipeline: Pipeline,
    sentences: Option<Sentences>,
}

fn setup(
    args: &PipelineArgs,
    method: Method,
    uses_morphseg: bool,
    seg_use: SegUse,
) -> CliResult<Setup> {
    let pretokenizer = make_pretokenizer(args.min_host, &args.normalization);
    let mut pipeline =
        Pipeline::new(method, pretokenizer.clone()).with_morphseg_options(MorphsegOptions {
            decompose_overlapping: args.decompose_overlapping,
        });
    let mut sentences = None;
    match &args.seg_file {
        Some(_) if !uses_morphseg => {
            return usage("--seg-file only applies to --method morphseg");
        }
        Some(path) => {
            let loaded = load_segmentation(path)?;
            match seg_use {
                SegUse::Sentences => sentences = Some(loaded),
                SegUse::Lexicon => {
                    let mut lexicon = LexiconSegmenter::new(FallbackSegmenter::new(pretokenizer));
                    lexicon.extend(loaded.into_iter().flatten());
                    pipeline = pipeline.with_segmenter(Arc::new(lexicon));
                }
            }
        }
        None if uses_morphseg && !args.fallback_segmenter => {
            return usage("morphseg requires --seg-file or --fallback-segmenter");
        }
        None => {}
    }
    Ok(Setup {
        pipeline,
        sentences,
    })
}

struct Item {
    line: usize,
    text: Option<String>,
    record: Option<usize>,
}

/// Input sentences: text lines, the sentences of a segmentation file, or
/// text lines paired in order with those sentences (blank lines excepted).
fn items<'a>(
    input: Option<&'a str>,
    sentences: Option<&'a Sentences>,
) -> CliResult<Box<dyn Iterator<Item = CliResult<Item>> + 'a>> {
    match (input, sentences) {
        (input, None) => {
            let path = input.unwrap_or("-");
            Ok(Box::new(Lines::new(open_input(path)?, path).map(|l| {
                l.map(|(line, text)| Item {
                    line,
                    text: Some(text),
                    record: None,
                })
            })))
        }
        (None, Some(s)) => Ok(Box::new((0..s.len()).map(|i| {
            Ok(Item {
                line: i + 1,
                text: None,
                record: Some(i),
            })
        }))),
        (Some(path), Some(s)) => {
            let total = s.len();
            let mut next = 0usize;
            let mut lines = Lines::new(open_input(path)?, path);
            let mut finished = false;
            Ok(Box::new(std::iter::from_fn(move || {
                if finished {
                    return None;
                }
                match lines.next() {
                    None => {
                        finished = true;
                        (next < total).then(|| {
                            Err(CliError::Data(format!(
                                "{path}: {} non-empty lines but {total} segmentation sentences",
                                next
                            )))
                        })
                    }
                    Some(Err(e)) => Some(Err(e)),
                    Some(Ok((line, text))) => {
                        if text.trim().is_empty() {
                            return Some(Ok(Item {
                                line,
                                text: Some(text),
                                record: None,
                            }));
                        }
                        if next == total {
                            finished = true;
                            return Some(Err(CliError::Data(format!(
                                "{path}: line {line}: no segmentation sentence left (file has {total})"
                            ))));
                        }
                        next += 1;
                        Some(Ok(Item {
                            line,
                            text: Some(text),
                            record: Some(next - 1),
                        }))
                    }
                }
            })))
        }
    }
}

fn item_pretokens(
    pipeline: &Pipeline,
    sentences: Option<&Sentences>,
    item: &Item,
) -> CliResult<Vec<PreToken>> {
    let records = item.record.and_then(|i| sentences.map(|s| s[i].as_slice()));
    match (&item.text, records) {
        (Some(text), records) => pretokenize_sentence(text, pipeline, records)
            .map_err(|e| CliError::from(e).context(format!("line {}", item.line))),
        (None, Some(records)) => Ok(pipeline.pretokenize_records(records)),
        (None, None) => Ok(Vec::new()),
    }
}

fn ingest(args: &IngestArgs) -> CliResult<()> {
    if !(0.0..1.0).contains(&args.holdout) {
        return usage(format!("--holdout must be in [0, 1), got {}", args.holdout));
    }
    let pool = thread_pool(&args.common)?;
    let pretokenizer =
        make_pretokenizer(morphtok::inventory::DEFAULT_MIN_HOST, &args.normalization);
    let mut lines = Vec::new();
    map_ordered(
        Lines::new(open_input(&args.input)?, &args.input).map(|l| l.map(|(_, s)| s)),
        &pool,
        |line| Ok(pretokenizer.normalize_text(&line)),
        |line| {
            if !line.is_empty() {
                lines.push(line);
            }
            Ok(())
        },
    )?;
    let n_holdout = (lines.len() as f64 * args.holdout).round() as usize;
    let mut held = vec![false; lines.len()];
    if n_holdout > 0 {
        let mut order: Vec<usize> = (0..lines.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(args.seed));
        for &i in &order[..n_holdout] {
            held[i] = true;
        }
    }
    let mut heldout_out = match (&args.heldout_output, n_holdout) {
        (Some(path), _) => Some(create_output(path)?),
        (None, 0) => None,
        (None, _) => return usage("--holdout needs --heldout-output"),
    };
    let mut out = create_output(&args.output)?;
    for (line, held) in lines.iter().zip(&held) {
        match (held, heldout_out.as_mut()) {
            (true, Some(h)) => write_line(h.as_mut(), line)?,
            _ => write_line(out.as_mut(), line)?,
        }
    }
    out.flush()?;
    if let Some(mut h) = heldout_out {
        h.flush()?;
    }
    eprintln!(
        "kept {} lines, held out {}",
        lines.len() - n_holdout,
        n_holdout
    );
    Ok(())
}

fn pretokenize(args: &PretokenizeArgs) -> CliResult<()> {
    let pool = thread_pool(&args.common)?;
    let method = args.pipeline.method.into();
    let Setup {
        pipeline,
        sentences,
    } = setup(
        &args.pipeline,
        method,
        method == Method::MorphSeg,
        SegUse::Sentences,
    )?;
    let mut out = create_output(&args.output)?;
    map_ordered(
        items(args.input.as_deref(), sentences.as_ref())?,
        &pool,
        |item| {
            Ok(format_marked(&item_pretokens(
                &pipeline,
                sentences.as_ref(),
                &item,
            )?))
        },
        |line| write_line(out.as_mut(), &line),
    )?;
    out.flush()?;
    Ok(())
}

fn train(args: &TrainArgs) -> CliResult<()> {
    let pool = thread_pool(&args.common)?;
    let method = args.pipeline.method.into();
    let Setup {
        pipeline,
        sentences,
    } = setup(
        &args.pipeline,
        method,
        method == Method::MorphSeg,
        SegUse::Sentences,
    )?;
    let mut counts = WordCounts::new();
    map_ordered(
        items(args.input.as_deref(), sentences.as_ref())?,
        &pool,
        |item| item_pretokens(&pipeline, sentences.as_ref(), &item),
        |tokens| {
            counts.add_pretokens(&tokens);
            Ok(())
        },
    )?;
    if counts.is_empty() {
        return Err(CliError::Data("training corpus contains no tokens".into()));
    }
    let config = TrainerConfig {
        vocab_size: args.vocab_size,
        min_pair_frequency: args.min_frequency,
        max_word_length: args.max_word_length,
        continuation_marker: args.continuation_marker.clone(),
        ..TrainerConfig::default()
    };
    let vocab = pool.install(|| train_from_counts(&counts, &config))?;
    let mut out = create_output(&args.output)?;
    vocab.write_to(out.as_mut())?;
    if vocab.len() < args.vocab_size {
        eprintln!(
            "no merges left after {} of {} tokens",
            vocab.len(),
            args.vocab_size
        );
    }
    Ok(())
}

fn encode(args: &EncodeArgs) -> CliResult<()> {
    let pool = thread_pool(&args.common)?;
    let vocab = load_vocab(&args.vocab, &args.continuation_marker)?;
    let method = args.pipeline.method.into();
    let Setup {
        pipeline,
        sentences,
    } = setup(
        &args.pipeline,
        method,
        method == Method::MorphSeg,
        SegUse::Sentences,
    )?;
    let mut out = create_output(&args.output)?;
    map_ordered(
        items(args.input.as_deref(), sentences.as_ref())?,
        &pool,
        |item| {
            let tokens = item_pretokens(&pipeline, sentences.as_ref(), &item)?;
            let ids = pipeline.encode_pretokens(&tokens, &vocab);
            Ok(if args.ids {
                ids.iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
            } else {
                vocab.ids_to_tokens(&ids).join(" ")
            })
        },
        |line| write_line(out.as_mut(), &line),
    )?;
    out.flush()?;
    Ok(())
}

fn load_paradigms(path: &Path) -> CliResult<Vec<ParadigmSpec>> {
    let text = read_to_string(&path.to_string_lossy())?;
    parse_paradigms(&text).map_err(|e| CliError::from(e).context(path.display()))
}

fn validate_paradigms(specs: &[ParadigmSpec], pipeline: &Pipeline, source: &str) -> CliResult<()> {
    let pretokenizer = pipeline.pretokenizer();
    for spec in specs {
        spec.validate(pretokenizer.inventory(), pretokenizer.config().min_host)
            .map_err(|e| CliError::Data(format!("{source}: {e}")))?;
    }
    Ok(())
}

fn write_reports(reports: &[MetricsReport], format: ReportFormat, output: &str) -> CliResult<()> {
    let text = match format {
        ReportFormat::Tsv => analysis::reports_to_tsv(reports),
        ReportFormat::Json => analysis::reports_to_json(reports) + "\n",
    };
    let mut out = create_output(output)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn analyze(args: &AnalyzeArgs) -> CliResult<()> {
    let pool = thread_pool(&args.common)?;
    let vocab = load_vocab(&args.vocab, &args.continuation_marker)?;
    let method = args.pipeline.method.into();
    let Setup { pipeline, .. } = setup(
        &args.pipeline,
        method,
        method == Method::MorphSeg,
        SegUse::Lexicon,
    )?;
    let corpus = read_lines(&args.input)?;
    let paradigms = match &args.paradigms {
        Some(path) => {
            let specs = load_paradigms(path)?;
            validate_paradigms(&specs, &pipeline, &path.display().to_string())?;
            specs
        }
        None => Vec::new(),
    };
    let (stats, overlap) = pool.install(|| {
        let stats = corpus_stats(&corpus, &pipeline, &vocab);
        let overlap = (!paradigms.is_empty()).then(|| {
            paradigms.iter().fold((0, 0), |(hit, total), p| {
                let r = overlap_report(p, &pipeline, &vocab);
                (hit + r.overlapping(), total + r.forms.len())
            })
        });
        (stats, overlap)
    });
    let report = MetricsReport::new(method, vocab.len(), stats, overlap)
        .map_err(|e| CliError::from(e).context(&args.input))?;
    write_reports(&[report], args.format, &args.output)
}

fn affix_options(list: &str, all: impl Fn() -> Vec<String>) -> Vec<Option<String>> {
    let mut out = Vec::new();
    for item in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item {
            "-" => out.push(None),
            "all" => {
                out.push(None);
                out.extend(all().into_iter().map(Some));
            }
            s => out.push(Some(s.to_owned())),
        }
    }
    out
}

fn paradigm(args: &ParadigmArgs) -> CliResult<()> {
    let method = args.pipeline.method.into();
    let Setup { pipeline, .. } = setup(
        &args.pipeline,
        method,
        method == Method::MorphSeg,
        SegUse::Lexicon,
    )?;
    let inventory = pipeline.pretokenizer().inventory();
    let specs = match (&args.host, &args.file) {
        (Some(host), None) => {
            let prefixes = affix_options(&args.prefixes, || {
                inventory
                    .combinations()
                    .iter()
                    .map(|c| c.surface.clone())
                    .collect()
            });
            let suffixes = affix_options(&args.suffixes, || {
                inventory
                    .suffixes()
                    .iter()
                    .map(|s| s.surface.clone())
                    .collect()
            });
            let specs = vec![ParadigmSpec::cross(host, &prefixes, &suffixes)];
            validate_paradigms(&specs, &pipeline, "--host")
                .map_err(|e| CliError::Usage(e.to_string()))?;
            specs
        }
        (None, Some(path)) => {
            let specs = load_paradigms(path)?;
            validate_paradigms(&specs, &pipeline, &path.display().to_string())?;
            specs
        }
        _ => return usage("give either --host or --file"),
    };
    let vocab = match &args.vocab {
        Some(path) => Some(load_vocab(path, &args.continuation_marker)?),
        None => None,
    };
    let mut out = create_output(&args.output)?;
    let (mut hit, mut total) = (0, 0);
    for spec in &specs {
        match &vocab {
            None => {
                for form in analysis::generate_paradigm(spec) {
                    write_line(out.as_mut(), &form)?;
                }
            }
            Some(vocab) => {
                let report = overlap_report(spec, &pipeline, vocab);
                hit += report.overlapping();
                total += report.forms.len();
                write_line(
                    out.as_mut(),
                    &format!(
                        "# host\t{}\t{}\t{}/{}",
                        report.host,
                        report.host_subwords.join(" "),
                        report.overlapping(),
                        report.forms.len()
                    ),
                )?;
                for f in &report.forms {
                    write_line(
                        out.as_mut(),
                        &format!(
                            "{}\t{}\t{}",
                            f.form,
                            f.subwords.join(" "),
                            u8::from(f.overlaps)
                        ),
                    )?;
                }
            }
        }
    }
    if vocab.is_some() {
        let fraction = if total == 0 {
            0.0
        } else {
            hit as f64 / total as f64
        };
        write_line(
            out.as_mut(),
            &format!("# overlap\t{hit}/{total}\t{fraction:.6}"),
        )?;
    }
    out.flush()?;
    Ok(())
}

fn compare(args: &CompareArgs) -> CliResult<()> {
    if args.sizes.is_empty() || args.methods.is_empty() {
        return usage("--sizes and --methods must not be empty");
    }
    let pool = thread_pool(&args.common)?;
    let methods: Vec<Method> = args.methods.iter().map(|&m| m.into()).collect();
    let Setup { pipeline, .. } = setup(
        &args.pipeline,
        methods[0],
        methods.contains(&Method::MorphSeg),
        SegUse::Lexicon,
    )?;
    let train_corpus = read_lines(&args.train)?;
    let eval_corpus = match &args.eval {
        Some(path) => read_lines(path)?,
        None => train_corpus.clone(),
    };
    let paradigms = match &args.paradigms {
        Some(path) => load_paradigms(path)?,
        None => Vec::new(),
    };
    let grid = GridSpec {
        methods,
        sizes: args.sizes.clone(),
        trainer: TrainerConfig {
            min_pair_frequency: args.min_frequency,
            ..TrainerConfig::default()
        },
    };
    let reports = pool
        .install(|| analysis::compare(&grid, &pipeline, &train_corpus, &eval_corpus, &paradigms))?;
    write_reports(&reports, args.format, &args.output)
}

fn segment(args: &SegmentArgs) -> CliResult<()> {
    let mut out = create_output(&args.output)?;
    if let Some(path) = &args.check {
        let sentences = load_segmentation(path)?;
        let mut records = 0;
        let mut odd = 0;
        for (s, sentence) in sentences.iter().enumerate() {
            records += sentence.len();
            for d in discrepancies(sentence) {
                odd += 1;
                write_line(
                    out.as_mut(),
                    &format!(
                        "{}\t{}\t{}\t{}",
                        s + 1,
                        d.index + 1,
                        d.surface,
                        d.reconstructed
                    ),
                )?;
            }
        }
        out.flush()?;
        eprintln!(
            "{} sentences, {records} records, {odd} non-concatenative",
            sentences.len()
        );
        return Ok(());
    }
    let pool = thread_pool(&args.common)?;
    let pretokenizer = make_pretokenizer(args.min_host, &args.normalization);
    let segmenter = FallbackSegmenter::new(pretokenizer.clone());
    let input = args.input.as_deref().unwrap_or("-");
    map_ordered(
        Lines::new(open_input(input)?, input).map(|l| l.map(|(_, s)| s)),
        &pool,
        |line| {
            pretokenizer
                .baseline(&line)
                .into_iter()
                .map(|t| match t.role {
                    Role::Punct => SegmentationRecord::new(
                        t.text.clone(),
                        vec![Morpheme::new(MorphRole::Host, t.text)],
                    )
                    .map_err(CliError::Data),
                    _ => Ok(segmenter.segment(&t.text)),
                })
                .collect::<CliResult<Vec<_>>>()
        },
        |sentence| {
            if !sentence.is_empty() {
                out.write_all(serialize_segmentation(&[sentence]).as_bytes())?;
            }
            Ok(())
        },
    )?;
    out.flush()?;
    Ok(())
}
