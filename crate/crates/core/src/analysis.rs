//! Corpus metrics and paradigm-based host overlap.
//!
//! * fertility: subword tokens per whitespace-delimited word.
//! * UNK rate: fraction of pre-tokens that encode to `[UNK]`.
//! * host overlap: fraction of paradigm forms whose subword sequence contains,
//!   as a contiguous run, the subwords the pipeline assigns to the host of the
//!   bare (unaffixed) host word.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hebrew;
use crate::inventory::Inventory;
use crate::pipeline::{Method, Pipeline};
use crate::pretokenize::Role;
use crate::wordpiece::{train_nested, TrainerConfig, Vocabulary, WordCounts, UNK_ID};

/// A host and the affix pairs to join with it. `None` stands for no prefix
/// stack or no suffix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParadigmSpec {
    pub host: String,
    pub forms: Vec<(Option<String>, Option<String>)>,
}

impl ParadigmSpec {
    /// Every prefix option combined with every suffix option.
    pub fn cross<P, S>(host: &str, prefixes: &[Option<P>], suffixes: &[Option<S>]) -> Self
    where
        P: AsRef<str>,
        S: AsRef<str>,
    {
        let forms = prefixes
            .iter()
            .flat_map(|p| {
                suffixes.iter().map(move |s| {
                    (
                        p.as_ref().map(|p| p.as_ref().to_owned()),
                        s.as_ref().map(|s| s.as_ref().to_owned()),
                    )
                })
            })
            .collect();
        ParadigmSpec {
            host: host.to_owned(),
            forms,
        }
    }

    /// The full paradigm: no prefix plus every stack, times no suffix plus
    /// every suffix.
    pub fn full(host: &str, inventory: &Inventory) -> Self {
        let prefixes: Vec<Option<&str>> = std::iter::once(None)
            .chain(
                inventory
                    .combinations()
                    .iter()
                    .map(|c| Some(c.surface.as_str())),
            )
            .collect();
        let suffixes: Vec<Option<&str>> = std::iter::once(None)
            .chain(
                inventory
                    .suffixes()
                    .iter()
                    .map(|s| Some(s.surface.as_str())),
            )
            .collect();
        ParadigmSpec::cross(host, &prefixes, &suffixes)
    }

    /// Checks the host length and that every affix is in the inventory.
    pub fn validate(&self, inventory: &Inventory, min_host: usize) -> Result<()> {
        if self.host.chars().count() < min_host {
            return Err(Error::InvalidParadigm(format!(
                "host {:?} is shorter than {min_host} characters",
                self.host
            )));
        }
        for (p, s) in &self.forms {
            if let Some(p) = p {
                if inventory.combination(p).is_none() {
                    return Err(Error::InvalidParadigm(format!(
                        "{p:?} is not a prefix stack"
                    )));
                }
            }
            if let Some(s) = s {
                if inventory.suffix(s).is_none() {
                    return Err(Error::InvalidParadigm(format!("{s:?} is not a suffix")));
                }
            }
        }
        Ok(())
    }

    /// Parses `host<TAB>prefixes<TAB>suffixes`, where the affix columns are
    /// comma-separated and `-` means none.
    pub fn parse_line(line: &str) -> std::result::Result<Self, String> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(format!(
                "expected 3 tab-separated columns, found {}",
                cols.len()
            ));
        }
        let options = |col: &str| -> Vec<Option<String>> {
            col.split(',')
                .map(str::trim)
                .map(|s| (s != "-" && !s.is_empty()).then(|| s.to_owned()))
                .collect()
        };
        Ok(ParadigmSpec::cross(
            cols[0].trim(),
            &options(cols[1]),
            &options(cols[2]),
        ))
    }
}

/// Reads a paradigm file: one spec per line, `#` comments allowed.
pub fn parse_paradigms(text: &str) -> Result<Vec<ParadigmSpec>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| ParadigmSpec::parse_line(l).map_err(|m| Error::parse(i + 1, m)))
        .collect()
}

/// Surface forms of a paradigm, in spec order. A final-form letter ending
/// the host is opened when a suffix follows; other spelling changes are not
/// modelled.
pub fn generate_paradigm(spec: &ParadigmSpec) -> Vec<String> {
    spec.forms
        .iter()
        .map(|(p, s)| {
            let mut form = p.clone().unwrap_or_default();
            match s {
                Some(s) => {
                    form.push_str(&hebrew::open_final(&spec.host));
                    form.push_str(s);
                }
                None => form.push_str(&spec.host),
            }
            form
        })
        .collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub word_count: u64,
    pub pretoken_count: u64,
    pub token_count: u64,
    pub unk_count: u64,
}

impl CorpusStats {
    fn add(mut self, other: CorpusStats) -> CorpusStats {
        self.word_count += other.word_count;
        self.pretoken_count += other.pretoken_count;
        self.token_count += other.token_count;
        self.unk_count += other.unk_count;
        self
    }

    pub fn fertility(&self) -> Result<f64> {
        if self.word_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(self.token_count as f64 / self.word_count as f64)
    }

    pub fn unk_rate(&self) -> Result<f64> {
        if self.pretoken_count == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(self.unk_count as f64 / self.pretoken_count as f64)
    }
}

/// Counts over a corpus, computed in parallel with an integer-sum reduction.
pub fn corpus_stats<S>(corpus: &[S], pipeline: &Pipeline, vocab: &Vocabulary) -> CorpusStats
where
    S: AsRef<str> + Sync,
{
    corpus
        .par_iter()
        .map(|line| {
            let line = line.as_ref();
            let word_count = pipeline
                .pretokenizer()
                .normalize_chars(line)
                .split_whitespace()
                .count() as u64;
            let mut stats = CorpusStats {
                word_count,
                ..Default::default()
            };
            for token in pipeline.pretokenize(line) {
                let ids = vocab.encode_pretoken_ids(&token);
                stats.pretoken_count += 1;
                stats.token_count += ids.len() as u64;
                if ids == [UNK_ID] {
                    stats.unk_count += 1;
                }
            }
            stats
        })
        .reduce(CorpusStats::default, CorpusStats::add)
}

/// Mean subwords per whitespace word.
pub fn fertility<S>(corpus: &[S], pipeline: &Pipeline, vocab: &Vocabulary) -> Result<f64>
where
    S: AsRef<str> + Sync,
{
    corpus_stats(corpus, pipeline, vocab).fertility()
}

/// Fraction of pre-tokens encoded as `[UNK]`.
pub fn unk_rate<S>(corpus: &[S], pipeline: &Pipeline, vocab: &Vocabulary) -> Result<f64>
where
    S: AsRef<str> + Sync,
{
    corpus_stats(corpus, pipeline, vocab).unk_rate()
}

/// True if `needle` occurs as a contiguous run in `haystack`.
pub fn contains_run<T: PartialEq>(haystack: &[T], needle: &[T]) -> bool {
    needle.is_empty() || haystack.windows(needle.len()).any(|w| w == needle)
}

/// Per-form overlap detail.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormOverlap {
    pub form: String,
    pub subwords: Vec<String>,
    pub overlaps: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapReport {
    pub host: String,
    pub host_subwords: Vec<String>,
    pub forms: Vec<FormOverlap>,
}

impl OverlapReport {
    pub fn overlapping(&self) -> usize {
        self.forms.iter().filter(|f| f.overlaps).count()
    }

    pub fn fraction(&self) -> f64 {
        if self.forms.is_empty() {
            return 0.0;
        }
        self.overlapping() as f64 / self.forms.len() as f64
    }
}

/// Subwords the pipeline assigns to the host of the bare host word: the
/// host-role pre-tokens under the affix-aware methods, the whole word under
/// the baseline.
pub fn host_subwords(host: &str, pipeline: &Pipeline, vocab: &Vocabulary) -> Vec<u32> {
    pipeline
        .pretokenize(host)
        .iter()
        .filter(|t| matches!(t.role, Role::Host | Role::Word))
        .flat_map(|t| vocab.encode_pretoken_ids(t))
        .collect()
}

pub fn overlap_report(
    spec: &ParadigmSpec,
    pipeline: &Pipeline,
    vocab: &Vocabulary,
) -> OverlapReport {
    let reference = host_subwords(&spec.host, pipeline, vocab);
    let forms = generate_paradigm(spec)
        .into_iter()
        .map(|form| {
            let ids = pipeline.encode_ids(&form, vocab);
            FormOverlap {
                overlaps: contains_run(&ids, &reference),
                subwords: vocab.ids_to_tokens(&ids),
                form,
            }
        })
        .collect();
    OverlapReport {
        host: spec.host.clone(),
        host_subwords: vocab.ids_to_tokens(&reference),
        forms,
    }
}

/// Fraction of paradigm forms containing the host's subword sequence.
pub fn host_overlap(spec: &ParadigmSpec, pipeline: &Pipeline, vocab: &Vocabulary) -> Result<f64> {
    spec.validate(
        pipeline.pretokenizer().inventory(),
        pipeline.pretokenizer().config().min_host,
    )?;
    Ok(overlap_report(spec, pipeline, vocab).fraction())
}

/// One cell of the method × vocabulary-size grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub method: Method,
    pub vocab_size: usize,
    pub fertility: f64,
    pub unk_rate: f64,
    /// Micro-averaged over all paradigm forms; absent without paradigms.
    pub host_overlap: Option<f64>,
    pub token_count: u64,
    pub word_count: u64,
    pub pretoken_count: u64,
    pub unk_count: u64,
}

impl MetricsReport {
    pub fn new(
        method: Method,
        vocab_size: usize,
        stats: CorpusStats,
        overlap: Option<(usize, usize)>,
    ) -> Result<Self> {
        Ok(MetricsReport {
            method,
            vocab_size,
            fertility: stats.fertility()?,
            unk_rate: stats.unk_rate()?,
            host_overlap: overlap.map(|(hit, total)| {
                if total == 0 {
                    0.0
                } else {
                    hit as f64 / total as f64
                }
            }),
            token_count: stats.token_count,
            word_count: stats.word_count,
            pretoken_count: stats.pretoken_count,
            unk_count: stats.unk_count,
        })
    }
}

pub const REPORT_TSV_HEADER: &str =
    "method\tvocab_size\tfertility\tunk_rate\thost_overlap\ttoken_count\tword_count\tpretoken_count\tunk_count";

/// One header line and one row per report. Rates use six decimals; a
/// missing host overlap is written as `NA`.
pub fn reports_to_tsv(reports: &[MetricsReport]) -> String {
    let mut out = String::from(REPORT_TSV_HEADER);
    out.push('\n');
    for r in reports {
        let overlap = r
            .host_overlap
            .map_or_else(|| "NA".to_owned(), |o| format!("{o:.6}"));
        out.push_str(&format!(
            "{}\t{}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{}\n",
            r.method,
            r.vocab_size,
            r.fertility,
            r.unk_rate,
            overlap,
            r.token_count,
            r.word_count,
            r.pretoken_count,
            r.unk_count
        ));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub reports: Vec<MetricsReport>,
}

pub fn reports_to_json(reports: &[MetricsReport]) -> String {
    let doc = ReportDocument {
        reports: reports.to_vec(),
    };
    serde_json::to_string_pretty(&doc).expect("reports serialize")
}

/// Methods × vocabulary sizes to evaluate.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub methods: Vec<Method>,
    pub sizes: Vec<usize>,
    pub trainer: TrainerConfig,
}

/// Trains a vocabulary per method and size on `train_corpus` and measures it
/// on `eval_corpus` and `paradigms`. Reports are ordered by method, then by
/// size, following `grid`.
pub fn compare<S, T>(
    grid: &GridSpec,
    base: &Pipeline,
    train_corpus: &[S],
    eval_corpus: &[T],
    paradigms: &[ParadigmSpec],
) -> Result<Vec<MetricsReport>>
where
    S: AsRef<str> + Sync,
    T: AsRef<str> + Sync,
{
    let inventory = base.pretokenizer().inventory();
    let min_host = base.pretokenizer().config().min_host;
    for p in paradigms {
        p.validate(inventory, min_host)?;
    }
    let mut reports = Vec::with_capacity(grid.methods.len() * grid.sizes.len());
    for &method in &grid.methods {
        let pipeline = base.with_method(method);
        let counts = WordCounts::from_lines_par(train_corpus, |l| pipeline.pretokenize(l));
        let vocabs = train_nested(&counts, &grid.trainer, &grid.sizes)?;
        for (&size, vocab) in grid.sizes.iter().zip(&vocabs) {
            let stats = corpus_stats(eval_corpus, &pipeline, vocab);
            let overlap = (!paradigms.is_empty()).then(|| {
                paradigms.iter().fold((0, 0), |(hit, total), p| {
                    let r = overlap_report(p, &pipeline, vocab);
                    (hit + r.overlapping(), total + r.forms.len())
                })
            });
            reports.push(MetricsReport::new(method, size, stats, overlap)?);
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretokenize::Pretokenizer;
    use crate::segmentation::{parse_record, LexiconSegmenter};
    use std::sync::Arc;

    fn release_paradigm() -> ParadigmSpec {
        ParadigmSpec {
            host: "שחרור".into(),
            forms: vec![
                (None, None),
                (Some("ש".into()), None),
                (Some("ו".into()), Some("ה".into())),
                (Some("וכ".into()), Some("נו".into())),
            ],
        }
    }

    fn release_vocab() -> Vocabulary {
        Vocabulary::with_affixes([
            "שחרור",
            "חרור",
            "ש",
            "ו",
            "וכש",
            "##שחרור",
            "##חרור",
            "##נו",
            "##ה",
            "##ש",
        ])
    }

    #[test]
    fn paradigm_cross_product() {
        let spec = ParadigmSpec::cross("חרור", &[None, Some("ו")], &[None, Some("ה")]);
        assert_eq!(
            generate_paradigm(&spec),
            ["חרור", "חרורה", "וחרור", "וחרורה"]
        );
        let inv = Inventory::builtin();
        let full = ParadigmSpec::full("ספר", &inv);
        assert_eq!(generate_paradigm(&full).len(), 56 * 12);
    }

    #[test]
    fn paradigm_opens_final_letters() {
        let spec = ParadigmSpec::cross("שלום", &[None::<&str>], &[None, Some("נו")]);
        assert_eq!(generate_paradigm(&spec), ["שלום", "שלומנו"]);
    }

    #[test]
    fn release_forms() {
        assert_eq!(
            generate_paradigm(&release_paradigm()),
            ["שחרור", "ששחרור", "ושחרורה", "וכשחרורנו"]
        );
    }

    #[test]
    fn paradigm_validation() {
        let inv = Inventory::builtin();
        assert!(release_paradigm().validate(&inv, 2).is_ok());
        let bad = ParadigmSpec::cross("שחרור", &[Some("שש")], &[None::<&str>]);
        assert!(bad.validate(&inv, 2).is_err());
        let short = ParadigmSpec::cross("ש", &[None::<&str>], &[None::<&str>]);
        assert!(short.validate(&inv, 2).is_err());
    }

    #[test]
    fn release_overlap_prefsuf_is_three_of_four() {
        let pipeline = Pipeline::new(Method::PrefSuf, Pretokenizer::default());
        let report = overlap_report(&release_paradigm(), &pipeline, &release_vocab());
        assert_eq!(report.host_subwords, ["חרור"]);
        let hits: Vec<bool> = report.forms.iter().map(|f| f.overlaps).collect();
        assert_eq!(hits, [true, false, true, true]);
        assert_eq!(
            host_overlap(&release_paradigm(), &pipeline, &release_vocab()).unwrap(),
            0.75
        );
    }

    #[test]
    fn release_overlap_gold_morphseg_is_four_of_four() {
        let mut lexicon = LexiconSegmenter::default();
        lexicon.extend(
            [
                "שחרור\th:שחרור",
                "ששחרור\tp:ש|h:שחרור",
                "ושחרורה\tp:ו|h:שחרור|s:ה",
                "וכשחרורנו\tp:ו|p:כ|h:שחרור|s:נו",
            ]
            .map(|l| parse_record(l).unwrap()),
        );
        let pipeline = Pipeline::new(Method::MorphSeg, Pretokenizer::default())
            .with_segmenter(Arc::new(lexicon));
        assert_eq!(
            host_overlap(&release_paradigm(), &pipeline, &release_vocab()).unwrap(),
            1.0
        );
    }

    #[test]
    fn fertility_and_unk_edge_cases() {
        let v = Vocabulary::with_affixes(["אב", "גד", "א", "##ב", "##ג", "##ד"]);
        let baseline = Pipeline::new(Method::Baseline, Pretokenizer::default());
        assert_eq!(fertility(&["אב גד"], &baseline, &v).unwrap(), 1.0);
        assert_eq!(fertility(&["אבגד"], &baseline, &v).unwrap(), 3.0);
        assert_eq!(unk_rate(&["אב גד"], &baseline, &v).unwrap(), 0.0);
        assert_eq!(unk_rate(&["xyz qq"], &baseline, &v).unwrap(), 1.0);
        let empty: [&str; 0] = [];
        assert!(matches!(
            fertility(&empty, &baseline, &v),
            Err(Error::EmptyCorpus)
        ));
        assert!(matches!(
            fertility(&["   "], &baseline, &v),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn contiguous_runs() {
        assert!(contains_run(&[1, 2, 3], &[2, 3]));
        assert!(!contains_run(&[1, 2, 3], &[1, 3]));
        assert!(!contains_run(&[1], &[1, 2]));
    }

    #[test]
    fn paradigm_file_format() {
        let specs = parse_paradigms("# c\nחרור\t-,ו,וכש\t-,נו\n\n").unwrap();
        assert_eq!(specs.len(), 1);
        assert_eq!(specs[0].forms.len(), 6);
        assert_eq!(specs[0].forms[0], (None, None));
        assert!(matches!(
            parse_paradigms("חרור\t-\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn report_formats() {
        let stats = CorpusStats {
            word_count: 4,
            pretoken_count: 5,
            token_count: 6,
            unk_count: 1,
        };
        let r = MetricsReport::new(Method::PrefSuf, 16000, stats, None).unwrap();
        assert_eq!(r.fertility, 1.5);
        let tsv = reports_to_tsv(std::slice::from_ref(&r));
        assert_eq!(
            tsv.lines().nth(1).unwrap(),
            "prefsuf\t16000\t1.500000\t0.200000\tNA\t6\t4\t5\t1"
        );
        let json = reports_to_json(std::slice::from_ref(&r));
        let back: ReportDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back.reports, [r]);
    }
}
