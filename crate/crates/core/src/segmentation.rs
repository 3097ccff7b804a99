//! Transport of externally produced morphological segmentations.
//!
//! File format, one word per line:
//!
//! ```text
//! surface<TAB>role:text|role:text|...
//! ```
//!
//! where `role` is `p` (prefix), `h` (host) or `s` (suffix). A blank line ends
//! a sentence. Exactly one host is required; prefixes precede it and suffixes
//! follow it.

use std::collections::HashMap;
use std::fmt;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pretokenize::{is_punctuation, PreToken, Pretokenizer, Role};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MorphRole {
    Prefix,
    Host,
    Suffix,
}

impl MorphRole {
    fn tag(self) -> char {
        match self {
            MorphRole::Prefix => 'p',
            MorphRole::Host => 'h',
            MorphRole::Suffix => 's',
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "p" => Some(MorphRole::Prefix),
            "h" => Some(MorphRole::Host),
            "s" => Some(MorphRole::Suffix),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Morpheme {
    pub role: MorphRole,
    pub text: String,
}

impl Morpheme {
    pub fn new(role: MorphRole, text: impl Into<String>) -> Self {
        Morpheme {
            role,
            text: text.into(),
        }
    }
}

/// A word and its disambiguated morphemes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SegmentationRecord {
    surface: String,
    morphemes: Vec<Morpheme>,
}

impl SegmentationRecord {
    /// Validates and builds a record.
    pub fn new(surface: impl Into<String>, morphemes: Vec<Morpheme>) -> Result<Self, String> {
        let surface = surface.into();
        validate_text(&surface, "surface")?;
        let mut hosts = 0;
        for m in &morphemes {
            validate_text(&m.text, "morpheme")?;
            if m.text.contains('|') {
                return Err(format!("morpheme {:?} contains '|'", m.text));
            }
            match m.role {
                MorphRole::Prefix if hosts > 0 => {
                    return Err(format!("prefix {:?} follows the host", m.text))
                }
                MorphRole::Suffix if hosts == 0 => {
                    return Err(format!("suffix {:?} precedes the host", m.text))
                }
                MorphRole::Host => hosts += 1,
                _ => {}
            }
        }
        match hosts {
            0 => Err("record has no host".into()),
            1 => Ok(SegmentationRecord { surface, morphemes }),
            n => Err(format!("record has {n} hosts")),
        }
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn morphemes(&self) -> &[Morpheme] {
        &self.morphemes
    }

    pub fn host(&self) -> &str {
        self.morphemes
            .iter()
            .find(|m| m.role == MorphRole::Host)
            .map(|m| m.text.as_str())
            .expect("validated record has a host")
    }

    /// Concatenation of the morpheme texts.
    pub fn reconstructed(&self) -> String {
        self.morphemes.iter().map(|m| m.text.as_str()).collect()
    }

    /// Whether the morphemes spell the surface exactly.
    pub fn concatenative(&self) -> bool {
        self.reconstructed() == self.surface
    }
}

fn validate_text(text: &str, what: &str) -> Result<(), String> {
    if text.is_empty() {
        return Err(format!("empty {what}"));
    }
    if let Some(c) = text.chars().find(|c| c.is_whitespace()) {
        return Err(format!("{what} {text:?} contains whitespace {c:?}"));
    }
    Ok(())
}

impl fmt::Display for SegmentationRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t", self.surface)?;
        for (i, m) in self.morphemes.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            write!(f, "{}:{}", m.role.tag(), m.text)?;
        }
        Ok(())
    }
}

/// Parses one record line (without the trailing newline).
pub fn parse_record(line: &str) -> Result<SegmentationRecord, String> {
    let cols: Vec<&str> = line.split('\t').collect();
    if cols.len() != 2 {
        return Err(format!(
            "expected 2 tab-separated columns, found {}",
            cols.len()
        ));
    }
    let morphemes = cols[1]
        .split('|')
        .map(|field| {
            let (tag, text) = field
                .split_once(':')
                .ok_or_else(|| format!("morpheme {field:?} lacks a role tag"))?;
            let role =
                MorphRole::from_tag(tag).ok_or_else(|| format!("unknown role tag {tag:?}"))?;
            Ok(Morpheme::new(role, text))
        })
        .collect::<Result<Vec<_>, String>>()?;
    SegmentationRecord::new(cols[0], morphemes)
}

/// Streaming reader yielding one sentence of records at a time.
pub struct SegmentationReader<R> {
    reader: R,
    line_no: usize,
    buf: String,
}

impl<R: BufRead> SegmentationReader<R> {
    pub fn new(reader: R) -> Self {
        SegmentationReader {
            reader,
            line_no: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for SegmentationReader<R> {
    type Item = Result<Vec<SegmentationRecord>>;

    fn next(&mut self) -> Option<Self::Item> {
        let mut sentence = Vec::new();
        loop {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => break,
                Ok(_) => {}
                Err(e) => return Some(Err(e.into())),
            }
            self.line_no += 1;
            let line = self.buf.trim_end_matches('\n');
            let line = line.strip_suffix('\r').unwrap_or(line);
            if line.is_empty() {
                if sentence.is_empty() {
                    continue;
                }
                break;
            }
            match parse_record(line) {
                Ok(r) => sentence.push(r),
                Err(message) => return Some(Err(Error::parse(self.line_no, message))),
            }
        }
        (!sentence.is_empty()).then_some(Ok(sentence))
    }
}

/// Reads a whole segmentation file into sentences.
pub fn parse_segmentation_file<R: BufRead>(reader: R) -> Result<Vec<Vec<SegmentationRecord>>> {
    SegmentationReader::new(reader).collect()
}

/// Writes sentences in the file format, each followed by a blank line.
pub fn serialize_segmentation(sentences: &[Vec<SegmentationRecord>]) -> String {
    let mut out = String::new();
    for sentence in sentences {
        for record in sentence {
            out.push_str(&record.to_string());
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphsegOptions {
    /// Break כש, מש and נו into single-letter affixes before marking.
    pub decompose_overlapping: bool,
}

fn decompose_overlapping(role: MorphRole, text: &str) -> Option<[&'static str; 2]> {
    match (role, text) {
        (MorphRole::Prefix, "כש") => Some(["כ", "ש"]),
        (MorphRole::Prefix, "מש") => Some(["מ", "ש"]),
        (MorphRole::Suffix, "נו") => Some(["נ", "ו"]),
        _ => None,
    }
}

/// Marks one record's morphemes as pre-tokens with the given origin.
pub fn mark_record(
    record: &SegmentationRecord,
    origin: usize,
    options: &MorphsegOptions,
    out: &mut Vec<PreToken>,
) {
    let is_punct_only = record.morphemes.len() == 1 && record.surface.chars().all(is_punctuation);
    if is_punct_only && record.concatenative() {
        out.extend(
            record
                .surface
                .chars()
                .map(|c| PreToken::new(c.to_string(), Role::Punct, origin)),
        );
        return;
    }
    for m in &record.morphemes {
        let role = match m.role {
            MorphRole::Prefix => Role::Prefix,
            MorphRole::Host => Role::Host,
            MorphRole::Suffix => Role::Suffix,
        };
        match decompose_overlapping(m.role, &m.text).filter(|_| options.decompose_overlapping) {
            Some(parts) => out.extend(parts.iter().map(|p| PreToken::new(*p, role, origin))),
            None => out.push(PreToken::new(m.text.as_str(), role, origin)),
        }
    }
}

/// Morphological-segmentation pre-tokenization of one sentence of records.
/// Each record is one word; punctuation-only records become punctuation tokens.
pub fn morphseg_pretokenize(
    records: &[SegmentationRecord],
    options: &MorphsegOptions,
) -> Vec<PreToken> {
    let mut out = Vec::with_capacity(records.len() * 2);
    for (origin, record) in records.iter().enumerate() {
        mark_record(record, origin, options, &mut out);
    }
    out
}

/// A record whose morphemes do not spell its surface.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub index: usize,
    pub surface: String,
    pub reconstructed: String,
}

/// Lists the non-concatenative records of a sentence.
pub fn discrepancies(records: &[SegmentationRecord]) -> Vec<Discrepancy> {
    records
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.concatenative())
        .map(|(index, r)| Discrepancy {
            index,
            surface: r.surface.clone(),
            reconstructed: r.reconstructed(),
        })
        .collect()
}

/// Source of per-word segmentations for text-driven morphological tokenization.
pub trait Segmenter: Send + Sync {
    fn segment(&self, word: &str) -> SegmentationRecord;
}

/// Deterministic segmenter built on prefix–suffix separation. Prefix stacks
/// are emitted slot by slot (כש and מש stay whole) and the suffix is emitted
/// undecomposed.
#[derive(Debug, Clone, Default)]
pub struct FallbackSegmenter {
    pretokenizer: Pretokenizer,
}

impl FallbackSegmenter {
    pub fn new(pretokenizer: Pretokenizer) -> Self {
        FallbackSegmenter { pretokenizer }
    }
}

impl Segmenter for FallbackSegmenter {
    fn segment(&self, word: &str) -> SegmentationRecord {
        let analysis = self.pretokenizer.analyze(word);
        let mut morphemes = Vec::with_capacity(4);
        if let Some(c) = analysis.combination {
            morphemes.extend(
                c.morphemes()
                    .into_iter()
                    .map(|m| Morpheme::new(MorphRole::Prefix, m)),
            );
        }
        morphemes.push(Morpheme::new(MorphRole::Host, analysis.host));
        if let Some(s) = analysis.suffix {
            morphemes.push(Morpheme::new(MorphRole::Suffix, s.surface.as_str()));
        }
        SegmentationRecord {
            surface: word.to_owned(),
            morphemes,
        }
    }
}

/// [`FallbackSegmenter`] with the default configuration.
pub fn fallback_segment(word: &str) -> SegmentationRecord {
    FallbackSegmenter::default().segment(word)
}

/// Context-free lookup of known segmentations by surface, falling back to
/// prefix–suffix separation for unknown words. The first record seen for a
/// surface wins.
#[derive(Debug, Clone, Default)]
pub struct LexiconSegmenter {
    entries: HashMap<String, SegmentationRecord>,
    fallback: FallbackSegmenter,
}

impl LexiconSegmenter {
    pub fn new(fallback: FallbackSegmenter) -> Self {
        LexiconSegmenter {
            entries: HashMap::new(),
            fallback,
        }
    }

    pub fn insert(&mut self, record: SegmentationRecord) {
        self.entries.entry(record.surface.clone()).or_insert(record);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

impl Extend<SegmentationRecord> for LexiconSegmenter {
    fn extend<T: IntoIterator<Item = SegmentationRecord>>(&mut self, iter: T) {
        for r in iter {
            self.insert(r);
        }
    }
}

impl Segmenter for LexiconSegmenter {
    fn segment(&self, word: &str) -> SegmentationRecord {
        self.entries
            .get(word)
            .cloned()
            .unwrap_or_else(|| self.fallback.segment(word))
    }
}

/// Text-driven morphological tokenization: baseline splitting, then every
/// word is segmented and marked. Punctuation passes through.
pub fn morphseg_pretokenize_text(
    text: &str,
    pretokenizer: &Pretokenizer,
    segmenter: &dyn Segmenter,
    options: &MorphsegOptions,
) -> Vec<PreToken> {
    let mut out = Vec::new();
    for token in pretokenizer.baseline(text) {
        match token.role {
            Role::Word => mark_record(
                &segmenter.segment(&token.text),
                token.origin,
                options,
                &mut out,
            ),
            _ => out.push(token),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretokenize::detokenize;

    fn marked(tokens: &[PreToken]) -> Vec<String> {
        tokens.iter().map(|t| t.marked().into_owned()).collect()
    }

    fn rec(line: &str) -> SegmentationRecord {
        parse_record(line).unwrap()
    }

    #[test]
    fn parses_table_rows() {
        let r = rec("ושחרורה\tp:ו|h:שחרור|s:ה");
        assert_eq!(
            r.morphemes(),
            [
                Morpheme::new(MorphRole::Prefix, "ו"),
                Morpheme::new(MorphRole::Host, "שחרור"),
                Morpheme::new(MorphRole::Suffix, "ה"),
            ]
        );
        assert!(r.concatenative());
        let host_only = rec("שחרור\th:שחרור");
        assert_eq!(host_only.morphemes().len(), 1);
        assert_eq!(host_only.host(), "שחרור");
        let r4 = rec("וכשחרורנו\tp:ו|p:כ|h:שחרור|s:נו");
        assert_eq!(r4.morphemes()[3].text, "נו");
    }

    #[test]
    fn rejects_malformed_records() {
        for bad in [
            "x\tp:ו|p:ה",
            "x\th:a|h:b",
            "x\ts:a|h:b",
            "x\th:a|p:b",
            "x\tq:a",
            "x\th:",
            "x\tha",
            "x",
            "x\th:x\textra",
            "\th:x",
        ] {
            assert!(parse_record(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn file_errors_report_line_numbers() {
        let text = "שחרור\th:שחרור\n\nא\th:א\nx\tp:ו|p:ה\n";
        match parse_segmentation_file(text.as_bytes()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn sentences_split_on_blank_lines() {
        let text = "\n\nא\th:א\nב\th:ב\n\n\nג\th:ג";
        let sentences = parse_segmentation_file(text.as_bytes()).unwrap();
        assert_eq!(sentences.len(), 2);
        assert_eq!(sentences[0].len(), 2);
        assert_eq!(sentences[1][0].surface(), "ג");
    }

    #[test]
    fn crlf_is_tolerated() {
        let sentences = parse_segmentation_file("א\th:א\r\n\r\n".as_bytes()).unwrap();
        assert_eq!(sentences, vec![vec![rec("א\th:א")]]);
    }

    #[test]
    fn marking_keeps_or_decomposes_overlaps() {
        let r2 = rec("ששחרור\tp:ש|h:שחרור");
        let opts = MorphsegOptions::default();
        assert_eq!(marked(&morphseg_pretokenize(&[r2], &opts)), ["ש+", "שחרור"]);
        let r4 = rec("וכשחרורנו\tp:ו|p:כ|h:שחרור|s:נו");
        assert_eq!(
            marked(&morphseg_pretokenize(std::slice::from_ref(&r4), &opts)),
            ["ו+", "כ+", "שחרור", "+נו"]
        );
        let on = MorphsegOptions {
            decompose_overlapping: true,
        };
        assert_eq!(
            marked(&morphseg_pretokenize(&[r4], &on)),
            ["ו+", "כ+", "שחרור", "+נ", "+ו"]
        );
    }

    #[test]
    fn fallback_matches_separation() {
        assert_eq!(fallback_segment("שחרור"), rec("שחרור\tp:ש|h:חרור"));
        assert_eq!(fallback_segment("דבר"), rec("דבר\th:דבר"));
        assert_eq!(
            fallback_segment("ושחרורה"),
            rec("ושחרורה\tp:ו|p:ש|h:חרור|s:ה")
        );
        assert_eq!(
            fallback_segment("וכשחרורנו"),
            rec("וכשחרורנו\tp:ו|p:כש|h:חרור|s:נו")
        );
    }

    #[test]
    fn non_concatenative_records_are_reported() {
        let r = rec("אהבתיה\th:אהבתי|s:יה");
        assert!(!r.concatenative());
        let sentence = vec![rec("ו\th:ו"), r];
        let d = discrepancies(&sentence);
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].index, 1);
        assert_eq!(d[0].reconstructed, "אהבתייה");
        let toks = morphseg_pretokenize(&sentence, &MorphsegOptions::default());
        assert_eq!(detokenize(&toks).unwrap(), "ו אהבתייה");
    }

    #[test]
    fn punctuation_records() {
        let sentence = vec![rec("שלום\th:שלום"), rec("...\th:...")];
        let toks = morphseg_pretokenize(&sentence, &MorphsegOptions::default());
        assert_eq!(toks.len(), 4);
        assert!(toks[1..].iter().all(|t| t.role == Role::Punct));
    }

    #[test]
    fn lexicon_prefers_known_records() {
        let mut lex = LexiconSegmenter::default();
        lex.insert(rec("שחרור\th:שחרור"));
        lex.insert(rec("שחרור\tp:ש|h:חרור"));
        assert_eq!(lex.len(), 1);
        assert_eq!(lex.segment("שחרור").host(), "שחרור");
        assert_eq!(lex.segment("ושחרורה").host(), "חרור");
    }

    #[test]
    fn serialization_format() {
        let sentences = vec![vec![rec("ושחרורה\tp:ו|h:שחרור|s:ה"), rec(",\th:,")]];
        let text = serialize_segmentation(&sentences);
        assert_eq!(text, "ושחרורה\tp:ו|h:שחרור|s:ה\n,\th:,\n\n");
        assert_eq!(parse_segmentation_file(text.as_bytes()).unwrap(), sentences);
    }
}
