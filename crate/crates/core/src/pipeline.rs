//! The three tokenization pipelines: pre-tokenization followed by WordPiece.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pretokenize::{PreToken, Pretokenizer};
use crate::segmentation::{
    morphseg_pretokenize, morphseg_pretokenize_text, FallbackSegmenter, MorphsegOptions,
    SegmentationRecord, Segmenter,
};
use crate::wordpiece::Vocabulary;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Whitespace and punctuation splitting only.
    Baseline,
    /// Deterministic prefix–suffix separation.
    PrefSuf,
    /// Context-sensitive morphological segmentation.
    MorphSeg,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Baseline, Method::PrefSuf, Method::MorphSeg];

    pub fn name(self) -> &'static str {
        match self {
            Method::Baseline => "baseline",
            Method::PrefSuf => "prefsuf",
            Method::MorphSeg => "morphseg",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown method {s:?} (expected baseline, prefsuf or morphseg)"
                ))
            })
    }
}

/// A pre-tokenization method with everything it needs to run.
#[derive(Clone)]
pub struct Pipeline {
    method: Method,
    pretokenizer: Pretokenizer,
    morphseg: MorphsegOptions,
    segmenter: Arc<dyn Segmenter>,
}

impl fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Pipeline")
            .field("method", &self.method)
            .field("pretokenizer", &self.pretokenizer.config())
            .field("morphseg", &self.morphseg)
            .finish_non_exhaustive()
    }
}

impl Pipeline {
    /// Uses the fallback segmenter for `MorphSeg`.
    pub fn new(method: Method, pretokenizer: Pretokenizer) -> Self {
        let segmenter = Arc::new(FallbackSegmenter::new(pretokenizer.clone()));
        Pipeline {
            method,
            pretokenizer,
            morphseg: MorphsegOptions::default(),
            segmenter,
        }
    }

    pub fn with_segmenter(mut self, segmenter: Arc<dyn Segmenter>) -> Self {
        self.segmenter = segmenter;
        self
    }

    pub fn with_morphseg_options(mut self, options: MorphsegOptions) -> Self {
        self.morphseg = options;
        self
    }

    /// Same configuration, different method.
    pub fn with_method(&self, method: Method) -> Self {
        Pipeline {
            method,
            ..self.clone()
        }
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn pretokenizer(&self) -> &Pretokenizer {
        &self.pretokenizer
    }

    pub fn morphseg_options(&self) -> &MorphsegOptions {
        &self.morphseg
    }

    pub fn pretokenize(&self, text: &str) -> Vec<PreToken> {
        match self.method {
            Method::Baseline => self.pretokenizer.baseline(text),
            Method::PrefSuf => self.pretokenizer.prefsuf(text),
            Method::MorphSeg => morphseg_pretokenize_text(
                text,
                &self.pretokenizer,
                self.segmenter.as_ref(),
                &self.morphseg,
            ),
        }
    }

    /// Morphological pre-tokenization of an externally segmented sentence.
    pub fn pretokenize_records(&self, records: &[SegmentationRecord]) -> Vec<PreToken> {
        morphseg_pretokenize(records, &self.morphseg)
    }

    pub fn encode_pretokens(&self, tokens: &[PreToken], vocab: &Vocabulary) -> Vec<u32> {
        tokens
            .iter()
            .flat_map(|t| vocab.encode_pretoken_ids(t))
            .collect()
    }

    pub fn encode_ids(&self, text: &str, vocab: &Vocabulary) -> Vec<u32> {
        self.encode_pretokens(&self.pretokenize(text), vocab)
    }

    pub fn encode(&self, text: &str, vocab: &Vocabulary) -> Vec<String> {
        vocab.ids_to_tokens(&self.encode_ids(text, vocab))
    }
}

/// Pre-tokenizes one sentence. For `MorphSeg`, `segmentation` supplies the
/// sentence's records; they must spell the same characters as `text`
/// (ignoring whitespace). Without records the pipeline's segmenter is used.
pub fn pretokenize_sentence(
    text: &str,
    pipeline: &Pipeline,
    segmentation: Option<&[SegmentationRecord]>,
) -> Result<Vec<PreToken>> {
    match (pipeline.method, segmentation) {
        (Method::MorphSeg, Some(records)) => {
            check_alignment(text, records, pipeline.pretokenizer())?;
            Ok(pipeline.pretokenize_records(records))
        }
        (_, Some(_)) => Err(Error::Config(format!(
            "segmentation records are only used by morphseg, not {}",
            pipeline.method
        ))),
        (_, None) => Ok(pipeline.pretokenize(text)),
    }
}

/// [`pretokenize_sentence`] followed by subword encoding.
pub fn encode_sentence(
    text: &str,
    pipeline: &Pipeline,
    vocab: &Vocabulary,
    segmentation: Option<&[SegmentationRecord]>,
) -> Result<Vec<String>> {
    let tokens = pretokenize_sentence(text, pipeline, segmentation)?;
    Ok(vocab.ids_to_tokens(&pipeline.encode_pretokens(&tokens, vocab)))
}

/// Checks that records spell `text` once whitespace is ignored.
pub fn check_alignment(
    text: &str,
    records: &[SegmentationRecord],
    pretokenizer: &Pretokenizer,
) -> Result<()> {
    let normalized = pretokenizer.normalize_chars(text);
    let expected = normalized.chars().filter(|c| !c.is_whitespace());
    let given = records
        .iter()
        .flat_map(|r| r.surface().chars())
        .filter(|c| !c.is_whitespace());
    if expected.eq(given) {
        Ok(())
    } else {
        let surfaces: Vec<&str> = records.iter().map(|r| r.surface()).collect();
        Err(Error::SegmentationMismatch(format!(
            "{:?} vs records {:?}",
            text,
            surfaces.join(" ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::segmentation::parse_record;

    fn vocab() -> Vocabulary {
        Vocabulary::with_affixes(["שחרור", "חרור", "ש", "##ש", "##חרור"])
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("wordpiece".parse::<Method>().is_err());
    }

    #[test]
    fn release_sentences() {
        let v = vocab();
        let prefsuf = Pipeline::new(Method::PrefSuf, Pretokenizer::default());
        assert_eq!(
            encode_sentence("ששחרור", &prefsuf, &v, None).unwrap(),
            ["ש+", "שחרור"]
        );
        assert_eq!(
            encode_sentence("שחרור", &prefsuf, &v, None).unwrap(),
            ["ש+", "חרור"]
        );
        let morphseg = prefsuf.with_method(Method::MorphSeg);
        let gold = [parse_record("ששחרור\tp:ש|h:שחרור").unwrap()];
        assert_eq!(
            encode_sentence("ששחרור", &morphseg, &v, Some(&gold)).unwrap(),
            ["ש+", "שחרור"]
        );
        let baseline = prefsuf.with_method(Method::Baseline);
        assert_eq!(
            encode_sentence("ששחרור", &baseline, &v, None).unwrap(),
            ["ש", "##ש", "##חרור"]
        );
    }

    #[test]
    fn misaligned_records_are_rejected() {
        let morphseg = Pipeline::new(Method::MorphSeg, Pretokenizer::default());
        let gold = [parse_record("ששחרור\tp:ש|h:שחרור").unwrap()];
        assert!(matches!(
            encode_sentence("שחרור", &morphseg, &vocab(), Some(&gold)),
            Err(Error::SegmentationMismatch(_))
        ));
        let prefsuf = morphseg.with_method(Method::PrefSuf);
        assert!(encode_sentence("ששחרור", &prefsuf, &vocab(), Some(&gold)).is_err());
    }
}
