//! Sentence pre-tokenization: whitespace/punctuation splitting, prefix–suffix
//! separation and the `p+` / `+s` marking scheme.
//!
//! Every [`PreToken`] remembers the index of the whitespace-delimited chunk it
//! came from, which is what lets [`detokenize`] restore the sentence exactly.

use std::borrow::Cow;
use std::fmt;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};
use unicode_normalization::{is_nfc_quick, IsNormalized, UnicodeNormalization};

use crate::error::{Error, Result};
use crate::hebrew;
use crate::inventory::{
    mark_affix, Affix, AffixKind, Inventory, PrefixCombination, AFFIX_MARKER, DEFAULT_MIN_HOST,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Prefix,
    Host,
    Suffix,
    Word,
    Punct,
}

/// A whitespace-free unit handed to the subword model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PreToken {
    /// Unmarked text.
    pub text: String,
    pub role: Role,
    /// Index of the whitespace-delimited chunk of the sentence this token came from.
    pub origin: usize,
}

impl PreToken {
    pub fn new(text: impl Into<String>, role: Role, origin: usize) -> Self {
        PreToken {
            text: text.into(),
            role,
            origin,
        }
    }

    /// The token string seen by the subword model: `p+` for prefixes, `+s`
    /// for suffixes, the bare text otherwise.
    pub fn marked(&self) -> Cow<'_, str> {
        match self.role {
            Role::Prefix => Cow::Owned(mark_affix(&self.text, AffixKind::Prefix)),
            Role::Suffix => Cow::Owned(mark_affix(&self.text, AffixKind::Suffix)),
            _ => Cow::Borrowed(&self.text),
        }
    }
}

impl fmt::Display for PreToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.marked())
    }
}

/// A word decomposed into prefixes, host and suffix morphemes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorphSplit {
    pub prefixes: Vec<String>,
    pub host: String,
    /// Morphemes of the (single) suffix; empty when there is none.
    pub suffix: Vec<String>,
    pub concatenative: bool,
}

impl MorphSplit {
    pub fn host_only(word: &str) -> Self {
        MorphSplit {
            prefixes: Vec::new(),
            host: word.to_owned(),
            suffix: Vec::new(),
            concatenative: true,
        }
    }

    /// Prefixes, host and suffix morphemes concatenated.
    pub fn surface(&self) -> String {
        let mut s: String = self.prefixes.concat();
        s.push_str(&self.host);
        s.extend(self.suffix.iter().map(String::as_str));
        s
    }
}

/// Result of longest-match affix stripping, before decomposition.
#[derive(Debug, Clone, Copy)]
pub struct AffixAnalysis<'a> {
    pub combination: Option<&'a PrefixCombination>,
    pub host: &'a str,
    pub suffix: Option<&'a Affix>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PretokenizerConfig {
    /// Affixes are only stripped when at least this many characters remain.
    pub min_host: usize,
    /// Apply NFC normalization before splitting.
    pub nfc: bool,
    /// Remove Hebrew vowel points and other marks before splitting.
    pub strip_diacritics: bool,
}

impl Default for PretokenizerConfig {
    fn default() -> Self {
        PretokenizerConfig {
            min_host: DEFAULT_MIN_HOST,
            nfc: true,
            strip_diacritics: false,
        }
    }
}

/// Stateless pre-tokenizer over an immutable affix inventory.
#[derive(Debug, Clone)]
pub struct Pretokenizer {
    inventory: Arc<Inventory>,
    config: PretokenizerConfig,
}

impl Default for Pretokenizer {
    fn default() -> Self {
        Pretokenizer::new(PretokenizerConfig::default())
    }
}

impl Pretokenizer {
    pub fn new(config: PretokenizerConfig) -> Self {
        Pretokenizer::with_inventory(Inventory::builtin(), config)
    }

    pub fn with_inventory(inventory: Arc<Inventory>, config: PretokenizerConfig) -> Self {
        Pretokenizer {
            inventory,
            config: PretokenizerConfig {
                min_host: config.min_host.max(1),
                ..config
            },
        }
    }

    pub fn config(&self) -> &PretokenizerConfig {
        &self.config
    }

    pub fn inventory(&self) -> &Inventory {
        &self.inventory
    }

    /// Character-level normalization applied before splitting.
    pub fn normalize_chars<'t>(&self, text: &'t str) -> Cow<'t, str> {
        let mut out = Cow::Borrowed(text);
        if self.config.nfc && is_nfc_quick(text.chars()) != IsNormalized::Yes {
            out = Cow::Owned(text.nfc().collect());
        }
        if self.config.strip_diacritics && out.chars().any(hebrew::is_diacritic) {
            out = Cow::Owned(hebrew::strip_diacritics(&out));
        }
        out
    }

    /// The text a lossless pre-token stream reconstructs to: character
    /// normalization plus whitespace runs collapsed to single spaces.
    pub fn normalize_text(&self, text: &str) -> String {
        self.normalize_chars(text)
            .split_whitespace()
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Whitespace and punctuation splitting. Punctuation characters become
    /// single-character `Punct` tokens; everything else is a `Word`.
    pub fn baseline(&self, text: &str) -> Vec<PreToken> {
        let text = self.normalize_chars(text);
        let mut tokens = Vec::new();
        for (origin, chunk) in text.split_whitespace().enumerate() {
            let mut start = None;
            for (i, c) in chunk.char_indices() {
                if is_punctuation(c) {
                    if let Some(s) = start.take() {
                        tokens.push(PreToken::new(&chunk[s..i], Role::Word, origin));
                    }
                    tokens.push(PreToken::new(c.to_string(), Role::Punct, origin));
                } else if start.is_none() {
                    start = Some(i);
                }
            }
            if let Some(s) = start {
                tokens.push(PreToken::new(&chunk[s..], Role::Word, origin));
            }
        }
        tokens
    }

    /// Longest-match prefix stack, then longest-match suffix on the remainder.
    /// Single pass; tokens that are not purely Hebrew letters are left whole.
    pub fn analyze<'a>(&'a self, word: &'a str) -> AffixAnalysis<'a> {
        let mut analysis = AffixAnalysis {
            combination: None,
            host: word,
            suffix: None,
        };
        if !hebrew::is_hebrew_word(word) {
            return analysis;
        }
        let min_host = self.config.min_host;
        if let Some(c) = self.inventory.longest_prefix_match(word, min_host) {
            analysis.combination = Some(c);
            analysis.host = &word[c.surface.len()..];
        }
        if let Some(s) = self.inventory.longest_suffix_match(analysis.host, min_host) {
            analysis.suffix = Some(s);
            analysis.host = &analysis.host[..analysis.host.len() - s.surface.len()];
        }
        analysis
    }

    /// Prefix–suffix separation of a single word, with overlapping affixes
    /// (כש, מש, נו) broken into single letters.
    pub fn separate(&self, word: &str) -> MorphSplit {
        let analysis = self.analyze(word);
        MorphSplit {
            prefixes: analysis
                .combination
                .map(|c| c.emitted_morphemes.clone())
                .unwrap_or_default(),
            host: analysis.host.to_owned(),
            suffix: analysis
                .suffix
                .map(|s| s.decomposition.clone())
                .unwrap_or_default(),
            concatenative: true,
        }
    }

    /// Baseline splitting followed by prefix–suffix separation and marking of
    /// every word.
    pub fn prefsuf(&self, text: &str) -> Vec<PreToken> {
        let mut out = Vec::new();
        for token in self.baseline(text) {
            match token.role {
                Role::Word => out.extend(mark(&self.separate(&token.text), token.origin)),
                _ => out.push(token),
            }
        }
        out
    }
}

static DEFAULT: LazyLock<Pretokenizer> = LazyLock::new(Pretokenizer::default);

/// [`Pretokenizer::baseline`] with the default configuration.
pub fn baseline_pretokenize(text: &str) -> Vec<PreToken> {
    DEFAULT.baseline(text)
}

/// [`Pretokenizer::separate`] with the default configuration.
pub fn separate_prefix_suffix(word: &str) -> MorphSplit {
    DEFAULT.separate(word)
}

/// [`Pretokenizer::prefsuf`] with the default configuration.
pub fn prefsuf_pretokenize(text: &str) -> Vec<PreToken> {
    DEFAULT.prefsuf(text)
}

/// Turns a split into pre-tokens: prefixes, the host, then suffix morphemes.
pub fn mark(split: &MorphSplit, origin: usize) -> Vec<PreToken> {
    let mut out = Vec::with_capacity(split.prefixes.len() + 1 + split.suffix.len());
    out.extend(
        split
            .prefixes
            .iter()
            .map(|p| PreToken::new(p.as_str(), Role::Prefix, origin)),
    );
    out.push(PreToken::new(split.host.as_str(), Role::Host, origin));
    out.extend(
        split
            .suffix
            .iter()
            .map(|s| PreToken::new(s.as_str(), Role::Suffix, origin)),
    );
    out
}

/// BERT's punctuation class: all non-alphanumeric printable ASCII plus the
/// Unicode `P*` categories.
pub fn is_punctuation(c: char) -> bool {
    if c.is_ascii() {
        return c.is_ascii_punctuation();
    }
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum WordState {
    Start,
    Prefixes,
    Host,
}

/// Reconstructs a sentence from a pre-token stream: markers are dropped,
/// tokens sharing an origin are glued together and origins are separated by
/// single spaces.
pub fn detokenize(tokens: &[PreToken]) -> Result<String> {
    let mut out = String::new();
    let mut current_origin = None;
    let mut state = WordState::Start;
    let malformed = |index: usize, message: &str| Error::MalformedStream {
        index,
        message: message.to_owned(),
    };
    for (index, token) in tokens.iter().enumerate() {
        if current_origin != Some(token.origin) {
            if state == WordState::Prefixes {
                return Err(malformed(index - 1, "prefix without a host"));
            }
            if current_origin.is_some() {
                out.push(' ');
            }
            current_origin = Some(token.origin);
            state = WordState::Start;
        }
        state = match (token.role, state) {
            (Role::Prefix, WordState::Host) => {
                return Err(malformed(index, "prefix follows the host"))
            }
            (Role::Prefix, _) => WordState::Prefixes,
            (Role::Suffix, WordState::Host) => WordState::Host,
            (Role::Suffix, _) => return Err(malformed(index, "suffix precedes any host")),
            (Role::Host | Role::Word, WordState::Host) => {
                return Err(malformed(index, "second host in one word"))
            }
            (Role::Host | Role::Word, _) => WordState::Host,
            (Role::Punct, WordState::Prefixes) => {
                return Err(malformed(index - 1, "prefix without a host"))
            }
            (Role::Punct, _) => WordState::Start,
        };
        out.push_str(&token.text);
    }
    if state == WordState::Prefixes {
        return Err(malformed(tokens.len() - 1, "prefix without a host"));
    }
    Ok(out)
}

/// Serializes a stream as space-separated marked tokens.
pub fn format_marked(tokens: &[PreToken]) -> String {
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(&t.marked());
    }
    out
}

/// Rejoins marked token strings into words without origin information:
/// `p+` attaches to the following token and `+s` to the preceding one. A lone
/// `+` is punctuation.
pub fn join_marked<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    let mut glue_next = true;
    for t in tokens {
        let t = t.as_ref();
        let is_prefix = t.len() > 1 && t.ends_with(AFFIX_MARKER);
        let is_suffix = t.len() > 1 && t.starts_with(AFFIX_MARKER);
        if is_suffix {
            out.push_str(&t[AFFIX_MARKER.len_utf8()..]);
            continue;
        }
        if !glue_next {
            out.push(' ');
        }
        if is_prefix {
            out.push_str(&t[..t.len() - AFFIX_MARKER.len_utf8()]);
            glue_next = true;
        } else {
            out.push_str(t);
            glue_next = false;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[PreToken]) -> Vec<String> {
        tokens.iter().map(|t| t.marked().into_owned()).collect()
    }

    fn split(prefixes: &[&str], host: &str, suffix: &[&str]) -> MorphSplit {
        MorphSplit {
            prefixes: prefixes.iter().map(|s| s.to_string()).collect(),
            host: host.to_owned(),
            suffix: suffix.iter().map(|s| s.to_string()).collect(),
            concatenative: true,
        }
    }

    #[test]
    fn baseline_isolates_punctuation() {
        let toks = baseline_pretokenize("שלום, עולם");
        assert_eq!(texts(&toks), ["שלום", ",", "עולם"]);
        assert_eq!(
            toks.iter().map(|t| t.role).collect::<Vec<_>>(),
            [Role::Word, Role::Punct, Role::Word]
        );
        assert_eq!(toks.iter().map(|t| t.origin).collect::<Vec<_>>(), [0, 0, 1]);
    }

    #[test]
    fn baseline_empty_and_whitespace() {
        assert!(baseline_pretokenize("").is_empty());
        assert!(baseline_pretokenize(" \t ").is_empty());
        assert_eq!(texts(&baseline_pretokenize("a  b")), ["a", "b"]);
    }

    #[test]
    fn baseline_hebrew_punctuation() {
        // gershayim and maqaf are punctuation
        assert_eq!(texts(&baseline_pretokenize("צה״ל")), ["צה", "״", "ל"]);
        assert_eq!(texts(&baseline_pretokenize("בית־ספר")), ["בית", "־", "ספר"]);
        assert_eq!(texts(&baseline_pretokenize("a+b")), ["a", "+", "b"]);
    }

    #[test]
    fn separation_of_release_words() {
        assert_eq!(separate_prefix_suffix("שחרור"), split(&["ש"], "חרור", &[]));
        assert_eq!(
            separate_prefix_suffix("ששחרור"),
            split(&["ש"], "שחרור", &[])
        );
        assert_eq!(
            separate_prefix_suffix("ושחרורה"),
            split(&["ו", "ש"], "חרור", &["ה"])
        );
        assert_eq!(
            separate_prefix_suffix("וכשחרורנו"),
            split(&["ו", "כ", "ש"], "חרור", &["נ", "ו"])
        );
        assert_eq!(separate_prefix_suffix("דבר"), split(&[], "דבר", &[]));
    }

    #[test]
    fn short_and_foreign_words_are_not_split() {
        assert_eq!(separate_prefix_suffix("של"), split(&[], "של", &[]));
        assert_eq!(separate_prefix_suffix("ו"), split(&[], "ו", &[]));
        assert_eq!(separate_prefix_suffix("ושNATO"), split(&[], "ושNATO", &[]));
        assert_eq!(separate_prefix_suffix("1948"), split(&[], "1948", &[]));
    }

    #[test]
    fn min_host_limits_stripping() {
        let p = Pretokenizer::new(PretokenizerConfig {
            min_host: 5,
            ..Default::default()
        });
        assert_eq!(p.separate("ושחרורה"), split(&["ו", "ש"], "חרורה", &[]));
    }

    #[test]
    fn marking() {
        assert_eq!(
            texts(&mark(&split(&["ו", "ש"], "חרור", &["ה"]), 0)),
            ["ו+", "ש+", "חרור", "+ה"]
        );
        assert_eq!(texts(&mark(&split(&[], "דבר", &[]), 0)), ["דבר"]);
        assert_eq!(
            texts(&mark(&split(&["ו", "כ", "ש"], "חרור", &["נ", "ו"]), 0)),
            ["ו+", "כ+", "ש+", "חרור", "+נ", "+ו"]
        );
    }

    #[test]
    fn prefsuf_sentence() {
        let toks = prefsuf_pretokenize("ושחרורה, דבר");
        assert_eq!(texts(&toks), ["ו+", "ש+", "חרור", "+ה", ",", "דבר"]);
        assert_eq!(format_marked(&toks), "ו+ ש+ חרור +ה , דבר");
    }

    #[test]
    fn detokenize_inverts_marking() {
        let toks = mark(&split(&["ו", "ש"], "חרור", &["ה"]), 0);
        assert_eq!(detokenize(&toks).unwrap(), "ושחרורה");
        assert_eq!(detokenize(&[]).unwrap(), "");
        let s = "  (ושחרורה),   ששחרור \t וכשחרורנו! 1948 ";
        let p = Pretokenizer::default();
        assert_eq!(detokenize(&p.prefsuf(s)).unwrap(), p.normalize_text(s));
        assert_eq!(detokenize(&p.baseline(s)).unwrap(), p.normalize_text(s));
    }

    #[test]
    fn detokenize_rejects_misordered_affixes() {
        let suffix_first = vec![
            PreToken::new("ה", Role::Suffix, 0),
            PreToken::new("חרור", Role::Host, 0),
        ];
        assert!(matches!(
            detokenize(&suffix_first),
            Err(Error::MalformedStream { index: 0, .. })
        ));
        let prefix_after = vec![
            PreToken::new("חרור", Role::Host, 0),
            PreToken::new("ו", Role::Prefix, 0),
        ];
        assert!(matches!(
            detokenize(&prefix_after),
            Err(Error::MalformedStream { index: 1, .. })
        ));
        let dangling = vec![
            PreToken::new("ו", Role::Prefix, 0),
            PreToken::new("חרור", Role::Host, 1),
        ];
        assert!(detokenize(&dangling).is_err());
    }

    #[test]
    fn normalization_options() {
        let p = Pretokenizer::new(PretokenizerConfig {
            strip_diacritics: true,
            ..Default::default()
        });
        assert_eq!(texts(&p.prefsuf("וְהַבַּיִת")), ["ו+", "ה+", "בית"]);
        // pointed words are left whole unless points are stripped
        assert_eq!(texts(&prefsuf_pretokenize("וְהַבַּיִת")).len(), 1);
        // NFC: presentation form shin-with-dot decomposes canonically
        let nfc = Pretokenizer::default().normalize_text("\u{FB2A}");
        assert_eq!(nfc, "\u{05E9}\u{05C1}");
    }

    #[test]
    fn join_marked_strings() {
        assert_eq!(
            join_marked(&["ו+", "ש+", "חרור", "+ה", "דבר"]),
            "ושחרורה דבר"
        );
        assert_eq!(join_marked(&["a", "+", "b"]), "a + b");
        let empty: [&str; 0] = [];
        assert_eq!(join_marked(&empty), "");
    }

    #[test]
    fn marker_shapes_are_disjoint() {
        let inv = Inventory::builtin();
        for p in inv.prefixes() {
            for s in inv.suffixes() {
                assert_ne!(p.marked(), s.marked());
            }
        }
    }
}
