use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::inventory::Inventory;
use crate::pretokenize::PreToken;

use super::trie::GreedyMatcher;

pub const PAD: &str = "[PAD]";
pub const UNK: &str = "[UNK]";
pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";
pub const MASK: &str = "[MASK]";

/// Special tokens, occupying ids 0..5 in this order.
pub const SPECIAL_TOKENS: [&str; 5] = [PAD, UNK, CLS, SEP, MASK];

pub const UNK_ID: u32 = 1;
pub const DEFAULT_CONTINUATION_MARKER: &str = "##";
pub const DEFAULT_MAX_WORD_LENGTH: usize = 100;

/// A WordPiece vocabulary: token strings indexed by id, plus the greedy
/// longest-match encoder built over them.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, u32>,
    continuation_marker: String,
    seeded_affixes: Vec<String>,
    max_word_length: usize,
    matcher: GreedyMatcher,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.tokens == other.tokens
            && self.continuation_marker == other.continuation_marker
            && self.seeded_affixes == other.seeded_affixes
            && self.max_word_length == other.max_word_length
    }
}

impl Eq for Vocabulary {}

impl Vocabulary {
    /// Builds a vocabulary from tokens in id order. The special tokens must
    /// come first and every token must be unique.
    pub fn from_tokens(tokens: Vec<String>, continuation_marker: &str) -> Result<Self> {
        if continuation_marker.is_empty() {
            return Err(Error::Config(
                "continuation marker must be non-empty".into(),
            ));
        }
        for (i, special) in SPECIAL_TOKENS.iter().enumerate() {
            if tokens.get(i).map(String::as_str) != Some(*special) {
                return Err(Error::InvalidVocabulary(format!(
                    "id {i} must be {special}, found {:?}",
                    tokens.get(i)
                )));
            }
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, token) in tokens.iter().enumerate() {
            if token.is_empty() || token.contains(char::is_whitespace) {
                return Err(Error::InvalidVocabulary(format!(
                    "token {token:?} at id {i} is empty or contains whitespace"
                )));
            }
            if index.insert(token.clone(), i as u32).is_some() {
                return Err(Error::DuplicateToken {
                    token: token.clone(),
                    line: i + 1,
                });
            }
        }
        let seeded_affixes = Inventory::builtin()
            .marked_affix_atoms()
            .into_iter()
            .filter(|a| index.contains_key(a))
            .collect();
        let matcher = GreedyMatcher::new(&tokens, continuation_marker);
        Ok(Vocabulary {
            tokens,
            index,
            continuation_marker: continuation_marker.to_owned(),
            seeded_affixes,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            matcher,
        })
    }

    /// Special tokens, every marked affix atom, then `extra` in order
    /// (duplicates skipped). Handy for hand-built vocabularies.
    pub fn with_affixes<I, S>(extra: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut tokens: Vec<String> = SPECIAL_TOKENS.iter().map(|s| (*s).to_owned()).collect();
        tokens.extend(Inventory::builtin().marked_affix_atoms());
        for t in extra {
            let t = t.into();
            if !tokens.contains(&t) {
                tokens.push(t);
            }
        }
        Vocabulary::from_tokens(tokens, DEFAULT_CONTINUATION_MARKER)
            .expect("special tokens are in place")
    }

    pub fn with_max_word_length(mut self, max_word_length: usize) -> Self {
        self.max_word_length = max_word_length;
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn continuation_marker(&self) -> &str {
        &self.continuation_marker
    }

    pub fn seeded_affixes(&self) -> &[String] {
        &self.seeded_affixes
    }

    pub fn max_word_length(&self) -> usize {
        self.max_word_length
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    /// The first `size` tokens. Since training appends merges in order, this
    /// equals training with a smaller budget.
    pub fn truncated(&self, size: usize) -> Result<Vocabulary> {
        let mut v = Vocabulary::from_tokens(
            self.tokens[..size.min(self.tokens.len())].to_vec(),
            &self.continuation_marker,
        )?;
        v.max_word_length = self.max_word_length;
        Ok(v)
    }

    /// Greedy longest-match-first encoding of one word to ids. Words that
    /// cannot be covered, or are longer than the length limit, become a
    /// single `[UNK]`.
    pub fn encode_word(&self, word: &str) -> Vec<u32> {
        let mut out = Vec::new();
        if !self.encode_word_into(word, &mut out) {
            out.push(UNK_ID);
        }
        out
    }

    /// Appends the ids for `word`; returns false (appending nothing) when the
    /// word maps to `[UNK]`.
    fn encode_word_into(&self, word: &str, out: &mut Vec<u32>) -> bool {
        if word.chars().count() > self.max_word_length {
            return false;
        }
        let start = out.len();
        let mut rest = word;
        let mut initial = true;
        while !rest.is_empty() {
            match self.matcher.longest(rest, initial) {
                Some((id, len)) => {
                    out.push(id);
                    rest = &rest[len..];
                    initial = false;
                }
                None => {
                    out.truncate(start);
                    return false;
                }
            }
        }
        true
    }

    /// Subword ids for a pre-token (its marked form).
    pub fn encode_pretoken_ids(&self, token: &PreToken) -> Vec<u32> {
        self.encode_word(&token.marked())
    }

    /// Subword strings for a pre-token (its marked form).
    pub fn encode_pretoken(&self, token: &PreToken) -> Vec<String> {
        self.ids_to_tokens(&self.encode_pretoken_ids(token))
    }

    pub fn ids_to_tokens(&self, ids: &[u32]) -> Vec<String> {
        ids.iter()
            .map(|&id| self.tokens[id as usize].clone())
            .collect()
    }

    /// Rejoins subwords: continuation pieces are glued to their predecessor
    /// with the marker removed; other pieces are separated by a space.
    pub fn decode<S: AsRef<str>>(&self, subwords: &[S]) -> String {
        decode_with_marker(subwords, &self.continuation_marker)
    }

    /// Writes one token per line, `\n`-terminated, in id order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for t in &self.tokens {
            w.write_all(t.as_bytes())?;
            w.write_all(b"\n")?;
        }
        w.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::file(path, e))?;
        self.write_to(std::io::BufWriter::new(file))
            .map_err(|e| Error::file(path, e))
    }

    /// Parses the one-token-per-line format.
    pub fn parse(text: &str, continuation_marker: &str) -> Result<Self> {
        let text = text.strip_prefix('\u{FEFF}').unwrap_or(text);
        let body = text.strip_suffix('\n').unwrap_or(text);
        if body.is_empty() {
            return Err(Error::InvalidVocabulary("empty vocabulary file".into()));
        }
        let mut tokens = Vec::new();
        let mut seen = HashMap::new();
        for (i, line) in body.split('\n').enumerate() {
            if line.is_empty() {
                return Err(Error::parse(i + 1, "empty token"));
            }
            if let Some(first) = seen.insert(line, i + 1) {
                return Err(Error::DuplicateToken {
                    token: format!("{line} (first on line {first})"),
                    line: i + 1,
                });
            }
            tokens.push(line.to_owned());
        }
        Vocabulary::from_tokens(tokens, continuation_marker)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Vocabulary::load_with_marker(path, DEFAULT_CONTINUATION_MARKER)
    }

    pub fn load_with_marker(path: impl AsRef<Path>, continuation_marker: &str) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Vocabulary::parse(&text, continuation_marker)
    }
}

pub fn decode_with_marker<S: AsRef<str>>(subwords: &[S], marker: &str) -> String {
    let mut out = String::new();
    for (i, piece) in subwords.iter().enumerate() {
        let piece = piece.as_ref();
        match piece.strip_prefix(marker).filter(|rest| !rest.is_empty()) {
            Some(rest) if i > 0 => out.push_str(rest),
            _ => {
                if i > 0 {
                    out.push(' ');
                }
                out.push_str(piece);
            }
        }
    }
    out
}

/// Greedy longest-match encoding with [`Vocabulary::encode_pretoken`].
pub fn encode_pretoken(token: &PreToken, vocab: &Vocabulary) -> Vec<String> {
    vocab.encode_pretoken(token)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pretokenize::Role;

    fn vocab(extra: &[&str]) -> Vocabulary {
        Vocabulary::with_affixes(extra.iter().copied())
    }

    fn word(text: &str) -> PreToken {
        PreToken::new(text, Role::Word, 0)
    }

    #[test]
    fn whole_word_in_vocabulary() {
        let v = vocab(&["שחרור"]);
        assert_eq!(v.encode_pretoken(&word("שחרור")), ["שחרור"]);
    }

    #[test]
    fn greedy_pieces_carry_continuation_marker() {
        let v = vocab(&["וכש", "##חרור", "##נו", "ו", "##כ"]);
        assert_eq!(
            v.encode_pretoken(&word("וכשחרורנו")),
            ["וכש", "##חרור", "##נו"]
        );
        assert_eq!(v.decode(&["וכש", "##חרור", "##נו"]), "וכשחרורנו");
    }

    #[test]
    fn seeded_affix_is_atomic() {
        let v = vocab(&[]);
        let t = PreToken::new("ש", Role::Prefix, 0);
        assert_eq!(v.encode_pretoken(&t), ["ש+"]);
        let s = PreToken::new("נו", Role::Suffix, 0);
        assert_eq!(v.encode_pretoken(&s), ["+נו"]);
        assert_eq!(v.seeded_affixes().len(), 21);
    }

    #[test]
    fn unknown_character_is_unk() {
        let v = vocab(&["a", "##b"]);
        assert_eq!(v.encode_pretoken(&word("abz")), [UNK]);
        assert_eq!(v.encode_pretoken(&word("z")), [UNK]);
        assert_eq!(v.decode(&[UNK]), UNK);
    }

    #[test]
    fn overlong_word_is_unk() {
        let v = vocab(&["a", "##a"]).with_max_word_length(3);
        assert_eq!(v.encode_pretoken(&word("aaa")), ["a", "##a", "##a"]);
        assert_eq!(v.encode_pretoken(&word("aaaa")), [UNK]);
    }

    #[test]
    fn decode_separates_words() {
        let v = vocab(&[]);
        assert_eq!(v.decode(&["ab", "##c", "d"]), "abc d");
        assert_eq!(v.decode(&["##"]), "##");
        let empty: [&str; 0] = [];
        assert_eq!(v.decode(&empty), "");
    }

    #[test]
    fn save_load_round_trip() {
        let v = vocab(&["שחרור", "##ור"]);
        let mut buf = Vec::new();
        v.write_to(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n"));
        assert!(text.ends_with("##ור\n"));
        let back = Vocabulary::parse(&text, "##").unwrap();
        assert_eq!(back, v);
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn load_rejects_duplicates_and_bad_headers() {
        let dup = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\na\nb\na\n";
        assert!(matches!(
            Vocabulary::parse(dup, "##"),
            Err(Error::DuplicateToken { line: 8, .. })
        ));
        assert!(matches!(
            Vocabulary::parse("a\nb\n", "##"),
            Err(Error::InvalidVocabulary(_))
        ));
        assert!(Vocabulary::parse("", "##").is_err());
        let blank = "[PAD]\n[UNK]\n[CLS]\n[SEP]\n[MASK]\n\na\n";
        assert!(matches!(
            Vocabulary::parse(blank, "##"),
            Err(Error::Parse { line: 6, .. })
        ));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(
            Vocabulary::load("/nonexistent/vocab.txt"),
            Err(Error::File { .. })
        ));
    }

    #[test]
    fn truncation_keeps_prefix() {
        let v = vocab(&["x", "y", "z"]);
        let t = v.truncated(v.len() - 1).unwrap();
        assert_eq!(t.tokens(), &v.tokens()[..v.len() - 1]);
        assert!(!t.contains("z"));
    }
}
