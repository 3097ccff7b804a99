//! Inventory of Hebrew functional prefixes, possessive/object suffixes and the
//! table of valid prefix stacks.
//!
//! The prefix stack table ships as `data/prefix_combinations.tsv` and is
//! embedded at build time. It is generated by the slot grammar
//!
//! ```text
//! [ו]? [ש|כש|מש]? [מ|ב|ל|כ]? [ה]?
//! ```
//!
//! with the empty stack removed and the article dropped after ב, ל and כ,
//! where written Hebrew absorbs it into the preposition. A replacement table
//! can be loaded with [`Inventory::from_tsv`].

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, LazyLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hebrew;

/// Shortest host left behind by affix stripping.
pub const DEFAULT_MIN_HOST: usize = 2;

/// Marker appended to separated prefixes and prepended to separated suffixes.
pub const AFFIX_MARKER: char = '+';

const BUILTIN_TABLE: &str = include_str!("../data/prefix_combinations.tsv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AffixKind {
    Prefix,
    Suffix,
}

/// A single base prefix or suffix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Affix {
    pub surface: String,
    pub kind: AffixKind,
    pub gloss: String,
    /// Single-letter morphemes emitted when the affix is separated. Only
    /// מש, כש and נו break into two letters.
    pub decomposition: Vec<String>,
}

impl Affix {
    fn new(surface: &str, kind: AffixKind, gloss: &str, decomposition: &[&str]) -> Self {
        Affix {
            surface: surface.to_owned(),
            kind,
            gloss: gloss.to_owned(),
            decomposition: decomposition.iter().map(|s| (*s).to_owned()).collect(),
        }
    }

    /// The affix as a marked token: `p+` for prefixes, `+s` for suffixes.
    pub fn marked(&self) -> String {
        mark_affix(&self.surface, self.kind)
    }
}

pub(crate) fn mark_affix(text: &str, kind: AffixKind) -> String {
    match kind {
        AffixKind::Prefix => format!("{text}{AFFIX_MARKER}"),
        AffixKind::Suffix => format!("{AFFIX_MARKER}{text}"),
    }
}

fn builtin_prefixes() -> Vec<Affix> {
    use AffixKind::Prefix;
    vec![
        Affix::new("מש", Prefix, "since", &["מ", "ש"]),
        Affix::new("כש", Prefix, "when", &["כ", "ש"]),
        Affix::new("ב", Prefix, "in", &["ב"]),
        Affix::new("ל", Prefix, "to", &["ל"]),
        Affix::new("כ", Prefix, "as/like", &["כ"]),
        Affix::new("ו", Prefix, "and", &["ו"]),
        Affix::new("ה", Prefix, "the", &["ה"]),
        Affix::new("ש", Prefix, "that", &["ש"]),
        Affix::new("מ", Prefix, "from", &["מ"]),
    ]
}

fn builtin_suffixes() -> Vec<Affix> {
    use AffixKind::Suffix;
    vec![
        Affix::new("י", Suffix, "mine", &["י"]),
        Affix::new("ך", Suffix, "you/rs sg.", &["ך"]),
        Affix::new("ה", Suffix, "her/s", &["ה"]),
        Affix::new("ו", Suffix, "him/his", &["ו"]),
        Affix::new("נו", Suffix, "ours/us", &["נ", "ו"]),
        Affix::new("כן", Suffix, "you/rs f.pl.", &["כן"]),
        Affix::new("כם", Suffix, "you/rs m.pl.", &["כם"]),
        Affix::new("ן", Suffix, "them/theirs f.", &["ן"]),
        Affix::new("הן", Suffix, "them/theirs f.", &["הן"]),
        Affix::new("ם", Suffix, "them/theirs m.", &["ם"]),
        Affix::new("הם", Suffix, "them/theirs m.", &["הם"]),
    ]
}

/// Subordinating prefix slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Subordinator {
    /// ש
    She,
    /// כש
    KeShe,
    /// מש
    MiShe,
}

impl Subordinator {
    pub const ALL: [Subordinator; 3] =
        [Subordinator::She, Subordinator::KeShe, Subordinator::MiShe];

    pub fn surface(self) -> &'static str {
        match self {
            Subordinator::She => "ש",
            Subordinator::KeShe => "כש",
            Subordinator::MiShe => "מש",
        }
    }
}

/// Prepositional prefix slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Preposition {
    /// מ
    Mi,
    /// ב
    Be,
    /// ל
    Le,
    /// כ
    Ke,
}

impl Preposition {
    pub const ALL: [Preposition; 4] = [
        Preposition::Mi,
        Preposition::Be,
        Preposition::Le,
        Preposition::Ke,
    ];

    pub fn surface(self) -> &'static str {
        match self {
            Preposition::Mi => "מ",
            Preposition::Be => "ב",
            Preposition::Le => "ל",
            Preposition::Ke => "כ",
        }
    }

    /// Whether a following definite article is absorbed into the preposition.
    pub fn absorbs_article(self) -> bool {
        !matches!(self, Preposition::Mi)
    }
}

/// The filled positions of a prefix stack, in surface order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Slots {
    pub conjunction: bool,
    pub subordinator: Option<Subordinator>,
    pub preposition: Option<Preposition>,
    pub article: bool,
}

impl Slots {
    pub fn is_empty(&self) -> bool {
        !self.conjunction
            && self.subordinator.is_none()
            && self.preposition.is_none()
            && !self.article
    }

    /// Whether the stack is licensed by the slot grammar.
    pub fn is_valid(&self) -> bool {
        !self.is_empty()
            && !(self.article && self.preposition.is_some_and(Preposition::absorbs_article))
    }

    /// Surface strings of the filled slots in order, without decomposition.
    pub fn morphemes(&self) -> Vec<&'static str> {
        let mut out = Vec::with_capacity(4);
        if self.conjunction {
            out.push("ו");
        }
        if let Some(s) = self.subordinator {
            out.push(s.surface());
        }
        if let Some(p) = self.preposition {
            out.push(p.surface());
        }
        if self.article {
            out.push("ה");
        }
        out
    }

    pub fn surface(&self) -> String {
        self.morphemes().concat()
    }
}

impl fmt::Display for Slots {
    /// Renders as `conj=ו;sub=כש;prep=ב;art=ה`, listing filled slots only.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::with_capacity(4);
        if self.conjunction {
            parts.push("conj=ו".to_owned());
        }
        if let Some(s) = self.subordinator {
            parts.push(format!("sub={}", s.surface()));
        }
        if let Some(p) = self.preposition {
            parts.push(format!("prep={}", p.surface()));
        }
        if self.article {
            parts.push("art=ה".to_owned());
        }
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for Slots {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let mut slots = Slots::default();
        let mut last_rank = 0;
        for part in s.split(';') {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| format!("slot {part:?} is not name=value"))?;
            let rank = match (name, value) {
                ("conj", "ו") => {
                    slots.conjunction = true;
                    1
                }
                ("sub", v) => {
                    slots.subordinator = Some(
                        Subordinator::ALL
                            .into_iter()
                            .find(|s| s.surface() == v)
                            .ok_or_else(|| format!("unknown subordinator {v:?}"))?,
                    );
                    2
                }
                ("prep", v) => {
                    slots.preposition = Some(
                        Preposition::ALL
                            .into_iter()
                            .find(|p| p.surface() == v)
                            .ok_or_else(|| format!("unknown preposition {v:?}"))?,
                    );
                    3
                }
                ("art", "ה") => {
                    slots.article = true;
                    4
                }
                _ => return Err(format!("unknown slot {part:?}")),
            };
            if rank <= last_rank {
                return Err(format!("slot {name} out of order or repeated"));
            }
            last_rank = rank;
        }
        Ok(slots)
    }
}

/// A valid stack of prefixes and the single-letter morphemes it emits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PrefixCombination {
    pub surface: String,
    pub slots: Slots,
    pub emitted_morphemes: Vec<String>,
}

impl PrefixCombination {
    pub fn from_slots(slots: Slots) -> Self {
        let emitted_morphemes = slots
            .morphemes()
            .into_iter()
            .flat_map(|m| decompose_prefix(m).into_iter())
            .collect();
        PrefixCombination {
            surface: slots.surface(),
            slots,
            emitted_morphemes,
        }
    }

    /// The slot morphemes without decomposing כש and מש.
    pub fn morphemes(&self) -> Vec<&'static str> {
        self.slots.morphemes()
    }
}

fn decompose_prefix(m: &str) -> Vec<String> {
    match m {
        "כש" => vec!["כ".into(), "ש".into()],
        "מש" => vec!["מ".into(), "ש".into()],
        other => vec![other.to_owned()],
    }
}

/// Generates every stack licensed by the slot grammar, sorted by surface.
pub fn enumerate_prefix_combinations() -> Vec<PrefixCombination> {
    let mut out = Vec::new();
    for conjunction in [false, true] {
        for subordinator in std::iter::once(None).chain(Subordinator::ALL.map(Some)) {
            for preposition in std::iter::once(None).chain(Preposition::ALL.map(Some)) {
                for article in [false, true] {
                    let slots = Slots {
                        conjunction,
                        subordinator,
                        preposition,
                        article,
                    };
                    if slots.is_valid() {
                        out.push(PrefixCombination::from_slots(slots));
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.surface.cmp(&b.surface));
    out
}

/// Renders combinations in the resource-file format.
pub fn combinations_to_tsv(combinations: &[PrefixCombination]) -> String {
    let mut out = String::from(
        "# Valid Hebrew prefix stacks.\n\
         # columns: surface<TAB>slot-pattern<TAB>emitted-morphemes\n\
         # slot order: conj (ו), sub (ש|כש|מש), prep (מ|ב|ל|כ), art (ה)\n",
    );
    for c in combinations {
        out.push_str(&format!(
            "{}\t{}\t{}\n",
            c.surface,
            c.slots,
            c.emitted_morphemes.join("|")
        ));
    }
    out
}

/// Parses a prefix-combination table. Each row is checked against its own
/// slot pattern; rows need not be licensed by the built-in grammar.
pub fn parse_combinations_tsv(text: &str) -> Result<Vec<PrefixCombination>> {
    let mut out: Vec<PrefixCombination> = Vec::new();
    let mut seen = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 {
            return Err(Error::parse(
                line_no,
                format!("expected 3 tab-separated columns, found {}", cols.len()),
            ));
        }
        let slots: Slots = cols[1].parse().map_err(|e| Error::parse(line_no, e))?;
        if slots.is_empty() {
            return Err(Error::parse(line_no, "empty slot pattern"));
        }
        let combination = PrefixCombination::from_slots(slots);
        if combination.surface != cols[0] {
            return Err(Error::parse(
                line_no,
                format!(
                    "surface {:?} does not match slot pattern (expected {:?})",
                    cols[0], combination.surface
                ),
            ));
        }
        let emitted: Vec<&str> = cols[2].split('|').collect();
        if emitted != combination.emitted_morphemes {
            return Err(Error::parse(
                line_no,
                format!(
                    "emitted morphemes {:?} do not match slot pattern (expected {})",
                    cols[2],
                    combination.emitted_morphemes.join("|")
                ),
            ));
        }
        if let Some(first) = seen.insert(combination.surface.clone(), line_no) {
            return Err(Error::parse(
                line_no,
                format!("surface {:?} already defined on line {first}", cols[0]),
            ));
        }
        out.push(combination);
    }
    out.sort_by(|a, b| a.surface.cmp(&b.surface));
    Ok(out)
}

/// Affix tables with lookup indexes for longest-match stripping.
#[derive(Debug)]
pub struct Inventory {
    prefixes: Vec<Affix>,
    suffixes: Vec<Affix>,
    combinations: Vec<PrefixCombination>,
    combination_index: HashMap<String, usize>,
    suffix_index: HashMap<String, usize>,
    max_combination_len: usize,
    max_suffix_len: usize,
}

static BUILTIN: LazyLock<Arc<Inventory>> = LazyLock::new(|| {
    let combinations =
        parse_combinations_tsv(BUILTIN_TABLE).expect("embedded prefix table is valid");
    Arc::new(Inventory::new(combinations))
});

impl Inventory {
    /// The inventory backed by the embedded prefix table.
    pub fn builtin() -> Arc<Inventory> {
        Arc::clone(&BUILTIN)
    }

    /// Builds an inventory using the built-in base affixes and a replacement
    /// prefix-combination table.
    pub fn from_tsv(text: &str) -> Result<Inventory> {
        Ok(Inventory::new(parse_combinations_tsv(text)?))
    }

    fn new(mut combinations: Vec<PrefixCombination>) -> Self {
        combinations.sort_by(|a, b| a.surface.cmp(&b.surface));
        let suffixes = builtin_suffixes();
        let combination_index = combinations
            .iter()
            .enumerate()
            .map(|(i, c)| (c.surface.clone(), i))
            .collect();
        let suffix_index = suffixes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.surface.clone(), i))
            .collect();
        let max_combination_len = combinations
            .iter()
            .map(|c| c.surface.chars().count())
            .max()
            .unwrap_or(0);
        let max_suffix_len = suffixes
            .iter()
            .map(|s| s.surface.chars().count())
            .max()
            .unwrap_or(0);
        Inventory {
            prefixes: builtin_prefixes(),
            suffixes,
            combinations,
            combination_index,
            suffix_index,
            max_combination_len,
            max_suffix_len,
        }
    }

    pub fn prefixes(&self) -> &[Affix] {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &[Affix] {
        &self.suffixes
    }

    /// Prefix stacks sorted by surface.
    pub fn combinations(&self) -> &[PrefixCombination] {
        &self.combinations
    }

    pub fn combination(&self, surface: &str) -> Option<&PrefixCombination> {
        self.combination_index
            .get(surface)
            .map(|&i| &self.combinations[i])
    }

    pub fn suffix(&self, surface: &str) -> Option<&Affix> {
        self.suffix_index.get(surface).map(|&i| &self.suffixes[i])
    }

    /// Longest prefix stack that is a strict prefix of `word` and leaves at
    /// least `min_host` characters.
    pub fn longest_prefix_match(&self, word: &str, min_host: usize) -> Option<&PrefixCombination> {
        let boundaries: Vec<usize> = word.char_indices().map(|(i, _)| i).skip(1).collect();
        let n = boundaries.len() + 1;
        let longest = self
            .max_combination_len
            .min(n.saturating_sub(min_host.max(1)));
        (1..=longest)
            .rev()
            .find_map(|len| self.combination(&word[..boundaries[len - 1]]))
    }

    /// Longest suffix that ends `word` and leaves at least `min_host`
    /// characters.
    pub fn longest_suffix_match(&self, word: &str, min_host: usize) -> Option<&Affix> {
        let starts: Vec<usize> = word.char_indices().map(|(i, _)| i).collect();
        let n = starts.len();
        let longest = self.max_suffix_len.min(n.saturating_sub(min_host.max(1)));
        (1..=longest)
            .rev()
            .find_map(|len| self.suffix(&word[starts[n - len]..]))
    }

    /// Every marked affix token: `p+` for each base prefix and each of its
    /// decomposed letters, then `+s` likewise for suffixes. Order is stable
    /// and free of duplicates.
    pub fn marked_affix_atoms(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for affix in self.prefixes.iter().chain(&self.suffixes) {
            let forms = std::iter::once(&affix.surface).chain(&affix.decomposition);
            for form in forms {
                let marked = mark_affix(form, affix.kind);
                if !out.contains(&marked) {
                    out.push(marked);
                }
            }
        }
        out
    }
}

/// The nine base prefixes.
pub fn base_prefixes() -> &'static [Affix] {
    &BUILTIN.prefixes
}

/// The eleven base suffixes.
pub fn base_suffixes() -> &'static [Affix] {
    &BUILTIN.suffixes
}

/// Longest valid prefix stack of `word` under the built-in table.
pub fn longest_prefix_match(word: &str, min_host: usize) -> Option<&'static PrefixCombination> {
    BUILTIN.longest_prefix_match(word, min_host)
}

/// Longest suffix of `word` under the built-in table.
pub fn longest_suffix_match(word: &str, min_host: usize) -> Option<&'static Affix> {
    BUILTIN.longest_suffix_match(word, min_host)
}

/// Joins morphemes, normalizing final-form letters that end up word-internal.
pub fn join_morphemes<S: AsRef<str>>(parts: &[S]) -> String {
    let joined: String = parts.iter().map(AsRef::as_ref).collect();
    hebrew::normalize_interior_finals(&joined)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn surfaces(affixes: &[Affix]) -> Vec<&str> {
        affixes.iter().map(|a| a.surface.as_str()).collect()
    }

    #[test]
    fn prefixes_are_the_nine_functional_prefixes() {
        let p = base_prefixes();
        assert_eq!(p.len(), 9);
        assert_eq!(surfaces(p), ["מש", "כש", "ב", "ל", "כ", "ו", "ה", "ש", "מ"]);
        let vav = p.iter().find(|a| a.surface == "ו").unwrap();
        assert_eq!(vav.gloss, "and");
        let mishe = p.iter().find(|a| a.surface == "מש").unwrap();
        assert_eq!(mishe.decomposition, ["מ", "ש"]);
    }

    #[test]
    fn suffixes_are_the_eleven_possessives() {
        let s = base_suffixes();
        assert_eq!(s.len(), 11);
        assert_eq!(
            surfaces(s),
            ["י", "ך", "ה", "ו", "נו", "כן", "כם", "ן", "הן", "ם", "הם"]
        );
        assert_eq!(s.iter().find(|a| a.surface == "ה").unwrap().gloss, "her/s");
        assert_eq!(
            s.iter().find(|a| a.surface == "נו").unwrap().decomposition,
            ["נ", "ו"]
        );
    }

    #[test]
    fn only_three_affixes_decompose() {
        for a in base_prefixes().iter().chain(base_suffixes()) {
            let two = matches!(a.surface.as_str(), "מש" | "כש" | "נו");
            assert_eq!(a.decomposition.len() == 2, two, "{}", a.surface);
            assert_eq!(join_morphemes(&a.decomposition), a.surface);
        }
    }

    #[test]
    fn builtin_table_matches_grammar() {
        let inv = Inventory::builtin();
        assert_eq!(
            inv.combinations(),
            enumerate_prefix_combinations().as_slice()
        );
        assert_eq!(inv.combinations().len(), 55);
    }

    #[test]
    fn shipped_tsv_is_the_rendered_grammar() {
        assert_eq!(
            BUILTIN_TABLE,
            combinations_to_tsv(&enumerate_prefix_combinations())
        );
    }

    #[test]
    fn cited_combinations_present() {
        let inv = Inventory::builtin();
        assert!(inv.combination("וש").is_some());
        assert!(inv.combination("וכש").is_some());
        assert!(inv.combination("שש").is_none());
        let shema = inv.combination("שמה").unwrap();
        assert_eq!(shema.emitted_morphemes, ["ש", "מ", "ה"]);
        assert_eq!(
            inv.combination("וכש").unwrap().emitted_morphemes,
            ["ו", "כ", "ש"]
        );
        // article absorbed after ב
        assert!(inv.combination("בה").is_none());
        assert!(inv.combination("מה").is_some());
    }

    #[test]
    fn prefix_matching() {
        assert_eq!(
            longest_prefix_match("וכשחרורנו", 2).map(|c| c.surface.as_str()),
            Some("וכש")
        );
        assert!(longest_prefix_match("דבר", 2).is_none());
        assert_eq!(
            longest_prefix_match("ששחרור", 2).map(|c| c.surface.as_str()),
            Some("ש")
        );
        // min_host bounds the match
        assert!(longest_prefix_match("של", 2).is_none());
        assert_eq!(
            longest_prefix_match("ומה", 1).map(|c| c.surface.as_str()),
            Some("ומ")
        );
        assert!(longest_prefix_match("ו", 1).is_none());
    }

    #[test]
    fn suffix_matching() {
        assert_eq!(
            longest_suffix_match("חרורנו", 2).map(|s| s.surface.as_str()),
            Some("נו")
        );
        assert!(longest_suffix_match("חרור", 2).is_none());
        assert_eq!(
            longest_suffix_match("ספריהם", 2).map(|s| s.surface.as_str()),
            Some("הם")
        );
        assert!(longest_suffix_match("בה", 2).is_none());
    }

    #[test]
    fn marked_atoms() {
        let atoms = Inventory::builtin().marked_affix_atoms();
        assert_eq!(atoms.len(), 21);
        for a in ["ו+", "מש+", "ש+", "+נו", "+נ", "+ו", "+הם"] {
            assert!(atoms.contains(&a.to_owned()), "{a}");
        }
        let prefix_forms: Vec<_> = atoms.iter().filter(|a| a.ends_with('+')).collect();
        let suffix_forms: Vec<_> = atoms.iter().filter(|a| a.starts_with('+')).collect();
        assert_eq!(prefix_forms.len() + suffix_forms.len(), atoms.len());
    }

    #[test]
    fn slot_pattern_round_trip() {
        for c in enumerate_prefix_combinations() {
            let parsed: Slots = c.slots.to_string().parse().unwrap();
            assert_eq!(parsed, c.slots);
        }
        assert!("prep=ב;conj=ו".parse::<Slots>().is_err());
        assert!("sub=שש".parse::<Slots>().is_err());
    }

    #[test]
    fn table_parse_errors_carry_line_numbers() {
        let bad = "# header\nוש\tconj=ו;sub=ש\tו|ש\nוב\tconj=ו\tו\n";
        match parse_combinations_tsv(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let dup = "ו\tconj=ו\tו\nו\tconj=ו\tו\n";
        assert!(matches!(
            parse_combinations_tsv(dup),
            Err(Error::Parse { line: 2, .. })
        ));
        let cols = "ו\tconj=ו\n";
        assert!(matches!(
            parse_combinations_tsv(cols),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn custom_table_changes_matching() {
        let inv = Inventory::from_tsv("ו\tconj=ו\tו\n").unwrap();
        assert_eq!(inv.combinations().len(), 1);
        assert!(
            inv.longest_prefix_match("ושחרור", 2)
                .map(|c| c.surface.as_str())
                == Some("ו")
        );
    }
}
