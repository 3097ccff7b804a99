//! WordPiece vocabulary training.
//!
//! Words start as characters (the first bare, the rest carrying the
//! continuation marker). Each iteration merges the adjacent pair with the
//! highest likelihood ratio `count(ab) / (count(a) * count(b))`; ties go to the
//! lexicographically smaller merged string. Scores are compared exactly with
//! integer cross-multiplication.
//!
//! The best pair is kept in a lazy max-heap. An entry is trusted only when its
//! recorded counts still match the live ones; whenever a pair's score can have
//! risen (new occurrences, or a constituent symbol losing occurrences) a fresh
//! entry is pushed, so stale entries only ever overestimate.

use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, BinaryHeap, HashMap, HashSet};
use std::rc::Rc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inventory::Inventory;
use crate::pretokenize::PreToken;

use super::vocab::{
    Vocabulary, DEFAULT_CONTINUATION_MARKER, DEFAULT_MAX_WORD_LENGTH, SPECIAL_TOKENS,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainerConfig {
    pub vocab_size: usize,
    pub min_pair_frequency: u64,
    pub max_word_length: usize,
    /// Reserved for sampling; training itself is deterministic.
    pub seed: u64,
    pub continuation_marker: String,
}

impl TrainerConfig {
    pub fn new(vocab_size: usize) -> Self {
        TrainerConfig {
            vocab_size,
            ..Default::default()
        }
    }
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            vocab_size: 32_000,
            min_pair_frequency: 2,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
            seed: 0,
            continuation_marker: DEFAULT_CONTINUATION_MARKER.to_owned(),
        }
    }
}

/// Frequencies of marked pre-token strings.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordCounts {
    counts: HashMap<String, u64>,
}

impl WordCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, word: &str, n: u64) {
        if let Some(c) = self.counts.get_mut(word) {
            *c += n;
        } else {
            self.counts.insert(word.to_owned(), n);
        }
    }

    pub fn add_pretokens<'a, I: IntoIterator<Item = &'a PreToken>>(&mut self, tokens: I) {
        for t in tokens {
            self.add(&t.marked(), 1);
        }
    }

    pub fn merge(&mut self, other: WordCounts) {
        if self.counts.len() < other.counts.len() {
            let mine = std::mem::replace(&mut self.counts, other.counts);
            for (w, n) in mine {
                *self.counts.entry(w).or_default() += n;
            }
        } else {
            for (w, n) in other.counts {
                *self.counts.entry(w).or_default() += n;
            }
        }
    }

    /// Counts the pre-tokens of every line in parallel shards. The reduction
    /// is a sum, so the result does not depend on the thread count.
    pub fn from_lines_par<S, F>(lines: &[S], pretokenize: F) -> Self
    where
        S: AsRef<str> + Sync,
        F: Fn(&str) -> Vec<PreToken> + Sync,
    {
        lines
            .par_iter()
            .fold(WordCounts::new, |mut acc, line| {
                acc.add_pretokens(&pretokenize(line.as_ref()));
                acc
            })
            .reduce(WordCounts::new, |mut a, b| {
                a.merge(b);
                a
            })
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn get(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(w, &n)| (w.as_str(), n))
    }
}

/// Trains a vocabulary on a pre-token stream.
pub fn train<I>(pretokens: I, config: &TrainerConfig) -> Result<Vocabulary>
where
    I: IntoIterator<Item = PreToken>,
{
    let mut counts = WordCounts::new();
    for t in pretokens {
        counts.add(&t.marked(), 1);
    }
    train_from_counts(&counts, config)
}

pub fn train_from_counts(counts: &WordCounts, config: &TrainerConfig) -> Result<Vocabulary> {
    Ok(run(counts, config)?.0)
}

/// Trains once at the largest size and truncates for the others; equal to
/// training each size separately. Output follows the order of `sizes`.
pub fn train_nested(
    counts: &WordCounts,
    config: &TrainerConfig,
    sizes: &[usize],
) -> Result<Vec<Vocabulary>> {
    let Some(&max) = sizes.iter().max() else {
        return Ok(Vec::new());
    };
    let (full, base) = run(
        counts,
        &TrainerConfig {
            vocab_size: max,
            ..config.clone()
        },
    )?;
    sizes
        .iter()
        .map(|&size| {
            if size < base {
                Err(infeasible(size, base))
            } else {
                full.truncated(size)
            }
        })
        .collect()
}

fn infeasible(size: usize, base: usize) -> Error {
    Error::Config(format!(
        "vocab_size {size} is smaller than the {base} special, affix and alphabet tokens"
    ))
}

type Pair = (u32, u32);

#[derive(Debug)]
struct Candidate {
    count: u64,
    left_count: u64,
    right_count: u64,
    merged: Rc<str>,
    pair: Pair,
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs =
            u128::from(self.count) * u128::from(other.left_count) * u128::from(other.right_count);
        let rhs =
            u128::from(other.count) * u128::from(self.left_count) * u128::from(self.right_count);
        lhs.cmp(&rhs)
            .then_with(|| other.merged.cmp(&self.merged))
            .then_with(|| other.pair.cmp(&self.pair))
    }
}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Candidate {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Candidate {}

struct PairStat {
    count: u64,
    merged: Rc<str>,
}

struct State<'a> {
    marker: &'a str,
    min_pair_frequency: u64,
    symbols: Vec<Rc<str>>,
    symbol_ids: HashMap<Rc<str>, u32>,
    symbol_counts: Vec<u64>,
    symbol_pairs: Vec<HashSet<Pair>>,
    words: Vec<Vec<u32>>,
    freqs: Vec<u64>,
    pairs: HashMap<Pair, PairStat>,
    pair_words: HashMap<Pair, Vec<u32>>,
    heap: BinaryHeap<Candidate>,
}

impl<'a> State<'a> {
    fn symbol(&mut self, s: &str) -> u32 {
        if let Some(&id) = self.symbol_ids.get(s) {
            return id;
        }
        let id = self.symbols.len() as u32;
        let rc: Rc<str> = Rc::from(s);
        self.symbols.push(Rc::clone(&rc));
        self.symbol_ids.insert(rc, id);
        self.symbol_counts.push(0);
        self.symbol_pairs.push(HashSet::new());
        id
    }

    fn merged_string(&self, (a, b): Pair) -> Rc<str> {
        let right = &self.symbols[b as usize];
        let right = right.strip_prefix(self.marker).unwrap_or(right);
        Rc::from(format!("{}{}", self.symbols[a as usize], right))
    }

    fn candidate(&self, pair: Pair) -> Option<Candidate> {
        let stat = self.pairs.get(&pair)?;
        (stat.count >= self.min_pair_frequency).then(|| Candidate {
            count: stat.count,
            left_count: self.symbol_counts[pair.0 as usize],
            right_count: self.symbol_counts[pair.1 as usize],
            merged: Rc::clone(&stat.merged),
            pair,
        })
    }

    fn is_current(&self, c: &Candidate) -> bool {
        self.pairs.get(&c.pair).is_some_and(|s| s.count == c.count)
            && self.symbol_counts[c.pair.0 as usize] == c.left_count
            && self.symbol_counts[c.pair.1 as usize] == c.right_count
    }

    fn push(&mut self, pair: Pair) {
        if let Some(c) = self.candidate(pair) {
            self.heap.push(c);
        }
    }

    fn adjust_pair(&mut self, pair: Pair, delta: i64) {
        if delta == 0 {
            return;
        }
        match self.pairs.entry(pair) {
            Entry::Occupied(mut e) => {
                let count = e.get().count as i64 + delta;
                debug_assert!(count >= 0);
                if count == 0 {
                    e.remove();
                    self.symbol_pairs[pair.0 as usize].remove(&pair);
                    self.symbol_pairs[pair.1 as usize].remove(&pair);
                    self.pair_words.remove(&pair);
                } else {
                    e.get_mut().count = count as u64;
                }
            }
            Entry::Vacant(e) => {
                debug_assert!(delta > 0);
                let merged = {
                    let right = &self.symbols[pair.1 as usize];
                    let right = right.strip_prefix(self.marker).unwrap_or(right);
                    Rc::from(format!("{}{}", self.symbols[pair.0 as usize], right))
                };
                e.insert(PairStat {
                    count: delta as u64,
                    merged,
                });
                self.symbol_pairs[pair.0 as usize].insert(pair);
                self.symbol_pairs[pair.1 as usize].insert(pair);
            }
        }
    }

    /// Applies the merge of `pair` everywhere; returns the merged symbol.
    fn merge(&mut self, pair: Pair) -> u32 {
        let (a, b) = pair;
        let merged = self.merged_string(pair);
        let new = self.symbol(&merged);
        let mut affected = self.pair_words.remove(&pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();

        let mut delta: HashMap<Pair, i64> = HashMap::new();
        let mut fresh: Vec<(Pair, u32)> = Vec::new();
        for w in affected {
            let word = &self.words[w as usize];
            if !word.windows(2).any(|p| p[0] == a && p[1] == b) {
                continue;
            }
            let f = self.freqs[w as usize] as i64;
            for p in word.windows(2) {
                *delta.entry((p[0], p[1])).or_default() -= f;
            }
            let mut out = Vec::with_capacity(word.len());
            let mut i = 0;
            let mut replaced = 0u64;
            while i < word.len() {
                if i + 1 < word.len() && word[i] == a && word[i + 1] == b {
                    out.push(new);
                    i += 2;
                    replaced += 1;
                } else {
                    out.push(word[i]);
                    i += 1;
                }
            }
            for p in out.windows(2) {
                *delta.entry((p[0], p[1])).or_default() += f;
                if p[0] == new || p[1] == new {
                    fresh.push(((p[0], p[1]), w));
                }
            }
            let moved = replaced * f as u64;
            self.symbol_counts[a as usize] -= moved;
            self.symbol_counts[b as usize] -= moved;
            self.symbol_counts[new as usize] += moved;
            self.words[w as usize] = out;
        }

        // Deterministic application order keeps pair-table growth reproducible.
        let mut delta: Vec<(Pair, i64)> = delta.into_iter().filter(|&(_, d)| d != 0).collect();
        delta.sort_unstable();
        let mut raised = Vec::new();
        for &(p, d) in &delta {
            self.adjust_pair(p, d);
            if d > 0 {
                raised.push(p);
            }
        }
        for (p, w) in fresh {
            if self.pairs.contains_key(&p) {
                self.pair_words.entry(p).or_default().push(w);
            }
        }

        let mut to_push: BTreeSet<Pair> = raised.into_iter().collect();
        to_push.extend(self.symbol_pairs[a as usize].iter().copied());
        to_push.extend(self.symbol_pairs[b as usize].iter().copied());
        for p in to_push {
            self.push(p);
        }
        self.maybe_compact();
        new
    }

    fn maybe_compact(&mut self) {
        if self.heap.len() > 4 * self.pairs.len() + 100_000 {
            let mut live: Vec<Pair> = self.pairs.keys().copied().collect();
            live.sort_unstable();
            self.heap.clear();
            for p in live {
                self.push(p);
            }
        }
    }
}

/// Returns the trained vocabulary and the number of tokens present before
/// the first merge.
fn run(counts: &WordCounts, config: &TrainerConfig) -> Result<(Vocabulary, usize)> {
    if counts.is_empty() {
        return Err(Error::Config("training stream is empty".into()));
    }
    if config.continuation_marker.is_empty() {
        return Err(Error::Config(
            "continuation marker must be non-empty".into(),
        ));
    }
    let marker = config.continuation_marker.as_str();
    let seeded = Inventory::builtin().marked_affix_atoms();
    let seeded_set: HashSet<&str> = seeded.iter().map(String::as_str).collect();

    let mut entries: Vec<(&str, u64)> = counts
        .iter()
        .filter(|(w, _)| !seeded_set.contains(w))
        .filter(|(w, _)| w.chars().count() <= config.max_word_length)
        .collect();
    entries.sort_unstable();

    let alphabet: BTreeSet<char> = entries.iter().flat_map(|(w, _)| w.chars()).collect();

    let mut tokens: Vec<String> = SPECIAL_TOKENS.iter().map(|s| (*s).to_owned()).collect();
    let mut in_vocab: HashSet<String> = tokens.iter().cloned().collect();
    let mut add = |t: String, tokens: &mut Vec<String>| {
        if in_vocab.insert(t.clone()) {
            tokens.push(t);
            true
        } else {
            false
        }
    };
    for a in &seeded {
        add(a.clone(), &mut tokens);
    }
    for &c in &alphabet {
        add(c.to_string(), &mut tokens);
    }
    for &c in &alphabet {
        add(format!("{marker}{c}"), &mut tokens);
    }
    let base = tokens.len();
    if config.vocab_size < base {
        return Err(infeasible(config.vocab_size, base));
    }

    let mut state = State {
        marker,
        min_pair_frequency: config.min_pair_frequency.max(1),
        symbols: Vec::new(),
        symbol_ids: HashMap::new(),
        symbol_counts: Vec::new(),
        symbol_pairs: Vec::new(),
        words: Vec::with_capacity(entries.len()),
        freqs: Vec::with_capacity(entries.len()),
        pairs: HashMap::new(),
        pair_words: HashMap::new(),
        heap: BinaryHeap::new(),
    };
    for &c in &alphabet {
        state.symbol(&c.to_string());
        state.symbol(&format!("{marker}{c}"));
    }
    for (w, n) in &entries {
        let word: Vec<u32> = w
            .chars()
            .enumerate()
            .map(|(i, c)| {
                let s = if i == 0 {
                    c.to_string()
                } else {
                    format!("{marker}{c}")
                };
                state.symbol_ids[s.as_str()]
            })
            .collect();
        for &s in &word {
            state.symbol_counts[s as usize] += n;
        }
        state.words.push(word);
        state.freqs.push(*n);
    }

    let (pair_counts, pair_words) = count_pairs(&state.words, &state.freqs);
    let mut initial: Vec<(Pair, u64)> = pair_counts.into_iter().collect();
    initial.sort_unstable();
    for (p, n) in initial {
        state.adjust_pair(p, n as i64);
    }
    state.pair_words = pair_words;
    let mut live: Vec<Pair> = state.pairs.keys().copied().collect();
    live.sort_unstable();
    for p in live {
        state.push(p);
    }

    while tokens.len() < config.vocab_size {
        let Some(top) = state.heap.pop() else {
            break;
        };
        if !state.is_current(&top) {
            state.push(top.pair);
            continue;
        }
        let new = state.merge(top.pair);
        add(state.symbols[new as usize].to_string(), &mut tokens);
    }

    let vocab =
        Vocabulary::from_tokens(tokens, marker)?.with_max_word_length(config.max_word_length);
    Ok((vocab, base))
}

/// Initial pair statistics, counted over word shards in parallel.
fn count_pairs(words: &[Vec<u32>], freqs: &[u64]) -> (HashMap<Pair, u64>, HashMap<Pair, Vec<u32>>) {
    const SHARD: usize = 4096;
    words
        .par_chunks(SHARD)
        .enumerate()
        .map(|(shard, chunk)| {
            let mut counts: HashMap<Pair, u64> = HashMap::new();
            let mut where_: HashMap<Pair, Vec<u32>> = HashMap::new();
            for (offset, word) in chunk.iter().enumerate() {
                let w = (shard * SHARD + offset) as u32;
                for p in word.windows(2) {
                    let pair = (p[0], p[1]);
                    *counts.entry(pair).or_default() += freqs[w as usize];
                    let list = where_.entry(pair).or_default();
                    if list.last() != Some(&w) {
                        list.push(w);
                    }
                }
            }
            (counts, where_)
        })
        .reduce(
            || (HashMap::new(), HashMap::new()),
            |(mut ca, mut wa), (cb, wb)| {
                for (p, n) in cb {
                    *ca.entry(p).or_default() += n;
                }
                for (p, ws) in wb {
                    wa.entry(p).or_default().extend(ws);
                }
                (ca, wa)
            },
        )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(words: &[(&str, u64)]) -> WordCounts {
        let mut c = WordCounts::new();
        for (w, n) in words {
            c.add(w, *n);
        }
        c
    }

    fn base_size(c: &WordCounts) -> usize {
        let alphabet: BTreeSet<char> = c.iter().flat_map(|(w, _)| w.chars()).collect();
        SPECIAL_TOKENS.len() + 21 + 2 * alphabet.len()
    }

    #[test]
    fn single_merge_learns_the_word() {
        let c = counts(&[("ab", 10)]);
        let v = train_from_counts(&c, &TrainerConfig::new(base_size(&c) + 1)).unwrap();
        assert_eq!(v.tokens().last().unwrap(), "ab");
        assert!(v.contains("a") && v.contains("##a") && v.contains("b") && v.contains("##b"));
    }

    #[test]
    fn ties_go_to_smaller_merged_string() {
        // "ab" and "cd" have identical statistics
        let c = counts(&[("cd", 5), ("ab", 5)]);
        let v = train_from_counts(&c, &TrainerConfig::new(base_size(&c) + 1)).unwrap();
        assert_eq!(v.tokens().last().unwrap(), "ab");
    }

    #[test]
    fn likelihood_ratio_beats_raw_frequency() {
        // (x,##y) is rarer than (a,##b) but x and y never occur apart.
        let c = counts(&[("ab", 20), ("ac", 40), ("cb", 40), ("xy", 3)]);
        let v = train_from_counts(&c, &TrainerConfig::new(base_size(&c) + 1)).unwrap();
        assert_eq!(v.tokens().last().unwrap(), "xy");
    }

    #[test]
    fn min_pair_frequency_stops_training() {
        let c = counts(&[("ab", 1)]);
        let v = train_from_counts(&c, &TrainerConfig::new(base_size(&c) + 10)).unwrap();
        assert_eq!(v.len(), base_size(&c));
    }

    #[test]
    fn infeasible_size_is_config_error() {
        let c = counts(&[("ab", 3)]);
        assert!(matches!(
            train_from_counts(&c, &TrainerConfig::new(10)),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            train_from_counts(&WordCounts::new(), &TrainerConfig::new(1000)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn seeded_atoms_are_present_and_not_relearned() {
        let c = counts(&[("ו+", 100), ("חרור", 10)]);
        let v = train_from_counts(&c, &TrainerConfig::new(200)).unwrap();
        assert_eq!(v.seeded_affixes().len(), 21);
        assert!(!v.contains("##+"));
        assert_eq!(v.tokens()[5], "מש+");
    }

    #[test]
    fn merges_can_reach_an_existing_string() {
        // "abc" arises from both a+##bc and ab+##c
        let c = counts(&[("abc", 10), ("bc", 10), ("ab", 10), ("abd", 5)]);
        let v = train_from_counts(&c, &TrainerConfig::new(500)).unwrap();
        let abc = v.tokens().iter().filter(|t| *t == "abc").count();
        assert_eq!(abc, 1);
    }

    #[test]
    fn nested_training_equals_direct() {
        let c = counts(&[
            ("שחרור", 9),
            ("ששחרור", 4),
            ("חרור", 7),
            ("דבר", 5),
            ("דברים", 3),
            ("ספרים", 3),
            ("ספר", 6),
        ]);
        let base = base_size(&c);
        let sizes = [base + 3, base + 9, base + 6];
        let nested = train_nested(&c, &TrainerConfig::default(), &sizes).unwrap();
        for (size, v) in sizes.iter().zip(&nested) {
            let direct = train_from_counts(&c, &TrainerConfig::new(*size)).unwrap();
            assert_eq!(&direct, v);
        }
        assert!(train_nested(&c, &TrainerConfig::default(), &[base - 1]).is_err());
    }

    #[test]
    fn word_counts_merge_is_a_sum() {
        let mut a = counts(&[("x", 1), ("y", 2)]);
        a.merge(counts(&[("y", 3), ("z", 1)]));
        assert_eq!((a.get("x"), a.get("y"), a.get("z")), (1, 5, 1));
    }
}
