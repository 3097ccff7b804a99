//! Seeded synthetic Hebrew-like corpus.
//!
//! Hosts are random letter strings drawn with rough Hebrew letter
//! frequencies and a Zipfian word distribution. Words are formed by joining
//! hosts with prefix stacks and suffixes, and sentences are sprinkled with
//! punctuation, digits, Latin words and stray whitespace. Output is a pure
//! function of the configuration and seeds.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Zipf;

use crate::hebrew;
use crate::inventory::Inventory;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub lexicon_size: usize,
    pub zipf_exponent: f64,
    /// Probability that a word carries a prefix stack.
    pub prefix_rate: f64,
    /// Probability that a word carries a suffix.
    pub suffix_rate: f64,
    pub min_sentence_words: usize,
    pub max_sentence_words: usize,
    /// Punctuation, digits, Latin words and irregular spacing.
    pub noise: bool,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            lexicon_size: 40_000,
            zipf_exponent: 1.0,
            prefix_rate: 0.35,
            suffix_rate: 0.2,
            min_sentence_words: 4,
            max_sentence_words: 18,
            noise: true,
        }
    }
}

const LETTER_WEIGHTS: [(char, u32); 22] = [
    ('י', 110),
    ('ו', 100),
    ('ה', 90),
    ('ל', 70),
    ('מ', 70),
    ('א', 60),
    ('ר', 60),
    ('ב', 50),
    ('ת', 50),
    ('ש', 50),
    ('נ', 40),
    ('ד', 30),
    ('ח', 30),
    ('כ', 30),
    ('ע', 30),
    ('ק', 20),
    ('פ', 20),
    ('ס', 20),
    ('ג', 15),
    ('ז', 10),
    ('ט', 10),
    ('צ', 10),
];

const LATIN: [&str; 8] = [
    "NATO", "iPhone", "COVID", "Google", "OK", "UN", "BBC", "Tel-Aviv",
];

/// Random host strings with final-form letters in final position.
pub fn random_hosts(n: usize, seed: u64) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = WeightedIndex::new(LETTER_WEIGHTS.iter().map(|(_, w)| *w)).expect("weights");
    let lengths = WeightedIndex::new([0u32, 0, 6, 18, 24, 20, 12, 6]).expect("weights");
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while out.len() < n && attempts < n * 50 {
        attempts += 1;
        let len = lengths.sample(&mut rng);
        let mut host: String = (0..len)
            .map(|_| LETTER_WEIGHTS[letters.sample(&mut rng)].0)
            .collect();
        if let Some(last) = host.pop() {
            host.push(hebrew::to_final(last));
        }
        if seen.insert(host.clone()) {
            out.push(host);
        }
    }
    out
}

/// Sentence generator over a fixed lexicon.
pub struct SyntheticCorpus {
    config: SyntheticConfig,
    hosts: Vec<String>,
    zipf: Zipf<f64>,
    combinations: Vec<String>,
    combination_weights: WeightedIndex<f64>,
    suffixes: Vec<String>,
    rng: ChaCha8Rng,
}

impl SyntheticCorpus {
    /// The lexicon depends only on `lexicon_seed`; `sample_seed` drives
    /// sentence sampling, so train and held-out text can share a lexicon.
    pub fn new(config: SyntheticConfig, lexicon_seed: u64, sample_seed: u64) -> Self {
        let hosts = random_hosts(config.lexicon_size.max(1), lexicon_seed);
        let zipf = Zipf::new(hosts.len() as u64, config.zipf_exponent).expect("valid zipf");
        let inventory = Inventory::builtin();
        let combinations: Vec<String> = inventory
            .combinations()
            .iter()
            .map(|c| c.surface.clone())
            .collect();
        let combination_weights =
            WeightedIndex::new(inventory.combinations().iter().map(
                |c| match c.morphemes().len() {
                    1 => 8.0,
                    2 => 1.5,
                    3 => 0.3,
                    _ => 0.05,
                },
            ))
            .expect("weights");
        let suffixes = inventory
            .suffixes()
            .iter()
            .map(|s| s.surface.clone())
            .collect();
        SyntheticCorpus {
            config,
            hosts,
            zipf,
            combinations,
            combination_weights,
            suffixes,
            rng: ChaCha8Rng::seed_from_u64(sample_seed),
        }
    }

    pub fn hosts(&self) -> &[String] {
        &self.hosts
    }

    fn host(&mut self) -> &str {
        let rank = self.zipf.sample(&mut self.rng) as usize;
        &self.hosts[rank.clamp(1, self.hosts.len()) - 1]
    }

    /// One inflected Hebrew word.
    pub fn word(&mut self) -> String {
        let host = self.host().to_owned();
        let mut word = String::new();
        if self.rng.gen_bool(self.config.prefix_rate) {
            let i = self.combination_weights.sample(&mut self.rng);
            word.push_str(&self.combinations[i]);
        }
        if self.rng.gen_bool(self.config.suffix_rate) {
            let s = &self.suffixes[self.rng.gen_range(0..self.suffixes.len())];
            word.push_str(&hebrew::open_final(&host));
            word.push_str(s);
        } else {
            word.push_str(&host);
        }
        word
    }

    pub fn sentence(&mut self) -> String {
        let n = self.rng.gen_range(
            self.config.min_sentence_words
                ..=self
                    .config
                    .max_sentence_words
                    .max(self.config.min_sentence_words),
        );
        let mut out = String::new();
        for i in 0..n {
            if i > 0 {
                out.push(' ');
                if self.config.noise && self.rng.gen_bool(0.02) {
                    out.push(if self.rng.gen_bool(0.5) { ' ' } else { '\t' });
                }
            }
            if !self.config.noise {
                out.push_str(&self.word());
                continue;
            }
            let roll: f64 = self.rng.gen();
            if roll < 0.02 {
                let digits = self.rng.gen_range(1..=4);
                for _ in 0..digits {
                    out.push(char::from(b'0' + self.rng.gen_range(0..10u8)));
                }
            } else if roll < 0.03 {
                out.push_str(LATIN[self.rng.gen_range(0..LATIN.len())]);
            } else if roll < 0.04 {
                out.push('"');
                out.push_str(&self.word());
                out.push('"');
            } else if roll < 0.05 {
                let (a, b) = (self.word(), self.word());
                out.push_str(&a);
                out.push('־');
                out.push_str(&b);
            } else if roll < 0.055 {
                let w = self.word();
                let mut chars: Vec<char> = w.chars().collect();
                if chars.len() >= 2 {
                    let last = chars.pop().unwrap();
                    out.extend(chars);
                    out.push('״');
                    out.push(last);
                } else {
                    out.push_str(&w);
                }
            } else {
                out.push_str(&self.word());
            }
            if i + 1 < n && self.rng.gen_bool(0.07) {
                out.push(',');
            }
        }
        if self.config.noise {
            let end = match self.rng.gen_range(0..10) {
                0 => "?",
                1 => "!",
                2 => "",
                _ => ".",
            };
            out.push_str(end);
            if self.rng.gen_bool(0.01) {
                out.insert(0, ' ');
            }
        }
        out
    }

    pub fn lines(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.sentence()).collect()
    }

    /// Sentences until their UTF-8 size (with newlines) reaches `bytes`.
    pub fn lines_with_bytes(&mut self, bytes: usize) -> Vec<String> {
        let mut out = Vec::new();
        let mut total = 0;
        while total < bytes {
            let s = self.sentence();
            total += s.len() + 1;
            out.push(s);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = SyntheticCorpus::new(SyntheticConfig::default(), 1, 2).lines(50);
        let b = SyntheticCorpus::new(SyntheticConfig::default(), 1, 2).lines(50);
        assert_eq!(a, b);
        let c = SyntheticCorpus::new(SyntheticConfig::default(), 1, 3).lines(50);
        assert_ne!(a, c);
    }

    #[test]
    fn hosts_are_hebrew_with_final_forms_last() {
        for h in random_hosts(500, 7) {
            assert!(hebrew::is_hebrew_word(&h));
            let n = h.chars().count();
            assert!((2..=7).contains(&n));
            assert!(h.chars().take(n - 1).all(|c| !hebrew::is_final_form(c)));
        }
    }

    #[test]
    fn byte_budget_is_met() {
        let lines = SyntheticCorpus::new(SyntheticConfig::default(), 1, 2).lines_with_bytes(10_000);
        let total: usize = lines.iter().map(|l| l.len() + 1).sum();
        assert!(total >= 10_000);
        assert!(total < 10_000 + 1_000);
    }
}
