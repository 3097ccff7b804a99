//! Reference implementations used as test oracles. They share no matching
//! code with the library: affix tables are restated here and every search is
//! exhaustive.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub const CONJUNCTIONS: [&str; 2] = ["", "ו"];
pub const SUBORDINATORS: [&str; 4] = ["", "ש", "כש", "מש"];
pub const PREPOSITIONS: [&str; 5] = ["", "מ", "ב", "ל", "כ"];
pub const ARTICLES: [&str; 2] = ["", "ה"];
pub const SUFFIXES: [&str; 11] = ["י", "ך", "ה", "ו", "נו", "כן", "כם", "ן", "הן", "ם", "הם"];

/// Every slot assignment, filtered by the grammar's two constraints.
pub fn brute_force_prefix_stacks() -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for c in CONJUNCTIONS {
        for s in SUBORDINATORS {
            for p in PREPOSITIONS {
                for a in ARTICLES {
                    let stack = format!("{c}{s}{p}{a}");
                    if stack.is_empty() {
                        continue;
                    }
                    if !a.is_empty() && matches!(p, "ב" | "ל" | "כ") {
                        continue;
                    }
                    out.insert(stack);
                }
            }
        }
    }
    out
}

/// Tries every (prefix end, suffix start) pair and keeps the one with the
/// longest prefix stack, then the longest suffix, leaving a host of at least
/// `min_host` characters. Returns (prefix, host, suffix).
pub fn brute_force_split(word: &str, min_host: usize) -> (String, String, String) {
    let stacks = brute_force_prefix_stacks();
    let suffixes: HashSet<&str> = SUFFIXES.into_iter().collect();
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let s = |a: usize, b: usize| chars[a..b].iter().collect::<String>();
    let mut best_prefix = 0;
    for i in 0..=n {
        if (i == 0 || stacks.contains(&s(0, i))) && n - i >= min_host {
            best_prefix = i;
        }
    }
    let mut best_suffix = n;
    for j in (best_prefix..=n).rev() {
        if (j == n || suffixes.contains(s(j, n).as_str())) && j - best_prefix >= min_host {
            best_suffix = j;
        }
    }
    (
        s(0, best_prefix),
        s(best_prefix, best_suffix),
        s(best_suffix, n),
    )
}

/// Exhaustive greedy longest-match over a plain token set. `None` means the
/// word maps to the unknown token.
pub fn naive_greedy(
    word: &str,
    tokens: &HashSet<String>,
    marker: &str,
    max_chars: usize,
) -> Option<Vec<String>> {
    let chars: Vec<char> = word.chars().collect();
    if chars.len() > max_chars {
        return None;
    }
    let mut out = Vec::new();
    let mut start = 0;
    while start < chars.len() {
        let mut found = None;
        for end in (start + 1..=chars.len()).rev() {
            let piece: String = chars[start..end].iter().collect();
            let candidate = if start == 0 {
                piece
            } else {
                format!("{marker}{piece}")
            };
            if tokens.contains(&candidate) {
                found = Some((candidate, end));
                break;
            }
        }
        let (piece, end) = found?;
        out.push(piece);
        start = end;
    }
    Some(out)
}
