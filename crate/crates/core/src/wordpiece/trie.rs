//! Character tries for greedy longest-match lookup.

#[derive(Debug, Clone, Default)]
struct Node {
    children: Vec<(char, u32)>,
    token: Option<u32>,
}

#[derive(Debug, Clone)]
struct Trie {
    nodes: Vec<Node>,
}

impl Trie {
    fn new() -> Self {
        Trie {
            nodes: vec![Node::default()],
        }
    }

    fn insert(&mut self, key: &str, id: u32) {
        let mut at = 0usize;
        for c in key.chars() {
            at = match self.nodes[at].children.iter().find(|(k, _)| *k == c) {
                Some(&(_, next)) => next as usize,
                None => {
                    let next = self.nodes.len();
                    self.nodes.push(Node::default());
                    self.nodes[at].children.push((c, next as u32));
                    next
                }
            };
        }
        self.nodes[at].token.get_or_insert(id);
    }

    /// Longest key that prefixes `text`, as `(id, byte length)`.
    fn longest(&self, text: &str) -> Option<(u32, usize)> {
        let mut at = 0usize;
        let mut best = None;
        for (i, c) in text.char_indices() {
            match self.nodes[at].children.iter().find(|(k, _)| *k == c) {
                Some(&(_, next)) => at = next as usize,
                None => break,
            }
            if let Some(id) = self.nodes[at].token {
                best = Some((id, i + c.len_utf8()));
            }
        }
        best
    }
}

/// Word-initial and continuation tries over a vocabulary. Every token is a
/// candidate word-initial piece, spelled as is; continuation tokens are also
/// stored without their marker for non-initial lookup.
#[derive(Debug, Clone)]
pub(crate) struct GreedyMatcher {
    initial: Trie,
    continuation: Trie,
}

impl GreedyMatcher {
    pub(crate) fn new(tokens: &[String], marker: &str) -> Self {
        let mut initial = Trie::new();
        let mut continuation = Trie::new();
        for (id, token) in tokens.iter().enumerate() {
            initial.insert(token, id as u32);
            if let Some(rest) = token.strip_prefix(marker).filter(|rest| !rest.is_empty()) {
                continuation.insert(rest, id as u32);
            }
        }
        GreedyMatcher {
            initial,
            continuation,
        }
    }

    pub(crate) fn longest(&self, text: &str, initial: bool) -> Option<(u32, usize)> {
        if initial {
            self.initial.longest(text)
        } else {
            self.continuation.longest(text)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn longest_prefers_longer_keys() {
        let tokens: Vec<String> = ["a", "ab", "abc", "##b", "##bc"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let m = GreedyMatcher::new(&tokens, "##");
        assert_eq!(m.longest("abcd", true), Some((2, 3)));
        assert_eq!(m.longest("abd", true), Some((1, 2)));
        assert_eq!(m.longest("bcx", false), Some((4, 2)));
        assert_eq!(m.longest("bcx", true), None);
        assert_eq!(m.longest("", true), None);
        assert_eq!(m.longest("##bc", true), Some((4, 4)));
    }
}
