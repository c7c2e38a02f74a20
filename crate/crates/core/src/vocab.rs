//! Token vocabulary with frequency pruning.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VocabError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("no token reaches min_count {0}")]
    EmptyVocabulary(u64),
    #[error("inconsistent vocabulary: {0}")]
    Inconsistent(&'static str),
}

/// Bijection between retained tokens and indices `0..len`, ordered by
/// descending count and then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    index: BTreeMap<String, u32>,
    tokens: Vec<String>,
    counts: Vec<u64>,
    min_count: u64,
}

impl Vocabulary {
    /// Counts tokens over the corpus and keeps those seen at least
    /// `min_count` times.
    pub fn build<S: AsRef<str>>(corpus: &[Vec<S>], min_count: u64) -> Result<Self, VocabError> {
        if corpus.iter().all(|s| s.is_empty()) {
            return Err(VocabError::EmptyCorpus);
        }
        let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
        for t in corpus.iter().flatten() {
            *counts.entry(t.as_ref()).or_default() += 1;
        }
        let mut kept: Vec<(&str, u64)> =
            counts.into_iter().filter(|&(_, c)| c >= min_count).collect();
        if kept.is_empty() {
            return Err(VocabError::EmptyVocabulary(min_count));
        }
        // BTreeMap iteration is already lexicographic, so a stable sort on
        // count alone keeps the tie order.
        kept.sort_by(|a, b| b.1.cmp(&a.1));
        let tokens: Vec<String> = kept.iter().map(|(t, _)| String::from(*t)).collect();
        let counts = kept.iter().map(|&(_, c)| c).collect();
        Self::from_parts(tokens, counts, min_count)
    }

    /// Rebuilds a vocabulary from tokens listed in index order.
    pub fn from_parts(tokens: Vec<String>, counts: Vec<u64>, min_count: u64) -> Result<Self, VocabError> {
        if tokens.len() != counts.len() {
            return Err(VocabError::Inconsistent("token and count lists differ in length"));
        }
        if tokens.is_empty() {
            return Err(VocabError::EmptyVocabulary(min_count));
        }
        if counts.iter().any(|&c| c < min_count) {
            return Err(VocabError::Inconsistent("token below min_count"));
        }
        let mut index = BTreeMap::new();
        for (i, t) in tokens.iter().enumerate() {
            if index.insert(t.clone(), i as u32).is_some() {
                return Err(VocabError::Inconsistent("duplicate token"));
            }
        }
        Ok(Vocabulary { index, tokens, counts, min_count })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    pub fn get(&self, token: &str) -> Option<u32> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: u32) -> &str {
        &self.tokens[index as usize]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn count(&self, index: u32) -> u64 {
        self.counts[index as usize]
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Maps a token sequence to indices, dropping out-of-vocabulary tokens.
    pub fn encode<S: AsRef<str>>(&self, seq: &[S]) -> Vec<u32> {
        seq.iter().filter_map(|t| self.get(t.as_ref())).collect()
    }

    /// Vocabulary tokens within edit distance 2 of `query`, closest first.
    pub fn near_matches(&self, query: &str, limit: usize) -> Vec<&str> {
        let mut hits: Vec<(usize, &str)> = self
            .tokens
            .iter()
            .filter_map(|t| {
                let d = edit_distance(query, t);
                (d <= 2).then_some((d, t.as_str()))
            })
            .collect();
        hits.sort();
        hits.into_iter().take(limit).map(|(_, t)| t).collect()
    }
}

/// Levenshtein distance over chars.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, ca) in a.chars().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn min_count_prunes() {
        let v = Vocabulary::build(&[vec!["x", "x", "y"]], 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.get("x"), Some(0));
        assert_eq!(v.count(0), 2);
        assert_eq!(v.get("y"), None);
        assert_eq!(v.encode(&["y", "x", "y"]), [0]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let v = Vocabulary::build(&[vec!["b", "a", "b", "a"]], 1).unwrap();
        assert_eq!(v.get("a"), Some(0));
        assert_eq!(v.get("b"), Some(1));
        let v = Vocabulary::build(&[vec!["b", "a", "b"]], 1).unwrap();
        assert_eq!(v.tokens(), ["b", "a"]);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(Vocabulary::build(&[vec!["z"]], 2), Err(VocabError::EmptyVocabulary(2)));
        let empty: [Vec<&str>; 0] = [];
        assert_eq!(Vocabulary::build(&empty, 1), Err(VocabError::EmptyCorpus));
    }

    #[test]
    fn edit_distance_hints() {
        assert_eq!(edit_distance("21_20", "21_21"), 1);
        assert_eq!(edit_distance("", "abc"), 3);
        let v = Vocabulary::build(&[vec!["21_20", "21_21", "50_71"]], 1).unwrap();
        assert_eq!(v.near_matches("21_2", 5), ["21_20", "21_21"]);
    }
}
