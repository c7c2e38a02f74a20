//! Multi-word motifs: adjacent atomic tokens joined with `_`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub const SEPARATOR: char = '_';

/// A motif made of several atomic token renderings.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiwordToken {
    pub parts: Vec<String>,
}

impl fmt::Display for MultiwordToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str("_")?;
            }
            f.write_str(p)?;
        }
        Ok(())
    }
}

impl FromStr for MultiwordToken {
    type Err = core::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(MultiwordToken { parts: s.split(SEPARATOR).map(ToString::to_string).collect() })
    }
}

/// Frequency-based phrase merging parameters. A pair `(a, b)` merges when
/// `(count(ab) - delta) / (count(a) * count(b)) > threshold`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhraseParams {
    pub delta: f64,
    pub threshold: f64,
}

impl Default for PhraseParams {
    fn default() -> Self {
        PhraseParams { delta: 5.0, threshold: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiwordMode {
    /// Every contiguous n-gram, stride 1.
    Sliding,
    /// `n - 1` passes of greedy bigram merging.
    Phrase(PhraseParams),
}

/// All contiguous `n`-grams of `seq`, joined with `_`. Empty if `seq` is
/// shorter than `n`.
pub fn sliding_multiwords<S: AsRef<str>>(seq: &[S], n: usize) -> Vec<String> {
    if n == 0 || seq.len() < n {
        return Vec::new();
    }
    seq.windows(n)
        .map(|w| {
            let mut s = String::from(w[0].as_ref());
            for t in &w[1..] {
                s.push(SEPARATOR);
                s.push_str(t.as_ref());
            }
            s
        })
        .collect()
}

/// Multi-words for a single sequence. Phrase mode takes its counts from
/// `seq` alone; use [`phrase_multiwords`] to share counts across a corpus.
pub fn build_multiwords(seq: &[String], n: usize, mode: MultiwordMode) -> Vec<String> {
    match mode {
        MultiwordMode::Sliding => sliding_multiwords(seq, n),
        MultiwordMode::Phrase(p) => {
            if seq.len() < n {
                return Vec::new();
            }
            phrase_multiwords(&[seq.to_vec()], n, p).pop().unwrap_or_default()
        }
    }
}

/// Corpus-level phrase detection: `n - 1` passes, each counting unigrams
/// and bigrams over the current corpus and merging qualifying adjacent
/// pairs left to right.
pub fn phrase_multiwords(corpus: &[Vec<String>], n: usize, params: PhraseParams) -> Vec<Vec<String>> {
    let mut current: Vec<Vec<String>> = corpus.to_vec();
    for _ in 1..n.max(1) {
        let mut unigrams: BTreeMap<&str, u64> = BTreeMap::new();
        let mut bigrams: BTreeMap<(&str, &str), u64> = BTreeMap::new();
        for seq in &current {
            for t in seq {
                *unigrams.entry(t.as_str()).or_default() += 1;
            }
            for w in seq.windows(2) {
                *bigrams.entry((w[0].as_str(), w[1].as_str())).or_default() += 1;
            }
        }
        let score = |a: &str, b: &str| -> f64 {
            let ab = bigrams.get(&(a, b)).copied().unwrap_or(0) as f64;
            let ca = unigrams[a] as f64;
            let cb = unigrams[b] as f64;
            (ab - params.delta) / (ca * cb)
        };
        let next: Vec<Vec<String>> = current
            .iter()
            .map(|seq| {
                let mut out = Vec::with_capacity(seq.len());
                let mut i = 0;
                while i < seq.len() {
                    if i + 1 < seq.len() && score(&seq[i], &seq[i + 1]) > params.threshold {
                        let mut s = seq[i].clone();
                        s.push(SEPARATOR);
                        s.push_str(&seq[i + 1]);
                        out.push(s);
                        i += 2;
                    } else {
                        out.push(seq[i].clone());
                        i += 1;
                    }
                }
                out
            })
            .collect();
        current = next;
    }
    current
}
