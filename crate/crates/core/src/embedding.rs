//! Trained motif vectors and similarity queries.

use alloc::string::String;
use alloc::vec::Vec;

use crate::linalg::Matrix;
use crate::math::{dot, norm};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EmbeddingError {
    #[error("cosine of a zero vector")]
    ZeroVector,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unknown token `{token}`{}", hint_suffix(.hints))]
    UnknownToken { token: String, hints: Vec<String> },
    #[error("k must be at least 1")]
    ZeroK,
}

fn hint_suffix(hints: &[String]) -> String {
    if hints.is_empty() {
        String::new()
    } else {
        alloc::format!("; did you mean {}?", hints.join(", "))
    }
}

/// Input (`v_w`) and output (`v_c`) vectors, one row per vocabulary entry.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    pub input: Matrix,
    pub output: Matrix,
}

impl EmbeddingMatrix {
    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    pub fn len(&self) -> usize {
        self.input.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.input.rows() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.input.is_finite() && self.output.is_finite()
    }
}

pub fn cosine(a: &[f64], b: &[f64]) -> Result<f64, EmbeddingError> {
    if a.len() != b.len() {
        return Err(EmbeddingError::DimensionMismatch(a.len(), b.len()));
    }
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return Err(EmbeddingError::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

/// The `k` rows of `vectors` most cosine-similar to `token`'s row,
/// excluding the token itself. Zero rows are skipped; equal scores keep
/// index order.
pub fn most_similar(
    vectors: &Matrix,
    vocab: &Vocabulary,
    token: &str,
    k: usize,
) -> Result<Vec<(String, f64)>, EmbeddingError> {
    if k == 0 {
        return Err(EmbeddingError::ZeroK);
    }
    let Some(q) = vocab.get(token) else {
        return Err(EmbeddingError::UnknownToken {
            token: token.into(),
            hints: vocab.near_matches(token, 5).into_iter().map(String::from).collect(),
        });
    };
    let query = vectors.row(q as usize);
    let mut scored: Vec<(u32, f64)> = (0..vectors.rows() as u32)
        .filter(|&i| i != q)
        .filter_map(|i| cosine(query, vectors.row(i as usize)).ok().map(|c| (i, c)))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(scored
        .into_iter()
        .take(k)
        .map(|(i, c)| (String::from(vocab.token(i)), c))
        .collect())
}
