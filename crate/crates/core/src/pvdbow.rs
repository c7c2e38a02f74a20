//! PV-DBOW paragraph vectors: each document vector is trained to predict
//! the document's own tokens under the negative-sampling objective.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::math::{dot, log_sigmoid, sigmoid};
use crate::sampling::SamplingDist;
use crate::sgns::{draw_negatives, pair_update, Frozen, RowStore, Scratch, SgnsConfig, TrainError, TrainingReport};
use crate::vocab::Vocabulary;

/// Trained document vectors (one row per document, in input order) and the
/// token output matrix they were trained against.
#[derive(Debug, Clone, PartialEq)]
pub struct DocVectors {
    pub docs: Matrix,
    pub output: Matrix,
}

fn run_docs<D: RowStore, O: RowStore>(
    docs: &mut D,
    output: &mut O,
    corpus: &[Vec<u32>],
    dist: &SamplingDist,
    config: &SgnsConfig,
    rng: &mut ChaCha8Rng,
    row_of: impl Fn(usize) -> u32,
    mut next_lr: impl FnMut() -> f64,
) -> (u64, f64) {
    let mut scratch = Scratch::new(config.dim);
    let mut negs = Vec::with_capacity(config.negatives);
    let (mut pairs, mut objective) = (0u64, 0.0);
    for (d, tokens) in corpus.iter().enumerate() {
        for &t in tokens {
            let lr = next_lr();
            draw_negatives(dist, config.negatives, t, rng, &mut negs);
            objective += pair_update(docs, output, row_of(d), t, &negs, lr, &mut scratch);
            pairs += 1;
        }
    }
    (pairs, objective)
}

/// Trains one vector per document together with a shared output matrix.
/// Document rows start uniform in `±0.5/dim`, output rows at zero.
pub fn train_pvdbow(
    corpus: &[Vec<u32>],
    vocab: &Vocabulary,
    config: &SgnsConfig,
) -> Result<(DocVectors, TrainingReport), TrainError> {
    config.validate()?;
    let per_epoch: u64 = corpus.iter().map(|s| s.len() as u64).sum();
    if per_epoch == 0 {
        return Err(TrainError::EmptyCorpus);
    }
    let total = per_epoch * config.epochs as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut docs = Matrix::uniform(corpus.len(), config.dim, 0.5 / config.dim as f64, &mut rng);
    let mut output = Matrix::zeros(vocab.len(), config.dim);
    let dist = SamplingDist::new(vocab.counts(), config.power);
    let mut report = TrainingReport::default();
    let mut seen = 0u64;
    for epoch in 0..config.epochs {
        let (pairs, obj) = run_docs(&mut docs, &mut output, corpus, &dist, config, &mut rng, |d| d as u32, || {
            let lr = config.learning_rate(seen as f64 / total as f64);
            seen += 1;
            lr
        });
        let mean = obj / pairs as f64;
        if !mean.is_finite() || !docs.is_finite() || !output.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
        report.epoch_objective.push(mean);
    }
    Ok((DocVectors { docs, output }, report))
}

/// Vector for an unseen document, trained against a fixed output matrix.
/// `seed` makes the result reproducible per document.
pub fn infer_vector(
    tokens: &[u32],
    output: &Matrix,
    vocab: &Vocabulary,
    config: &SgnsConfig,
    seed: u64,
) -> Result<Vec<f64>, TrainError> {
    config.validate()?;
    if tokens.is_empty() {
        return Err(TrainError::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut doc = Matrix::uniform(1, config.dim, 0.5 / config.dim as f64, &mut rng);
    let dist = SamplingDist::new(vocab.counts(), config.power);
    let corpus = [tokens.to_vec()];
    let total = (tokens.len() * config.epochs) as u64;
    let mut seen = 0u64;
    let mut frozen = Frozen(output);
    for epoch in 0..config.epochs {
        let (_, obj) = run_docs(&mut doc, &mut frozen, &corpus, &dist, config, &mut rng, |_| 0, || {
            let lr = config.learning_rate(seen as f64 / total as f64);
            seen += 1;
            lr
        });
        if !obj.is_finite() || !doc.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
    }
    Ok(doc.into_vec())
}

/// Objective of one document: for each token position `i`,
/// `log σ(o_{t_i}·v_d) + Σ_{n ∈ negatives[i]} log σ(-o_n·v_d)`.
pub fn doc_objective(doc: &[f64], output: &Matrix, tokens: &[u32], negatives: &[Vec<u32>]) -> f64 {
    tokens
        .iter()
        .zip(negatives)
        .map(|(&t, negs)| {
            log_sigmoid(dot(output.row(t as usize), doc))
                + negs.iter().map(|&n| log_sigmoid(-dot(output.row(n as usize), doc))).sum::<f64>()
        })
        .sum()
}

/// Gradient of [`doc_objective`] with respect to the document vector and
/// the whole output matrix.
pub fn doc_gradient(doc: &[f64], output: &Matrix, tokens: &[u32], negatives: &[Vec<u32>]) -> (Vec<f64>, Matrix) {
    let mut d_doc = alloc::vec![0.0; doc.len()];
    let mut d_out = Matrix::zeros(output.rows(), output.cols());
    for (&t, negs) in tokens.iter().zip(negatives) {
        let targets = core::iter::once((t, true)).chain(negs.iter().map(|&n| (n, false)));
        for (row, positive) in targets {
            let s = dot(output.row(row as usize), doc);
            let g = if positive { 1.0 - sigmoid(s) } else { -sigmoid(s) };
            crate::math::axpy(g, output.row(row as usize), &mut d_doc);
            crate::math::axpy(g, doc, d_out.row_mut(row as usize));
        }
    }
    (d_doc, d_out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn shape_and_determinism() {
        let corpus = vec![vec![0u32, 1, 2, 1], vec![2, 2, 0], vec![1, 0]];
        let vocab = Vocabulary::build(&[vec!["a", "b", "c", "a", "b", "c"]], 1).unwrap();
        let cfg = SgnsConfig { dim: 6, epochs: 4, ..SgnsConfig::default() };
        let (a, _) = train_pvdbow(&corpus, &vocab, &cfg).unwrap();
        assert_eq!((a.docs.rows(), a.docs.cols()), (3, 6));
        let (b, _) = train_pvdbow(&corpus, &vocab, &cfg).unwrap();
        assert_eq!(a, b);
        let v = infer_vector(&[0, 1], &a.output, &vocab, &cfg, 9).unwrap();
        assert_eq!(v, infer_vector(&[0, 1], &a.output, &vocab, &cfg, 9).unwrap());
        assert_eq!(v.len(), 6);
    }

    #[test]
    fn empty_documents_rejected() {
        let vocab = Vocabulary::build(&[vec!["a"]], 1).unwrap();
        let cfg = SgnsConfig { dim: 2, ..SgnsConfig::default() };
        assert_eq!(train_pvdbow(&[vec![]], &vocab, &cfg), Err(TrainError::EmptyCorpus));
    }
}
