//! Skip-gram with negative sampling.
//!
//! For a target `w` and an observed context `c` the objective is
//!
//! ```text
//! log σ(v_c · v_w) + Σ_{n ∈ negatives} log σ(-v_n · v_w)
//! ```
//!
//! and training ascends it by SGD, one pair at a time, with `v_w` taken from
//! the input matrix and `v_c`, `v_n` from the output matrix. The same update
//! drives PV-DBOW, where a document vector plays the part of `v_w`.

use alloc::vec;
use alloc::vec::Vec;
#[cfg(target_has_atomic = "64")]
use core::sync::atomic::{AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::EmbeddingMatrix;
use crate::linalg::Matrix;
use crate::math::{dot, log_sigmoid, sigmoid};
use crate::sampling::SamplingDist;
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq)]
pub struct SgnsConfig {
    pub dim: usize,
    /// Maximum distance between target and context.
    pub window: usize,
    /// When set, each target draws its window uniformly from `1..=window`.
    pub shrink_window: bool,
    pub negatives: usize,
    pub epochs: usize,
    pub lr_start: f64,
    pub lr_end: f64,
    pub power: f64,
    pub seed: u64,
}

impl Default for SgnsConfig {
    fn default() -> Self {
        SgnsConfig {
            dim: 150,
            window: 4,
            shrink_window: true,
            negatives: 5,
            epochs: 10,
            lr_start: 0.025,
            lr_end: 0.0001,
            power: 0.75,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TrainError {
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("training corpus has no usable tokens")]
    EmptyCorpus,
    #[error("non-finite objective in epoch {epoch}; the learning rate is probably too high")]
    Diverged { epoch: usize },
}

impl SgnsConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.dim == 0 {
            return Err(TrainError::Config("dim must be at least 1"));
        }
        if self.window == 0 {
            return Err(TrainError::Config("window must be at least 1"));
        }
        if self.negatives == 0 {
            return Err(TrainError::Config("negatives must be at least 1"));
        }
        if !(self.lr_start > 0.0 && self.lr_end >= 0.0 && self.lr_start.is_finite()) {
            return Err(TrainError::Config("learning rates must be positive and finite"));
        }
        Ok(())
    }

    /// Linearly decayed learning rate at `progress ∈ [0, 1]`.
    pub fn learning_rate(&self, progress: f64) -> f64 {
        let lr = self.lr_start - (self.lr_start - self.lr_end) * progress;
        lr.max(self.lr_end)
    }
}

/// Row-addressable parameter storage. Implemented for plain matrices and for
/// shared references to [`AtomicMatrix`], which lets several workers update
/// the same parameters without locks.
pub trait RowStore {
    fn dim(&self) -> usize;
    fn read(&self, row: usize, out: &mut [f64]);
    /// `row += scale * delta`
    fn add(&mut self, row: usize, scale: f64, delta: &[f64]);
}

impl RowStore for Matrix {
    fn dim(&self) -> usize {
        self.cols()
    }

    fn read(&self, row: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(row));
    }

    fn add(&mut self, row: usize, scale: f64, delta: &[f64]) {
        crate::math::axpy(scale, delta, self.row_mut(row));
    }
}

/// A read-only view; writes are dropped. Used when inferring a new document
/// vector against a fixed output matrix.
pub struct Frozen<'a>(pub &'a Matrix);

impl RowStore for Frozen<'_> {
    fn dim(&self) -> usize {
        self.0.cols()
    }

    fn read(&self, row: usize, out: &mut [f64]) {
        out.copy_from_slice(self.0.row(row));
    }

    fn add(&mut self, _row: usize, _scale: f64, _delta: &[f64]) {}
}

/// f64 matrix stored as relaxed atomics. Concurrent read-modify-write
/// sequences may interleave, so updates can be lost; results of parallel
/// training are not reproducible.
#[cfg(target_has_atomic = "64")]
#[derive(Debug)]
pub struct AtomicMatrix {
    cols: usize,
    data: Vec<AtomicU64>,
}

#[cfg(target_has_atomic = "64")]
impl AtomicMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        AtomicMatrix {
            cols: m.cols(),
            data: m.as_slice().iter().map(|x| AtomicU64::new(x.to_bits())).collect(),
        }
    }

    pub fn to_matrix(&self) -> Matrix {
        let rows = if self.cols == 0 { 0 } else { self.data.len() / self.cols };
        Matrix::from_vec(
            rows,
            self.cols,
            self.data.iter().map(|a| f64::from_bits(a.load(Ordering::Relaxed))).collect(),
        )
    }
}

#[cfg(target_has_atomic = "64")]
impl RowStore for &AtomicMatrix {
    fn dim(&self) -> usize {
        self.cols
    }

    fn read(&self, row: usize, out: &mut [f64]) {
        let base = row * self.cols;
        for (o, a) in out.iter_mut().zip(&self.data[base..base + self.cols]) {
            *o = f64::from_bits(a.load(Ordering::Relaxed));
        }
    }

    fn add(&mut self, row: usize, scale: f64, delta: &[f64]) {
        let base = row * self.cols;
        for (a, d) in self.data[base..base + self.cols].iter().zip(delta) {
            let v = f64::from_bits(a.load(Ordering::Relaxed)) + scale * d;
            a.store(v.to_bits(), Ordering::Relaxed);
        }
    }
}

/// Objective of one positive pair and its negatives.
pub fn pair_objective(v_w: &[f64], v_c: &[f64], negatives: &[&[f64]]) -> f64 {
    log_sigmoid(dot(v_c, v_w)) + negatives.iter().map(|v_n| log_sigmoid(-dot(v_n, v_w))).sum::<f64>()
}

/// Gradient of [`pair_objective`] with respect to `v_w`, `v_c` and each
/// negative, in that order.
pub fn pair_gradient(v_w: &[f64], v_c: &[f64], negatives: &[&[f64]]) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let g_pos = 1.0 - sigmoid(dot(v_c, v_w));
    let mut d_w: Vec<f64> = v_c.iter().map(|x| g_pos * x).collect();
    let d_c: Vec<f64> = v_w.iter().map(|x| g_pos * x).collect();
    let d_n = negatives
        .iter()
        .map(|v_n| {
            let g = -sigmoid(dot(v_n, v_w));
            crate::math::axpy(g, v_n, &mut d_w);
            v_w.iter().map(|x| g * x).collect()
        })
        .collect();
    (d_w, d_c, d_n)
}

/// Scratch buffers reused across pair updates.
#[derive(Debug, Clone)]
pub struct Scratch {
    v_w: Vec<f64>,
    v_t: Vec<f64>,
    acc: Vec<f64>,
}

impl Scratch {
    pub fn new(dim: usize) -> Self {
        Scratch { v_w: vec![0.0; dim], v_t: vec![0.0; dim], acc: vec![0.0; dim] }
    }
}

/// One SGD ascent step on the pair objective. Output rows are updated as
/// they are visited; the input row receives its accumulated gradient at the
/// end. Returns the objective evaluated before the update.
pub fn pair_update<I: RowStore, O: RowStore>(
    input: &mut I,
    output: &mut O,
    w: u32,
    c: u32,
    negatives: &[u32],
    lr: f64,
    scratch: &mut Scratch,
) -> f64 {
    input.read(w as usize, &mut scratch.v_w);
    scratch.acc.iter_mut().for_each(|x| *x = 0.0);
    let mut objective = 0.0;
    let targets = core::iter::once((c, true)).chain(negatives.iter().map(|&n| (n, false)));
    for (t, positive) in targets {
        output.read(t as usize, &mut scratch.v_t);
        let s = dot(&scratch.v_t, &scratch.v_w);
        let (g, obj) = if positive {
            (1.0 - sigmoid(s), log_sigmoid(s))
        } else {
            (-sigmoid(s), log_sigmoid(-s))
        };
        objective += obj;
        crate::math::axpy(g * lr, &scratch.v_t, &mut scratch.acc);
        output.add(t as usize, g * lr, &scratch.v_w);
    }
    input.add(w as usize, 1.0, &scratch.acc);
    objective
}

/// Draws `k` negatives, skipping draws equal to `avoid`.
pub fn draw_negatives<R: Rng + ?Sized>(dist: &SamplingDist, k: usize, avoid: u32, rng: &mut R, out: &mut Vec<u32>) {
    out.clear();
    for _ in 0..k {
        let n = dist.sample(rng);
        if n != avoid {
            out.push(n);
        }
    }
}

/// Sums over the pairs processed by [`skipgram_pass`].
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PassStats {
    pub pairs: u64,
    pub objective: f64,
}

/// One pass of skip-gram updates over `sentences`. `next_lr` is called once
/// per target position and returns the learning rate to use for it.
#[allow(clippy::too_many_arguments)]
pub fn skipgram_pass<I: RowStore, O: RowStore, R: Rng + ?Sized>(
    input: &mut I,
    output: &mut O,
    sentences: &[Vec<u32>],
    dist: &SamplingDist,
    config: &SgnsConfig,
    rng: &mut R,
    mut next_lr: impl FnMut() -> f64,
) -> PassStats {
    let mut scratch = Scratch::new(input.dim());
    let mut negs = Vec::with_capacity(config.negatives);
    let mut stats = PassStats::default();
    for sent in sentences {
        for (i, &w) in sent.iter().enumerate() {
            let lr = next_lr();
            let b = if config.shrink_window { rng.gen_range(1..=config.window) } else { config.window };
            let lo = i.saturating_sub(b);
            let hi = (i + b).min(sent.len() - 1);
            for j in lo..=hi {
                if j == i {
                    continue;
                }
                let c = sent[j];
                draw_negatives(dist, config.negatives, c, rng, &mut negs);
                stats.objective += pair_update(input, output, w, c, &negs, lr, &mut scratch);
                stats.pairs += 1;
            }
        }
    }
    stats
}

/// Per-epoch mean pair objective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingReport {
    pub epoch_objective: Vec<f64>,
}

/// Fresh parameters: input rows uniform in `±0.5/dim`, output rows zero.
pub fn init_embeddings(vocab_size: usize, dim: usize, rng: &mut ChaCha8Rng) -> EmbeddingMatrix {
    EmbeddingMatrix {
        input: Matrix::uniform(vocab_size, dim, 0.5 / dim as f64, rng),
        output: Matrix::zeros(vocab_size, dim),
    }
}

/// Trains skip-gram embeddings on index-encoded sentences in a single
/// deterministic worker. The same seed, config and corpus always produce
/// bit-identical matrices.
pub fn train_skipgram(
    corpus: &[Vec<u32>],
    vocab: &Vocabulary,
    config: &SgnsConfig,
) -> Result<(EmbeddingMatrix, TrainingReport), TrainError> {
    config.validate()?;
    let total: u64 = corpus.iter().map(|s| s.len() as u64).sum::<u64>() * config.epochs as u64;
    if total == 0 && config.epochs > 0 {
        return Err(TrainError::EmptyCorpus);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut emb = init_embeddings(vocab.len(), config.dim, &mut rng);
    let dist = SamplingDist::new(vocab.counts(), config.power);
    let mut report = TrainingReport::default();
    let mut seen = 0u64;
    for epoch in 0..config.epochs {
        let stats = skipgram_pass(&mut emb.input, &mut emb.output, corpus, &dist, config, &mut rng, || {
            let lr = config.learning_rate(seen as f64 / total as f64);
            seen += 1;
            lr
        });
        let mean = if stats.pairs == 0 { 0.0 } else { stats.objective / stats.pairs as f64 };
        if !mean.is_finite() || !emb.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
        report.epoch_objective.push(mean);
    }
    Ok((emb, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    #[test]
    fn zero_pair_loss_is_two_ln_two() {
        let z = [0.0; 3];
        let loss = -pair_objective(&z, &z, &[&z]);
        assert!((loss - 1.3863).abs() < 1e-4);
        assert!((loss - 2.0 * core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn update_matches_gradient_step() {
        let mut input = Matrix::from_vec(3, 2, vec![0.1, -0.2, 0.3, 0.05, -0.4, 0.2]);
        let mut output = Matrix::from_vec(3, 2, vec![0.2, 0.1, -0.3, 0.4, 0.25, -0.15]);
        let (w, c, n) = (0usize, 1usize, 2usize);
        let (dw, dc, dn) = pair_gradient(input.row(w), output.row(c), &[output.row(n)]);
        let mut expect_in = input.clone();
        let mut expect_out = output.clone();
        crate::math::axpy(0.1, &dw, expect_in.row_mut(w));
        crate::math::axpy(0.1, &dc, expect_out.row_mut(c));
        crate::math::axpy(0.1, &dn[0], expect_out.row_mut(n));
        pair_update(&mut input, &mut output, 0, 1, &[2], 0.1, &mut Scratch::new(2));
        for (a, b) in input.as_slice().iter().zip(expect_in.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
        for (a, b) in output.as_slice().iter().zip(expect_out.as_slice()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn learning_rate_decays_linearly() {
        let c = SgnsConfig::default();
        assert_eq!(c.learning_rate(0.0), 0.025);
        assert!((c.learning_rate(1.0) - 0.0001).abs() < 1e-15);
        assert!((c.learning_rate(0.5) - 0.01255).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_config() {
        let v = Vocabulary::build(&[vec!["a", "b"]], 1).unwrap();
        let bad = SgnsConfig { window: 0, ..SgnsConfig::default() };
        assert!(matches!(train_skipgram(&[vec![0, 1]], &v, &bad), Err(TrainError::Config(_))));
        let wild = SgnsConfig { lr_start: f64::NAN, ..SgnsConfig::default() };
        assert!(matches!(train_skipgram(&[vec![0, 1]], &v, &wild), Err(TrainError::Config(_))));
    }

    #[test]
    fn huge_learning_rate_reports_divergence() {
        let corpus: Vec<Vec<&str>> = (0..20).map(|_| vec!["a", "b", "c", "a", "b"]).collect();
        let v = Vocabulary::build(&corpus, 1).unwrap();
        let enc: Vec<Vec<u32>> = corpus.iter().map(|s| v.encode(s)).collect();
        let cfg = SgnsConfig { dim: 4, lr_start: 1e300, lr_end: 1e300, epochs: 3, ..SgnsConfig::default() };
        assert!(matches!(train_skipgram(&enc, &v, &cfg), Err(TrainError::Diverged { .. })));
    }

    #[test]
    fn deterministic_under_seed() {
        let corpus: Vec<Vec<alloc::string::String>> = (0..30)
            .map(|i| (0..12).map(|j| ((i * 7 + j * 3) % 9).to_string()).collect())
            .collect();
        let v = Vocabulary::build(&corpus, 1).unwrap();
        let enc: Vec<Vec<u32>> = corpus.iter().map(|s| v.encode(s)).collect();
        let cfg = SgnsConfig { dim: 8, epochs: 3, ..SgnsConfig::default() };
        let (a, ra) = train_skipgram(&enc, &v, &cfg).unwrap();
        let (b, rb) = train_skipgram(&enc, &v, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        let other = SgnsConfig { seed: 1, ..cfg };
        assert_ne!(train_skipgram(&enc, &v, &other).unwrap().0, a);
    }
}
