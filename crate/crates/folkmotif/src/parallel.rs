//! Multi-threaded training modes. Both trade reproducibility for speed
//! and are only used when deterministic mode is off.

use std::sync::atomic::{AtomicU64, Ordering};
use std::thread;

use folkmotif_core::embedding::EmbeddingMatrix;
use folkmotif_core::network::{BatchGradient, ModelParams, NetError, Sequential, SongInput};
use folkmotif_core::sampling::SamplingDist;
use folkmotif_core::sgns::{init_embeddings, skipgram_pass, AtomicMatrix, PassStats, SgnsConfig, TrainError, TrainingReport};
use folkmotif_core::Vocabulary;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Splits each mini-batch into contiguous shares, one per worker, and sums
/// the partial gradients in worker order on the calling thread.
#[derive(Debug, Clone, Copy)]
pub struct Threaded {
    pub workers: usize,
}

impl BatchGradient for Threaded {
    fn batch(&self, params: &ModelParams, songs: &[&SongInput]) -> Result<(ModelParams, f64), NetError> {
        let workers = self.workers.clamp(1, songs.len().max(1));
        if workers == 1 {
            return Sequential.batch(params, songs);
        }
        let share = songs.len().div_ceil(workers);
        let parts: Vec<Result<(ModelParams, f64), NetError>> = thread::scope(|s| {
            let handles: Vec<_> = songs.chunks(share).map(|chunk| s.spawn(move || Sequential.batch(params, chunk))).collect();
            handles.into_iter().map(|h| h.join().expect("gradient worker panicked")).collect()
        });
        let mut total = ModelParams::zeros(&params.config());
        let mut loss = 0.0;
        for part in parts {
            let (g, l) = part?;
            total.add_scaled(1.0, &g);
            loss += l;
        }
        Ok((total, loss))
    }
}

/// Skip-gram training with `workers` threads updating shared matrices
/// without locks. Each epoch the corpus is cut into one contiguous share per
/// worker; the learning rate follows a shared position counter. Results
/// vary from run to run.
pub fn train_skipgram_parallel(
    corpus: &[Vec<u32>],
    vocab: &Vocabulary,
    config: &SgnsConfig,
    workers: usize,
) -> Result<(EmbeddingMatrix, TrainingReport), TrainError> {
    config.validate()?;
    let total = corpus.iter().map(|s| s.len() as u64).sum::<u64>() * config.epochs as u64;
    if total == 0 && config.epochs > 0 {
        return Err(TrainError::EmptyCorpus);
    }
    let workers = workers.clamp(1, corpus.len().max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let init = init_embeddings(vocab.len(), config.dim, &mut rng);
    let input = AtomicMatrix::from_matrix(&init.input);
    let output = AtomicMatrix::from_matrix(&init.output);
    let dist = SamplingDist::new(vocab.counts(), config.power);
    let seen = AtomicU64::new(0);
    let share = corpus.len().div_ceil(workers).max(1);
    let mut report = TrainingReport::default();

    for epoch in 0..config.epochs {
        let stats: Vec<PassStats> = thread::scope(|s| {
            let handles: Vec<_> = corpus
                .chunks(share)
                .enumerate()
                .map(|(w, chunk)| {
                    let (input, output, dist, seen) = (&input, &output, &dist, &seen);
                    s.spawn(move || {
                        let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_add(1 + (epoch * workers + w) as u64));
                        let (mut i, mut o) = (input, output);
                        skipgram_pass(&mut i, &mut o, chunk, dist, config, &mut rng, || {
                            let n = seen.fetch_add(1, Ordering::Relaxed);
                            config.learning_rate(n as f64 / total as f64)
                        })
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("embedding worker panicked")).collect()
        });
        let pairs: u64 = stats.iter().map(|s| s.pairs).sum();
        let objective: f64 = stats.iter().map(|s| s.objective).sum();
        let mean = if pairs == 0 { 0.0 } else { objective / pairs as f64 };
        if !mean.is_finite() {
            return Err(TrainError::Diverged { epoch });
        }
        report.epoch_objective.push(mean);
    }
    let emb = EmbeddingMatrix { input: input.to_matrix(), output: output.to_matrix() };
    if !emb.is_finite() {
        return Err(TrainError::Diverged { epoch: config.epochs.saturating_sub(1) });
    }
    Ok((emb, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use folkmotif_core::linalg::Matrix;
    use folkmotif_core::network::NetConfig;

    #[test]
    fn threaded_gradient_matches_sequential() {
        let cfg = NetConfig { input_dim: 3, hidden: 4, attention_dim: 3, classes: 2 };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let params = ModelParams::init(&cfg, &mut rng);
        let songs: Vec<SongInput> = (0..7)
            .map(|i| SongInput { vectors: Matrix::uniform(2 + i, 3, 1.0, &mut rng), label: i % 2 })
            .collect();
        let refs: Vec<&SongInput> = songs.iter().collect();
        let (a, la) = Sequential.batch(&params, &refs).unwrap();
        let (b, lb) = Threaded { workers: 3 }.batch(&params, &refs).unwrap();
        assert!((la - lb).abs() < 1e-12);
        let mut diff = a.clone();
        diff.add_scaled(-1.0, &b);
        assert!(diff.norm() < 1e-12 * (1.0 + a.norm()));
    }

    #[test]
    fn parallel_skipgram_learns_finite_embeddings() {
        let corpus: Vec<Vec<&str>> = (0..40).map(|i| if i % 2 == 0 { vec!["a", "b", "a", "b", "c"] } else { vec!["x", "y", "x", "y", "c"] }).collect();
        let v = Vocabulary::build(&corpus, 1).unwrap();
        let enc: Vec<Vec<u32>> = corpus.iter().map(|s| v.encode(s)).collect();
        let cfg = SgnsConfig { dim: 8, epochs: 5, ..SgnsConfig::default() };
        let (emb, report) = train_skipgram_parallel(&enc, &v, &cfg, 4).unwrap();
        assert_eq!(report.epoch_objective.len(), 5);
        assert!(emb.is_finite());
        assert_eq!(emb.len(), v.len());
    }
}
