//! Seeded, label-stratified train/test split.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SplitError {
    #[error("split ratio {0} outside (0, 1)")]
    Ratio(f64),
    #[error("empty corpus")]
    Empty,
    #[error("class {0} has fewer than two songs")]
    TooSmallClass(usize),
}

/// Splits item indices into `(train, test)`, both sorted ascending.
///
/// The training set gets `⌊N·ratio⌋` items, apportioned across classes by
/// largest remainder of `n_c·ratio` (ties to the lower class), with every
/// class keeping at least one item on each side. Within each class the
/// chosen items come from a shuffle seeded by `seed`.
pub fn split_dataset(labels: &[usize], ratio: f64, seed: u64) -> Result<(Vec<usize>, Vec<usize>), SplitError> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(SplitError::Ratio(ratio));
    }
    if labels.is_empty() {
        return Err(SplitError::Empty);
    }
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    if let Some((&c, _)) = by_class.iter().find(|(_, v)| v.len() < 2) {
        return Err(SplitError::TooSmallClass(c));
    }

    const EPS: f64 = 1e-9;
    let target = libm::floor(labels.len() as f64 * ratio + EPS) as usize;
    let quotas: Vec<(usize, f64)> = by_class.values().map(|v| {
        let q = v.len() as f64 * ratio;
        let base = libm::floor(q + EPS);
        (base as usize, q - base)
    }).collect();
    let mut counts: Vec<usize> = quotas.iter().map(|q| q.0).collect();
    let assigned: usize = counts.iter().sum();
    let mut by_remainder: Vec<usize> = (0..counts.len()).collect();
    by_remainder.sort_by(|&a, &b| quotas[b].1.total_cmp(&quotas[a].1).then(a.cmp(&b)));
    for &c in by_remainder.iter().cycle().take(target.saturating_sub(assigned)) {
        counts[c] += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (members, &n_train) in by_class.values().zip(&counts) {
        let n_train = n_train.clamp(1, members.len() - 1);
        let mut shuffled = members.clone();
        shuffled.shuffle(&mut rng);
        train.extend_from_slice(&shuffled[..n_train]);
        test.extend_from_slice(&shuffled[n_train..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}
