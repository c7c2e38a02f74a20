//! Unigram distribution for drawing negative samples.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

/// `p(i) ∝ count(i)^power`, drawn in O(1) with Vose's alias method.
#[derive(Debug, Clone)]
pub struct SamplingDist {
    probs: Vec<f64>,
    accept: Vec<f64>,
    alias: Vec<u32>,
}

impl SamplingDist {
    /// Panics if `counts` is empty.
    pub fn new(counts: &[u64], power: f64) -> Self {
        assert!(!counts.is_empty(), "sampling distribution over an empty vocabulary");
        let weights: Vec<f64> = counts.iter().map(|&c| crate::math::powf(c as f64, power)).collect();
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();

        let n = probs.len();
        let mut scaled: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
        let mut accept = vec![1.0; n];
        let mut alias: Vec<u32> = (0..n as u32).collect();
        let (mut small, mut large): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| scaled[i] < 1.0);
        while let (Some(s), Some(&l)) = (small.pop(), large.last()) {
            accept[s] = scaled[s];
            alias[s] = l as u32;
            scaled[l] -= 1.0 - scaled[s];
            if scaled[l] < 1.0 {
                large.pop();
                small.push(l);
            }
        }
        // Leftovers are 1 up to rounding.
        for i in small.into_iter().chain(large) {
            accept[i] = 1.0;
        }
        SamplingDist { probs, accept, alias }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probability(&self, index: u32) -> f64 {
        self.probs[index as usize]
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        let i = rng.gen_range(0..self.probs.len());
        if rng.gen::<f64>() < self.accept[i] {
            i as u32
        } else {
            self.alias[i]
        }
    }
}

/// Negative-sampling distribution over vocabulary counts.
pub fn negative_sampling_dist(counts: &[u64], power: f64) -> SamplingDist {
    SamplingDist::new(counts, power)
}
