use folkmotif_core::attention::{attend, AttentionParams};
use folkmotif_core::gru::{bgru_encode, GruParams};
use folkmotif_core::linalg::Matrix;
use folkmotif_core::network::{forward, ModelParams, NetConfig};
use folkmotif_core::sampling::SamplingDist;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn annotation_count_and_width(t in 1usize..50, d in 1usize..5, h in 1usize..6, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = GruParams::init(d, h, &mut rng);
        let xs = Matrix::uniform(t, d, 2.0, &mut rng);
        let enc = bgru_encode(&xs, &p);
        prop_assert_eq!(enc.annotations.rows(), t);
        prop_assert_eq!(enc.annotations.cols(), 2 * h);
    }

    #[test]
    fn attention_weights_form_a_distribution(t in 1usize..40, a in 1usize..6, scale in 0.1f64..50.0, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = AttentionParams::init(6, a, &mut rng);
        p.query.as_mut_slice().iter_mut().for_each(|q| *q *= scale);
        let ann = Matrix::uniform(t, 6, 3.0, &mut rng);
        let out = attend(&ann, &p);
        prop_assert!(out.weights.iter().all(|&w| w >= 0.0));
        prop_assert!((out.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn output_probabilities_sum_to_one(t in 1usize..20, seed: u64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cfg = NetConfig { input_dim: 4, hidden: 5, attention_dim: 3, classes: 3 };
        let p = ModelParams::init(&cfg, &mut rng);
        let xs = Matrix::uniform(t, 4, 5.0, &mut rng);
        let cache = forward(&xs, &p).unwrap();
        prop_assert!((cache.probs.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        prop_assert!((cache.attended.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    }
}

#[test]
fn negative_sampling_matches_a_million_draws() {
    let counts = [50u64, 20, 9, 9, 3, 1, 1, 120];
    let dist = SamplingDist::new(&counts, 0.75);
    assert!((dist.probabilities().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    let n = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut hits = vec![0u64; counts.len()];
    for _ in 0..n {
        hits[dist.sample(&mut rng) as usize] += 1;
    }
    for (i, &h) in hits.iter().enumerate() {
        let p = dist.probability(i as u32);
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        let dev = (h as f64 - n as f64 * p).abs();
        assert!(dev <= 3.0 * sigma, "token {i}: {h} draws, expected {:.0} ± {sigma:.0}", n as f64 * p);
    }
}
