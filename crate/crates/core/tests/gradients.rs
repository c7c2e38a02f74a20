//! Every hand-derived gradient against central finite differences, at three
//! random parameter points each.

mod common;

use common::{max_relative_error, TOLERANCE};
use folkmotif_core::attention::{attend, attend_backward, AttentionParams};
use folkmotif_core::baselines::{svm_objective, svm_subgradient};
use folkmotif_core::gru::{bgru_backward, bgru_encode, gru_step_backward, gru_step_cached, GruDirection, GruParams};
use folkmotif_core::linalg::Matrix;
use folkmotif_core::math::dot;
use folkmotif_core::network::{backward, forward_loss, ModelParams, NetConfig, SongInput};
use folkmotif_core::pvdbow::{doc_gradient, doc_objective};
use folkmotif_core::sgns::{pair_gradient, pair_objective};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [0, 1, 2];

fn random_vec(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-scale..scale)).collect()
}

fn flatten(ms: &[&Matrix]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.as_slice().iter().copied()).collect()
}

/// Writes a flat parameter vector back into the matrices, in order.
fn unflatten(flat: &[f64], ms: Vec<&mut Matrix>) {
    let mut off = 0;
    for m in ms {
        let n = m.as_slice().len();
        m.as_mut_slice().copy_from_slice(&flat[off..off + n]);
        off += n;
    }
}

#[test]
fn skipgram_pair_gradient() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 6;
        let k = 3;
        let x = random_vec(&mut rng, d * (2 + k), 0.8);
        let split = |x: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
            (x[..d].to_vec(), x[d..2 * d].to_vec(), (0..k).map(|i| x[(2 + i) * d..(3 + i) * d].to_vec()).collect())
        };
        let objective = |x: &[f64]| {
            let (w, c, n) = split(x);
            let negs: Vec<&[f64]> = n.iter().map(Vec::as_slice).collect();
            pair_objective(&w, &c, &negs)
        };
        let (w, c, n) = split(&x);
        let negs: Vec<&[f64]> = n.iter().map(Vec::as_slice).collect();
        let (gw, gc, gn) = pair_gradient(&w, &c, &negs);
        let analytic: Vec<f64> = gw.into_iter().chain(gc).chain(gn.into_iter().flatten()).collect();
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn pvdbow_document_gradient() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (v, d) = (7, 5);
        let tokens: Vec<u32> = (0..6).map(|_| rng.gen_range(0..v as u32)).collect();
        let negatives: Vec<Vec<u32>> = tokens.iter().map(|_| (0..3).map(|_| rng.gen_range(0..v as u32)).collect()).collect();
        let x = random_vec(&mut rng, d + v * d, 0.8);
        let objective = |x: &[f64]| doc_objective(&x[..d], &Matrix::from_vec(v, d, x[d..].to_vec()), &tokens, &negatives);
        let out = Matrix::from_vec(v, d, x[d..].to_vec());
        let (g_doc, g_out) = doc_gradient(&x[..d], &out, &tokens, &negatives);
        let analytic: Vec<f64> = g_doc.into_iter().chain(g_out.into_vec()).collect();
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn gru_step_jacobian() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, h) = (3, 4);
        let p = GruDirection::init(d, h, &mut rng);
        let input = random_vec(&mut rng, d, 1.0);
        let h_prev = random_vec(&mut rng, h, 0.9);
        let probe = random_vec(&mut rng, h, 1.0);

        let mut grads = GruDirection::zeros(d, h);
        let cache = gru_step_cached(&input, &h_prev, &p);
        let dh_prev = gru_step_backward(&input, &cache, &probe, &p, &mut grads);

        let tensors: Vec<&Matrix> = p.tensors().iter().map(|(_, m)| *m).collect();
        let mut x = flatten(&tensors);
        x.extend_from_slice(&h_prev);
        let mut analytic = flatten(&grads.tensors().iter().map(|(_, m)| *m).collect::<Vec<_>>());
        analytic.extend_from_slice(&dh_prev);
        let n_params = x.len() - h;
        let objective = |x: &[f64]| {
            let mut q = p.clone();
            unflatten(&x[..n_params], q.tensors_mut().into_iter().collect());
            dot(&gru_step_cached(&input, &x[n_params..], &q).h, &probe)
        };
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn bgru_backprop_through_time() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, h, t) = (3, 4, 5);
        let p = GruParams::init(d, h, &mut rng);
        let xs = Matrix::uniform(t, d, 1.0, &mut rng);
        let probe = Matrix::uniform(t, 2 * h, 1.0, &mut rng);

        let enc = bgru_encode(&xs, &p);
        let mut grads = GruParams::zeros(d, h);
        bgru_backward(&xs, &enc, &probe, &p, &mut grads);

        let collect = |g: &GruParams| -> Vec<f64> {
            let f: Vec<&Matrix> = g.forward.tensors().iter().map(|(_, m)| *m).collect();
            let b: Vec<&Matrix> = g.backward.tensors().iter().map(|(_, m)| *m).collect();
            flatten(&[f, b].concat())
        };
        let x = collect(&p);
        let analytic = collect(&grads);
        let objective = |x: &[f64]| {
            let mut q = p.clone();
            let mut slots: Vec<&mut Matrix> = q.forward.tensors_mut().into_iter().collect();
            slots.extend(q.backward.tensors_mut());
            unflatten(x, slots);
            dot(bgru_encode(&xs, &q).annotations.as_slice(), probe.as_slice())
        };
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn attention_pooling_gradient() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ann_dim, a_dim, t) = (8, 3, 5);
        let p = AttentionParams::init(ann_dim, a_dim, &mut rng);
        let ann = Matrix::uniform(t, ann_dim, 1.0, &mut rng);
        let probe = random_vec(&mut rng, ann_dim, 1.0);

        let out = attend(&ann, &p);
        let mut grads = AttentionParams::zeros(ann_dim, a_dim);
        let (d_ann, _) = attend_backward(&ann, &out, &probe, &p, &mut grads);

        let mut x = flatten(&p.tensors().iter().map(|(_, m)| *m).collect::<Vec<_>>());
        let n_params = x.len();
        x.extend_from_slice(ann.as_slice());
        let mut analytic = flatten(&grads.tensors().iter().map(|(_, m)| *m).collect::<Vec<_>>());
        analytic.extend_from_slice(d_ann.as_slice());
        let objective = |x: &[f64]| {
            let mut q = p.clone();
            unflatten(&x[..n_params], q.tensors_mut().into_iter().collect());
            let a = Matrix::from_vec(t, ann_dim, x[n_params..].to_vec());
            dot(&attend(&a, &q).context, &probe)
        };
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn full_classifier_gradient() {
    let cfg = NetConfig { input_dim: 3, hidden: 4, attention_dim: 3, classes: 2 };
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = ModelParams::init(&cfg, &mut rng);
        let song = SongInput { vectors: Matrix::uniform(5, 3, 1.0, &mut rng), label: (seed % 2) as usize };

        let b = backward(&song, &params).unwrap();
        let x = flatten(&params.tensors().iter().map(|(_, m)| *m).collect::<Vec<_>>());
        let analytic = flatten(&b.grads.tensors().iter().map(|(_, m)| *m).collect::<Vec<_>>());
        assert_eq!(x.len(), 240);
        let objective = |x: &[f64]| {
            let mut q = params.clone();
            unflatten(x, q.tensors_mut());
            forward_loss(&song, &q).unwrap().1
        };
        let err = max_relative_error(&x, &analytic, objective);
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}

#[test]
fn svm_subgradient_at_differentiable_points() {
    for seed in SEEDS {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = 4;
        let xs: Vec<Vec<f64>> = (0..12).map(|_| random_vec(&mut rng, d, 2.0)).collect();
        let ys: Vec<f64> = (0..12).map(|i| if i % 3 == 0 { 1.0 } else { -1.0 }).collect();
        let x = random_vec(&mut rng, d + 1, 0.7);
        let margins_ok = xs.iter().zip(&ys).all(|(xi, y)| (y * (dot(&x[..d], xi) + x[d]) - 1.0).abs() > 1e-3);
        assert!(margins_ok, "seed {seed} landed on a hinge kink");
        let (gw, gb) = svm_subgradient(&x[..d], x[d], &xs, &ys, 0.1);
        let analytic: Vec<f64> = gw.into_iter().chain([gb]).collect();
        let err = max_relative_error(&x, &analytic, |x| svm_objective(&x[..d], x[d], &xs, &ys, 0.1));
        assert!(err < TOLERANCE, "seed {seed}: relative error {err:e}");
    }
}
