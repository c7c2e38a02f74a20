//! Baselines: song vectors from averaged motif embeddings, classified by a
//! one-vs-rest linear SVM trained with Pegasos.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::Matrix;
use crate::math::{dot, sqrt};
use crate::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaselineError {
    #[error("song has no in-vocabulary tokens")]
    NoKnownTokens,
    #[error("training data must contain at least two classes")]
    SingleClass,
    #[error("dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors and labels differ in length")]
    LengthMismatch,
    #[error("invalid configuration: {0}")]
    Config(&'static str),
}

/// Unweighted mean of the rows of the song's in-vocabulary tokens.
pub fn average_embedding<S: AsRef<str>>(tokens: &[S], vocab: &Vocabulary, vectors: &Matrix) -> Result<Vec<f64>, BaselineError> {
    let mut sum = vec![0.0; vectors.cols()];
    let mut n = 0usize;
    for i in tokens.iter().filter_map(|t| vocab.get(t.as_ref())) {
        crate::math::axpy(1.0, vectors.row(i as usize), &mut sum);
        n += 1;
    }
    if n == 0 {
        return Err(BaselineError::NoKnownTokens);
    }
    sum.iter_mut().for_each(|x| *x /= n as f64);
    Ok(sum)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig { lambda: 0.01, epochs: 200, seed: 0 }
    }
}

/// One weight row and bias per class.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSvmModel {
    pub weights: Matrix,
    pub bias: Vec<f64>,
    pub lambda: f64,
}

impl LinearSvmModel {
    pub fn classes(&self) -> usize {
        self.weights.rows()
    }

    pub fn dim(&self) -> usize {
        self.weights.cols()
    }

    pub fn scores(&self, x: &[f64]) -> Result<Vec<f64>, BaselineError> {
        if x.len() != self.dim() {
            return Err(BaselineError::DimensionMismatch { expected: self.dim(), got: x.len() });
        }
        Ok((0..self.classes()).map(|c| dot(self.weights.row(c), x) + self.bias[c]).collect())
    }
}

/// Binary SVM objective with the bias regularized alongside the weights:
/// `λ/2 (‖w‖² + b²) + mean_i max(0, 1 - y_i (w·x_i + b))`, `y_i ∈ {-1, +1}`.
pub fn svm_objective(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> f64 {
    let hinge: f64 = xs.iter().zip(ys).map(|(x, &y)| (1.0 - y * (dot(w, x) + b)).max(0.0)).sum();
    0.5 * lambda * (dot(w, w) + b * b) + hinge / xs.len() as f64
}

/// Subgradient of [`svm_objective`]; the true gradient wherever no margin
/// equals exactly 1.
pub fn svm_subgradient(w: &[f64], b: f64, xs: &[Vec<f64>], ys: &[f64], lambda: f64) -> (Vec<f64>, f64) {
    let n = xs.len() as f64;
    let mut gw: Vec<f64> = w.iter().map(|x| lambda * x).collect();
    let mut gb = lambda * b;
    for (x, &y) in xs.iter().zip(ys) {
        if y * (dot(w, x) + b) < 1.0 {
            crate::math::axpy(-y / n, x, &mut gw);
            gb -= y / n;
        }
    }
    (gw, gb)
}

/// Pegasos on one binary problem. Each epoch visits every example once in a
/// fresh random order with step `1/(λt)`, followed by projection onto the
/// ball of radius `1/√λ`.
fn pegasos(xs: &[Vec<f64>], ys: &[f64], cfg: &SvmConfig, rng: &mut ChaCha8Rng) -> (Vec<f64>, f64) {
    let d = xs[0].len();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let radius = 1.0 / sqrt(cfg.lambda);
    let mut order: Vec<usize> = (0..xs.len()).collect();
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        order.shuffle(rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (cfg.lambda * t as f64);
            let margin = ys[i] * (dot(&w, &xs[i]) + b);
            let shrink = 1.0 - eta * cfg.lambda;
            w.iter_mut().for_each(|x| *x *= shrink);
            b *= shrink;
            if margin < 1.0 {
                crate::math::axpy(eta * ys[i], &xs[i], &mut w);
                b += eta * ys[i];
            }
            let norm = sqrt(dot(&w, &w) + b * b);
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|x| *x *= s);
                b *= s;
            }
        }
    }
    (w, b)
}

/// One-vs-rest linear SVM over classes `0..=max(labels)`.
pub fn train_linear_svm(xs: &[Vec<f64>], labels: &[usize], cfg: &SvmConfig) -> Result<LinearSvmModel, BaselineError> {
    if xs.len() != labels.len() {
        return Err(BaselineError::LengthMismatch);
    }
    if !(cfg.lambda > 0.0) || !cfg.lambda.is_finite() {
        return Err(BaselineError::Config("lambda must be positive"));
    }
    let Some(&first) = labels.first() else {
        return Err(BaselineError::SingleClass);
    };
    if labels.iter().all(|&l| l == first) {
        return Err(BaselineError::SingleClass);
    }
    let d = xs[0].len();
    if let Some(x) = xs.iter().find(|x| x.len() != d) {
        return Err(BaselineError::DimensionMismatch { expected: d, got: x.len() });
    }
    let classes = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = Matrix::zeros(classes, d);
    let mut bias = vec![0.0; classes];
    for c in 0..classes {
        let ys: Vec<f64> = labels.iter().map(|&l| if l == c { 1.0 } else { -1.0 }).collect();
        let (w, b) = pegasos(xs, &ys, cfg, &mut rng);
        weights.row_mut(c).copy_from_slice(&w);
        bias[c] = b;
    }
    Ok(LinearSvmModel { weights, bias, lambda: cfg.lambda })
}

/// Class with the largest score; ties go to the lowest index.
pub fn predict_svm(model: &LinearSvmModel, x: &[f64]) -> Result<usize, BaselineError> {
    Ok(crate::network::argmax(&model.scores(x)?))
}

/// Per-feature centering and scaling fitted on training vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn fit(xs: &[Vec<f64>]) -> Self {
        let d = xs.first().map_or(0, Vec::len);
        let n = xs.len().max(1) as f64;
        let mut mean = vec![0.0; d];
        for x in xs {
            crate::math::axpy(1.0 / n, x, &mut mean);
        }
        let mut var = vec![0.0; d];
        for x in xs {
            for j in 0..d {
                var[j] += (x[j] - mean[j]) * (x[j] - mean[j]) / n;
            }
        }
        let scale = var.iter().map(|&v| if v > 1e-24 { 1.0 / sqrt(v) } else { 1.0 }).collect();
        Standardizer { mean, scale }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((x, m), s)| (x - m) * s).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_ab() -> (Vocabulary, Matrix) {
        let v = Vocabulary::build(&[vec!["a", "a", "b"]], 1).unwrap();
        (v, Matrix::from_vec(2, 2, vec![1.0, 0.0, 0.0, 1.0]))
    }

    #[test]
    fn averages() {
        let (v, m) = vocab_ab();
        assert_eq!(average_embedding(&["a", "b"], &v, &m).unwrap(), [0.5, 0.5]);
        assert_eq!(average_embedding(&["a", "a"], &v, &m).unwrap(), [1.0, 0.0]);
        assert_eq!(average_embedding(&["a", "zz", "b"], &v, &m).unwrap(), [0.5, 0.5]);
        assert_eq!(average_embedding(&["x", "y"], &v, &m), Err(BaselineError::NoKnownTokens));
    }

    #[test]
    fn average_is_order_free() {
        let (v, m) = vocab_ab();
        assert_eq!(
            average_embedding(&["a", "b", "b"], &v, &m).unwrap(),
            average_embedding(&["b", "a", "b"], &v, &m).unwrap()
        );
    }

    #[test]
    fn one_dimensional_separable() {
        let xs = vec![vec![-1.0], vec![1.0]];
        let cfg = SvmConfig { lambda: 0.01, epochs: 100, seed: 0 };
        let m = train_linear_svm(&xs, &[0, 1], &cfg).unwrap();
        assert_eq!(predict_svm(&m, &[-1.0]).unwrap(), 0);
        assert_eq!(predict_svm(&m, &[1.0]).unwrap(), 1);
    }

    #[test]
    fn heavy_regularization_shrinks_weights() {
        let xs = vec![vec![-1.0, 0.5], vec![1.0, -0.5], vec![2.0, 1.0]];
        let cfg = SvmConfig { lambda: 1e6, epochs: 50, seed: 0 };
        let m = train_linear_svm(&xs, &[0, 1, 1], &cfg).unwrap();
        assert!(crate::math::sqrt(m.weights.sum_sq()) < 1e-2);
    }

    #[test]
    fn duplicated_data_predicts_the_same() {
        let xs = vec![vec![-2.0, 0.3], vec![-1.0, -0.2], vec![1.5, 0.1], vec![2.5, -0.4]];
        let labels = [0, 0, 1, 1];
        let cfg = SvmConfig::default();
        let m1 = train_linear_svm(&xs, &labels, &cfg).unwrap();
        let xs2: Vec<Vec<f64>> = xs.iter().chain(&xs).cloned().collect();
        let l2: Vec<usize> = labels.iter().chain(&labels).copied().collect();
        let m2 = train_linear_svm(&xs2, &l2, &cfg).unwrap();
        for x in xs.iter().chain([vec![-0.5, 0.0], vec![0.7, 0.0]].iter()) {
            assert_eq!(predict_svm(&m1, x).unwrap(), predict_svm(&m2, x).unwrap());
        }
    }

    #[test]
    fn prediction_rules() {
        let m = LinearSvmModel { weights: Matrix::from_vec(2, 2, vec![1.0, 0.0, -1.0, 0.0]), bias: vec![0.0, 0.0], lambda: 0.01 };
        assert_eq!(predict_svm(&m, &[2.0, 0.0]).unwrap(), 0);
        assert_eq!(predict_svm(&m, &[-2.0, 0.0]).unwrap(), 1);
        assert_eq!(predict_svm(&m, &[0.0, 0.0]).unwrap(), 0);
        assert!(matches!(predict_svm(&m, &[0.0]), Err(BaselineError::DimensionMismatch { .. })));
        let mut scaled = m.clone();
        scaled.weights.as_mut_slice().iter_mut().for_each(|w| *w *= 3.5);
        assert_eq!(predict_svm(&scaled, &[-2.0, 0.0]).unwrap(), 1);
    }

    #[test]
    fn single_class_rejected() {
        let xs = vec![vec![1.0], vec![2.0]];
        assert_eq!(train_linear_svm(&xs, &[1, 1], &SvmConfig::default()), Err(BaselineError::SingleClass));
    }
}
