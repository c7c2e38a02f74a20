//! Attention pooling over BGRU annotations.
//!
//! Each annotation `h_j` is scored against a learned query `q`,
//! `e_j = q · tanh(W_a h_j + b_a)`, the scores are normalized with a softmax
//! into weights `α`, and the context vector is `c = Σ_j α_j h_j`.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::Matrix;
use crate::math::{dot, softmax_in_place, tanh};

#[derive(Debug, Clone, PartialEq)]
pub struct AttentionParams {
    /// `A × 2H`
    pub w_a: Matrix,
    /// `A × 1`
    pub b_a: Matrix,
    /// `A × 1`
    pub query: Matrix,
}

impl AttentionParams {
    pub fn zeros(annotation_dim: usize, attention_dim: usize) -> Self {
        AttentionParams {
            w_a: Matrix::zeros(attention_dim, annotation_dim),
            b_a: Matrix::zeros(attention_dim, 1),
            query: Matrix::zeros(attention_dim, 1),
        }
    }

    pub fn init<R: Rng + ?Sized>(annotation_dim: usize, attention_dim: usize, rng: &mut R) -> Self {
        AttentionParams {
            w_a: Matrix::glorot(attention_dim, annotation_dim, rng),
            b_a: Matrix::zeros(attention_dim, 1),
            query: Matrix::glorot(attention_dim, 1, rng),
        }
    }

    pub fn tensors(&self) -> [(&'static str, &Matrix); 3] {
        [("w_a", &self.w_a), ("b_a", &self.b_a), ("query", &self.query)]
    }

    pub fn tensors_mut(&mut self) -> [&mut Matrix; 3] {
        [&mut self.w_a, &mut self.b_a, &mut self.query]
    }
}

#[derive(Debug, Clone)]
pub struct Attended {
    pub context: Vec<f64>,
    pub weights: Vec<f64>,
    pub energies: Vec<f64>,
    /// `tanh(W_a h_j + b_a)` per position, `T × A`.
    pub projected: Matrix,
}

/// Scores, normalizes and pools the rows of `annotations`.
pub fn attend(annotations: &Matrix, p: &AttentionParams) -> Attended {
    let t_len = annotations.rows();
    let a_dim = p.w_a.rows();
    let mut projected = Matrix::zeros(t_len, a_dim);
    let mut energies = Vec::with_capacity(t_len);
    for j in 0..t_len {
        let u = projected.row_mut(j);
        u.copy_from_slice(p.b_a.as_slice());
        p.w_a.mul_vec_add(annotations.row(j), u);
        u.iter_mut().for_each(|v| *v = tanh(*v));
        energies.push(dot(p.query.as_slice(), u));
    }
    let mut weights = energies.clone();
    softmax_in_place(&mut weights);
    let mut context = vec![0.0; annotations.cols()];
    for (j, &a) in weights.iter().enumerate() {
        crate::math::axpy(a, annotations.row(j), &mut context);
    }
    Attended { context, weights, energies, projected }
}

/// Backward pass of [`attend`]. Accumulates into `grads` and returns the
/// gradients with respect to the annotations and to the energies.
pub fn attend_backward(
    annotations: &Matrix,
    out: &Attended,
    d_context: &[f64],
    p: &AttentionParams,
    grads: &mut AttentionParams,
) -> (Matrix, Vec<f64>) {
    let t_len = annotations.rows();
    let d_alpha: Vec<f64> = (0..t_len).map(|j| dot(d_context, annotations.row(j))).collect();
    let mean: f64 = out.weights.iter().zip(&d_alpha).map(|(a, d)| a * d).sum();
    let d_energy: Vec<f64> = out.weights.iter().zip(&d_alpha).map(|(a, d)| a * (d - mean)).collect();

    let mut d_ann = Matrix::zeros(t_len, annotations.cols());
    let q = p.query.as_slice();
    for j in 0..t_len {
        let u = out.projected.row(j);
        crate::math::axpy(d_energy[j], u, grads.query.as_mut_slice());
        let da: Vec<f64> = u.iter().zip(q).map(|(u, q)| d_energy[j] * q * (1.0 - u * u)).collect();
        grads.w_a.add_outer(1.0, &da, annotations.row(j));
        crate::math::axpy(1.0, &da, grads.b_a.as_mut_slice());
        let row = d_ann.row_mut(j);
        crate::math::axpy(out.weights[j], d_context, row);
        p.w_a.mul_t_vec_add(&da, row);
    }
    (d_ann, d_energy)
}
