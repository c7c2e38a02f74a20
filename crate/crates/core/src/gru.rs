//! Gated recurrent unit with hand-written backpropagation through time, and
//! the bidirectional encoder built from two of them.
//!
//! ```text
//! z  = σ(W_z x + U_z h + b_z)
//! r  = σ(W_r x + U_r h + b_r)
//! h̃  = tanh(W_h x + U_h (r ⊙ h) + b_h)
//! h' = (1 - z) ⊙ h + z ⊙ h̃
//! ```

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::linalg::Matrix;
use crate::math::{sigmoid, tanh};

/// Parameters of one scan direction. Biases are `H×1` matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct GruDirection {
    pub w_z: Matrix,
    pub u_z: Matrix,
    pub b_z: Matrix,
    pub w_r: Matrix,
    pub u_r: Matrix,
    pub b_r: Matrix,
    pub w_h: Matrix,
    pub u_h: Matrix,
    pub b_h: Matrix,
}

impl GruDirection {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        GruDirection {
            w_z: Matrix::zeros(hidden, input),
            u_z: Matrix::zeros(hidden, hidden),
            b_z: Matrix::zeros(hidden, 1),
            w_r: Matrix::zeros(hidden, input),
            u_r: Matrix::zeros(hidden, hidden),
            b_r: Matrix::zeros(hidden, 1),
            w_h: Matrix::zeros(hidden, input),
            u_h: Matrix::zeros(hidden, hidden),
            b_h: Matrix::zeros(hidden, 1),
        }
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng + ?Sized>(input: usize, hidden: usize, rng: &mut R) -> Self {
        GruDirection {
            w_z: Matrix::glorot(hidden, input, rng),
            u_z: Matrix::glorot(hidden, hidden, rng),
            b_z: Matrix::zeros(hidden, 1),
            w_r: Matrix::glorot(hidden, input, rng),
            u_r: Matrix::glorot(hidden, hidden, rng),
            b_r: Matrix::zeros(hidden, 1),
            w_h: Matrix::glorot(hidden, input, rng),
            u_h: Matrix::glorot(hidden, hidden, rng),
            b_h: Matrix::zeros(hidden, 1),
        }
    }

    pub fn hidden(&self) -> usize {
        self.u_z.rows()
    }

    pub fn input(&self) -> usize {
        self.w_z.cols()
    }

    pub fn tensors(&self) -> [(&'static str, &Matrix); 9] {
        [
            ("w_z", &self.w_z),
            ("u_z", &self.u_z),
            ("b_z", &self.b_z),
            ("w_r", &self.w_r),
            ("u_r", &self.u_r),
            ("b_r", &self.b_r),
            ("w_h", &self.w_h),
            ("u_h", &self.u_h),
            ("b_h", &self.b_h),
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut Matrix; 9] {
        [
            &mut self.w_z,
            &mut self.u_z,
            &mut self.b_z,
            &mut self.w_r,
            &mut self.u_r,
            &mut self.b_r,
            &mut self.w_h,
            &mut self.u_h,
            &mut self.b_h,
        ]
    }
}

/// Forward and backward scan parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GruParams {
    pub forward: GruDirection,
    pub backward: GruDirection,
}

impl GruParams {
    pub fn zeros(input: usize, hidden: usize) -> Self {
        GruParams { forward: GruDirection::zeros(input, hidden), backward: GruDirection::zeros(input, hidden) }
    }

    pub fn init<R: Rng + ?Sized>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let forward = GruDirection::init(input, hidden, rng);
        let backward = GruDirection::init(input, hidden, rng);
        GruParams { forward, backward }
    }

    pub fn hidden(&self) -> usize {
        self.forward.hidden()
    }
}

/// Intermediate values of one step, kept for the backward pass.
#[derive(Debug, Clone)]
pub struct StepCache {
    pub h_prev: Vec<f64>,
    pub z: Vec<f64>,
    pub r: Vec<f64>,
    pub rh: Vec<f64>,
    pub candidate: Vec<f64>,
    pub h: Vec<f64>,
}

pub fn gru_step_cached(x: &[f64], h_prev: &[f64], p: &GruDirection) -> StepCache {
    let hidden = p.hidden();
    let gate = |w: &Matrix, u: &Matrix, b: &Matrix, h: &[f64]| {
        let mut a = b.as_slice().to_vec();
        w.mul_vec_add(x, &mut a);
        u.mul_vec_add(h, &mut a);
        a
    };
    let mut z = gate(&p.w_z, &p.u_z, &p.b_z, h_prev);
    z.iter_mut().for_each(|v| *v = sigmoid(*v));
    let mut r = gate(&p.w_r, &p.u_r, &p.b_r, h_prev);
    r.iter_mut().for_each(|v| *v = sigmoid(*v));
    let rh: Vec<f64> = r.iter().zip(h_prev).map(|(a, b)| a * b).collect();
    let mut candidate = gate(&p.w_h, &p.u_h, &p.b_h, &rh);
    candidate.iter_mut().for_each(|v| *v = tanh(*v));
    let h = (0..hidden).map(|i| (1.0 - z[i]) * h_prev[i] + z[i] * candidate[i]).collect();
    StepCache { h_prev: h_prev.to_vec(), z, r, rh, candidate, h }
}

/// One GRU step.
pub fn gru_step(x: &[f64], h_prev: &[f64], p: &GruDirection) -> Vec<f64> {
    gru_step_cached(x, h_prev, p).h
}

/// Accumulates parameter gradients of one step into `grads` given `dh`, the
/// gradient flowing into the step's output, and returns the gradient with
/// respect to `h_prev`.
pub fn gru_step_backward(x: &[f64], cache: &StepCache, dh: &[f64], p: &GruDirection, grads: &mut GruDirection) -> Vec<f64> {
    let hidden = p.hidden();
    let mut dh_prev: Vec<f64> = (0..hidden).map(|i| dh[i] * (1.0 - cache.z[i])).collect();

    let da_z: Vec<f64> = (0..hidden)
        .map(|i| {
            let z = cache.z[i];
            dh[i] * (cache.candidate[i] - cache.h_prev[i]) * z * (1.0 - z)
        })
        .collect();
    let da_h: Vec<f64> = (0..hidden)
        .map(|i| {
            let c = cache.candidate[i];
            dh[i] * cache.z[i] * (1.0 - c * c)
        })
        .collect();

    grads.w_h.add_outer(1.0, &da_h, x);
    grads.u_h.add_outer(1.0, &da_h, &cache.rh);
    crate::math::axpy(1.0, &da_h, grads.b_h.as_mut_slice());
    let mut d_rh = vec![0.0; hidden];
    p.u_h.mul_t_vec_add(&da_h, &mut d_rh);

    let da_r: Vec<f64> = (0..hidden)
        .map(|i| {
            let r = cache.r[i];
            d_rh[i] * cache.h_prev[i] * r * (1.0 - r)
        })
        .collect();
    for i in 0..hidden {
        dh_prev[i] += d_rh[i] * cache.r[i];
    }

    grads.w_r.add_outer(1.0, &da_r, x);
    grads.u_r.add_outer(1.0, &da_r, &cache.h_prev);
    crate::math::axpy(1.0, &da_r, grads.b_r.as_mut_slice());
    p.u_r.mul_t_vec_add(&da_r, &mut dh_prev);

    grads.w_z.add_outer(1.0, &da_z, x);
    grads.u_z.add_outer(1.0, &da_z, &cache.h_prev);
    crate::math::axpy(1.0, &da_z, grads.b_z.as_mut_slice());
    p.u_z.mul_t_vec_add(&da_z, &mut dh_prev);

    dh_prev
}

/// Cached bidirectional scan. `forward[j]` and `backward[j]` both describe
/// position `j` of the input.
#[derive(Debug, Clone)]
pub struct Encoding {
    pub forward: Vec<StepCache>,
    pub backward: Vec<StepCache>,
    /// `T × 2H`, forward state then backward state per row.
    pub annotations: Matrix,
}

/// Runs both directions from zero initial states over the rows of `xs`.
pub fn bgru_encode(xs: &Matrix, p: &GruParams) -> Encoding {
    let t_len = xs.rows();
    let hidden = p.hidden();
    let mut forward = Vec::with_capacity(t_len);
    let mut h = vec![0.0; hidden];
    for j in 0..t_len {
        let c = gru_step_cached(xs.row(j), &h, &p.forward);
        h.clone_from(&c.h);
        forward.push(c);
    }
    let mut backward: Vec<StepCache> = Vec::with_capacity(t_len);
    let mut h = vec![0.0; hidden];
    for j in (0..t_len).rev() {
        let c = gru_step_cached(xs.row(j), &h, &p.backward);
        h.clone_from(&c.h);
        backward.push(c);
    }
    backward.reverse();
    let mut annotations = Matrix::zeros(t_len, 2 * hidden);
    for j in 0..t_len {
        let row = annotations.row_mut(j);
        row[..hidden].copy_from_slice(&forward[j].h);
        row[hidden..].copy_from_slice(&backward[j].h);
    }
    Encoding { forward, backward, annotations }
}

/// Backpropagation through time for both directions, given the gradient
/// with respect to every annotation.
pub fn bgru_backward(xs: &Matrix, enc: &Encoding, d_annotations: &Matrix, p: &GruParams, grads: &mut GruParams) {
    let t_len = xs.rows();
    let hidden = p.hidden();
    let mut carry = vec![0.0; hidden];
    for j in (0..t_len).rev() {
        let mut dh = d_annotations.row(j)[..hidden].to_vec();
        crate::math::axpy(1.0, &carry, &mut dh);
        carry = gru_step_backward(xs.row(j), &enc.forward[j], &dh, &p.forward, &mut grads.forward);
    }
    let mut carry = vec![0.0; hidden];
    for j in 0..t_len {
        let mut dh = d_annotations.row(j)[hidden..].to_vec();
        crate::math::axpy(1.0, &carry, &mut dh);
        carry = gru_step_backward(xs.row(j), &enc.backward[j], &dh, &p.backward, &mut grads.backward);
    }
}
