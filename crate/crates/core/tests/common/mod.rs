//! Central finite differences, independent of the analytic gradients under
//! test.

#![allow(dead_code)]

pub const STEP: f64 = 1e-5;
pub const TOLERANCE: f64 = 1e-4;

/// `(f(x + h e_i) - f(x - h e_i)) / 2h`, evaluated on a copy of `x`.
pub fn central_difference(x: &[f64], i: usize, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut p = x.to_vec();
    p[i] = x[i] + STEP;
    let up = f(&p);
    p[i] = x[i] - STEP;
    let down = f(&p);
    (up - down) / (2.0 * STEP)
}

/// `|a - n| / max(|a|, |n|)`, with the denominator floored so that
/// gradients that are zero up to rounding compare by absolute error.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-6)
}

/// Largest relative error over every coordinate of `x`.
pub fn max_relative_error(x: &[f64], analytic: &[f64], mut f: impl FnMut(&[f64]) -> f64) -> f64 {
    assert_eq!(x.len(), analytic.len());
    (0..x.len())
        .map(|i| relative_error(analytic[i], central_difference(x, i, &mut f)))
        .fold(0.0, f64::max)
}
