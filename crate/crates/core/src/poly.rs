//! Complex polynomial primitives.
//!
//! Coefficient vectors are stored in ascending order: `coeffs[k]` multiplies
//! `z^k`. Everything else in the crate (encoders, channels, decoders, bounds)
//! builds on the handful of routines here.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type C64 = Complex<f64>;

/// Leading coefficients smaller than this (relative to the largest
/// coefficient magnitude) are rejected by the root finder.
pub const DEGENERATE_LEADING_REL: f64 = 1e-12;
/// Relative backward error accepted for a computed root.
pub const ROOT_TOLERANCE: f64 = 1e-9;
/// Aberth iteration cap.
pub const MAX_ROOT_ITERATIONS: usize = 200;
/// Step size below which a root estimate is considered converged.
pub const ROOT_STEP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial has degree {0}, at least 1 is required")]
    DegreeTooLow(usize),
    #[error("leading coefficient magnitude {leading:e} below threshold {threshold:e}")]
    DegenerateLeading { leading: f64, threshold: f64 },
    #[error("root finder did not converge after {iterations} iterations (worst backward error {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("non-finite coefficient at index {0}")]
    NonFinite(usize),
}

/// The zeros of a polynomial together with its leading coefficient, so that
/// `X(z) = leading * prod_k (z - zeros[k])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    #[serde(with = "crate::serde_c64::vec")]
    pub zeros: Vec<C64>,
    #[serde(with = "crate::serde_c64", default = "one")]
    pub leading: C64,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

impl ZeroSet {
    pub fn new(zeros: Vec<C64>, leading: C64) -> Self {
        Self { zeros, leading }
    }

    pub fn monic(zeros: Vec<C64>) -> Self {
        Self::new(zeros, C64::new(1.0, 0.0))
    }

    pub fn degree(&self) -> usize {
        self.zeros.len()
    }

    /// Smallest distance between two distinct zeros (`inf` for fewer than two).
    pub fn min_pairwise_distance(&self) -> f64 {
        min_pairwise_distance(&self.zeros)
    }

    /// Largest zero modulus (0 for an empty set).
    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the product form `leading * prod (z - zeros[k])`.
    pub fn eval(&self, z: C64) -> C64 {
        self.zeros
            .iter()
            .fold(self.leading, |acc, &a| acc * (z - a))
    }
}

pub fn min_pairwise_distance(points: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.min((a - b).norm());
        }
    }
    best
}

pub fn norm2(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// `sum_k coeffs[k] z^k` by Horner's rule.
pub fn horner_eval(coeffs: &[C64], z: C64) -> C64 {
    coeffs
        .iter()
        .rev()
        .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Value and first derivative in one Horner pass.
fn horner_eval_with_derivative(coeffs: &[C64], z: C64) -> (C64, C64) {
    let mut p = C64::new(0.0, 0.0);
    let mut dp = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// `max_k |coeffs[k]| * sum_k |z|^k`, the normwise scale for the evaluation
/// error at `z`.
fn horner_abs_scale(coeffs: &[C64], z: C64) -> f64 {
    let r = z.norm();
    max_abs(coeffs) * coeffs.iter().fold(0.0, |acc, _| acc * r + 1.0)
}

/// Expands `leading * prod (z - a_k)` into ascending coefficients.
pub fn vieta_expand(zeros: &ZeroSet) -> Vec<C64> {
    let mut coeffs = Vec::with_capacity(zeros.degree() + 1);
    coeffs.push(zeros.leading);
    for &a in &zeros.zeros {
        // multiply current polynomial (ascending) by (z - a)
        coeffs.push(C64::new(0.0, 0.0));
        for k in (1..coeffs.len()).rev() {
            coeffs[k] = coeffs[k - 1] - a * coeffs[k];
        }
        coeffs[0] = -a * coeffs[0];
    }
    coeffs
}

/// All roots of the polynomial via Aberth-Ehrlich simultaneous iteration.
///
/// The returned [`ZeroSet`] carries the input's leading coefficient, so
/// `vieta_expand(&find_roots(c)?)` reproduces `c` up to rounding.
pub fn find_roots(coeffs: &[C64]) -> Result<ZeroSet, PolyError> {
    if let Some(i) = coeffs
        .iter()
        .position(|c| !(c.re.is_finite() && c.im.is_finite()))
    {
        return Err(PolyError::NonFinite(i));
    }
    if coeffs.len() < 2 {
        return Err(PolyError::DegreeTooLow(coeffs.len().saturating_sub(1)));
    }
    let degree = coeffs.len() - 1;
    let leading = coeffs[degree];
    let threshold = DEGENERATE_LEADING_REL * max_abs(coeffs);
    if leading.norm() <= threshold || leading.norm() == 0.0 {
        return Err(PolyError::DegenerateLeading {
            leading: leading.norm(),
            threshold,
        });
    }
    if degree == 1 {
        return Ok(ZeroSet::new(vec![-coeffs[0] / leading], leading));
    }

    let cauchy = 1.0
        + coeffs[..degree]
            .iter()
            .map(|c| (c / leading).norm())
            .fold(0.0, f64::max);
    let mut roots: Vec<C64> = (0..degree)
        .map(|j| {
            let phase = 2.0 * std::f64::consts::PI * j as f64 / degree as f64 + 0.4;
            C64::from_polar(cauchy, phase)
        })
        .collect();
    let mut done = vec![false; degree];

    let mut iterations = 0;
    while iterations < MAX_ROOT_ITERATIONS && done.iter().any(|d| !d) {
        iterations += 1;
        for i in 0..degree {
            if done[i] {
                continue;
            }
            let zi = roots[i];
            let (p, dp) = horner_eval_with_derivative(coeffs, zi);
            if p.norm() == 0.0 {
                done[i] = true;
                continue;
            }
            let newton = p / dp;
            let repulsion: C64 = roots
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &zj)| (zi - zj).inv())
                .sum();
            let mut step = newton / (C64::new(1.0, 0.0) - newton * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                step = newton;
            }
            roots[i] = zi - step;
            if step.norm() < ROOT_STEP_TOLERANCE * zi.norm().max(1.0) {
                done[i] = true;
            }
        }
    }

    let residual = roots
        .iter()
        .map(|&z| {
            let scale = horner_abs_scale(coeffs, z);
            horner_eval(coeffs, z).norm() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    if !(residual <= ROOT_TOLERANCE) {
        return Err(PolyError::NonConvergence {
            iterations,
            residual,
        });
    }
    Ok(ZeroSet::new(roots, leading))
}

/// Polynomial product / full linear convolution.
pub fn linear_convolve(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// `x * conj(reverse(x))`, length `2 len(x) - 1`, zero lag at the centre.
pub fn autocorrelation(x: &[C64]) -> Vec<C64> {
    let rev: Vec<C64> = x.iter().rev().map(|v| v.conj()).collect();
    linear_convolve(x, &rev)
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(size: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(size)
        } else {
            p.plan_fft_forward(size)
        }
    })
}

fn unitary_transform(x: &[C64], size: usize, inverse: bool) -> Vec<C64> {
    assert!(
        size >= x.len(),
        "transform size {size} shorter than input {}",
        x.len()
    );
    let mut buf = vec![C64::new(0.0, 0.0); size];
    buf[..x.len()].copy_from_slice(x);
    if size == 0 {
        return buf;
    }
    plan(size, inverse).process(&mut buf);
    let scale = 1.0 / (size as f64).sqrt();
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

/// Unitary forward DFT of `x` zero-padded to `size`:
/// `X_k = size^{-1/2} sum_n x_n e^{-2 pi i k n / size}`.
pub fn dft(x: &[C64], size: usize) -> Vec<C64> {
    unitary_transform(x, size, false)
}

/// Unitary inverse DFT (positive exponent), zero-padded to `size`.
pub fn idft(x: &[C64], size: usize) -> Vec<C64> {
    unitary_transform(x, size, true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn naive_dft(x: &[C64], size: usize) -> Vec<C64> {
        (0..size)
            .map(|k| {
                x.iter()
                    .enumerate()
                    .map(|(n, &v)| {
                        v * C64::from_polar(
                            1.0,
                            -2.0 * std::f64::consts::PI * (k * n) as f64 / size as f64,
                        )
                    })
                    .sum::<C64>()
                    / (size as f64).sqrt()
            })
            .collect()
    }

    #[test]
    fn horner_examples() {
        let mut one = vec![c(0.0, 0.0); 5];
        one[0] = c(1.0, 0.0);
        assert_eq!(horner_eval(&one, c(3.0, -2.0)), c(1.0, 0.0));
        let alpha = c(0.3, -1.2);
        assert!(horner_eval(&[-alpha, c(1.0, 0.0)], alpha).norm() < 1e-15);
        let v = horner_eval(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)], c(2.0, 0.0));
        assert!((v - c(17.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn vieta_examples() {
        assert_eq!(
            vieta_expand(&ZeroSet::monic(vec![c(2.0, 0.0)])),
            vec![c(-2.0, 0.0), c(1.0, 0.0)]
        );
        let v = vieta_expand(&ZeroSet::monic(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        assert_eq!(v, vec![c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let v = vieta_expand(&ZeroSet::new(vec![c(0.0, 1.0), c(0.0, -1.0)], c(3.0, 0.0)));
        for (a, b) in v.iter().zip([c(3.0, 0.0), c(0.0, 0.0), c(3.0, 0.0)]) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn roots_of_difference_of_squares() {
        let roots = find_roots(&[c(-1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let mut re: Vec<f64> = roots.zeros.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((re[0] + 1.0).abs() < 1e-12 && (re[1] - 1.0).abs() < 1e-12);
        assert!(roots.zeros.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn root_finder_errors() {
        assert!(matches!(
            find_roots(&[c(1.0, 0.0)]),
            Err(PolyError::DegreeTooLow(0))
        ));
        assert!(matches!(
            find_roots(&[c(1.0, 0.0), c(2.0, 0.0), c(1e-14, 0.0)]),
            Err(PolyError::DegenerateLeading { .. })
        ));
        assert!(matches!(
            find_roots(&[c(1.0, 0.0), c(f64::NAN, 0.0)]),
            Err(PolyError::NonFinite(1))
        ));
    }

    #[test]
    fn root_at_origin() {
        let roots = find_roots(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(roots.zeros.iter().all(|z| z.norm() < 1e-7));
    }

    #[test]
    fn convolution_examples() {
        let b = vec![c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        assert_eq!(linear_convolve(&[c(1.0, 0.0)], &b), b);
        assert_eq!(
            linear_convolve(&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]),
            vec![c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.0)]
        );
    }

    #[test]
    fn autocorrelation_of_unit_energy_vector() {
        assert_eq!(autocorrelation(&[c(1.0, 0.0)]), vec![c(1.0, 0.0)]);
        let x = [c(0.6, 0.0), c(0.0, 0.8)];
        let a = autocorrelation(&x);
        assert_eq!(a.len(), 3);
        assert!((a[1] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((a[0] - a[2].conj()).norm() < 1e-15);
    }

    #[test]
    fn dft_impulse_and_parseval() {
        let mut x = vec![c(0.0, 0.0); 8];
        x[0] = c(1.0, 0.0);
        for v in dft(&x, 8) {
            assert!((v - c(1.0 / 8f64.sqrt(), 0.0)).norm() < 1e-15);
        }
        let y = [c(1.0, -2.0), c(0.5, 0.25), c(-3.0, 1.0)];
        let f = dft(&y, 11);
        assert!((norm2(&f) - norm2(&y)).abs() < 1e-12);
        let back = idft(&f, 11);
        for (a, b) in back
            .iter()
            .zip(y.iter().chain(std::iter::repeat(&c(0.0, 0.0))))
        {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dft_matches_naive_transform() {
        let x: Vec<C64> = (0..7)
            .map(|n| c((n as f64 * 0.7).sin(), (n as f64 * 1.3).cos() - 0.2))
            .collect();
        let fast = dft(&x, 16);
        let slow = naive_dft(&x, 16);
        for (a, b) in fast.iter().zip(&slow) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
