//! Robustness certificates: how much additive noise a zero pattern
//! tolerates before a root can leave its `delta`-ball.

mod polygon;

pub use polygon::{
    centroid_vs_vertex_lemma, polygon_product, polygon_product_extrema, verify_vertex_conjecture,
    vertex_lowerbound_huffman, vertex_product, LemmaReport, PolygonExtrema, VertexConjectureReport,
};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{max_abs, ZeroSet, C64, DEGENERATE_LEADING_REL};

/// Default number of angles for grid searches over a circle.
pub const DEFAULT_THETA_GRID: usize = 10_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("delta = {delta} must lie in [0, {limit})")]
    DeltaTooLarge { delta: f64, limit: f64 },
    #[error("zeros are not simple (d_min = 0)")]
    RepeatedZeros,
    #[error("leading coefficient is degenerate")]
    DegenerateLeading,
    #[error("{0}")]
    DomainError(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerturbationCertificate {
    pub delta: f64,
    pub epsilon: f64,
    pub dmin: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "xN_abs")]
    pub xn_abs: f64,
    /// Every zero lay inside the unit disc and `R` was raised to 1.
    pub radius_clamped: bool,
}

fn check_delta(delta: f64, dmin: f64) -> Result<(), BoundsError> {
    if !(delta >= 0.0 && delta < dmin / 2.0) {
        return Err(BoundsError::DeltaTooLarge {
            delta,
            limit: dmin / 2.0,
        });
    }
    Ok(())
}

/// `|x_N| delta (d_min - delta)^{N-1} / (sqrt(1+N) (R + delta)^N)`.
pub fn theorem2_epsilon(xn_abs: f64, delta: f64, dmin: f64, radius: f64, n: usize) -> f64 {
    let n_f = n as f64;
    xn_abs * delta * (dmin - delta).powi(n as i32 - 1)
        / ((1.0 + n_f).sqrt() * (radius + delta).powi(n as i32))
}

/// Noise level below which each root of `X + w` stays within `delta` of
/// a distinct zero of `X`.
pub fn theorem2_bound(zeros: &ZeroSet, delta: f64) -> Result<PerturbationCertificate, BoundsError> {
    let dmin = zeros.min_pairwise_distance();
    if zeros.degree() < 2 || dmin <= 0.0 {
        return Err(BoundsError::RepeatedZeros);
    }
    check_delta(delta, dmin)?;
    let max_mod = zeros.max_modulus();
    let radius = max_mod.max(1.0);
    let xn_abs = zeros.leading.norm();
    Ok(PerturbationCertificate {
        delta,
        epsilon: theorem2_epsilon(xn_abs, delta, dmin, radius, zeros.degree()),
        dmin,
        radius,
        xn_abs,
        radius_clamped: max_mod < 1.0,
    })
}

/// Value of the certificate for a Huffman word at `delta = d_min/2` when
/// the pairwise distance is `2R sin(pi/N)`; it no longer depends on `delta`.
pub fn huffman_theorem2_closed_form(n: usize, radius: f64) -> f64 {
    let n_f = n as f64;
    1.0 / ((1.0 + n_f).sqrt()
        * (radius.powf(-2.0 * n_f) + 1.0).sqrt()
        * (1.0 / (PI / n_f).sin() + 1.0).powf(n_f))
}

/// `sqrt(min_m min_theta |X(a_m + delta e^{i theta})|^2 / sum_n |z|^{2n})`.
pub fn exact_worstcase_bound(
    zeros: &ZeroSet,
    delta: f64,
    theta_grid: usize,
) -> Result<f64, BoundsError> {
    let dmin = zeros.min_pairwise_distance();
    if dmin <= 0.0 {
        return Err(BoundsError::RepeatedZeros);
    }
    if !(delta > 0.0 && delta < dmin / 2.0) {
        return Err(BoundsError::DeltaTooLarge {
            delta,
            limit: dmin / 2.0,
        });
    }
    if theta_grid == 0 {
        return Err(BoundsError::DomainError(
            "theta grid must be positive".into(),
        ));
    }
    let n = zeros.degree();
    let mut best = f64::INFINITY;
    for &a in &zeros.zeros {
        for j in 0..theta_grid {
            let theta = 2.0 * PI * j as f64 / theta_grid as f64;
            let z = a + C64::from_polar(delta, theta);
            let num = zeros.eval(z).norm_sqr();
            let r2 = z.norm_sqr();
            let den: f64 = (0..=n).map(|k| r2.powi(k as i32)).sum();
            best = best.min(num / den);
        }
    }
    Ok(best.sqrt())
}

/// Noise power bound for Huffman words with `N = 4M` zeros, as a product
/// of the worst-case leading coefficient, the energy normalization and the
/// vertex-circle relaxation.
pub fn huffman_bmocz_noise_bound(n: usize, radius: f64, delta: f64) -> Result<f64, BoundsError> {
    if !n.is_multiple_of(4) || n < 12 {
        return Err(BoundsError::DomainError(format!(
            "N = {n} must be 4M with M >= 3"
        )));
    }
    if !(radius > 1.0) {
        return Err(BoundsError::DomainError(format!(
            "R = {radius} must exceed 1"
        )));
    }
    let m = n / 4;
    let s1 = (PI / n as f64).sin();
    let dmin = 2.0 * s1 / radius;
    check_delta(delta, dmin)?;
    let s2 = (2.0 * PI / n as f64).sin();
    let s4 = (4.0 * PI / n as f64).sin();
    let rd = radius + delta;
    let ratio = (s2 - s4 - 2.0 * s1) / (2.0 * (1.0 - s2));
    let prod: f64 = (3..=m).map(|k| (k as f64).powi(4)).product();
    let value = 1.0 / (radius.powi(8 * m as i32) + 1.0) * (rd * rd - 1.0)
        / (rd.powi(8 * m as i32) - 1.0)
        * radius.powi(2 - 4 * m as i32)
        * delta.powi(4)
        * (dmin - delta).powi(4)
        * prod
        * ratio.powi(4 * m as i32 - 12);
    Ok(value)
}

/// Upper bound on how many zeros with pairwise distance `dmin` fit into
/// the annulus `R^{-1} <= |z| <= R`.
pub fn packing_limit(radius: f64, dmin: f64) -> f64 {
    PI * (radius * radius - radius.powi(-2)) / (dmin * dmin * 12f64.sqrt())
}

/// `1 + max_{k<N} |x_k / x_N|`, an upper bound on every root modulus.
pub fn cauchy_root_bound(coeffs: &[C64]) -> Result<f64, BoundsError> {
    let Some((&lead, rest)) = coeffs.split_last() else {
        return Err(BoundsError::DegenerateLeading);
    };
    if lead.norm() <= DEGENERATE_LEADING_REL * max_abs(coeffs) || lead.norm() == 0.0 {
        return Err(BoundsError::DegenerateLeading);
    }
    Ok(1.0 + rest.iter().map(|c| (c / lead).norm()).fold(0.0, f64::max))
}

/// Largest displacement after greedily pairing each original root with
/// the nearest unused perturbed root.
pub fn root_displacement(original: &[C64], perturbed: &[C64]) -> f64 {
    let mut used = vec![false; perturbed.len()];
    let mut worst: f64 = 0.0;
    for a in original {
        let best = perturbed
            .iter()
            .enumerate()
            .filter(|(i, _)| !used[*i])
            .map(|(i, b)| (i, (a - b).norm()))
            .min_by(|x, y| x.1.total_cmp(&y.1));
        match best {
            Some((i, d)) => {
                used[i] = true;
                worst = worst.max(d);
            }
            None => return f64::INFINITY,
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{build_codebook, signal_zeros, BitWord};

    fn huffman_zeros(raw: u64, k: usize, r: f64) -> ZeroSet {
        let cb = build_codebook(k, r).unwrap();
        signal_zeros(&BitWord::new(raw, k), &cb).unwrap()
    }

    #[test]
    fn theorem2_edges() {
        let z = huffman_zeros(0xa5, 8, 1.3287);
        assert_eq!(theorem2_bound(&z, 0.0).unwrap().epsilon, 0.0);
        let dmin = z.min_pairwise_distance();
        assert!(matches!(
            theorem2_bound(&z, dmin / 2.0),
            Err(BoundsError::DeltaTooLarge { .. })
        ));
        let inside = huffman_zeros(0, 8, 1.3287);
        let cert = theorem2_bound(&inside, 0.01).unwrap();
        assert!(cert.radius_clamped && cert.radius == 1.0);
        assert!(!theorem2_bound(&z, 0.01).unwrap().radius_clamped);
    }

    #[test]
    fn closed_form_matches_general_formula() {
        for (n, r) in [(8usize, 1.3287), (4, 1.5538), (16, 1.1791), (12, 2.0)] {
            let s = (PI / n as f64).sin();
            let dmin = 2.0 * r * s;
            let xn = 1.0 / (r.powf(-2.0 * n as f64) + 1.0).sqrt();
            let general = theorem2_epsilon(xn, dmin / 2.0, dmin, r, n);
            let closed = huffman_theorem2_closed_form(n, r);
            assert!(
                (general - closed).abs() < 1e-10 * closed.max(1e-300),
                "{general} {closed}"
            );
        }
    }

    #[test]
    fn closed_form_decreases_with_n() {
        for r in [1.1, 1.3287, 2.0] {
            let vals: Vec<f64> = (4..=64)
                .map(|n| huffman_theorem2_closed_form(n, r))
                .collect();
            assert!(vals.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn huffman_noise_bound_formula() {
        assert_eq!(huffman_bmocz_noise_bound(12, 1.2, 0.0).unwrap(), 0.0);
        assert!(huffman_bmocz_noise_bound(10, 1.2, 0.01).is_err());
        assert!(huffman_bmocz_noise_bound(8, 1.2, 0.01).is_err());
        // M = 3: the product over m is 3^4 and the sine-ratio factor drops out
        let (r, d) = (1.2f64, 0.05f64);
        let dmin = 2.0 * (PI / 12.0).sin() / r;
        let expect = 1.0 / (r.powi(24) + 1.0) * ((r + d).powi(2) - 1.0) / ((r + d).powi(24) - 1.0)
            * r.powi(-10)
            * d.powi(4)
            * (dmin - d).powi(4)
            * 81.0;
        let got = huffman_bmocz_noise_bound(12, r, d).unwrap();
        assert!((got / expect - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huffman_noise_bound_increases_for_small_delta() {
        for (n, r) in [(12usize, 1.2319), (16, 1.1791), (32, 1.08)] {
            let half = (PI / n as f64).sin() / r;
            let vals: Vec<f64> = (0..10)
                .map(|i| huffman_bmocz_noise_bound(n, r, half * 0.4 * i as f64 / 9.0).unwrap())
                .collect();
            assert!(vals.windows(2).all(|w| w[1] > w[0]), "N={n}: {vals:?}");
        }
    }

    #[test]
    fn packing() {
        let v = packing_limit(2f64.sqrt(), 1.0);
        assert!((v - PI * 1.5 / 12f64.sqrt()).abs() < 1e-15);
        assert!((v - 1.360).abs() < 1e-3);
        assert!((packing_limit(1.7, 0.25) / packing_limit(1.7, 0.5) - 4.0).abs() < 1e-12);
        assert!(packing_limit(1.0 + 1e-12, 0.1) < 1e-9);
    }

    #[test]
    fn cauchy_bound() {
        let c = |re: f64| C64::new(re, 0.0);
        assert_eq!(cauchy_root_bound(&[c(-1.0), c(0.0), c(1.0)]).unwrap(), 2.0);
        assert!(cauchy_root_bound(&[c(1.0), c(0.0)]).is_err());
        assert!(cauchy_root_bound(&[]).is_err());
    }

    #[test]
    fn worstcase_errors_and_grid() {
        let z = huffman_zeros(3, 8, 1.3287);
        assert!(exact_worstcase_bound(&z, 0.0, 100).is_err());
        assert!(exact_worstcase_bound(&z, 0.01, 0).is_err());
        let coarse = exact_worstcase_bound(&z, 0.05, 1000).unwrap();
        let fine = exact_worstcase_bound(&z, 0.05, 4000).unwrap();
        assert!(fine <= coarse * (1.0 + 1e-12));
        assert!((coarse - fine).abs() / fine < 5e-3);
    }

    #[test]
    fn displacement_pairs_greedily() {
        let a = [C64::new(0.0, 0.0), C64::new(1.0, 0.0)];
        let b = [C64::new(1.1, 0.0), C64::new(0.0, 0.2)];
        assert!((root_displacement(&a, &b) - 0.2).abs() < 1e-15);
        assert_eq!(root_displacement(&a, &b[..1]), f64::INFINITY);
    }
}
