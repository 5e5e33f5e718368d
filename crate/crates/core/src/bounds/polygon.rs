//! Products of distances from a point on a small circle to the vertices of
//! a regular `N`-gon.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::BoundsError;
use crate::poly::C64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolygonExtrema {
    pub min: f64,
    pub max: f64,
    pub argmin_theta: f64,
    pub argmax_theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VertexConjectureReport {
    pub n: usize,
    pub r: f64,
    pub delta: f64,
    pub holds: bool,
    pub observed_min: f64,
    pub conjectured: f64,
    pub argmin_theta: f64,
    pub min_at_pi: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub strict: bool,
}

fn vertices(n: usize, r: f64) -> impl Iterator<Item = C64> {
    (0..n).map(move |k| C64::from_polar(r, 2.0 * PI * k as f64 / n as f64))
}

/// `prod_n |delta e^{i theta} - r w^n|`, times `delta` when the centroid
/// counts as an extra point.
pub fn polygon_product(n: usize, r: f64, delta: f64, theta: f64, include_centroid: bool) -> f64 {
    let z = C64::from_polar(delta, theta);
    let p: f64 = vertices(n, r).map(|v| (z - v).norm()).product();
    if include_centroid {
        p * delta
    } else {
        p
    }
}

/// Closed-form extrema of [`polygon_product`] over `theta`:
/// `|r^N - delta^N|` at `theta = 0` and `r^N + delta^N` at `theta = pi/N`.
pub fn polygon_product_extrema(
    n: usize,
    r: f64,
    delta: f64,
    include_centroid: bool,
) -> PolygonExtrema {
    let rn = r.powi(n as i32);
    let dn = delta.powi(n as i32);
    let scale = if include_centroid { delta } else { 1.0 };
    PolygonExtrema {
        min: (rn - dn).abs() * scale,
        max: (rn + dn) * scale,
        argmin_theta: 0.0,
        argmax_theta: PI / n as f64,
    }
}

/// `prod_n |r + delta e^{i theta} - r w^n|` for a circle around the vertex `r`.
pub fn vertex_product(n: usize, r: f64, delta: f64, theta: f64) -> f64 {
    let z = C64::new(r, 0.0) + C64::from_polar(delta, theta);
    vertices(n, r).map(|v| (z - v).norm()).product()
}

/// Golden-section refinement of a minimum bracketed by `[a, b]`.
pub(crate) fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..100 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        if b - a < 1e-14 {
            break;
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

/// Grid minimum of `f` on `[0, 2 pi)` refined by golden-section search.
pub(crate) fn circle_min(f: impl Fn(f64) -> f64, grid: usize) -> (f64, f64) {
    let step = 2.0 * PI / grid as f64;
    let (j, _) = (0..grid)
        .map(|j| (j, f(j as f64 * step)))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("grid is non-empty");
    let centre = j as f64 * step;
    let (x, v) = golden_min(&f, centre - step, centre + step);
    (x.rem_euclid(2.0 * PI), v)
}

/// Numerically checks `min_theta vertex_product = r^N - (r - delta)^N`
/// and that the minimum sits at `theta = pi`.
///
/// The claim is only made for `delta <= r sin(pi/N)`; larger values are
/// evaluated anyway and simply reported.
pub fn verify_vertex_conjecture(
    n: usize,
    r: f64,
    delta: f64,
    theta_grid: usize,
) -> VertexConjectureReport {
    let conjectured = r.powi(n as i32) - (r - delta).powi(n as i32);
    let (argmin, observed) = circle_min(|t| vertex_product(n, r, delta, t), theta_grid.max(3));
    let tolerance = 1e-9 * conjectured.abs().max(1.0);
    VertexConjectureReport {
        n,
        r,
        delta,
        holds: observed >= conjectured - tolerance,
        observed_min: observed,
        conjectured,
        argmin_theta: argmin,
        min_at_pi: (argmin - PI).abs() <= 2.0 * PI / theta_grid.max(3) as f64,
    }
}

/// `delta (r^N - delta^N)` against `(r^N - (r - delta)^N)(r - delta)`.
pub fn centroid_vs_vertex_lemma(n: usize, r: f64, delta: f64) -> LemmaReport {
    let rn = r.powi(n as i32);
    let lhs = delta * (rn - delta.powi(n as i32));
    let rhs = (rn - (r - delta).powi(n as i32)) * (r - delta);
    LemmaReport {
        lhs,
        rhs,
        strict: lhs < rhs,
    }
}

/// Lower bound on `min_theta vertex_product` for `N = 4M`.
///
/// The two nearest vertices contribute `delta (2r - delta)`, the remaining
/// left-half-plane vertices are bounded by the radius `b_{M+2}` and the
/// first-quadrant ones by odd multiples of `b_2 / 2`.
pub fn vertex_lowerbound_huffman(m: usize, r: f64, delta: f64) -> Result<f64, BoundsError> {
    if m < 3 {
        return Err(BoundsError::DomainError(format!(
            "M = {m} must be at least 3"
        )));
    }
    let limit = r * (PI / (4 * m) as f64).sin();
    if !(r > 0.0 && delta >= 0.0 && delta < limit) {
        return Err(BoundsError::DomainError(format!(
            "delta = {delta} must lie in [0, {limit})"
        )));
    }
    let gamma = PI / (2 * m) as f64;
    let c = r * gamma.sin();
    let h = r * (1.0 - gamma.cos());
    let b_far = ((r + c - 2f64.sqrt() * delta).powi(2) + (r - h).powi(2)).sqrt();
    let half_b2 = r * (PI / (4 * m) as f64).sin() / 2f64.sqrt();
    let near: f64 = (1..=m)
        .map(|k| ((2 * k - 1) as f64 * half_b2).powi(2))
        .product();
    Ok(b_far.powi(2 * m as i32 - 2) * delta * (2.0 * r - delta) * near)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_extrema(n: usize, r: f64, delta: f64, centroid: bool) -> (f64, f64) {
        let f = |t: f64| polygon_product(n, r, delta, t, centroid);
        let (_, min) = circle_min(f, 10_000);
        let (_, neg_max) = circle_min(|t| -f(t), 10_000);
        (min, -neg_max)
    }

    #[test]
    fn extrema_examples() {
        let e = polygon_product_extrema(2, 1.0, 0.5, false);
        assert!((e.min - 0.75).abs() < 1e-15 && (e.max - 1.25).abs() < 1e-15);
        let e = polygon_product_extrema(6, 1.0, 0.3, true);
        assert!((e.min - 0.3 * (1.0 - 0.3f64.powi(6))).abs() < 1e-15);
        assert!((e.min - 0.29978).abs() < 1e-5);
        assert_eq!(e.argmin_theta, 0.0);
        assert!((e.argmax_theta - PI / 6.0).abs() < 1e-15);
    }

    #[test]
    fn extrema_match_grid() {
        for n in 2..=12usize {
            for frac in [0.1, 0.3, 0.49] {
                for centroid in [false, true] {
                    let r = 1.7;
                    let e = polygon_product_extrema(n, r, frac * r, centroid);
                    let (min, max) = grid_extrema(n, r, frac * r, centroid);
                    assert!(
                        (min / e.min - 1.0).abs() < 1e-9,
                        "N={n} {frac}: {min} {}",
                        e.min
                    );
                    assert!(
                        (max / e.max - 1.0).abs() < 1e-9,
                        "N={n} {frac}: {max} {}",
                        e.max
                    );
                    let at = |t| polygon_product(n, r, frac * r, t, centroid);
                    assert!((at(e.argmin_theta) / e.min - 1.0).abs() < 1e-12);
                    assert!((at(e.argmax_theta) / e.max - 1.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn conjecture_n2_is_exact() {
        for delta in [0.1, 0.5, 0.9] {
            let rep = verify_vertex_conjecture(2, 1.0, delta, 10_000);
            assert!((rep.conjectured - delta * (2.0 - delta)).abs() < 1e-15);
            assert!((rep.observed_min - rep.conjectured).abs() < 1e-12);
            assert!(rep.holds && rep.min_at_pi);
        }
    }

    #[test]
    fn conjecture_hexagon() {
        let rep = verify_vertex_conjecture(6, 1.0, 0.3, 100_000);
        assert!(rep.holds && rep.min_at_pi, "{rep:?}");
    }

    #[test]
    fn lemma() {
        let rep = centroid_vs_vertex_lemma(6, 1.0, 0.25);
        assert!(rep.strict);
        let rep = centroid_vs_vertex_lemma(2, 1.0, 0.5);
        assert!((rep.lhs - rep.rhs).abs() < 1e-12);
        let rep = centroid_vs_vertex_lemma(5, 1.0, 1e-9);
        assert!(rep.lhs > 0.0 && rep.rhs > 0.0 && rep.strict);
    }

    #[test]
    fn huffman_vertex_bound_below_true_minimum() {
        for m in [3usize, 4, 5, 8, 12] {
            let n = 4 * m;
            for r in [0.5, 1.0, 2.0] {
                let limit = r * (PI / n as f64).sin();
                for frac in [0.1, 0.5, 0.9] {
                    let delta = frac * limit;
                    let bound = vertex_lowerbound_huffman(m, r, delta).unwrap();
                    let (_, truth) = circle_min(|t| vertex_product(n, r, delta, t), 10_000);
                    assert!(bound <= truth, "M={m} r={r} {frac}: {bound} > {truth}");
                }
            }
        }
        assert_eq!(vertex_lowerbound_huffman(3, 1.0, 0.0).unwrap(), 0.0);
        assert!(vertex_lowerbound_huffman(2, 1.0, 0.01).is_err());
        assert!(vertex_lowerbound_huffman(3, 1.0, 0.3).is_err());
        let a = vertex_lowerbound_huffman(3, 1.0, 1e-4).unwrap();
        let b = vertex_lowerbound_huffman(3, 1.0, 2e-4).unwrap();
        assert!(b > a);
    }
}
