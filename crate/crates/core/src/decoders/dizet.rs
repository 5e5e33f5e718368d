use super::{BitFlag, DecodeResult};
use crate::huffman::HuffmanCodebook;
use crate::poly::{horner_eval, idft, C64};

/// `w(a) = sqrt((1 - |a|^2) / (1 - |a|^{2N}))`.
///
/// Evaluated as `1 / sqrt(sum_{n<N} |a|^{2n})`, which is the same quantity
/// without the removable singularity at `|a| = 1` (where it is `1/sqrt(N)`).
pub fn dizet_weight(alpha: C64, n: usize) -> f64 {
    let r2 = alpha.norm_sqr();
    let mut term = 1.0;
    let mut sum = 0.0;
    for _ in 0..n {
        sum += term;
        term *= r2;
    }
    sum.sqrt().recip()
}

/// Outer and inner weights for one received length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DizetWeights {
    pub n: usize,
    pub outer: f64,
    pub inner: f64,
}

impl DizetWeights {
    pub fn new(cb: &HuffmanCodebook, n: usize) -> Self {
        let r = cb.radius();
        Self {
            n,
            outer: dizet_weight(C64::new(r, 0.0), n),
            inner: dizet_weight(C64::new(r.recip(), 0.0), n),
        }
    }

    /// `w_inner / w_outer`, which equals `R^{N-1}`.
    pub fn ratio(&self) -> f64 {
        self.inner / self.outer
    }
}

fn decide(w: &DizetWeights, outer: &[C64], inner: &[C64]) -> DecodeResult {
    let mut bits = Vec::with_capacity(outer.len());
    let mut margins = Vec::with_capacity(outer.len());
    for (yo, yi) in outer.iter().zip(inner) {
        let a = w.outer * yo.norm();
        let b = w.inner * yi.norm();
        bits.push(a < b);
        margins.push((a - b).abs());
    }
    let flags = vec![BitFlag::Clean; bits.len()];
    DecodeResult::from_bits(&bits, margins, flags)
}

/// Direct zero testing: bit `k` is 1 when the received polynomial is
/// (weighted) smaller at the outer candidate than at the inner one.
pub fn decode_dizet(y: &[C64], cb: &HuffmanCodebook) -> DecodeResult {
    let w = DizetWeights::new(cb, y.len());
    let outer: Vec<C64> = cb.pairs().iter().map(|p| horner_eval(y, p.outer)).collect();
    let inner: Vec<C64> = cb.pairs().iter().map(|p| horner_eval(y, p.inner)).collect();
    decide(&w, &outer, &inner)
}

/// DiZeT through two FFTs of the radially scaled, zero-padded block.
pub fn decode_dizet_dft(y: &[C64], cb: &HuffmanCodebook) -> DecodeResult {
    let k = cb.k();
    let w = DizetWeights::new(cb, y.len());
    let size = k * y.len().div_ceil(k).max(1);
    let stride = size / k;
    let gain = (size as f64).sqrt();
    let sampled = |radius: f64| -> Vec<C64> {
        let mut scale = 1.0;
        let scaled: Vec<C64> = y
            .iter()
            .map(|&v| {
                let s = v * scale;
                scale *= radius;
                s
            })
            .collect();
        let spec = idft(&scaled, size);
        (0..k).map(|j| spec[j * stride] * gain).collect()
    };
    let r = cb.radius();
    decide(&w, &sampled(r), &sampled(r.recip()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{build_codebook, encode, BitWord};

    #[test]
    fn weight_limit_and_ratio() {
        let n = 12;
        assert!((dizet_weight(C64::new(0.0, 1.0), n) - 1.0 / (n as f64).sqrt()).abs() < 1e-15);
        for r in [1.0 + 1e-9, 1.0 - 1e-9] {
            assert!((dizet_weight(C64::new(r, 0.0), n) - 1.0 / (n as f64).sqrt()).abs() < 1e-7);
        }
        for (r, n) in [(1.3287, 16usize), (1.5538, 8), (1.1791, 40)] {
            let a = C64::new(r, 0.0);
            let closed = ((1.0 - r * r) / (1.0 - r.powi(2 * n as i32))).sqrt();
            assert!((dizet_weight(a, n) / closed - 1.0).abs() < 1e-12);
            let cb = build_codebook(8, r).unwrap();
            let w = DizetWeights::new(&cb, n);
            assert!((w.ratio() / r.powi(n as i32 - 1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn noiseless_flat_channel_all_words() {
        for k in 1..=10usize {
            let cb = build_codebook(k, crate::huffman::optimal_radius(k, 1.0).max(1.05)).unwrap();
            for raw in 0..1u64 << k {
                let word = BitWord::new(raw, k);
                let x = encode(&word, &cb).unwrap();
                assert_eq!(decode_dizet(&x.coeffs, &cb).word, word, "K={k}");
            }
        }
    }

    #[test]
    fn dft_bins_match_horner_when_divisible() {
        let cb = build_codebook(8, 1.3287).unwrap();
        // N = 16 so the DFT needs no padding
        let y: Vec<C64> = (0..16)
            .map(|n| C64::new((n as f64 * 0.7).sin(), (n as f64 * 1.3).cos()))
            .collect();
        let a = decode_dizet(&y, &cb);
        let b = decode_dizet_dft(&y, &cb);
        assert_eq!(a.word, b.word);
        for (ma, mb) in a.per_bit_margin.iter().zip(&b.per_bit_margin) {
            assert!((ma - mb).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_block_is_all_zero_word() {
        let cb = build_codebook(8, 1.3287).unwrap();
        let y = vec![C64::new(0.0, 0.0); 15];
        for res in [decode_dizet(&y, &cb), decode_dizet_dft(&y, &cb)] {
            assert_eq!(res.word, BitWord::zeros(8));
            assert!(res.per_bit_margin.iter().all(|&m| m == 0.0));
        }
    }
}
