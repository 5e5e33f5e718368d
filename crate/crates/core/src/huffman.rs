//! Huffman BMOCZ codebooks and the bit-to-signal encoder.
//!
//! Pair `k` (0-based) owns the two zeros `R e^{2 pi i k / K}` (bit 1) and
//! `R^{-1} e^{2 pi i k / K}` (bit 0). Whatever bits are chosen, the signal's
//! aperiodic autocorrelation is `(-eta, 0, .., 0, 1, 0, .., 0, -eta)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{norm2, vieta_expand, ZeroSet, C64};

/// Largest supported number of bits per block.
pub const MAX_BITS: usize = 63;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodecError {
    #[error("bit word has {got} bits, codebook expects {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("number of bits must be in 1..={MAX_BITS}, got {0}")]
    InvalidBitCount(usize),
    #[error("radius must be finite and > 1, got {0}")]
    InvalidRadius(f64),
    #[error("invalid bit string {0:?}")]
    Parse(String),
    #[error("{0} requires an even number of bits, got {1}")]
    OddBitCount(&'static str, usize),
}

/// `sqrt(1 + (2/lambda) sin(pi/K))`: the radius at which `lambda` times the
/// conjugate-pair spacing equals the inner next-neighbour spacing.
pub fn optimal_radius(k: usize, lambda: f64) -> f64 {
    (1.0 + 2.0 / lambda * (PI / k as f64).sin()).sqrt()
}

/// Peak-to-side-lobe level `1 / (R^K + R^-K)`.
pub fn eta_from_radius(radius: f64, k: usize) -> f64 {
    let rk = radius.powi(k as i32);
    1.0 / (rk + rk.recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroPair {
    #[serde(with = "crate::serde_c64")]
    pub outer: C64,
    #[serde(with = "crate::serde_c64")]
    pub inner: C64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HuffmanCodebook {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "R")]
    radius: f64,
    eta: f64,
    pairs: Vec<ZeroPair>,
}

pub fn build_codebook(k: usize, radius: f64) -> Result<HuffmanCodebook, CodecError> {
    if k == 0 || k > MAX_BITS {
        return Err(CodecError::InvalidBitCount(k));
    }
    if !(radius.is_finite() && radius > 1.0) {
        return Err(CodecError::InvalidRadius(radius));
    }
    let pairs = (0..k)
        .map(|j| {
            let phase = 2.0 * PI * j as f64 / k as f64;
            ZeroPair {
                outer: C64::from_polar(radius, phase),
                inner: C64::from_polar(radius.recip(), phase),
            }
        })
        .collect();
    Ok(HuffmanCodebook {
        k,
        radius,
        eta: eta_from_radius(radius, k),
        pairs,
    })
}

impl HuffmanCodebook {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn pairs(&self) -> &[ZeroPair] {
        &self.pairs
    }

    pub fn phase(&self, pair: usize) -> f64 {
        2.0 * PI * pair as f64 / self.k as f64
    }

    /// Re-derives the codebook from `K` and `R`, discarding whatever zeros a
    /// deserialized file carried. Returns an error for inconsistent files.
    pub fn validated(&self) -> Result<HuffmanCodebook, CodecError> {
        let fresh = build_codebook(self.k, self.radius)?;
        let consistent = self.pairs.len() == self.k
            && self.pairs.iter().zip(&fresh.pairs).all(|(a, b)| {
                (a.outer - b.outer).norm() < 1e-9 && (a.inner - b.inner).norm() < 1e-9
            });
        if consistent {
            Ok(fresh)
        } else {
            Err(CodecError::InvalidRadius(self.radius))
        }
    }

    /// The `2K`-entry autocorrelation every codeword shares.
    pub fn autocorrelation(&self) -> Vec<C64> {
        let mut a = vec![C64::new(0.0, 0.0); 2 * self.k + 1];
        a[0] = C64::new(-self.eta, 0.0);
        a[self.k] = C64::new(1.0, 0.0);
        a[2 * self.k] = C64::new(-self.eta, 0.0);
        a
    }

    fn check(&self, word: &BitWord) -> Result<(), CodecError> {
        if word.len() != self.k {
            return Err(CodecError::LengthMismatch {
                expected: self.k,
                got: word.len(),
            });
        }
        Ok(())
    }

    /// Smallest distance between any two of the `2K` codebook zeros.
    pub fn min_distance(&self) -> f64 {
        let all: Vec<C64> = self.pairs.iter().flat_map(|p| [p.outer, p.inner]).collect();
        crate::poly::min_pairwise_distance(&all)
    }
}

/// `K` bits, bit `k` selecting the zero of pair `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BitWord {
    bits: u64,
    len: usize,
}

impl BitWord {
    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= MAX_BITS, "bit word too long: {len}");
        let mask = if len == 64 {
            u64::MAX
        } else {
            (1u64 << len) - 1
        };
        Self {
            bits: bits & mask,
            len,
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn ones(len: usize) -> Self {
        Self::new(u64::MAX, len)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let packed = bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &b)| acc | (u64::from(b) << i));
        Self::new(packed, bits.len())
    }

    /// Parses a hex string; the first hex digit carries bits 0..4 (most
    /// significant digit bit first), matching the binary string order.
    pub fn from_hex(s: &str, len: usize) -> Result<Self, CodecError> {
        let s = s.trim().trim_start_matches("0x");
        let mut bits = Vec::with_capacity(4 * s.len());
        for ch in s.chars() {
            let v = ch
                .to_digit(16)
                .ok_or_else(|| CodecError::Parse(s.to_string()))?;
            for shift in (0..4).rev() {
                bits.push((v >> shift) & 1 == 1);
            }
        }
        if bits.len() < len || bits[len..].iter().any(|&b| b) {
            return Err(CodecError::Parse(s.to_string()));
        }
        bits.truncate(len);
        Ok(Self::from_bits(&bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        i < self.len && (self.bits >> i) & 1 == 1
    }

    pub fn raw(&self) -> u64 {
        self.bits
    }

    pub fn count_ones(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn hamming(&self, other: &BitWord) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitWord {
    type Err = CodecError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.len() > MAX_BITS {
            return Err(CodecError::InvalidBitCount(s.len()));
        }
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(CodecError::Parse(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }
}

/// Unit-energy transmit block `x_0 .. x_K` with `x_K` real and positive.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    pub coeffs: Vec<C64>,
}

impl Signal {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

pub fn signal_zeros(word: &BitWord, cb: &HuffmanCodebook) -> Result<ZeroSet, CodecError> {
    cb.check(word)?;
    let zeros = cb
        .pairs
        .iter()
        .enumerate()
        .map(|(k, p)| if word.get(k) { p.outer } else { p.inner })
        .collect();
    let ones = word.count_ones() as i32;
    let r = cb.radius;
    let xk = (r.powi(-2 * ones) / (1.0 + r.powi(-2 * cb.k as i32))).sqrt();
    Ok(ZeroSet::new(zeros, C64::new(xk, 0.0)))
}

pub fn encode(word: &BitWord, cb: &HuffmanCodebook) -> Result<Signal, CodecError> {
    let zeros = signal_zeros(word, cb)?;
    let mut coeffs = vieta_expand(&ZeroSet::monic(zeros.zeros));
    let leading = coeffs[cb.k];
    let scale = leading.conj() / (leading.norm() * norm2(&coeffs));
    coeffs.iter_mut().for_each(|c| *c *= scale);
    Ok(Signal { coeffs })
}

/// All `2^K` codewords, indexed by the raw bit pattern.
pub fn codeword_table(cb: &HuffmanCodebook) -> Vec<Signal> {
    assert!(cb.k <= 24, "codeword table for K={} is too large", cb.k);
    (0..1u64 << cb.k)
        .map(|raw| encode(&BitWord::new(raw, cb.k), cb).expect("length matches"))
        .collect()
}

/// PAPR statistics for uniformly distributed bits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PaprReport {
    /// `(K+1) ((1+R^-2)/2)^{K/2} / (R^{2K}+1)`.
    pub closed_form: f64,
    /// `(K+1) E[max(|x_0|^2, |x_K|^2)]` by enumeration.
    pub endpoint_enumeration: f64,
    /// `(K+1) E[max_n |x_n|^2]` by enumeration.
    pub peak_enumeration: f64,
}

pub fn papr_expected(k: usize, radius: f64) -> Result<f64, CodecError> {
    if k == 0 || !k.is_multiple_of(2) {
        return Err(CodecError::OddBitCount("papr_expected", k));
    }
    let half = (k / 2) as i32;
    let base = (1.0 + radius.powi(-2)) / 2.0;
    Ok((k as f64 + 1.0) * base.powi(half) / (radius.powi(2 * k as i32) + 1.0))
}

/// Closed form alongside the brute-force averages over every codeword.
pub fn papr_report(k: usize, radius: f64) -> Result<PaprReport, CodecError> {
    let closed_form = papr_expected(k, radius)?;
    if k > 20 {
        return Err(CodecError::InvalidBitCount(k));
    }
    let cb = build_codebook(k, radius)?;
    let mut endpoint = 0.0;
    let mut peak = 0.0;
    for raw in 0..1u64 << k {
        let x = encode(&BitWord::new(raw, k), &cb)?;
        endpoint += x.coeffs[0].norm_sqr().max(x.coeffs[k].norm_sqr());
        peak += x.coeffs.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
    }
    let count = (1u64 << k) as f64;
    let scale = (k as f64 + 1.0) / count;
    Ok(PaprReport {
        closed_form,
        endpoint_enumeration: endpoint * scale,
        peak_enumeration: peak * scale,
    })
}
