//! Blind estimation of the channel autocorrelation.
//!
//! Every Huffman codeword has the same autocorrelation `a_x`, so the
//! received autocorrelation `a_y = a_x * a_h` (plus noise) can be
//! deconvolved without knowing the transmitted word.

use thiserror::Error;

use crate::channel::ChannelModel;
use crate::huffman::HuffmanCodebook;
use crate::poly::{autocorrelation, dft, idft, C64};

/// Spectral bins of `a_x` below this magnitude are rejected.
pub const SPECTRAL_ZERO_THRESHOLD: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AutocorrError {
    #[error("codebook spectrum vanishes at bin {bin} (|A| = {magnitude:e})")]
    SpectralZero { bin: usize, magnitude: f64 },
    #[error("received block has {got} samples, expected K+L = {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("eta = {0} is not below 1/3")]
    EtaTooLarge(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrEstimate {
    /// `2L-1` lags, zero lag at index `L-1`.
    pub a_h: Vec<C64>,
    /// Energy of the deconvolved sequence outside the `2L-1` support.
    pub residual_energy: f64,
}

impl AutocorrEstimate {
    pub fn taps(&self) -> usize {
        self.a_h.len().div_ceil(2)
    }

    /// Largest violation of `a_k = conj(a_{2L-2-k})`.
    pub fn symmetry_error(&self) -> f64 {
        let n = self.a_h.len();
        (0..n)
            .map(|k| (self.a_h[k] - self.a_h[n - 1 - k].conj()).norm())
            .fold(0.0, f64::max)
    }
}

/// `sqrt(M) F a_x` on `M` bins.
pub fn codebook_spectrum(cb: &HuffmanCodebook, m: usize) -> Vec<C64> {
    let gain = (m as f64).sqrt();
    dft(&cb.autocorrelation(), m)
        .into_iter()
        .map(|v| v * gain)
        .collect()
}

pub fn estimate_channel_autocorr(
    y: &[C64],
    cb: &HuffmanCodebook,
    taps: usize,
) -> Result<AutocorrEstimate, AutocorrError> {
    let n = cb.k() + taps;
    if y.len() != n || taps == 0 {
        return Err(AutocorrError::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let m = 2 * n - 1;
    let ax = codebook_spectrum(cb, m);
    if let Some((bin, v)) = ax
        .iter()
        .enumerate()
        .find(|(_, v)| v.norm() < SPECTRAL_ZERO_THRESHOLD)
    {
        return Err(AutocorrError::SpectralZero {
            bin,
            magnitude: v.norm(),
        });
    }
    let ay = dft(&autocorrelation(y), m);
    let quotient: Vec<C64> = ay.iter().zip(&ax).map(|(a, b)| a / b).collect();
    let full = idft(&quotient, m);
    let support = 2 * taps - 1;
    let residual_energy = full[support..].iter().map(|v| v.norm_sqr()).sum();
    Ok(AutocorrEstimate {
        a_h: full[..support].to_vec(),
        residual_energy,
    })
}

/// `E||w_c||^2 <= 2 N N0 L + N N0^2` for the noise terms in `a_y`.
pub fn colored_noise_bound(model: &ChannelModel, n: usize) -> f64 {
    let n = n as f64;
    2.0 * n * model.n0 * model.taps as f64 + n * model.n0 * model.n0
}

/// Worst-case gain of the deconvolution on noise energy, `1/(1-2 eta)^2`.
pub fn noise_amplification(eta: f64) -> f64 {
    (1.0 - 2.0 * eta).powi(-2)
}

/// `||a_h - est||^2 <= 18 N N0 (N0 + L)`, valid for `eta < 1/3`.
pub fn estimation_mse_bound(
    model: &ChannelModel,
    cb: &HuffmanCodebook,
    n: usize,
) -> Result<f64, AutocorrError> {
    if cb.eta() >= 1.0 / 3.0 {
        return Err(AutocorrError::EtaTooLarge(cb.eta()));
    }
    Ok(18.0 * n as f64 * model.n0 * (model.n0 + model.taps as f64))
}
