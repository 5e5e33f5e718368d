//! Block Rayleigh fading with an exponential power-delay profile plus AWGN.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::huffman::Signal;
use crate::poly::{linear_convolve, C64};
use crate::rng::{complex_gaussian, complex_gaussian_vec};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("channel needs at least one tap")]
    NoTaps,
    #[error("power decay must lie in (0, 1], got {0}")]
    InvalidDecay(f64),
    #[error("noise power must be finite and >= 0, got {0}")]
    InvalidNoise(f64),
}

/// Statistical channel description: `L` taps with `E|h_l|^2 = p^l` and
/// complex noise power `N0` per received sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelModel {
    #[serde(rename = "L")]
    pub taps: usize,
    pub p: f64,
    #[serde(rename = "N0")]
    pub n0: f64,
}

/// How the transmit block and channel are scaled before noise is added.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `x` scaled by `sqrt(N)`, `h` by `1/sqrt(E||h||^2)`: rSNR = 1/N0.
    Simulation,
    /// Unit-energy `x` through the raw taps.
    Raw,
}

impl ChannelModel {
    pub fn new(taps: usize, p: f64, n0: f64) -> Result<Self, ChannelError> {
        let m = Self { taps, p, n0 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if self.taps == 0 {
            return Err(ChannelError::NoTaps);
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(ChannelError::InvalidDecay(self.p));
        }
        if !(self.n0.is_finite() && self.n0 >= 0.0) {
            return Err(ChannelError::InvalidNoise(self.n0));
        }
        Ok(())
    }

    pub fn with_n0(&self, n0: f64) -> Self {
        Self { n0, ..*self }
    }

    /// `p^l` for `l = 0..L`.
    pub fn power_delay_profile(&self) -> Vec<f64> {
        (0..self.taps).map(|l| self.p.powi(l as i32)).collect()
    }

    /// `E||h||^2 = sum_l p^l`.
    pub fn expected_energy(&self) -> f64 {
        if self.p == 1.0 {
            self.taps as f64
        } else {
            (1.0 - self.p.powi(self.taps as i32)) / (1.0 - self.p)
        }
    }

    /// Tap variances of the channel actually seen by a unit-energy codeword
    /// of length `signal_len` under `norm`.
    pub fn effective_profile(&self, signal_len: usize, norm: Normalization) -> Vec<f64> {
        let pdp = self.power_delay_profile();
        match norm {
            Normalization::Raw => pdp,
            Normalization::Simulation => {
                let n = (signal_len + self.taps - 1) as f64;
                let e = self.expected_energy();
                pdp.into_iter().map(|v| v * n / e).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub taps: Vec<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedBlock {
    pub samples: Vec<C64>,
}

impl ReceivedBlock {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Independent taps `h_l ~ CN(0, p^l)`.
pub fn sample_channel<R: Rng + ?Sized>(model: &ChannelModel, rng: &mut R) -> ChannelRealization {
    let taps = model
        .power_delay_profile()
        .into_iter()
        .map(|v| complex_gaussian(rng, v))
        .collect();
    ChannelRealization { taps }
}

/// Noiseless part of the received block under `norm`.
pub fn convolve_channel(
    x: &Signal,
    h: &ChannelRealization,
    model: &ChannelModel,
    norm: Normalization,
) -> Vec<C64> {
    let mut y = linear_convolve(&x.coeffs, &h.taps);
    if norm == Normalization::Simulation {
        let scale = (y.len() as f64).sqrt() / model.expected_energy().sqrt();
        y.iter_mut().for_each(|v| *v *= scale);
    }
    y
}

/// `y = sqrt(N) x * h / sqrt(E||h||^2) + w` with `w ~ CN(0, N0 I)`.
pub fn transmit<R: Rng + ?Sized>(
    x: &Signal,
    h: &ChannelRealization,
    model: &ChannelModel,
    rng: &mut R,
) -> ReceivedBlock {
    transmit_with(x, h, model, Normalization::Simulation, rng)
}

pub fn transmit_with<R: Rng + ?Sized>(
    x: &Signal,
    h: &ChannelRealization,
    model: &ChannelModel,
    norm: Normalization,
    rng: &mut R,
) -> ReceivedBlock {
    let mut samples = convolve_channel(x, h, model, norm);
    if model.n0 > 0.0 {
        let noise = complex_gaussian_vec(rng, samples.len(), model.n0);
        samples.iter_mut().zip(noise).for_each(|(s, w)| *s += w);
    }
    ReceivedBlock { samples }
}

/// Average received SNR for a block of `n` received samples.
pub fn rsnr(model: &ChannelModel, n: usize, norm: Normalization) -> f64 {
    match norm {
        Normalization::Simulation => 1.0 / model.n0,
        Normalization::Raw => model.expected_energy() / (n as f64 * model.n0),
    }
}

/// `E_b/N0 = SNR * N / K`.
pub fn ebn0_from_snr(snr: f64, bits: usize, n: usize) -> f64 {
    snr * n as f64 / bits as f64
}

pub fn snr_from_ebn0(ebn0: f64, bits: usize, n: usize) -> f64 {
    ebn0 * bits as f64 / n as f64
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(v: f64) -> f64 {
    10.0 * v.log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{build_codebook, encode, BitWord};
    use crate::poly::norm2;
    use crate::rng::RngStream;

    fn mean_energy(model: &ChannelModel, draws: usize, seed: u64) -> f64 {
        let mut rng = RngStream::new(seed, 0).rng();
        (0..draws)
            .map(|_| norm2(&sample_channel(model, &mut rng).taps).powi(2))
            .sum::<f64>()
            / draws as f64
    }

    #[test]
    fn tap_energy_matches_profile() {
        let flat = ChannelModel::new(8, 1.0, 0.0).unwrap();
        let e = mean_energy(&flat, 100_000, 11);
        assert!((e / 8.0 - 1.0).abs() < 0.02, "{e}");
        let decaying = ChannelModel::new(2, 0.5, 0.0).unwrap();
        let e = mean_energy(&decaying, 100_000, 12);
        assert!((e / 1.5 - 1.0).abs() < 0.02, "{e}");
        assert_eq!(decaying.expected_energy(), 1.5);
    }

    #[test]
    fn same_stream_same_taps() {
        let m = ChannelModel::new(4, 0.88, 0.1).unwrap();
        let s = RngStream::new(99, 5);
        assert_eq!(
            sample_channel(&m, &mut s.rng()),
            sample_channel(&m, &mut s.rng())
        );
    }

    #[test]
    fn tap_independence_and_circularity() {
        let m = ChannelModel::new(3, 1.0, 0.0).unwrap();
        let mut rng = RngStream::new(5, 1).rng();
        let n = 100_000;
        let mut cross = C64::new(0.0, 0.0);
        let mut pseudo = C64::new(0.0, 0.0);
        for _ in 0..n {
            let h = sample_channel(&m, &mut rng).taps;
            cross += h[0] * h[1].conj();
            pseudo += h[2] * h[2];
        }
        assert!(cross.norm() / (n as f64) < 0.02);
        assert!(pseudo.norm() / (n as f64) < 0.02);
    }

    #[test]
    fn scalar_channel_scales_signal() {
        let cb = build_codebook(4, 1.5).unwrap();
        let x = encode(&BitWord::new(0b1010, 4), &cb).unwrap();
        let m = ChannelModel::new(3, 1.0, 0.0).unwrap();
        let c = C64::new(0.3, -1.1);
        let h = ChannelRealization {
            taps: vec![c, C64::new(0.0, 0.0), C64::new(0.0, 0.0)],
        };
        let y = transmit(&x, &h, &m, &mut RngStream::new(0, 0).rng());
        assert_eq!(y.len(), 4 + 3);
        let scale = (7.0f64).sqrt() / 3.0f64.sqrt();
        for (n, v) in y.samples.iter().enumerate() {
            let expect = x.coeffs.get(n).copied().unwrap_or_default() * c * scale;
            assert!((v - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn received_power_is_normalized() {
        // average power per sample ~1 whatever the profile
        let cb = build_codebook(8, 1.3287).unwrap();
        for (l, p) in [(1usize, 1.0), (4, 0.5), (8, 1.0), (16, 0.88)] {
            let m = ChannelModel::new(l, p, 0.0).unwrap();
            let mut rng = RngStream::new(42, l as u64).rng();
            let trials = 100_000;
            let mut acc = 0.0;
            let mut count = 0usize;
            for t in 0..trials {
                let x = encode(&BitWord::new(t as u64 * 2654435761, 8), &cb).unwrap();
                let h = sample_channel(&m, &mut rng);
                let y = transmit(&x, &h, &m, &mut rng);
                acc += norm2(&y.samples).powi(2);
                count += y.len();
            }
            let power = acc / count as f64;
            assert!((power - 1.0).abs() < 0.03, "L={l} p={p}: {power}");
        }
    }

    #[test]
    fn empirical_rsnr_matches_inverse_noise() {
        let cb = build_codebook(8, 1.3287).unwrap();
        let m = ChannelModel::new(4, 1.0, 0.1).unwrap();
        let mut rng = RngStream::new(3, 3).rng();
        let (mut sig, mut noise) = (0.0, 0.0);
        for t in 0..100_000u64 {
            let x = encode(&BitWord::new(t.wrapping_mul(0x9e37), 8), &cb).unwrap();
            let h = sample_channel(&m, &mut rng);
            let clean = convolve_channel(&x, &h, &m, Normalization::Simulation);
            let y = transmit(&x, &h, &m, &mut rng);
            sig += norm2(&clean).powi(2);
            noise += y
                .samples
                .iter()
                .zip(&clean)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>();
        }
        let ratio = sig / noise;
        assert!((ratio / 10.0 - 1.0).abs() < 0.03, "{ratio}");
    }

    #[test]
    fn rsnr_conventions() {
        let m = ChannelModel::new(4, 1.0, 0.01).unwrap();
        assert!((rsnr(&m, 12, Normalization::Simulation) - 100.0).abs() < 1e-9);
        let m = ChannelModel::new(4, 1.0, 1.0).unwrap();
        assert!((rsnr(&m, 12, Normalization::Raw) - 1.0 / 3.0).abs() < 1e-15);
        let m = ChannelModel::new(2, 0.5, 1.0).unwrap();
        assert!((rsnr(&m, 1, Normalization::Raw) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn ebn0_conversion() {
        assert_eq!(ebn0_from_snr(3.7, 8, 8), 3.7);
        assert_eq!(ebn0_from_snr(1.0, 8, 16), 2.0);
        for db in [-5.0, 0.0, 2.5, 10.0, 30.0] {
            let snr = db_to_linear(db);
            let back = snr_from_ebn0(ebn0_from_snr(snr, 8, 12), 8, 12);
            assert!((linear_to_db(back) - db).abs() < 1e-12);
        }
    }

    #[test]
    fn model_validation_and_json() {
        assert_eq!(ChannelModel::new(0, 1.0, 0.1), Err(ChannelError::NoTaps));
        assert_eq!(
            ChannelModel::new(2, 1.5, 0.1),
            Err(ChannelError::InvalidDecay(1.5))
        );
        assert!(ChannelModel::new(2, 0.5, -1.0).is_err());
        let m: ChannelModel = serde_json::from_str(r#"{"L": 8, "p": 0.88, "N0": 0.01}"#).unwrap();
        assert_eq!(m, ChannelModel::new(8, 0.88, 0.01).unwrap());
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<ChannelModel>(&s).unwrap(), m);
    }
}
