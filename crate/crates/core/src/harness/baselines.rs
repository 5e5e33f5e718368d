//! Coherent reference schemes.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{run_experiment, BaselineKind, BerCurve, ExperimentConfig, HarnessError};
use crate::channel::{transmit, ChannelModel, ChannelRealization};
use crate::huffman::Signal;
use crate::poly::C64;
use crate::rng::complex_gaussian;

/// `P_e = (1 - sqrt(r / (1 + r))) / 2` for BPSK with perfect channel
/// knowledge over flat Rayleigh fading.
pub fn bpsk_flatfading_analytic(rsnr: f64) -> f64 {
    0.5 * (1.0 - (rsnr / (1.0 + rsnr)).sqrt())
}

/// `bits` independent BPSK symbols, each through its own `CN(0,1)` fade,
/// detected coherently. Returns `(bit errors, bits)`.
pub fn bpsk_flatfading_trial<R: Rng + ?Sized>(bits: usize, rsnr: f64, rng: &mut R) -> (u64, u64) {
    let n0 = 1.0 / rsnr;
    let mut errors = 0;
    for _ in 0..bits {
        let bit: bool = rng.random();
        let s = if bit { -1.0 } else { 1.0 };
        let h = complex_gaussian(rng, 1.0);
        let y = h * s + complex_gaussian(rng, n0);
        let decided = (h.conj() * y).re < 0.0;
        errors += u64::from(decided != bit);
    }
    (errors, bits as u64)
}

/// Block of `pilots` known unit symbols followed by `data` QPSK symbols.
///
/// The receiver assumes a channel of `pilots` taps: it estimates them by
/// least squares from the first `pilots` received samples, cancels the
/// pilot echo, and zero-forces the data over a window of
/// `2 pilots + data - 1` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PilotLayout {
    #[serde(rename = "P")]
    pub pilots: usize,
    #[serde(rename = "D")]
    pub data: usize,
}

impl PilotLayout {
    /// `P = floor(L/2)`: the training is too short for the channel.
    pub fn underestimated(taps: usize, data: usize) -> Self {
        Self {
            pilots: taps / 2,
            data,
        }
    }

    pub fn bits(&self) -> usize {
        2 * self.data
    }

    pub fn received_len(&self, taps: usize) -> usize {
        self.pilots + self.data + taps - 1
    }
}

fn qpsk(b0: bool, b1: bool) -> C64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    C64::new(if b0 { -s } else { s }, if b1 { -s } else { s })
}

/// One pilot-QPSK block over the realized channel `h`.
pub fn pilot_qpsk_trial<R: Rng + ?Sized>(
    layout: &PilotLayout,
    model: &ChannelModel,
    h: &ChannelRealization,
    rng: &mut R,
) -> Result<(u64, u64), HarnessError> {
    let (p, d) = (layout.pilots, layout.data);
    if p == 0 {
        return Err(HarnessError::Numerical(
            "UnderdeterminedEstimate: no pilots to estimate the channel".into(),
        ));
    }
    let bits: Vec<bool> = (0..2 * d).map(|_| rng.random()).collect();
    let gain = ((p + d) as f64).sqrt().recip();
    let mut block = vec![C64::new(gain, 0.0); p];
    block.extend((0..d).map(|i| qpsk(bits[2 * i], bits[2 * i + 1]) * gain));
    let y = transmit(&Signal { coeffs: block }, h, model, rng).samples;

    // pilot-only rows form a lower-triangular Toeplitz system
    let mut g = vec![C64::new(0.0, 0.0); p];
    for n in 0..p {
        let acc: C64 = g[..n].iter().sum();
        g[n] = y[n] / gain - acc;
    }

    let window = (2 * p + d - 1).min(y.len());
    let rows = window - p;
    let mut resid = DVector::<C64>::zeros(rows);
    for (row, slot) in resid.iter_mut().enumerate() {
        let n = row + p;
        // echo of the pilots m < p through the estimated taps
        let echo: C64 = (n + 1 - p..p).map(|m| g[n - m]).sum::<C64>() * gain;
        *slot = y[n] - echo;
    }
    let hmat = DMatrix::<C64>::from_fn(rows, d, |r, j| {
        if r >= j && r - j < p {
            g[r - j]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let normal = hmat.adjoint() * &hmat;
    let rhs = hmat.adjoint() * resid;
    let chol = normal.cholesky().ok_or_else(|| {
        HarnessError::Numerical("UnderdeterminedEstimate: data system is rank deficient".into())
    })?;
    let est = chol.solve(&rhs);

    let mut errors = 0;
    for (i, s) in est.iter().enumerate() {
        errors += u64::from((s.re < 0.0) != bits[2 * i]);
        errors += u64::from((s.im < 0.0) != bits[2 * i + 1]);
    }
    Ok((errors, layout.bits() as u64))
}

/// BER curve of the pilot-QPSK scheme alone for `cfg`'s grid and channel.
pub fn pilot_qpsk_baseline(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<BerCurve, HarnessError> {
    let cfg = ExperimentConfig {
        decoders: vec![],
        baselines: vec![BaselineKind::PilotQpsk],
        ..cfg.clone()
    };
    let mut res = run_experiment(&cfg, workers)?;
    Ok(res.curves.remove(0))
}
