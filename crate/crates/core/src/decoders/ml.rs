use nalgebra::DMatrix;

use super::{require_len, BitFlag, DecodeError, DecodeResult};
use crate::channel::ChannelModel;
use crate::huffman::{encode, BitWord, HuffmanCodebook};
use crate::poly::C64;

/// Largest `K` the exhaustive search accepts.
pub const ML_MAX_BITS: usize = 24;

/// Codeword tables are cached up to this many bits.
const TABLE_MAX_BITS: usize = 16;

/// `B = sigma^2 D^{-1} + A_L` with its inverse, plus an optional table of
/// all codewords. Immutable and shareable between threads.
#[derive(Debug, Clone)]
pub struct MlWeighting {
    k: usize,
    taps: usize,
    b: DMatrix<f64>,
    b_inv: Vec<f64>,
    table: Option<Vec<Vec<C64>>>,
}

impl MlWeighting {
    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn b_inverse(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.taps, self.taps, &self.b_inv)
    }

    /// `v* B^{-1} v`.
    fn metric(&self, v: &[C64]) -> f64 {
        let l = self.taps;
        let mut acc = 0.0;
        for i in 0..l {
            let row = &self.b_inv[i * l..(i + 1) * l];
            let bv: C64 = row.iter().zip(v).map(|(b, x)| x * *b).sum();
            acc += (v[i].conj() * bv).re;
        }
        acc
    }
}

/// Weighting for the channel statistics as given: `D = diag(p^l)`,
/// `sigma^2 = N0`. For `L < K+1` this is the diagonal Rake weighting
/// `N0 p^{-l} + 1`.
pub fn ml_weighting(
    cb: &HuffmanCodebook,
    model: &ChannelModel,
) -> Result<MlWeighting, DecodeError> {
    ml_weighting_from_profile(cb, &model.power_delay_profile(), model.n0)
}

/// Weighting for an arbitrary tap-variance profile `q_l` and noise power.
pub fn ml_weighting_from_profile(
    cb: &HuffmanCodebook,
    profile: &[f64],
    sigma2: f64,
) -> Result<MlWeighting, DecodeError> {
    let l = profile.len();
    if l == 0 {
        return Err(DecodeError::InvalidParameter("empty tap profile".into()));
    }
    if let Some(q) = profile.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
        return Err(DecodeError::InvalidParameter(format!("tap variance {q}")));
    }
    if !(sigma2.is_finite() && sigma2 >= 0.0) {
        return Err(DecodeError::InvalidParameter(format!(
            "noise power {sigma2}"
        )));
    }
    let k = cb.k();
    // A_L = X*X is Toeplitz in the shared autocorrelation
    let a = cb.autocorrelation();
    let b = DMatrix::from_fn(l, l, |i, j| {
        let lag = i.abs_diff(j);
        let a_ij = if lag <= k { a[k + lag].re } else { 0.0 };
        if i == j {
            a_ij + sigma2 / profile[i]
        } else {
            a_ij
        }
    });
    let chol = b
        .clone()
        .cholesky()
        .ok_or(DecodeError::NotPositiveDefinite)?;
    let inv = chol.inverse();
    let b_inv = (0..l)
        .flat_map(|i| (0..l).map(move |j| (i, j)))
        .map(|(i, j)| inv[(i, j)])
        .collect();
    let table = (k <= TABLE_MAX_BITS).then(|| {
        crate::huffman::codeword_table(cb)
            .into_iter()
            .map(|s| s.coeffs)
            .collect()
    });
    Ok(MlWeighting {
        k,
        taps: l,
        b,
        b_inv,
        table,
    })
}

/// Exhaustive maximum-likelihood decoding: `argmax_x v* B^{-1} v` with
/// `v_l = sum_n conj(x_{n-l}) y_n`.
///
/// The margin of bit `i` is the metric gap between the best word and the
/// best word that disagrees with it in bit `i`.
pub fn decode_ml(
    y: &[C64],
    cb: &HuffmanCodebook,
    w: &MlWeighting,
) -> Result<DecodeResult, DecodeError> {
    let k = cb.k();
    if k > ML_MAX_BITS {
        return Err(DecodeError::SearchBudgetExceeded {
            k,
            max: ML_MAX_BITS,
        });
    }
    if w.k != k {
        return Err(DecodeError::InvalidParameter(format!(
            "weighting built for K={}, codebook has K={k}",
            w.k
        )));
    }
    require_len(y, k)?;
    let l = w.taps;
    if y.len() != k + l {
        return Err(DecodeError::LengthMismatch {
            expected: k + l,
            got: y.len(),
        });
    }

    let mut best = (f64::NEG_INFINITY, 0u64);
    let mut best_by_bit = vec![[f64::NEG_INFINITY; 2]; k];
    let mut v = vec![C64::new(0.0, 0.0); l];
    let mut scratch;
    for raw in 0..1u64 << k {
        let x: &[C64] = match &w.table {
            Some(t) => &t[raw as usize],
            None => {
                scratch = encode(&BitWord::new(raw, k), cb)
                    .expect("length matches")
                    .coeffs;
                &scratch
            }
        };
        for (lag, vl) in v.iter_mut().enumerate() {
            *vl = x.iter().zip(&y[lag..]).map(|(a, b)| a.conj() * b).sum();
        }
        let m = w.metric(&v);
        if m > best.0 {
            best = (m, raw);
        }
        for (i, slot) in best_by_bit.iter_mut().enumerate() {
            let b = ((raw >> i) & 1) as usize;
            if m > slot[b] {
                slot[b] = m;
            }
        }
    }

    let word = BitWord::new(best.1, k);
    let bits: Vec<bool> = word.iter().collect();
    let margins = best_by_bit
        .iter()
        .zip(&bits)
        .map(|(slot, &b)| slot[b as usize] - slot[!b as usize])
        .collect();
    Ok(DecodeResult::from_bits(
        &bits,
        margins,
        vec![BitFlag::Clean; k],
    ))
}
