use std::f64::consts::PI;

use super::{require_len, BitFlag, DecodeError, DecodeResult};
use crate::huffman::HuffmanCodebook;
use crate::poly::{find_roots, max_abs, C64, DEGENERATE_LEADING_REL};

/// Phase sector of `z`: nearest codebook phase `2 pi k / K`, ties to the
/// lower index.
pub(crate) fn sector(z: C64, k: usize) -> usize {
    let s = z.arg() * k as f64 / (2.0 * PI);
    let idx = (s - 0.5).ceil() as i64;
    idx.rem_euclid(k as i64) as usize
}

/// Root-finding minimum-distance decoder.
///
/// Trailing coefficients that are negligible against the block are dropped
/// first; they correspond to roots at infinity and carry no information.
pub fn decode_rfmd(y: &[C64], cb: &HuffmanCodebook) -> Result<DecodeResult, DecodeError> {
    let k = cb.k();
    require_len(y, k)?;
    let threshold = DEGENERATE_LEADING_REL * max_abs(y);
    let end = y
        .iter()
        .rposition(|c| c.norm() > threshold)
        .map_or(0, |i| i + 1);
    let roots = find_roots(&y[..end])?.zeros;

    let mut buckets: Vec<Vec<C64>> = vec![Vec::new(); k];
    for &z in &roots {
        buckets[sector(z, k)].push(z);
    }
    let nearest = |pts: &[C64], target: C64| {
        pts.iter()
            .map(|z| (z - target).norm())
            .fold(f64::INFINITY, f64::min)
    };

    let mut bits = Vec::with_capacity(k);
    let mut margins = Vec::with_capacity(k);
    let mut flags = Vec::with_capacity(k);
    for (pair, bucket) in cb.pairs().iter().zip(&buckets) {
        let (pool, flag) = if bucket.is_empty() {
            (roots.as_slice(), BitFlag::EmptySector)
        } else {
            (bucket.as_slice(), BitFlag::Clean)
        };
        let d_out = nearest(pool, pair.outer);
        let d_in = nearest(pool, pair.inner);
        bits.push(d_out < d_in);
        margins.push((d_out - d_in).abs());
        flags.push(flag);
    }
    Ok(DecodeResult::from_bits(&bits, margins, flags))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::{build_codebook, encode, BitWord};

    #[test]
    fn sector_rounding() {
        let k = 8;
        let step = 2.0 * PI / k as f64;
        assert_eq!(sector(C64::from_polar(1.3, 0.0), k), 0);
        assert_eq!(sector(C64::from_polar(1.3, 3.0 * step + 0.1), k), 3);
        assert_eq!(sector(C64::from_polar(0.7, -0.1), k), 0);
        assert_eq!(sector(C64::from_polar(0.7, -step), k), 7);
        // exactly half way between two sectors
        assert_eq!(sector(C64::new(1.0, 1.0), 4), 0);
        assert_eq!(sector(C64::new(0.0, 2.0), 2), 0);
        assert_eq!(sector(C64::new(-1.0, 0.0), k), 4);
    }

    #[test]
    fn noiseless_flat_channel_all_words() {
        for k in 1..=8usize {
            let cb = build_codebook(k, crate::huffman::optimal_radius(k, 1.0).max(1.05)).unwrap();
            for raw in 0..1u64 << k {
                let word = BitWord::new(raw, k);
                let x = encode(&word, &cb).unwrap();
                let res = decode_rfmd(&x.coeffs, &cb).unwrap();
                assert_eq!(res.word, word, "K={k}");
                assert_eq!(res.flagged(), 0);
            }
        }
    }

    #[test]
    fn empty_sector_is_flagged() {
        let cb = build_codebook(4, 1.5538).unwrap();
        // zeros only near phases 0 and pi/2: sectors 2 and 3 stay empty
        let zs = crate::poly::ZeroSet::monic(vec![
            C64::new(1.5, 0.0),
            C64::new(0.0, 0.6),
            C64::new(1.4, 0.1),
            C64::new(0.1, 1.6),
        ]);
        let y = crate::poly::vieta_expand(&zs);
        let res = decode_rfmd(&y, &cb).unwrap();
        assert_eq!(res.flags[0], BitFlag::Clean);
        assert_eq!(res.flags[2], BitFlag::EmptySector);
        assert_eq!(res.flags[3], BitFlag::EmptySector);
        assert_eq!(res.flagged(), 2);
    }

    #[test]
    fn short_block_rejected() {
        let cb = build_codebook(4, 1.5538).unwrap();
        let y = vec![C64::new(1.0, 0.0); 4];
        assert!(matches!(
            decode_rfmd(&y, &cb),
            Err(DecodeError::BlockTooShort { need: 5, got: 4 })
        ));
    }
}
