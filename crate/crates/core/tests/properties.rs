use mocz::channel::{sample_channel, transmit_with, ChannelModel, Normalization};
use mocz::decoders::{decode_dizet, decode_dizet_dft, decode_rfmd};
use mocz::huffman::{build_codebook, encode, BitWord};
use mocz::poly::{dft, find_roots, idft, linear_convolve, vieta_expand, ZeroSet, C64};
use mocz::rng::RngStream;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| C64::new(re, im))
}

fn separated_zeros() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), 2..10).prop_filter("well separated", |z| {
        z.iter()
            .enumerate()
            .all(|(i, a)| z[i + 1..].iter().all(|b| (a - b).norm() > 0.1))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn roots_of_expanded_product_come_back(zeros in separated_zeros()) {
        let coeffs = vieta_expand(&ZeroSet::monic(zeros.clone()));
        let found = find_roots(&coeffs).unwrap();
        for z in &zeros {
            let near = found.zeros.iter().map(|f| (f - z).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(near < 1e-6, "{z} missing, closest {near}");
        }
    }

    #[test]
    fn convolution_theorem(
        a in prop::collection::vec(complex(), 1..12),
        b in prop::collection::vec(complex(), 1..12),
    ) {
        let m = a.len() + b.len() - 1;
        let (fa, fb) = (dft(&a, m), dft(&b, m));
        let prod: Vec<C64> = fa.iter().zip(&fb).map(|(x, y)| x * y * (m as f64).sqrt()).collect();
        let back = idft(&prod, m);
        for (u, v) in back.iter().zip(linear_convolve(&a, &b)) {
            prop_assert!((u - v).norm() < 1e-9);
        }
    }

    #[test]
    fn decoders_ignore_complex_gain(
        raw in 0u64..256,
        taps in 1usize..6,
        seed in any::<u64>(),
        gain in complex().prop_filter("nonzero", |g| g.norm() > 0.05),
    ) {
        let cb = build_codebook(8, 1.3287).unwrap();
        let model = ChannelModel::new(taps, 0.88, 0.05).unwrap();
        let mut rng = RngStream::new(seed, 0).rng();
        let h = sample_channel(&model, &mut rng);
        let x = encode(&BitWord::new(raw, 8), &cb).unwrap();
        let y = transmit_with(&x, &h, &model, Normalization::Simulation, &mut rng).samples;
        let scaled: Vec<C64> = y.iter().map(|v| v * gain).collect();
        prop_assert_eq!(decode_dizet(&y, &cb).word, decode_dizet(&scaled, &cb).word);
        prop_assert_eq!(decode_dizet_dft(&y, &cb).word, decode_dizet_dft(&scaled, &cb).word);
        prop_assert_eq!(
            decode_rfmd(&y, &cb).unwrap().word,
            decode_rfmd(&scaled, &cb).unwrap().word
        );
    }

    #[test]
    fn bitword_text_roundtrip(raw in any::<u64>(), len in 1usize..=63) {
        let w = BitWord::new(raw & ((1u64 << len) - 1), len);
        let back: BitWord = w.to_string().parse().unwrap();
        prop_assert_eq!(w, back);
    }
}
