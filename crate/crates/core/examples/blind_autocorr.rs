//! Recover the channel autocorrelation from one received block without
//! knowing which word was sent.

use mocz::autocorr::{estimate_channel_autocorr, estimation_mse_bound};
use mocz::channel::{sample_channel, transmit_with, ChannelModel, Normalization};
use mocz::huffman::{build_codebook, encode, optimal_radius, BitWord};
use mocz::poly::autocorrelation;
use mocz::rng::RngStream;

fn main() {
    let (k, l) = (8, 4);
    let cb = build_codebook(k, optimal_radius(k, 1.0)).unwrap();
    let model = ChannelModel::new(l, 1.0, 0.01).unwrap();
    let mut rng = RngStream::new(3, 0).rng();
    let h = sample_channel(&model, &mut rng);
    let x = encode(&BitWord::new(0x3c, k), &cb).unwrap();
    let y = transmit_with(&x, &h, &model, Normalization::Raw, &mut rng);

    let est = estimate_channel_autocorr(&y.samples, &cb, l).unwrap();
    let truth = autocorrelation(&h.taps);
    for (lag, (e, t)) in est.a_h.iter().zip(&truth).enumerate() {
        let lag = lag as isize - (l as isize - 1);
        println!(
            "lag {lag:+}  est {:+.4}{:+.4}i  true {:+.4}{:+.4}i",
            e.re, e.im, t.re, t.im
        );
    }
    let err: f64 = est
        .a_h
        .iter()
        .zip(&truth)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum();
    let bound = estimation_mse_bound(&model, &cb, k + l).unwrap();
    println!("squared error {err:.3e}, mean-square bound {bound:.3e}");
    println!("residual outside support {:.3e}", est.residual_energy);
}
