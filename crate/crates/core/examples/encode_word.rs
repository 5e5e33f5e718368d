//! Encode one word and show that its autocorrelation does not depend on it.
//!
//! cargo run --example encode_word -- 10110100

use mocz::huffman::{build_codebook, encode, optimal_radius, papr_report, BitWord};
use mocz::poly::autocorrelation;

fn main() {
    let bits = std::env::args().nth(1).unwrap_or_else(|| "10110100".into());
    let word: BitWord = bits.parse().expect("binary string");
    let k = word.len();
    let cb = build_codebook(k, optimal_radius(k, 1.0)).unwrap();
    println!("K = {k}, R = {:.5}, eta = {:.5}", cb.radius(), cb.eta());

    let x = encode(&word, &cb).unwrap();
    for (n, c) in x.coeffs.iter().enumerate() {
        println!("x[{n:2}] = {:+.6} {:+.6}i", c.re, c.im);
    }

    let a = autocorrelation(&x.coeffs);
    let other = encode(&BitWord::ones(k), &cb).unwrap();
    let b = autocorrelation(&other.coeffs);
    let diff = a
        .iter()
        .zip(&b)
        .map(|(u, v)| (u - v).norm())
        .fold(0.0, f64::max);
    println!("a_x[0] = {:+.6}, a_x[K] = {:+.6}", a[0].re, a[k].re);
    println!("max |a_x - a_(all ones)| = {diff:.1e}");

    if let Ok(p) = papr_report(k, cb.radius()) {
        println!("{p:?}");
    }
}
