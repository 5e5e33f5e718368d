//! Send one block through a fading channel and run every receiver on it.

use mocz::channel::Normalization;
use mocz::channel::{sample_channel, transmit, ChannelModel};
use mocz::decoders::{
    decode_dizet, decode_dizet_dft, decode_ml, decode_rfmd, ml_weighting_from_profile,
};
use mocz::huffman::{build_codebook, encode, optimal_radius, BitWord};
use mocz::rng::RngStream;

fn main() {
    let (k, l) = (8, 4);
    let cb = build_codebook(k, optimal_radius(k, 1.0)).unwrap();
    let model = ChannelModel::new(l, 0.88, 0.05).unwrap();
    let word: BitWord = "11001010".parse().unwrap();

    let mut rng = RngStream::new(1, 0).rng();
    let h = sample_channel(&model, &mut rng);
    let y = transmit(&encode(&word, &cb).unwrap(), &h, &model, &mut rng).samples;

    // the simulated block carries the channel scaled to rSNR = 1/N0
    let profile = model.effective_profile(k + 1, Normalization::Simulation);
    let ml = ml_weighting_from_profile(&cb, &profile, model.n0).unwrap();

    println!("sent       {word}");
    let rfmd = decode_rfmd(&y, &cb).unwrap();
    println!("rfmd       {} ({} flagged)", rfmd.word, rfmd.flagged());
    println!("ml         {}", decode_ml(&y, &cb, &ml).unwrap().word);
    let dz = decode_dizet(&y, &cb);
    println!("dizet      {}", dz.word);
    println!("dizet_dft  {}", decode_dizet_dft(&y, &cb).word);
    let margins: Vec<String> = dz
        .per_bit_margin
        .iter()
        .map(|m| format!("{m:.3}"))
        .collect();
    println!("dizet margins [{}]", margins.join(", "));
}
