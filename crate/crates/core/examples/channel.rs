//! Tap statistics of the exponential power-delay profile.

use mocz::channel::{ebn0_from_snr, linear_to_db, sample_channel, ChannelModel};
use mocz::rng::RngStream;

fn main() {
    let model = ChannelModel::new(8, 0.88, 0.1).unwrap();
    let draws = 50_000;
    let mut power = vec![0.0; model.taps];
    let mut rng = RngStream::new(7, 0).rng();
    for _ in 0..draws {
        for (acc, h) in power.iter_mut().zip(sample_channel(&model, &mut rng).taps) {
            *acc += h.norm_sqr() / draws as f64;
        }
    }
    for (l, (got, want)) in power.iter().zip(model.power_delay_profile()).enumerate() {
        println!("E|h_{l}|^2  measured {got:.4}  expected {want:.4}");
    }
    let snr = 1.0 / model.n0;
    println!(
        "rSNR {:.1} dB is Eb/N0 {:.2} dB for K = 8, N = 16",
        linear_to_db(snr),
        linear_to_db(ebn0_from_snr(snr, 8, 16))
    );
}
