//! Too few pilots leave an error floor that the blind scheme does not have.

use mocz::decoders::DecoderKind;
use mocz::harness::{
    run_experiment, BaselineKind, ExperimentConfig, PilotLayout, RadiusSpec, SnrAxis,
};

fn main() {
    let l = 8;
    let cfg = ExperimentConfig {
        k: 8,
        radius: RadiusSpec::Optimal(1.0),
        taps: l,
        p: 1.0,
        snr_grid_db: vec![10.0, 20.0, 30.0],
        snr_axis: SnrAxis::Ebn0,
        decoders: vec![DecoderKind::Dizet],
        baselines: vec![BaselineKind::PilotQpsk],
        trials_per_point: 4000,
        seed: 9,
        max_bit_errors: None,
        pilot: Some(PilotLayout::underestimated(l, 4)),
    };
    let res = run_experiment(&cfg, None).unwrap();
    println!("Eb/N0 [dB]   dizet       pilot_qpsk (P = L/2)");
    let (d, p) = (res.get("dizet").unwrap(), res.get("pilot_qpsk").unwrap());
    for (a, b) in d.points.iter().zip(&p.points) {
        println!("{:>9}   {:.3e}   {:.3e}", a.snr_db, a.ber, b.ber);
    }
}
