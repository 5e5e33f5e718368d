//! A short BER curve written as CSV to stdout.
//!
//! cargo run --release --example ber_curve [config.json]

use mocz::harness::{run_experiment, write_csv, ExperimentConfig};

fn main() {
    let cfg = match std::env::args().nth(1) {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path).unwrap()).unwrap(),
        None => ExperimentConfig::from_json(
            r#"{"K": 8, "L": 4, "p": 0.88, "snr_grid_db": [0, 10, 20],
                "baselines": ["bpsk_coherent_analytic", "bpsk_coherent_mc"],
                "trials_per_point": 2000, "seed": 5}"#,
        )
        .unwrap(),
    };
    let res = run_experiment(&cfg, None).unwrap();
    write_csv(&res, std::io::stdout().lock()).unwrap();
}
