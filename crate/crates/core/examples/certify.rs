//! Noise levels under which every zero of a codeword stays in its own disc.

use mocz::bounds::{
    exact_worstcase_bound, huffman_theorem2_closed_form, polygon_product_extrema, theorem2_bound,
    verify_vertex_conjecture,
};
use mocz::huffman::{build_codebook, optimal_radius, signal_zeros, BitWord};

fn main() {
    for k in [4usize, 8, 16] {
        let cb = build_codebook(k, optimal_radius(k, 1.0)).unwrap();
        let zeros = signal_zeros(&BitWord::ones(k), &cb).unwrap();
        let delta = 0.9 * zeros.min_pairwise_distance() / 2.0;
        let cert = theorem2_bound(&zeros, delta).unwrap();
        let exact = exact_worstcase_bound(&zeros, delta, 2000).unwrap();
        println!(
            "K={k:2}  d_min {:.4}  delta {:.4}  certified {:.3e}  exact {:.3e}  closed form {:.3e}",
            cert.dmin,
            delta,
            cert.epsilon,
            exact,
            huffman_theorem2_closed_form(k, cb.radius())
        );
    }

    let e = polygon_product_extrema(6, 1.0, 0.3, true);
    println!(
        "hexagon with centroid: min {:.5} at 0, max {:.5} at pi/6",
        e.min, e.max
    );
    let rep = verify_vertex_conjecture(8, 1.0, 0.2, 10_000);
    println!(
        "vertex circle N=8: observed {:.6} vs r^N-(r-delta)^N {:.6}, minimum at pi: {}",
        rep.observed_min, rep.conjectured, rep.min_at_pi
    );
}
