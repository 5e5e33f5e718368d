//! Noncoherent block transmission over fading channels by modulating the
//! zeros of the baseband polynomial (Huffman BMOCZ).

pub mod autocorr;
pub mod bounds;
pub mod channel;
pub mod cli;
pub mod decoders;
pub mod harness;
pub mod huffman;
pub mod poly;
pub mod rng;
mod serde_c64;
