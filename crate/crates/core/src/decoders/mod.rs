//! Receivers for Huffman BMOCZ blocks.
//!
//! All decoders take the raw received samples `y_0 .. y_{N-1}` and return
//! a word of `K` bits together with a per-bit confidence margin.

mod dizet;
mod ml;
mod rfmd;

pub use dizet::{decode_dizet, decode_dizet_dft, dizet_weight, DizetWeights};
pub use ml::{decode_ml, ml_weighting, ml_weighting_from_profile, MlWeighting, ML_MAX_BITS};
pub use rfmd::decode_rfmd;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::huffman::BitWord;
use crate::poly::PolyError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DecodeError {
    #[error("root finding failed: {0}")]
    RootFindingFailed(#[from] PolyError),
    #[error("exhaustive search over 2^{k} codewords exceeds the budget (K <= {max})")]
    SearchBudgetExceeded { k: usize, max: usize },
    #[error("weighting matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("received block has {got} samples, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("received block of {got} samples is shorter than K+1 = {need}")]
    BlockTooShort { need: usize, got: usize },
    #[error("invalid weighting parameter: {0}")]
    InvalidParameter(String),
}

/// Per-bit anomaly marker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BitFlag {
    Clean,
    /// No received root fell into this bit's phase sector.
    EmptySector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub word: BitWord,
    pub per_bit_margin: Vec<f64>,
    pub flags: Vec<BitFlag>,
}

impl DecodeResult {
    pub(crate) fn from_bits(bits: &[bool], margins: Vec<f64>, flags: Vec<BitFlag>) -> Self {
        Self {
            word: BitWord::from_bits(bits),
            per_bit_margin: margins,
            flags,
        }
    }

    pub fn flagged(&self) -> usize {
        self.flags.iter().filter(|f| **f != BitFlag::Clean).count()
    }
}

/// Names used by the harness, CLI and output files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderKind {
    Rfmd,
    Ml,
    Dizet,
    DizetDft,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [Self::Rfmd, Self::Ml, Self::Dizet, Self::DizetDft];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Rfmd => "rfmd",
            Self::Ml => "ml",
            Self::Dizet => "dizet",
            Self::DizetDft => "dizet_dft",
        }
    }
}

impl std::str::FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown decoder '{s}'"))
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

fn require_len(y: &[crate::poly::C64], k: usize) -> Result<(), DecodeError> {
    if y.len() < k + 1 {
        return Err(DecodeError::BlockTooShort {
            need: k + 1,
            got: y.len(),
        });
    }
    Ok(())
}
