//! Seeded, parallel Monte Carlo bit-error-rate experiments.
//!
//! Trial `t` of SNR point `i` draws the word, the channel and then the noise
//! from stream `(i << 32) | t`, and every decoder sees that same block.
//! Trials run in fixed-size batches; early stopping is decided between
//! batches, so results do not depend on the number of worker threads.

mod baselines;
mod output;

pub use baselines::{
    bpsk_flatfading_analytic, bpsk_flatfading_trial, pilot_qpsk_baseline, pilot_qpsk_trial,
    PilotLayout,
};
pub use output::{read_csv, wilson_halfwidth, write_csv, CsvRow, CSV_HEADER};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::channel::{
    db_to_linear, sample_channel, transmit, ChannelModel, ChannelRealization, Normalization,
};
use crate::decoders::{
    decode_dizet, decode_dizet_dft, decode_ml, decode_rfmd, ml_weighting_from_profile, DecodeError,
    DecoderKind, MlWeighting, ML_MAX_BITS,
};
use crate::huffman::{build_codebook, encode, optimal_radius, BitWord, HuffmanCodebook, MAX_BITS};
use crate::rng::RngStream;

/// Trials per scheduling unit.
pub const BATCH_SIZE: u64 = 256;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl From<DecodeError> for HarnessError {
    fn from(e: DecodeError) -> Self {
        HarnessError::Numerical(e.to_string())
    }
}

/// A fixed radius or `optimal:<lambda>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadiusSpec {
    Fixed(f64),
    Optimal(f64),
}

impl RadiusSpec {
    pub fn resolve(&self, k: usize) -> f64 {
        match *self {
            RadiusSpec::Fixed(r) => r,
            RadiusSpec::Optimal(lambda) => optimal_radius(k, lambda),
        }
    }
}

impl Default for RadiusSpec {
    fn default() -> Self {
        RadiusSpec::Optimal(1.0)
    }
}

impl FromStr for RadiusSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("optimal") {
            let lambda = match rest.strip_prefix(':') {
                Some(l) => l.parse().map_err(|_| format!("bad lambda in '{s}'"))?,
                None if rest.is_empty() => 1.0,
                None => return Err(format!("bad radius '{s}'")),
            };
            if !(lambda > 0.0) {
                return Err(format!("lambda must be positive in '{s}'"));
            }
            return Ok(RadiusSpec::Optimal(lambda));
        }
        s.parse()
            .map(RadiusSpec::Fixed)
            .map_err(|_| format!("bad radius '{s}'"))
    }
}

impl fmt::Display for RadiusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadiusSpec::Fixed(r) => write!(f, "{r}"),
            RadiusSpec::Optimal(l) => write!(f, "optimal:{l}"),
        }
    }
}

impl Serialize for RadiusSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            RadiusSpec::Fixed(r) => s.serialize_f64(*r),
            RadiusSpec::Optimal(_) => s.serialize_str(&self.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for RadiusSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(r) => Ok(RadiusSpec::Fixed(r)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrAxis {
    #[default]
    Rsnr,
    Ebn0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    BpskCoherentAnalytic,
    BpskCoherentMc,
    PilotQpsk,
}

impl BaselineKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::BpskCoherentAnalytic => "bpsk_coherent_analytic",
            Self::BpskCoherentMc => "bpsk_coherent_mc",
            Self::PilotQpsk => "pilot_qpsk",
        }
    }

    /// Salt separating this baseline's random streams from the BMOCZ ones.
    fn salt(&self) -> u64 {
        match self {
            Self::BpskCoherentAnalytic => 0,
            Self::BpskCoherentMc => 0x6270_736b_5f6d_6300,
            Self::PilotQpsk => 0x7069_6c6f_7471_7073,
        }
    }
}

fn default_trials() -> u64 {
    10_000
}

fn default_max_bit_errors() -> Option<u64> {
    Some(1000)
}

fn default_decoders() -> Vec<DecoderKind> {
    vec![DecoderKind::Ml, DecoderKind::Dizet, DecoderKind::Rfmd]
}

/// One BER experiment. Field names follow the JSON config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "R", default)]
    pub radius: RadiusSpec,
    #[serde(rename = "L")]
    pub taps: usize,
    #[serde(default = "one")]
    pub p: f64,
    pub snr_grid_db: Vec<f64>,
    #[serde(default)]
    pub snr_axis: SnrAxis,
    #[serde(default = "default_decoders")]
    pub decoders: Vec<DecoderKind>,
    #[serde(default)]
    pub baselines: Vec<BaselineKind>,
    #[serde(default = "default_trials")]
    pub trials_per_point: u64,
    #[serde(default)]
    pub seed: u64,
    /// Stop a decoder at a point once it has made this many bit errors.
    #[serde(default = "default_max_bit_errors")]
    pub max_bit_errors: Option<u64>,
    /// Pilot-QPSK layout; defaults to `L` pilots and `K/2` data symbols.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot: Option<PilotLayout>,
}

fn one() -> f64 {
    1.0
}

impl ExperimentConfig {
    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| HarnessError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let fail = |m: String| Err(HarnessError::Config(m));
        if self.k == 0 || self.k > MAX_BITS {
            return fail(format!("K = {} outside 1..={MAX_BITS}", self.k));
        }
        if self.decoders.contains(&DecoderKind::Ml) && self.k > ML_MAX_BITS {
            return fail(format!("ml decoder needs K <= {ML_MAX_BITS}"));
        }
        let r = self.radius.resolve(self.k);
        if !(r.is_finite() && r > 1.0) {
            return fail(format!("R = {r} must exceed 1"));
        }
        ChannelModel::new(self.taps, self.p, 0.0)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        if self.snr_grid_db.is_empty() {
            return fail("snr_grid_db is empty".into());
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite())
            || self.snr_grid_db.windows(2).any(|w| w[1] <= w[0])
        {
            return fail("snr_grid_db must be finite and strictly increasing".into());
        }
        if self.trials_per_point == 0 || self.trials_per_point > u64::from(u32::MAX) {
            return fail("trials_per_point must lie in 1..=2^32-1".into());
        }
        if self.snr_grid_db.len() > u32::MAX as usize {
            return fail("too many SNR points".into());
        }
        if self.decoders.is_empty() && self.baselines.is_empty() {
            return fail("nothing to simulate".into());
        }
        if self.max_bit_errors == Some(0) {
            return fail("max_bit_errors must be positive (or null)".into());
        }
        if self.baselines.contains(&BaselineKind::PilotQpsk) {
            let layout = self.pilot_layout();
            if layout.data == 0 || layout.pilots == 0 {
                return fail("pilot layout needs at least one pilot and one data symbol".into());
            }
        }
        Ok(())
    }

    pub fn codebook(&self) -> Result<HuffmanCodebook, HarnessError> {
        build_codebook(self.k, self.radius.resolve(self.k))
            .map_err(|e| HarnessError::Config(e.to_string()))
    }

    pub fn pilot_layout(&self) -> PilotLayout {
        self.pilot.unwrap_or(PilotLayout {
            pilots: self.taps,
            data: self.k.div_ceil(2),
        })
    }

    /// Received samples per BMOCZ block, `K + L`.
    pub fn block_len(&self) -> usize {
        self.k + self.taps
    }

    /// Received SNR for a grid value, given the number of received samples
    /// and payload bits of the scheme in question.
    pub fn rsnr_at(&self, snr_db: f64, samples: usize, bits: usize) -> f64 {
        let v = db_to_linear(snr_db);
        match self.snr_axis {
            SnrAxis::Rsnr => v,
            SnrAxis::Ebn0 => crate::channel::snr_from_ebn0(v, bits, samples),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_halfwidth: f64,
    pub wall_time_s: f64,
    pub trials: u64,
    pub stopped_early: bool,
}

impl BerPoint {
    fn from_counts(
        snr_db: f64,
        bits: u64,
        errors: u64,
        trials: u64,
        secs: f64,
        stopped: bool,
    ) -> Self {
        let ber = if bits == 0 {
            0.0
        } else {
            errors as f64 / bits as f64
        };
        Self {
            snr_db,
            bits_sent: bits,
            bit_errors: errors,
            ber,
            ber_ci_halfwidth: wilson_halfwidth(errors, bits),
            wall_time_s: secs,
            trials,
            stopped_early: stopped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveMetadata {
    pub config: ExperimentConfig,
    pub seed: u64,
    pub build: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerCurve {
    pub scheme: String,
    pub points: Vec<BerPoint>,
    pub metadata: CurveMetadata,
}

impl BerCurve {
    pub fn bers(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ber).collect()
    }
}

/// Curves keyed by scheme name, in config order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub curves: Vec<BerCurve>,
}

impl ExperimentResult {
    pub fn get(&self, scheme: &str) -> Option<&BerCurve> {
        self.curves.iter().find(|c| c.scheme == scheme)
    }

    pub fn by_name(&self) -> BTreeMap<String, BerCurve> {
        self.curves
            .iter()
            .map(|c| (c.scheme.clone(), c.clone()))
            .collect()
    }
}

pub fn build_id() -> String {
    format!("mocz-{}", env!("CARGO_PKG_VERSION"))
}

/// A simulated scheme: one of the BMOCZ decoders or a simulated baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Scheme {
    Decoder(DecoderKind),
    Baseline(BaselineKind),
}

impl Scheme {
    fn name(&self) -> &'static str {
        match self {
            Scheme::Decoder(d) => d.name(),
            Scheme::Baseline(b) => b.name(),
        }
    }
}

/// Everything fixed for one SNR point.
struct PointContext<'a> {
    cfg: &'a ExperimentConfig,
    cb: &'a HuffmanCodebook,
    point: u32,
    model: ChannelModel,
    ml: Option<MlWeighting>,
    pilot_n0: f64,
    bpsk_rsnr: f64,
    pilot: PilotLayout,
}

#[derive(Default, Clone)]
struct Tally {
    errors: u64,
    bits: u64,
    trials: u64,
    secs: f64,
}

fn draw_word<R: Rng + ?Sized>(rng: &mut R, k: usize) -> BitWord {
    let mask = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    BitWord::new(rng.random::<u64>() & mask, k)
}

/// Bit errors and elapsed seconds for each active scheme on one trial.
fn run_trial(
    ctx: &PointContext<'_>,
    schemes: &[Scheme],
    active: &[bool],
    trial: u32,
) -> Result<Vec<(u64, u64, f64)>, HarnessError> {
    let cfg = ctx.cfg;
    let stream = RngStream::for_trial(cfg.seed, ctx.point, trial);
    let mut rng = stream.rng();
    let word = draw_word(&mut rng, cfg.k);
    let h: ChannelRealization = sample_channel(&ctx.model, &mut rng);
    let need_block = schemes
        .iter()
        .zip(active)
        .any(|(s, a)| *a && matches!(s, Scheme::Decoder(_)));
    let y = if need_block {
        let x = encode(&word, ctx.cb).map_err(|e| HarnessError::Numerical(e.to_string()))?;
        Some(transmit(&x, &h, &ctx.model, &mut rng).samples)
    } else {
        None
    };

    let mut out = Vec::with_capacity(schemes.len());
    for (scheme, &on) in schemes.iter().zip(active) {
        if !on {
            out.push((0, 0, 0.0));
            continue;
        }
        let start = Instant::now();
        let (errors, bits) = match scheme {
            Scheme::Decoder(d) => {
                let y = y.as_deref().expect("block drawn for decoders");
                let res = match d {
                    DecoderKind::Rfmd => decode_rfmd(y, ctx.cb)?,
                    DecoderKind::Ml => {
                        decode_ml(y, ctx.cb, ctx.ml.as_ref().expect("ml weighting"))?
                    }
                    DecoderKind::Dizet => decode_dizet(y, ctx.cb),
                    DecoderKind::DizetDft => decode_dizet_dft(y, ctx.cb),
                };
                (res.word.hamming(&word) as u64, cfg.k as u64)
            }
            Scheme::Baseline(b) => {
                let mut brng = RngStream::new(cfg.seed ^ b.salt(), stream.stream).rng();
                match b {
                    BaselineKind::BpskCoherentMc => {
                        bpsk_flatfading_trial(cfg.k, ctx.bpsk_rsnr, &mut brng)
                    }
                    BaselineKind::PilotQpsk => {
                        let model = ctx.model.with_n0(ctx.pilot_n0);
                        pilot_qpsk_trial(&ctx.pilot, &model, &h, &mut brng)?
                    }
                    BaselineKind::BpskCoherentAnalytic => unreachable!("analytic baseline"),
                }
            }
        };
        out.push((errors, bits, start.elapsed().as_secs_f64()));
    }
    Ok(out)
}

fn build_pool(workers: Option<usize>) -> Result<rayon::ThreadPool, HarnessError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(HarnessError::Config("workers must be positive".into()));
        }
        b = b.num_threads(w);
    }
    b.build().map_err(|e| HarnessError::Config(e.to_string()))
}

/// Runs every decoder and baseline of `cfg` over its SNR grid.
///
/// `workers = None` uses rayon's default thread count.
pub fn run_experiment(
    cfg: &ExperimentConfig,
    workers: Option<usize>,
) -> Result<ExperimentResult, HarnessError> {
    cfg.validate()?;
    let cb = cfg.codebook()?;
    let pool = build_pool(workers)?;
    let n = cfg.block_len();
    let pilot = cfg.pilot_layout();

    let mut schemes: Vec<Scheme> = cfg.decoders.iter().map(|d| Scheme::Decoder(*d)).collect();
    schemes.extend(
        cfg.baselines
            .iter()
            .filter(|b| **b != BaselineKind::BpskCoherentAnalytic)
            .map(|b| Scheme::Baseline(*b)),
    );
    let metadata = CurveMetadata {
        config: cfg.clone(),
        seed: cfg.seed,
        build: build_id(),
    };
    let mut points: Vec<Vec<BerPoint>> = vec![Vec::new(); schemes.len()];
    let mut analytic = Vec::new();

    for (i, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
        let rsnr = cfg.rsnr_at(snr_db, n, cfg.k);
        let model = ChannelModel::new(cfg.taps, cfg.p, 1.0 / rsnr)
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        let ml = if cfg.decoders.contains(&DecoderKind::Ml) {
            let profile = model.effective_profile(cfg.k + 1, Normalization::Simulation);
            Some(ml_weighting_from_profile(&cb, &profile, model.n0)?)
        } else {
            None
        };
        let pilot_rsnr = cfg.rsnr_at(snr_db, pilot.received_len(cfg.taps), pilot.bits());
        // one bit per channel use for BPSK
        let bpsk_rsnr = cfg.rsnr_at(snr_db, 1, 1);
        let ctx = PointContext {
            cfg,
            cb: &cb,
            point: i as u32,
            model,
            ml,
            pilot_n0: 1.0 / pilot_rsnr,
            bpsk_rsnr,
            pilot,
        };
        analytic.push(bpsk_flatfading_analytic(bpsk_rsnr));

        let mut tallies = vec![Tally::default(); schemes.len()];
        let mut active = vec![true; schemes.len()];
        let mut stopped = vec![false; schemes.len()];
        let mut next = 0u64;
        while next < cfg.trials_per_point && active.iter().any(|a| *a) {
            let end = (next + BATCH_SIZE).min(cfg.trials_per_point);
            let batch: Vec<Vec<(u64, u64, f64)>> = pool.install(|| {
                (next..end)
                    .into_par_iter()
                    .map(|t| run_trial(&ctx, &schemes, &active, t as u32))
                    .collect::<Result<_, _>>()
            })?;
            for trial in &batch {
                for (j, &(e, b, s)) in trial.iter().enumerate() {
                    if active[j] {
                        tallies[j].errors += e;
                        tallies[j].bits += b;
                        tallies[j].trials += 1;
                        tallies[j].secs += s;
                    }
                }
            }
            next = end;
            if let Some(cap) = cfg.max_bit_errors {
                for j in 0..schemes.len() {
                    if active[j] && tallies[j].errors >= cap {
                        active[j] = false;
                        stopped[j] = next < cfg.trials_per_point;
                    }
                }
            }
        }
        for (j, t) in tallies.iter().enumerate() {
            points[j].push(BerPoint::from_counts(
                snr_db, t.bits, t.errors, t.trials, t.secs, stopped[j],
            ));
        }
    }

    let mut curves: Vec<BerCurve> = schemes
        .iter()
        .zip(points)
        .map(|(s, pts)| BerCurve {
            scheme: s.name().to_string(),
            points: pts,
            metadata: metadata.clone(),
        })
        .collect();
    if cfg.baselines.contains(&BaselineKind::BpskCoherentAnalytic) {
        curves.push(BerCurve {
            scheme: BaselineKind::BpskCoherentAnalytic.name().to_string(),
            points: cfg
                .snr_grid_db
                .iter()
                .zip(analytic)
                .map(|(&snr_db, ber)| BerPoint {
                    snr_db,
                    bits_sent: 0,
                    bit_errors: 0,
                    ber,
                    ber_ci_halfwidth: 0.0,
                    wall_time_s: 0.0,
                    trials: 0,
                    stopped_early: false,
                })
                .collect(),
            metadata,
        });
    }
    Ok(ExperimentResult { curves })
}

/// Experiments over the cartesian product of `K`, `L` and `p` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: ExperimentConfig,
    #[serde(rename = "K", default)]
    pub k: Vec<usize>,
    #[serde(rename = "L", default)]
    pub taps: Vec<usize>,
    #[serde(default)]
    pub p: Vec<f64>,
}

impl SweepConfig {
    /// The expanded configs, `K` outermost and `p` innermost. Empty lists
    /// keep the base value.
    pub fn expand(&self) -> Vec<ExperimentConfig> {
        let ks = if self.k.is_empty() {
            vec![self.base.k]
        } else {
            self.k.clone()
        };
        let ls = if self.taps.is_empty() {
            vec![self.base.taps]
        } else {
            self.taps.clone()
        };
        let ps = if self.p.is_empty() {
            vec![self.base.p]
        } else {
            self.p.clone()
        };
        let mut out = Vec::new();
        for &k in &ks {
            for &l in &ls {
                for &p in &ps {
                    out.push(ExperimentConfig {
                        k,
                        taps: l,
                        p,
                        ..self.base.clone()
                    });
                }
            }
        }
        out
    }
}

/// File stem identifying one expanded sweep config.
pub fn sweep_label(cfg: &ExperimentConfig) -> String {
    format!("k{}_l{}_p{}", cfg.k, cfg.taps, cfg.p)
}
