//! The `mocz` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::bounds::{
    exact_worstcase_bound, huffman_theorem2_closed_form, theorem2_bound, verify_vertex_conjecture,
    DEFAULT_THETA_GRID,
};
use crate::channel::ChannelModel;
use crate::decoders::{
    decode_dizet, decode_dizet_dft, decode_ml, decode_rfmd, ml_weighting, DecodeResult, DecoderKind,
};
use crate::harness::{
    run_experiment, sweep_label, write_csv, ExperimentConfig, HarnessError, RadiusSpec, SweepConfig,
};
use crate::huffman::{build_codebook, encode, signal_zeros, BitWord, HuffmanCodebook};
use crate::poly::{ZeroSet, C64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Environment variable that overrides `--workers`.
pub const WORKERS_ENV: &str = "MOCZ_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "mocz",
    version,
    about = "Huffman BMOCZ encoder, decoders, bounds and BER harness"
)]
pub struct Cli {
    /// Seed for Monte Carlo runs (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; MOCZ_WORKERS takes precedence.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (directory for `sweep`); stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bits to transmit samples, one `re,im` line per coefficient.
    Encode {
        /// Binary string, or hex with a `0x` prefix.
        #[arg(long)]
        bits: String,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "optimal:1")]
        radius: String,
        /// Also write the codebook JSON here.
        #[arg(long)]
        codebook_out: Option<PathBuf>,
    },
    /// Received `re,im` samples to bits.
    Decode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        codebook: Option<PathBuf>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value = "optimal:1")]
        radius: String,
        #[arg(long, default_value = "dizet")]
        decoder: String,
        /// Tap decay of the assumed channel (ML only).
        #[arg(long, default_value_t = 1.0)]
        p: f64,
        /// Noise power assumed by the ML weighting.
        #[arg(long, default_value_t = 0.0)]
        n0: f64,
    },
    /// Run a BER experiment from a JSON config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Robustness certificates for a codebook or zero set.
    Bounds {
        #[arg(long, conflicts_with = "zeros")]
        codebook: Option<PathBuf>,
        #[arg(long)]
        zeros: Option<PathBuf>,
        /// `max`, `frac:<f>` (fraction of d_min/2) or an absolute radius.
        #[arg(long, default_value = "max")]
        delta: String,
        /// Certify this word only instead of the worst word of the codebook.
        #[arg(long)]
        bits: Option<String>,
        #[arg(long, default_value_t = DEFAULT_THETA_GRID)]
        theta_grid: usize,
    },
    /// Run the cartesian product of a base config over K, L and p.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Config(String),
    Numerical(String),
    Io(io::Error),
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(m) => CliError::Config(m),
            HarnessError::Numerical(m) => CliError::Numerical(m),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn config_err(e: impl ToString) -> CliError {
    CliError::Config(e.to_string())
}

fn numerical_err(e: impl ToString) -> CliError {
    CliError::Numerical(e.to_string())
}

/// Parses `argv` and runs the command. Returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(cli) {
        Ok(()) => EXIT_OK,
        Err(CliError::Config(m)) => {
            eprintln!("error: {m}");
            EXIT_CONFIG
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
        Err(CliError::Numerical(m)) => {
            eprintln!("numerical failure: {m}");
            EXIT_NUMERICAL
        }
    }
}

fn resolve_workers(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| config_err(format!("{WORKERS_ENV}='{v}' is not a count"))),
        _ => Ok(flag),
    }
}

fn emit(out: &Option<PathBuf>, body: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, body).map_err(CliError::Io),
        None => {
            io::stdout().write_all(body)?;
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> Vec<u8> {
    let mut s = serde_json::to_vec_pretty(v).expect("serializable");
    s.push(b'\n');
    s
}

fn read_to_string(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| config_err(format!("{}: {e}", path.display())))
}

fn parse_bits(s: &str, k: Option<usize>) -> Result<BitWord, CliError> {
    let s = s.trim();
    if let Some(hex) = s.strip_prefix("0x") {
        let k = k.ok_or_else(|| config_err("hex bits need --k"))?;
        return BitWord::from_hex(hex, k).map_err(config_err);
    }
    let w: BitWord = s.parse().map_err(config_err)?;
    if let Some(k) = k {
        if k != w.len() {
            return Err(config_err(format!("{} bits given but --k {k}", w.len())));
        }
    }
    Ok(w)
}

fn codebook_from(
    path: &Option<PathBuf>,
    k: Option<usize>,
    radius: &str,
) -> Result<HuffmanCodebook, CliError> {
    if let Some(p) = path {
        let cb: HuffmanCodebook = serde_json::from_str(&read_to_string(p)?).map_err(config_err)?;
        return cb.validated().map_err(config_err);
    }
    let k = k.ok_or_else(|| config_err("need --codebook or --k"))?;
    let spec: RadiusSpec = radius.parse().map_err(config_err)?;
    build_codebook(k, spec.resolve(k)).map_err(config_err)
}

fn signal_csv(coeffs: &[C64]) -> String {
    coeffs
        .iter()
        .map(|c| format!("{},{}\n", c.re, c.im))
        .collect()
}

fn parse_signal_csv(text: &str) -> Result<Vec<C64>, CliError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("re"))
        .enumerate()
        .map(|(i, l)| {
            let (re, im) = l
                .split_once(',')
                .ok_or_else(|| config_err(format!("sample {i}: expected re,im")))?;
            let re: f64 = re.trim().parse().map_err(config_err)?;
            let im: f64 = im.trim().parse().map_err(config_err)?;
            Ok(C64::new(re, im))
        })
        .collect()
}

fn decode_result_json(res: &DecodeResult) -> serde_json::Value {
    json!({
        "bits": res.word.to_string(),
        "per_bit_margin": res.per_bit_margin,
        "flags": res.flags,
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Encode {
            bits,
            k,
            radius,
            codebook_out,
        } => {
            let word = parse_bits(bits, *k)?;
            let cb = codebook_from(&None, Some(word.len()), radius)?;
            let x = encode(&word, &cb).map_err(config_err)?;
            if let Some(p) = codebook_out {
                fs::write(p, to_json(&cb))?;
            }
            let body = match cli.format {
                Format::Csv => signal_csv(&x.coeffs).into_bytes(),
                Format::Json => to_json(&json!({
                    "bits": word.to_string(),
                    "codebook": cb,
                    "signal": x.coeffs.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>(),
                })),
            };
            emit(&cli.out, &body)
        }
        Command::Decode {
            input,
            codebook,
            k,
            radius,
            decoder,
            p,
            n0,
        } => {
            let cb = codebook_from(codebook, *k, radius)?;
            let y = parse_signal_csv(&read_to_string(input)?)?;
            let kind: DecoderKind = decoder.parse().map_err(config_err)?;
            let res = match kind {
                DecoderKind::Dizet => decode_dizet(&y, &cb),
                DecoderKind::DizetDft => decode_dizet_dft(&y, &cb),
                DecoderKind::Rfmd => decode_rfmd(&y, &cb).map_err(numerical_err)?,
                DecoderKind::Ml => {
                    if y.len() <= cb.k() {
                        return Err(config_err("block shorter than K+1"));
                    }
                    let model = ChannelModel::new(y.len() - cb.k(), *p, *n0).map_err(config_err)?;
                    let w = ml_weighting(&cb, &model).map_err(numerical_err)?;
                    decode_ml(&y, &cb, &w).map_err(|e| match e {
                        crate::decoders::DecodeError::SearchBudgetExceeded { .. } => config_err(e),
                        other => numerical_err(other),
                    })?
                }
            };
            let body = match cli.format {
                Format::Csv => format!("{}\n", res.word).into_bytes(),
                Format::Json => to_json(&decode_result_json(&res)),
            };
            emit(&cli.out, &body)
        }
        Command::Simulate { config } => {
            let mut cfg = ExperimentConfig::from_json(&read_to_string(config)?)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let res = run_experiment(&cfg, resolve_workers(cli.workers)?)?;
            let body = match cli.format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    write_csv(&res, &mut buf)?;
                    buf
                }
                Format::Json => to_json(&res),
            };
            emit(&cli.out, &body)
        }
        Command::Sweep { config } => {
            let mut sweep: SweepConfig =
                serde_json::from_str(&read_to_string(config)?).map_err(config_err)?;
            if let Some(s) = cli.seed {
                sweep.base.seed = s;
            }
            let cfgs = sweep.expand();
            for c in &cfgs {
                c.validate()?;
            }
            let workers = resolve_workers(cli.workers)?;
            let mut all = Vec::new();
            if let Some(dir) = &cli.out {
                fs::create_dir_all(dir)?;
            }
            for c in &cfgs {
                let res = run_experiment(c, workers)?;
                if let Some(dir) = &cli.out {
                    let label = sweep_label(c);
                    match cli.format {
                        Format::Csv => {
                            let mut buf = Vec::new();
                            write_csv(&res, &mut buf)?;
                            fs::write(dir.join(format!("{label}.csv")), buf)?;
                        }
                        Format::Json => {
                            fs::write(dir.join(format!("{label}.json")), to_json(&res))?
                        }
                    }
                    eprintln!("{label}: done");
                } else {
                    all.push(json!({ "label": sweep_label(c), "result": res }));
                }
            }
            if cli.out.is_none() {
                emit(&None, &to_json(&all))?;
            }
            Ok(())
        }
        Command::Bounds {
            codebook,
            zeros,
            delta,
            bits,
            theta_grid,
        } => {
            let report = bounds_report(codebook, zeros, delta, bits, *theta_grid)?;
            emit(&cli.out, &to_json(&report))
        }
    }
}

fn parse_delta(spec: &str, dmin: f64) -> Result<f64, CliError> {
    let half = dmin / 2.0;
    match spec.trim() {
        "max" => Ok(half * (1.0 - 1e-9)),
        s => match s.strip_prefix("frac:") {
            Some(f) => {
                let f: f64 = f.parse().map_err(config_err)?;
                Ok(f * half)
            }
            None => s.parse().map_err(config_err),
        },
    }
}

#[derive(Serialize)]
struct CertificateEntry {
    bits: Option<String>,
    delta: f64,
    epsilon: f64,
    dmin: f64,
    #[serde(rename = "R")]
    radius: f64,
    #[serde(rename = "xN_abs")]
    xn_abs: f64,
    radius_clamped: bool,
    exact_worstcase: f64,
}

fn certify(
    zs: &ZeroSet,
    delta: &str,
    grid: usize,
    bits: Option<String>,
) -> Result<CertificateEntry, CliError> {
    let d = parse_delta(delta, zs.min_pairwise_distance())?;
    let cert = theorem2_bound(zs, d).map_err(config_err)?;
    let exact = if d > 0.0 {
        exact_worstcase_bound(zs, d, grid).map_err(config_err)?
    } else {
        0.0
    };
    Ok(CertificateEntry {
        bits,
        delta: cert.delta,
        epsilon: cert.epsilon,
        dmin: cert.dmin,
        radius: cert.radius,
        xn_abs: cert.xn_abs,
        radius_clamped: cert.radius_clamped,
        exact_worstcase: exact,
    })
}

fn bounds_report(
    codebook: &Option<PathBuf>,
    zeros: &Option<PathBuf>,
    delta: &str,
    bits: &Option<String>,
    grid: usize,
) -> Result<serde_json::Value, CliError> {
    let (inputs, certificates, n) = match (codebook, zeros) {
        (Some(_), _) => {
            let cb = codebook_from(codebook, None, "")?;
            let words: Vec<BitWord> = match bits {
                Some(b) => vec![parse_bits(b, Some(cb.k()))?],
                None if cb.k() <= 12 => (0..1u64 << cb.k())
                    .map(|r| BitWord::new(r, cb.k()))
                    .collect(),
                None => {
                    return Err(config_err("K > 12: pass --bits to pick a word"));
                }
            };
            let mut worst: Option<CertificateEntry> = None;
            for w in &words {
                let zs = signal_zeros(w, &cb).map_err(config_err)?;
                let entry = certify(&zs, delta, grid, Some(w.to_string()))?;
                if worst.as_ref().is_none_or(|c| entry.epsilon < c.epsilon) {
                    worst = Some(entry);
                }
            }
            let inputs = json!({
                "K": cb.k(),
                "R": cb.radius(),
                "eta": cb.eta(),
                "words_checked": words.len(),
                "huffman_closed_form": huffman_theorem2_closed_form(cb.k(), cb.radius()),
            });
            (inputs, vec![worst.expect("at least one word")], cb.k())
        }
        (None, Some(p)) => {
            let zs: ZeroSet = serde_json::from_str(&read_to_string(p)?).map_err(config_err)?;
            let entry = certify(&zs, delta, grid, None)?;
            (json!({ "degree": zs.degree() }), vec![entry], zs.degree())
        }
        (None, None) => return Err(config_err("need --codebook or --zeros")),
    };
    let n = n.max(2);
    let conjecture: Vec<_> = (1..=20)
        .map(|i| {
            let d = (std::f64::consts::PI / n as f64).sin() * i as f64 / 20.0;
            verify_vertex_conjecture(n, 1.0, d, grid)
        })
        .collect();
    let (epsilon, delta, dmin) = (
        certificates[0].epsilon,
        certificates[0].delta,
        certificates[0].dmin,
    );
    Ok(json!({
        "inputs": inputs,
        "epsilon": epsilon,
        "delta": delta,
        "dmin": dmin,
        "certificates": certificates,
        "conjecture_table": conjecture,
    }))
}
