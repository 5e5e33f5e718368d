use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::ExperimentResult;

pub const CSV_HEADER: &str = "snr_db,decoder,bits_sent,bit_errors,ber,ber_ci_halfwidth,wall_time_s";

const Z_95: f64 = 1.959_963_984_540_054;

/// Half-width of the 95% Wilson score interval for `errors` out of `n`.
pub fn wilson_halfwidth(errors: u64, n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    let p = errors as f64 / n;
    let z2 = Z_95 * Z_95;
    Z_95 / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt()
}

/// One line of the curves CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub snr_db: f64,
    pub decoder: String,
    pub bits_sent: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ber_ci_halfwidth: f64,
    pub wall_time_s: f64,
}

impl ExperimentResult {
    pub fn rows(&self) -> Vec<CsvRow> {
        self.curves
            .iter()
            .flat_map(|c| {
                c.points.iter().map(|p| CsvRow {
                    snr_db: p.snr_db,
                    decoder: c.scheme.clone(),
                    bits_sent: p.bits_sent,
                    bit_errors: p.bit_errors,
                    ber: p.ber,
                    ber_ci_halfwidth: p.ber_ci_halfwidth,
                    wall_time_s: p.wall_time_s,
                })
            })
            .collect()
    }
}

/// Floats are written in Rust's shortest round-trip form.
pub fn write_csv<W: Write>(result: &ExperimentResult, mut out: W) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in result.rows() {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.snr_db,
            r.decoder,
            r.bits_sent,
            r.bit_errors,
            r.ber,
            r.ber_ci_halfwidth,
            r.wall_time_s
        )?;
    }
    Ok(())
}

pub fn read_csv<R: BufRead>(input: R) -> io::Result<Vec<CsvRow>> {
    let bad = |m: String| io::Error::new(io::ErrorKind::InvalidData, m);
    let mut lines = input.lines();
    let header = lines.next().transpose()?;
    if header.as_deref().map(str::trim) != Some(CSV_HEADER) {
        return Err(bad("missing or unexpected header".into()));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(bad(format!("line {}: expected 7 fields", i + 2)));
        }
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| bad(format!("line {}: {e}", i + 2)))
        };
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|e| bad(format!("line {}: {e}", i + 2)))
        };
        rows.push(CsvRow {
            snr_db: num(f[0])?,
            decoder: f[1].to_string(),
            bits_sent: int(f[2])?,
            bit_errors: int(f[3])?,
            ber: num(f[4])?,
            ber_ci_halfwidth: num(f[5])?,
            wall_time_s: num(f[6])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_reference_values() {
        // statsmodels proportion_confint(10, 100, method="wilson")
        let hw = wilson_halfwidth(10, 100);
        assert!((hw - 0.059568).abs() < 1e-5, "{hw}");
        assert_eq!(wilson_halfwidth(0, 0), 0.0);
        let hw0 = wilson_halfwidth(0, 1000);
        assert!(hw0 > 0.0 && hw0 < 0.002);
    }

    #[test]
    fn header_is_fixed() {
        assert_eq!(
            CSV_HEADER.split(',').collect::<Vec<_>>(),
            [
                "snr_db",
                "decoder",
                "bits_sent",
                "bit_errors",
                "ber",
                "ber_ci_halfwidth",
                "wall_time_s"
            ]
        );
        assert!(read_csv("snr,decoder\n".as_bytes()).is_err());
    }
}
