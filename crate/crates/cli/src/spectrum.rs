//! `spectrum`: amplitude spectrum of one channel of a trace CSV.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use morpho_core::analysis::{dominant_frequency, harmonic_ratios, spectrum, Window};
use morpho_core::TimeSeries64;
use serde::Serialize;

use crate::output::{num, Outcome, Table};

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowArg {
    None,
    Hann,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SpectrumArgs {
    /// Trace CSV whose first column is `t`
    #[arg(long)]
    pub input: PathBuf,
    /// Column to analyse
    #[arg(long)]
    pub channel: String,
    #[arg(long, value_enum, default_value_t = WindowArg::Hann)]
    pub window: WindowArg,
    /// Start of the analysed span, s; defaults to the first sample
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    /// End of the analysed span, s; defaults to the last sample
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    /// Number of harmonics to report, counting the fundamental
    #[arg(long, default_value_t = 5)]
    pub harmonics: usize,
}

/// Reads a uniformly sampled trace CSV.
pub fn read_trace(path: &Path) -> Result<TimeSeries64> {
    let mut reader = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    ensure!(headers.get(0) == Some("t") && headers.len() >= 2, "{}: first column must be `t`", path.display());
    let channels: Vec<&str> = headers.iter().skip(1).collect();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let values: Vec<f64> = record
            .iter()
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("{}: line {}", path.display(), line + 2))?;
        ensure!(values.len() == headers.len(), "{}: line {} has {} fields", path.display(), line + 2, values.len());
        times.push(values[0]);
        rows.push(values[1..].to_vec());
    }
    if times.len() < 2 {
        bail!("{}: need at least two samples", path.display());
    }
    let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
    ensure!(dt > 0.0, "{}: time must increase", path.display());
    for (i, t) in times.iter().enumerate() {
        let expected = times[0] + dt * i as f64;
        // allows for times printed with nine significant digits
        let tol = 1e-3 * dt + 1e-8 * expected.abs();
        ensure!((t - expected).abs() <= tol, "{}: sampling is not uniform near t = {t}", path.display());
    }
    Ok(TimeSeries64::from_rows(times[0], dt, &channels, &rows)?)
}

pub fn run(a: &SpectrumArgs) -> Result<Outcome> {
    let mut ts = read_trace(&a.input)?;
    if a.t_min.is_some() || a.t_max.is_some() {
        let lo = a.t_min.unwrap_or(ts.t0());
        let hi = a.t_max.unwrap_or(ts.time(ts.len() - 1));
        ts = ts.window(lo, hi)?;
    }
    let window = match a.window {
        WindowArg::None => Window::None,
        WindowArg::Hann => Window::Hann,
    };
    let sp = spectrum(&ts, &a.channel, window)?;
    let mut table = Table::new(&["freq_hz", "magnitude"]);
    for (f, m) in sp.freqs.iter().zip(&sp.mags) {
        table.row(&[*f, *m]);
    }
    let mut out = Outcome::default();
    out.file("spectrum.csv", table.into_string());
    let f1 = dominant_frequency(&sp, (sp.bin_width(), sp.nyquist()))?;
    out.note("samples", sp.n_samples);
    out.note("bin_width_hz", num(sp.bin_width()));
    out.note("dominant_hz", num(f1));
    if a.harmonics >= 2 {
        match harmonic_ratios(&sp, f1, a.harmonics) {
            Ok(r) => {
                for (k, v) in r.iter().enumerate() {
                    out.note(&format!("harmonic{}_ratio", k + 2), num(*v));
                }
            }
            Err(e) => out.note("harmonics", e),
        }
    }
    Ok(out)
}
