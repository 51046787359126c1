//! CSV rendering, run summaries and the run manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use morpho_core::TimeSeries64;
use serde::Serialize;

/// Nine significant digits in scientific notation.
pub fn num(v: f64) -> String {
    format!("{v:.8e}")
}

/// Scientific notation with trailing mantissa zeros removed, e.g. `1.5e-2`.
pub fn short(v: f64) -> String {
    let s = num(v);
    match s.split_once('e') {
        Some((mantissa, exp)) if mantissa.contains('.') => {
            let m = mantissa.trim_end_matches('0').trim_end_matches('.');
            format!("{m}e{exp}")
        }
        _ => s,
    }
}

/// A CSV table built in memory.
pub struct Table {
    text: String,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        let mut text = header.join(",");
        text.push('\n');
        Self { text }
    }

    pub fn row(&mut self, values: &[f64]) {
        let cells: Vec<String> = values.iter().map(|&v| num(v)).collect();
        self.raw(&cells);
    }

    /// Row of preformatted cells.
    pub fn raw<S: AsRef<str>>(&mut self, cells: &[S]) {
        for (i, c) in cells.iter().enumerate() {
            if i > 0 {
                self.text.push(',');
            }
            self.text.push_str(c.as_ref());
        }
        self.text.push('\n');
    }

    pub fn into_string(self) -> String {
        self.text
    }
}

/// Trace with a leading `t` column.
pub fn trace_csv(ts: &TimeSeries64) -> String {
    let mut header = vec!["t"];
    header.extend(ts.channels().iter().map(String::as_str));
    let mut table = Table::new(&header);
    let mut row = Vec::with_capacity(header.len());
    for (i, r) in ts.rows().enumerate() {
        row.clear();
        row.push(ts.time(i));
        row.extend_from_slice(r);
        table.row(&row);
    }
    table.into_string()
}

/// Everything a subcommand produces, written only once the run succeeded.
#[derive(Default)]
pub struct Outcome {
    pub files: Vec<(String, String)>,
    pub summary: Vec<(String, String)>,
}

impl Outcome {
    pub fn file(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.summary.push((key.to_string(), value.to_string()));
    }
}

/// Flattens the resolved arguments into `key=value` pairs.
fn params<A: Serialize>(args: &A) -> Result<Vec<(String, String)>> {
    let value = serde_json::to_value(args)?;
    let map = value.as_object().context("arguments do not serialize to a map")?;
    Ok(map
        .iter()
        .map(|(k, v)| {
            let s = match v {
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Null => String::new(),
                other => other.to_string(),
            };
            (k.clone(), s)
        })
        .collect())
}

/// Writes the outcome files, `summary.txt` and `run_manifest.txt`; returns the paths written.
pub fn write_run<A: Serialize>(
    out_dir: &Path,
    command: &str,
    seed: u64,
    args: &A,
    outcome: &Outcome,
) -> Result<Vec<PathBuf>> {
    let params = params(args)?;
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;

    let mut names: Vec<&str> = outcome.files.iter().map(|(n, _)| n.as_str()).collect();
    names.extend(["summary.txt", "run_manifest.txt"]);
    let written: Vec<PathBuf> = names.iter().map(|n| out_dir.join(n)).collect();

    let mut summary = String::new();
    for (k, v) in &outcome.summary {
        writeln!(summary, "{k}={v}")?;
    }
    let mut manifest = String::new();
    writeln!(manifest, "subcommand={command}")?;
    writeln!(manifest, "version={}", env!("CARGO_PKG_VERSION"))?;
    writeln!(manifest, "seed={seed}")?;
    writeln!(manifest, "out_dir={}", out_dir.display())?;
    for (k, v) in &params {
        writeln!(manifest, "param.{k}={v}")?;
    }
    let outputs: Vec<String> = written.iter().map(|p| p.display().to_string()).collect();
    writeln!(manifest, "outputs={}", outputs.join(","))?;

    let contents = outcome.files.iter().map(|(_, c)| c.as_str()).chain([summary.as_str(), manifest.as_str()]);
    for (path, text) in written.iter().zip(contents) {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(written)
}
