//! CSV and JSON writers for experiment results.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::monte_carlo::ExperimentResult;
use super::sweep::SweepResult;
use crate::error::{Error, Result};

pub const TRACE_HEADER: [&str; 3] = ["symbol_index", "detector", "ber"];
pub const SWEEP_HEADER: [&str; 4] = ["axis_value", "detector", "ber", "stderr"];

/// `x` with six significant digits, trailing zeros trimmed (like `%.6g`).
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    if (-5..6).contains(&exp) {
        let prec = (5 - exp).max(0) as usize;
        let s = format!("{x:.prec$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        let s = format!("{x:.5e}");
        let (mantissa, e) = s.split_once('e').expect("exponent form");
        let mantissa = if mantissa.contains('.') {
            mantissa.trim_end_matches('0').trim_end_matches('.')
        } else {
            mantissa
        };
        format!("{mantissa}e{e}")
    }
}

/// Centered moving average of length `window` (0 or 1 returns the input).
pub fn smooth(trace: &[f64], window: usize) -> Vec<f64> {
    if window <= 1 || trace.is_empty() {
        return trace.to_vec();
    }
    let half = window / 2;
    (0..trace.len())
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + window - half).min(trace.len());
            trace[lo..hi].iter().sum::<f64>() / (hi - lo) as f64
        })
        .collect()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let io = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    Error::io(path, io)
}

/// Writes `symbol_index,detector,ber`, detector by detector.
pub fn write_trace_csv<W: Write>(result: &ExperimentResult, smoothing: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)?;
    for summary in &result.detectors {
        let trace = smooth(&summary.trace, smoothing);
        for (i, ber) in trace.iter().enumerate() {
            w.write_record([i.to_string(), summary.detector.to_string(), format_sig(*ber)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for row in &result.rows {
        w.write_record([
            format_sig(row.axis_value),
            row.detector.to_string(),
            format_sig(row.ber),
            format_sig(row.stderr),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes the per-symbol BER trace, applying the configured smoothing.
pub fn emit_csv(result: &ExperimentResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_trace_csv(result, result.config.smoothing_window, file).map_err(|e| csv_error(path, e))
}

pub fn emit_sweep_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    write_sweep_csv(result, file).map_err(|e| csv_error(path, e))
}

/// JSON sidecar describing how a result file was produced.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata<'a> {
    pub version: &'a str,
    pub command: &'a str,
    pub config: &'a ExperimentConfig,
    pub base_seed: u64,
    pub num_trials: usize,
    pub trial_seeds: Vec<u64>,
    pub wall_time_s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<serde_json::Value>,
}

pub fn write_metadata(meta: &Metadata<'_>, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(meta).map_err(|e| Error::io(path, e.into()))?;
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// `<path>.meta.json` next to a CSV output.
pub fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".meta.json");
    path.with_file_name(name)
}
