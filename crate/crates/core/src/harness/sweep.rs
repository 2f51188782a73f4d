use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::{DetectorKind, ExperimentConfig};
use super::monte_carlo::run_monte_carlo;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Snr,
    Users,
    Rank,
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Snr => "snr",
            SweepAxis::Users => "users",
            SweepAxis::Rank => "rank",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "snr" => Ok(SweepAxis::Snr),
            "users" | "k" => Ok(SweepAxis::Users),
            "rank" | "d" => Ok(SweepAxis::Rank),
            other => Err(Error::config(format!("unknown sweep axis '{other}' (snr, users, rank)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub detector: DetectorKind,
    pub ber: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub config: ExperimentConfig,
    pub rows: Vec<SweepRow>,
    pub wall_time_s: f64,
}

impl SweepResult {
    /// Rows of one detector, in sweep order.
    pub fn series(&self, kind: DetectorKind) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| r.detector == kind).collect()
    }
}

/// The configurations visited by a sweep, paired with their axis values.
pub fn sweep_points(cfg: &ExperimentConfig, axis: SweepAxis) -> Result<Vec<(f64, ExperimentConfig)>> {
    let points: Vec<(f64, ExperimentConfig)> = match axis {
        SweepAxis::Snr => cfg
            .snr_sweep
            .iter()
            .map(|&v| (v, ExperimentConfig { snr_db: v, ..cfg.clone() }))
            .collect(),
        SweepAxis::Users => cfg
            .users_sweep
            .iter()
            .map(|&k| (k as f64, ExperimentConfig { users: k, ..cfg.clone() }))
            .collect(),
        SweepAxis::Rank => cfg
            .rank_sweep
            .iter()
            .map(|&d| (d as f64, ExperimentConfig { rank: d, ..cfg.clone() }))
            .collect(),
    };
    if points.is_empty() {
        return Err(Error::config(format!("{axis} sweep list is empty")));
    }
    for (_, p) in &points {
        p.validate()?;
    }
    Ok(points)
}

/// One Monte Carlo run per sweep point. Every point reuses the same trial
/// seeds, so neighbouring points are paired comparisons.
pub fn sweep(cfg: &ExperimentConfig, axis: SweepAxis) -> Result<SweepResult> {
    let started = Instant::now();
    let points = sweep_points(cfg, axis)?;
    let mut rows = Vec::with_capacity(points.len() * cfg.detectors.len());
    for (value, point) in &points {
        let result = run_monte_carlo(point)?;
        for summary in &result.detectors {
            let (ber, stderr) = summary.final_ber(point.final_window);
            rows.push(SweepRow {
                axis_value: *value,
                detector: summary.detector,
                ber,
                stderr,
            });
        }
    }
    Ok(SweepResult {
        axis,
        config: cfg.clone(),
        rows,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
