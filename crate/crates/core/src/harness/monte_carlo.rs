use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{DetectorKind, ExperimentConfig};
use super::trial::{run_trial, TrialOutcome};
use crate::error::Result;

/// Trial-averaged results for one detector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSummary {
    pub detector: DetectorKind,
    /// Ensemble BER per symbol index.
    pub trace: Vec<f64>,
    /// Errors of each trial over the final window.
    pub window_errors: Vec<u32>,
    /// Smallest and largest rank chosen by a rank-selecting detector.
    pub rank_range: Option<(usize, usize)>,
}

impl DetectorSummary {
    /// Mean BER over the final window and its standard error across trials.
    pub fn final_ber(&self, window: usize) -> (f64, f64) {
        let rates: Vec<f64> = self.window_errors.iter().map(|&e| e as f64 / window as f64).collect();
        mean_and_stderr(&rates)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    /// Seeds of the trials, in aggregation order.
    pub seeds: Vec<u64>,
    pub detectors: Vec<DetectorSummary>,
    pub wall_time_s: f64,
}

impl ExperimentResult {
    pub fn detector(&self, kind: DetectorKind) -> Option<&DetectorSummary> {
        self.detectors.iter().find(|d| d.detector == kind)
    }

    /// Final-window BER and standard error of `kind`.
    pub fn final_ber(&self, kind: DetectorKind) -> Option<(f64, f64)> {
        self.detector(kind).map(|d| d.final_ber(self.config.final_window))
    }

    /// Mean of the per-trial final-window BER difference `a − b` and its
    /// standard error. Both detectors saw the same streams, so the
    /// difference is a paired comparison.
    pub fn paired_difference(&self, a: DetectorKind, b: DetectorKind) -> Option<(f64, f64)> {
        let (da, db) = (self.detector(a)?, self.detector(b)?);
        let w = self.config.final_window as f64;
        let diffs: Vec<f64> = da
            .window_errors
            .iter()
            .zip(&db.window_errors)
            .map(|(&x, &y)| (x as f64 - y as f64) / w)
            .collect();
        Some(mean_and_stderr(&diffs))
    }
}

/// Sample mean and standard error of the mean (zero for fewer than two samples).
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let t = values.len();
    if t == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / t as f64;
    if t < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (t - 1) as f64;
    (mean, (var / t as f64).sqrt())
}

/// Seeds `base_seed + t`, `t = 0..num_trials`.
pub fn trial_seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.num_trials as u64).map(|t| cfg.base_seed.wrapping_add(t)).collect()
}

/// Folds trial outcomes (in seed order) into per-detector summaries.
pub fn aggregate(cfg: &ExperimentConfig, trials: &[TrialOutcome]) -> Vec<DetectorSummary> {
    let total = cfg.total_symbols();
    let start = total - cfg.final_window;
    let n = trials.len() as f64;
    cfg.detectors
        .iter()
        .enumerate()
        .map(|(idx, &detector)| {
            let mut counts = vec![0u32; total];
            let mut window_errors = Vec::with_capacity(trials.len());
            let mut rank_range: Option<(usize, usize)> = None;
            for trial in trials {
                let trace = &trial.traces[idx];
                for (c, &e) in counts.iter_mut().zip(&trace.errors) {
                    *c += e as u32;
                }
                window_errors.push(trace.errors[start..].iter().filter(|&&e| e).count() as u32);
                for &d in &trace.ranks {
                    rank_range = Some(match rank_range {
                        Some((lo, hi)) => (lo.min(d), hi.max(d)),
                        None => (d, d),
                    });
                }
            }
            DetectorSummary {
                detector,
                trace: counts.iter().map(|&c| c as f64 / n).collect(),
                window_errors,
                rank_range,
            }
        })
        .collect()
}

/// Runs `num_trials` independent trials (in parallel) and averages them.
pub fn run_monte_carlo(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let started = Instant::now();
    let seeds = trial_seeds(cfg);
    let trials = seeds
        .par_iter()
        .map(|&s| run_trial(cfg, s))
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        detectors: aggregate(cfg, &trials),
        seeds,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
