//! One seeded realisation: a shared received stream run through every detector.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{DetectorKind, ExperimentConfig};
use crate::baselines::{lms_update, mber_full_rank_update, FullRankState};
use crate::error::Result;
use crate::jio::{JioParams, JioState, Mode, RankSelectionConfig};
use crate::linalg::CVector;
use crate::signal::gold::{degree_for_length, generate_gold_family};
use crate::signal::{Bit, ChannelState, StreamGenerator, StreamShape, UserConfig};

/// A seed for an independent sub-stream of `seed`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng.next_u64()
}

const CHANNEL_STREAM_BASE: u64 = 1 << 32;

/// A detector instance driven through the training/decision-directed schedule.
#[derive(Debug, Clone)]
pub enum Detector {
    Jio(Box<JioState>),
    Lms(FullRankState),
    Mber(FullRankState),
}

impl Detector {
    pub fn build(kind: DetectorKind, cfg: &ExperimentConfig) -> Result<Self> {
        let m = cfg.window();
        let rho = cfg.rho();
        Ok(match kind {
            DetectorKind::JioMberFixed => Detector::Jio(Box::new(JioState::new(
                m,
                cfg.rank,
                JioParams {
                    mu_w: cfg.mu_w,
                    mu_s: cfg.mu_s,
                    cycles: cfg.cycles,
                    rho,
                },
            )?)),
            DetectorKind::JioMberAuto => {
                let state = JioState::new(
                    m,
                    cfg.d_max,
                    JioParams {
                        mu_w: cfg.mu_w,
                        mu_s: cfg.mu_s,
                        cycles: cfg.cycles,
                        rho,
                    },
                )?;
                let sel = RankSelectionConfig {
                    averaging: cfg.rank_forgetting,
                    ..RankSelectionConfig::new(cfg.d_min, cfg.d_max)
                };
                Detector::Jio(Box::new(state.with_rank_selection(sel)?))
            }
            DetectorKind::FullRankLms => Detector::Lms(FullRankState::new(m, cfg.mu_lms, rho)?),
            DetectorKind::FullRankMber => Detector::Mber(FullRankState::new(m, cfg.mu_mber, rho)?),
        })
    }

    pub fn set_mode(&mut self, mode: Mode) {
        match self {
            Detector::Jio(s) => s.set_mode(mode),
            Detector::Lms(s) | Detector::Mber(s) => s.mode = mode,
        }
    }

    /// Detects the window, then adapts on it. Returns the decision and, for
    /// rank-selecting detectors, the rank used.
    pub fn step(&mut self, r: &CVector, known: Bit) -> Result<(Bit, Option<usize>)> {
        match self {
            Detector::Jio(s) => {
                let selecting = s.rank_selection().is_some();
                let out = s.step(r, Some(known))?;
                Ok((out.decision, selecting.then_some(out.rank)))
            }
            Detector::Lms(s) => {
                let (decision, reference) = full_rank_decision(s, r, known)?;
                lms_update(s, r, reference)?;
                Ok((decision, None))
            }
            Detector::Mber(s) => {
                let (decision, reference) = full_rank_decision(s, r, known)?;
                mber_full_rank_update(s, r, reference)?;
                Ok((decision, None))
            }
        }
    }
}

/// Pre-update decision and the bit that drives adaptation in the current mode.
fn full_rank_decision(s: &FullRankState, r: &CVector, known: Bit) -> Result<(Bit, Bit)> {
    let decision = Bit::decide(s.output(r)?.re);
    let reference = match s.mode {
        Mode::Training => known,
        Mode::DecisionDirected => decision,
    };
    Ok((decision, reference))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectorTrace {
    pub detector: DetectorKind,
    pub decisions: Vec<Bit>,
    pub errors: Vec<bool>,
    /// Rank used per symbol (rank-selecting detectors only).
    pub ranks: Vec<usize>,
}

impl DetectorTrace {
    pub fn error_count(&self) -> usize {
        self.errors.iter().filter(|&&e| e).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub seed: u64,
    /// Transmitted bits of the desired user.
    pub true_bits: Vec<Bit>,
    pub traces: Vec<DetectorTrace>,
}

/// Builds the users of a trial: Gold code `k`, an independently seeded fading
/// channel, and the configured amplitude.
pub fn build_users(cfg: &ExperimentConfig, trial_seed: u64) -> Result<Vec<UserConfig>> {
    let degree = degree_for_length(cfg.spreading_gain)
        .ok_or_else(|| crate::Error::Config(format!("no Gold family of length {}", cfg.spreading_gain)))?;
    let family = generate_gold_family(degree)?;
    let profile = cfg.profile_db();
    (0..cfg.users)
        .map(|k| {
            let channel = ChannelState::new(&profile, cfg.doppler, derive_seed(trial_seed, CHANNEL_STREAM_BASE + k as u64))?;
            UserConfig::new(cfg.amplitude(k), family[k].clone(), channel)
        })
        .collect()
}

/// Runs every configured detector over one shared stream. User 1 is trained on
/// the first `tr_symbols` bits, then switches to its own decisions.
pub fn run_trial(cfg: &ExperimentConfig, trial_seed: u64) -> Result<TrialOutcome> {
    cfg.validate()?;
    let users = build_users(cfg, trial_seed)?;
    let shape = StreamShape {
        spreading_gain: cfg.spreading_gain,
        paths: cfg.paths,
    };
    let mut stream = StreamGenerator::new(shape, &users, cfg.sigma(), trial_seed)?;
    let mut detectors = cfg
        .detectors
        .iter()
        .map(|&k| Detector::build(k, cfg))
        .collect::<Result<Vec<_>>>()?;

    let total = cfg.total_symbols();
    let mut true_bits = Vec::with_capacity(total);
    let mut traces: Vec<DetectorTrace> = cfg
        .detectors
        .iter()
        .map(|&detector| DetectorTrace {
            detector,
            decisions: Vec::with_capacity(total),
            errors: Vec::with_capacity(total),
            ranks: Vec::new(),
        })
        .collect();

    for i in 0..total {
        if i == cfg.tr_symbols {
            for d in &mut detectors {
                d.set_mode(Mode::DecisionDirected);
            }
        }
        let sample = stream.next_sample();
        let truth = sample.true_bits[0];
        true_bits.push(truth);
        for (det, trace) in detectors.iter_mut().zip(&mut traces) {
            let (decision, rank) = det.step(&sample.r, truth)?;
            trace.decisions.push(decision);
            trace.errors.push(decision != truth);
            if let Some(d) = rank {
                trace.ranks.push(d);
            }
        }
    }
    Ok(TrialOutcome {
        seed: trial_seed,
        true_bits,
        traces,
    })
}
