//! Flat `key = value` experiment configuration.
//!
//! ```text
//! # comments start with '#'
//! K = 5
//! snr_db = 15
//! detectors = jio_mber_fixed, full_rank_lms
//! ```
//!
//! Lists are comma separated. Missing keys take the defaults of
//! [`ExperimentConfig::default`]; unknown keys are rejected.

use std::collections::HashMap;
use std::fmt::{self, Write as _};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::gold::degree_for_length;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorKind {
    JioMberFixed,
    JioMberAuto,
    FullRankLms,
    FullRankMber,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 4] = [
        DetectorKind::JioMberFixed,
        DetectorKind::JioMberAuto,
        DetectorKind::FullRankLms,
        DetectorKind::FullRankMber,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::JioMberFixed => "jio_mber_fixed",
            DetectorKind::JioMberAuto => "jio_mber_auto",
            DetectorKind::FullRankLms => "full_rank_lms",
            DetectorKind::FullRankMber => "full_rank_mber",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        // Accepts `full_rank_lms`, `FullRankLMS`, `JIO_MBER_fixed`, ...
        let key = |t: &str| t.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        DetectorKind::ALL
            .into_iter()
            .find(|d| key(d.name()) == key(s))
            .ok_or_else(|| {
                Error::config(format!(
                    "unknown detector '{s}' (expected one of jio_mber_fixed, jio_mber_auto, full_rank_lms, full_rank_mber)"
                ))
            })
    }
}

/// Parses a comma-separated detector list.
pub fn parse_detector_list(s: &str) -> Result<Vec<DetectorKind>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// Default multipath power profile in dB.
pub const DEFAULT_PROFILE_DB: [f64; 3] = [0.0, -7.0, -10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    /// Spreading gain `N` (a Gold code length: 31 or 127).
    pub spreading_gain: usize,
    /// Active users `K`; user 1 is the one detected.
    pub users: usize,
    /// Propagation paths `Lp`.
    pub paths: usize,
    /// Per-path power in dB. `None` takes the leading `Lp` entries of [`DEFAULT_PROFILE_DB`].
    pub power_profile_db: Option<Vec<f64>>,
    /// Normalised Doppler `f_d·T_s`.
    pub doppler: f64,
    pub snr_db: f64,
    pub snr_sweep: Vec<f64>,
    pub users_sweep: Vec<usize>,
    pub rank_sweep: Vec<usize>,
    /// Leading user amplitudes; users past the end of the list get 1.
    pub amplitudes: Vec<f64>,
    /// Fixed rank `D`.
    pub rank: usize,
    pub d_min: usize,
    pub d_max: usize,
    /// Inner cycles `J`.
    pub cycles: usize,
    pub mu_w: f64,
    pub mu_s: f64,
    pub mu_lms: f64,
    pub mu_mber: f64,
    /// `ρ = rho_multiplier·σ`.
    pub rho_multiplier: f64,
    pub tr_symbols: usize,
    pub dd_symbols: usize,
    pub num_trials: usize,
    pub base_seed: u64,
    pub detectors: Vec<DetectorKind>,
    /// Forgetting factor for averaged rank-selection costs; `None` selects per symbol.
    pub rank_forgetting: Option<f64>,
    /// Trailing symbols over which the final BER is measured.
    pub final_window: usize,
    /// Moving-average length applied to emitted BER traces (0 or 1 = off).
    pub smoothing_window: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            spreading_gain: 31,
            users: 5,
            paths: 3,
            power_profile_db: None,
            doppler: 5e-5,
            snr_db: 15.0,
            snr_sweep: (0..=8).map(|i| i as f64 * 2.5).collect(),
            users_sweep: (1..=16).collect(),
            rank_sweep: (3..=20).collect(),
            amplitudes: Vec::new(),
            rank: 8,
            d_min: 3,
            d_max: 20,
            cycles: 5,
            mu_w: 0.005,
            mu_s: 0.005,
            mu_lms: 0.105,
            mu_mber: 0.05,
            rho_multiplier: 2.0,
            tr_symbols: 250,
            dd_symbols: 1500,
            num_trials: 200,
            base_seed: 1,
            detectors: DetectorKind::ALL.to_vec(),
            rank_forgetting: None,
            final_window: 500,
            smoothing_window: 0,
        }
    }
}

/// Smallest kernel radius used when the noise level is zero.
pub const RHO_FLOOR: f64 = 1e-3;

/// A validation failure tied to the key that caused it.
struct Invalid {
    key: &'static str,
    message: String,
}

fn invalid(key: &'static str, message: impl Into<String>) -> Invalid {
    Invalid {
        key,
        message: message.into(),
    }
}

impl ExperimentConfig {
    /// Observation length `M = N + Lp − 1`.
    pub fn window(&self) -> usize {
        self.spreading_gain + self.paths - 1
    }

    pub fn total_symbols(&self) -> usize {
        self.tr_symbols + self.dd_symbols
    }

    pub fn profile_db(&self) -> Vec<f64> {
        match &self.power_profile_db {
            Some(p) => p.clone(),
            None => DEFAULT_PROFILE_DB.iter().copied().take(self.paths).collect(),
        }
    }

    pub fn amplitude(&self, user: usize) -> f64 {
        self.amplitudes.get(user).copied().unwrap_or(1.0)
    }

    /// Noise deviation from the desired user's SNR: `σ = A₁ / 10^(SNR/20)`.
    pub fn sigma(&self) -> f64 {
        self.amplitude(0) / 10f64.powf(self.snr_db / 20.0)
    }

    /// Kernel radius `ρ = rho_multiplier·σ`, floored at [`RHO_FLOOR`].
    pub fn rho(&self) -> f64 {
        (self.rho_multiplier * self.sigma()).max(RHO_FLOOR)
    }

    fn family_size(&self) -> usize {
        self.spreading_gain + 2
    }

    fn check(&self) -> std::result::Result<(), Invalid> {
        if degree_for_length(self.spreading_gain).is_none() {
            return Err(invalid("N", format!("no Gold family of length {} (use 31 or 127)", self.spreading_gain)));
        }
        let fam = self.family_size();
        if self.users < 1 || self.users > fam {
            return Err(invalid("K", format!("need 1 ≤ K ≤ {fam}, got {}", self.users)));
        }
        if let Some(k) = self.users_sweep.iter().find(|&&k| k < 1 || k > fam) {
            return Err(invalid("users_sweep", format!("need 1 ≤ K ≤ {fam}, got {k}")));
        }
        if self.paths < 1 {
            return Err(invalid("Lp", "need Lp ≥ 1"));
        }
        match &self.power_profile_db {
            Some(p) if p.len() != self.paths => {
                return Err(invalid(
                    "power_profile_db",
                    format!("has {} entries but Lp = {}", p.len(), self.paths),
                ))
            }
            Some(p) if p.iter().any(|x| !x.is_finite()) => {
                return Err(invalid("power_profile_db", "entries must be finite"))
            }
            None if self.paths > DEFAULT_PROFILE_DB.len() => {
                return Err(invalid("Lp", "Lp > 3 needs an explicit power_profile_db"))
            }
            _ => {}
        }
        if !(self.doppler >= 0.0 && self.doppler.is_finite()) {
            return Err(invalid("doppler", "must be finite and ≥ 0"));
        }
        if self.snr_db.is_nan() {
            return Err(invalid("snr_db", "must be a number"));
        }
        if self.snr_sweep.iter().any(|x| x.is_nan()) {
            return Err(invalid("snr_sweep", "entries must be numbers"));
        }
        if let Some(a) = self.amplitudes.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
            return Err(invalid("amplitudes", format!("must be positive, got {a}")));
        }
        let m = self.window();
        if self.rank < 1 || self.rank > m {
            return Err(invalid("D", format!("need 1 ≤ D ≤ M = {m}, got {}", self.rank)));
        }
        if let Some(d) = self.rank_sweep.iter().find(|&&d| d < 1 || d > m) {
            return Err(invalid("rank_sweep", format!("need 1 ≤ D ≤ M = {m}, got {d}")));
        }
        if self.d_min < 1 {
            return Err(invalid("D_min", "need D_min ≥ 1"));
        }
        if self.d_max < self.d_min || self.d_max > m {
            return Err(invalid(
                "D_max",
                format!("need D_min ≤ D_max ≤ M = {m}, got D_min = {}, D_max = {}", self.d_min, self.d_max),
            ));
        }
        if self.cycles < 1 {
            return Err(invalid("J", "need J ≥ 1"));
        }
        for (key, v) in [
            ("mu_w", self.mu_w),
            ("mu_S", self.mu_s),
            ("mu_lms", self.mu_lms),
            ("mu_mber", self.mu_mber),
            ("rho_multiplier", self.rho_multiplier),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(key, format!("must be positive, got {v}")));
            }
        }
        for (key, v) in [
            ("tr_symbols", self.tr_symbols),
            ("dd_symbols", self.dd_symbols),
            ("num_trials", self.num_trials),
            ("final_window", self.final_window),
        ] {
            if v < 1 {
                return Err(invalid(key, "must be positive"));
            }
        }
        if self.final_window > self.total_symbols() {
            return Err(invalid(
                "final_window",
                format!("exceeds the {} simulated symbols", self.total_symbols()),
            ));
        }
        if self.detectors.is_empty() {
            return Err(invalid("detectors", "need at least one detector"));
        }
        for (i, d) in self.detectors.iter().enumerate() {
            if self.detectors[..i].contains(d) {
                return Err(invalid("detectors", format!("{d} listed twice")));
            }
        }
        if let Some(l) = self.rank_forgetting {
            if !(0.0..1.0).contains(&l) {
                return Err(invalid("rank_forgetting", format!("must lie in [0, 1), got {l}")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.check()
            .map_err(|e| Error::Config(format!("{}: {}", e.key, e.message)))
    }

    /// Canonical text form; [`parse_config_str`] reads it back to an equal value.
    pub fn to_config_string(&self) -> String {
        fn list<T: ToString>(v: &[T]) -> String {
            v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
        }
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("N", self.spreading_gain.to_string());
        kv("K", self.users.to_string());
        kv("Lp", self.paths.to_string());
        if let Some(p) = &self.power_profile_db {
            kv("power_profile_db", list(p));
        }
        kv("doppler", self.doppler.to_string());
        kv("snr_db", self.snr_db.to_string());
        kv("snr_sweep", list(&self.snr_sweep));
        kv("users_sweep", list(&self.users_sweep));
        kv("rank_sweep", list(&self.rank_sweep));
        kv("amplitudes", list(&self.amplitudes));
        kv("D", self.rank.to_string());
        kv("D_min", self.d_min.to_string());
        kv("D_max", self.d_max.to_string());
        kv("J", self.cycles.to_string());
        kv("mu_w", self.mu_w.to_string());
        kv("mu_S", self.mu_s.to_string());
        kv("mu_lms", self.mu_lms.to_string());
        kv("mu_mber", self.mu_mber.to_string());
        kv("rho_multiplier", self.rho_multiplier.to_string());
        kv("tr_symbols", self.tr_symbols.to_string());
        kv("dd_symbols", self.dd_symbols.to_string());
        kv("num_trials", self.num_trials.to_string());
        kv("base_seed", self.base_seed.to_string());
        kv("detectors", list(&self.detectors));
        kv(
            "rank_forgetting",
            self.rank_forgetting.map_or_else(|| "none".to_string(), |l| l.to_string()),
        );
        kv("final_window", self.final_window.to_string());
        kv("smoothing_window", self.smoothing_window.to_string());
        s
    }
}

fn scalar<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value.trim().parse::<T>().map_err(|e| format!("cannot parse '{}': {e}", value.trim()))
}

fn list_of<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(scalar)
        .collect()
}

fn apply(cfg: &mut ExperimentConfig, key: &str, value: &str) -> std::result::Result<(), String> {
    match key {
        "N" => cfg.spreading_gain = scalar(value)?,
        "K" => cfg.users = scalar(value)?,
        "Lp" => cfg.paths = scalar(value)?,
        "power_profile_db" => cfg.power_profile_db = Some(list_of(value)?),
        "doppler" => cfg.doppler = scalar(value)?,
        "snr_db" => cfg.snr_db = scalar(value)?,
        "snr_sweep" => cfg.snr_sweep = list_of(value)?,
        "users_sweep" => cfg.users_sweep = list_of(value)?,
        "rank_sweep" => cfg.rank_sweep = list_of(value)?,
        "amplitudes" => cfg.amplitudes = list_of(value)?,
        "D" => cfg.rank = scalar(value)?,
        "D_min" => cfg.d_min = scalar(value)?,
        "D_max" => cfg.d_max = scalar(value)?,
        "J" => cfg.cycles = scalar(value)?,
        "mu_w" => cfg.mu_w = scalar(value)?,
        "mu_S" => cfg.mu_s = scalar(value)?,
        "mu_lms" => cfg.mu_lms = scalar(value)?,
        "mu_mber" => cfg.mu_mber = scalar(value)?,
        "rho_multiplier" => cfg.rho_multiplier = scalar(value)?,
        "tr_symbols" => cfg.tr_symbols = scalar(value)?,
        "dd_symbols" => cfg.dd_symbols = scalar(value)?,
        "num_trials" => cfg.num_trials = scalar(value)?,
        "base_seed" => cfg.base_seed = scalar(value)?,
        "detectors" => cfg.detectors = parse_detector_list(value).map_err(|e| e.to_string())?,
        "rank_forgetting" => {
            let v = value.trim();
            cfg.rank_forgetting = if v.eq_ignore_ascii_case("none") || v.eq_ignore_ascii_case("off") {
                None
            } else {
                Some(scalar(v)?)
            }
        }
        "final_window" => cfg.final_window = scalar(value)?,
        "smoothing_window" => cfg.smoothing_window = scalar(value)?,
        _ => return Err(format!("unknown key '{key}'")),
    }
    Ok(())
}

/// Parses configuration text; `origin` names the source in error messages.
pub fn parse_config_str(text: &str, origin: &Path) -> Result<ExperimentConfig> {
    let parse_err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut cfg = ExperimentConfig::default();
    let mut lines: HashMap<String, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_err(line_no, format!("expected 'key = value', got '{content}'")));
        };
        let key = key.trim();
        if let Some(prev) = lines.insert(key.to_string(), line_no) {
            return Err(parse_err(line_no, format!("duplicate key '{key}' (first set on line {prev})")));
        }
        apply(&mut cfg, key, value).map_err(|m| parse_err(line_no, m))?;
    }
    cfg.check().map_err(|e| {
        let line = lines.get(e.key).copied().unwrap_or(0);
        parse_err(line, format!("{}: {}", e.key, e.message))
    })?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text, path)
}
