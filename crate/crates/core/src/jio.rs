//! Joint iterative minimum-BER adaptation of a projection matrix and a
//! reduced-rank filter.
//!
//! Each received window runs `J` cycles. A cycle computes the new filter and
//! the new projection from the same current pair,
//!
//! ```text
//! g  = exp(−Re[x̄]²/(2ρ²))·sign(b) / (2√(2π)ρ)
//! w ← w + μ_w·g·(Sᴴr − Re[x̄]·SᴴSw)
//! S ← S + μ_S·g·(r wᴴ − Sw wᴴ·Re[x̄])
//! ```
//!
//! and then rescales `w` so that `wᴴSᴴSw = 1`. The updates assume that unit
//! norm, which is why the denominators of the full gradients disappear.
//!
//! With rank selection enabled, adaptation always runs at `D_max`; each window
//! also evaluates every leading-column truncation `D ∈ [D_min, D_max]` and
//! detects with the one of smallest estimated error probability.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::detector::{check_positive, q_function, DecisionStatistic, ProjectionMatrix, ReducedRankFilter};
use crate::error::{check_dims, Error, Result};
use crate::linalg::{adjoint_mul, inner, norm_sq, CMatrix, CVector};
use crate::signal::Bit;

/// Norms below this are treated as zero; scaling is skipped.
pub const NORM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Mode {
    Training,
    DecisionDirected,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JioParams {
    pub mu_w: f64,
    pub mu_s: f64,
    /// Inner cycles `J` per window.
    pub cycles: usize,
    pub rho: f64,
}

impl JioParams {
    fn validate(&self) -> Result<()> {
        if !(self.mu_w >= 0.0 && self.mu_w.is_finite() && self.mu_s >= 0.0 && self.mu_s.is_finite()) {
            return Err(Error::config("step sizes must be finite and nonnegative"));
        }
        if self.cycles < 1 {
            return Err(Error::config("need at least one inner cycle (J ≥ 1)"));
        }
        check_positive("kernel radius", self.rho).map_err(|e| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSelectionConfig {
    pub d_min: usize,
    pub d_max: usize,
    pub enabled: bool,
    /// Forgetting factor for exponentially averaged candidate costs.
    /// `None` selects on the instantaneous cost of each window.
    pub averaging: Option<f64>,
}

impl RankSelectionConfig {
    pub fn new(d_min: usize, d_max: usize) -> Self {
        Self {
            d_min,
            d_max,
            enabled: true,
            averaging: None,
        }
    }

    pub fn validate(&self, m: usize) -> Result<()> {
        if !(1 <= self.d_min && self.d_min <= self.d_max && self.d_max <= m) {
            return Err(Error::config(format!(
                "rank range needs 1 ≤ D_min ≤ D_max ≤ M, got D_min = {}, D_max = {}, M = {m}",
                self.d_min, self.d_max
            )));
        }
        if let Some(l) = self.averaging {
            if !(0.0..1.0).contains(&l) {
                return Err(Error::config(format!("forgetting factor must lie in [0, 1), got {l}")));
            }
        }
        Ok(())
    }

    fn range(&self) -> std::ops::RangeInclusive<usize> {
        self.d_min..=self.d_max
    }
}

/// What one call to [`JioState::step`] did.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    /// Detected symbol, from the state before adaptation.
    pub decision: Bit,
    /// Rank used for detection.
    pub rank: usize,
    /// Bit that drove the update (training symbol or own decision).
    pub reference: Bit,
}

#[derive(Debug, Clone)]
pub struct JioState {
    s: CMatrix,
    w: CVector,
    params: JioParams,
    mode: Mode,
    active_rank: usize,
    rank_selection: Option<RankSelectionConfig>,
    averaged_costs: Option<Vec<f64>>,
    unscaled: bool,
}

/// `S = [I_D; 0]`, `w = 0`, training mode.
pub fn init_state(m: usize, d: usize, mu_w: f64, mu_s: f64, cycles: usize, rho: f64) -> Result<JioState> {
    JioState::new(m, d, JioParams { mu_w, mu_s, cycles, rho })
}

/// Shared terms of one cycle at the current `(S, w)`.
struct CycleTerms {
    rbar: CVector,
    sw: CVector,
    re_x: f64,
    gain: f64,
}

pub(crate) fn cycle_gain(re_x: f64, rho: f64, b: Bit) -> f64 {
    (-re_x * re_x / (2.0 * rho * rho)).exp() * b.sign() / (2.0 * (2.0 * PI).sqrt() * rho)
}

/// `w + μ·g·(r̄ − Re[x̄]·gram_w)`; shared with the full-rank MBER baseline so the
/// two agree bit-for-bit when `S = I`.
pub(crate) fn mber_filter_step(w: &CVector, rbar: &CVector, gram_w: &CVector, re_x: f64, gain: f64, mu: f64) -> CVector {
    let step = Complex64::from(mu * gain);
    let shrink = Complex64::from(re_x);
    CVector::from_iterator(
        w.len(),
        w.iter()
            .zip(rbar.iter())
            .zip(gram_w.iter())
            .map(|((wi, ri), gi)| wi + step * (ri - shrink * gi)),
    )
}

/// Rescales `w` in place to `norm_sq = 1`; returns `false` if the norm is too small.
pub(crate) fn scale_to_unit(w: &mut CVector, norm_sq: f64) -> bool {
    if !(norm_sq >= NORM_EPS) || !norm_sq.is_finite() {
        return false;
    }
    let inv = Complex64::from(1.0 / norm_sq.sqrt());
    for z in w.iter_mut() {
        *z *= inv;
    }
    true
}

impl JioState {
    pub fn new(m: usize, d: usize, params: JioParams) -> Result<Self> {
        if d < 1 || d > m {
            return Err(Error::config(format!("rank must satisfy 1 ≤ D ≤ M, got D = {d}, M = {m}")));
        }
        params.validate()?;
        Ok(Self {
            s: CMatrix::identity(m, d),
            w: CVector::zeros(d),
            params,
            mode: Mode::Training,
            active_rank: d,
            rank_selection: None,
            averaged_costs: None,
            unscaled: true,
        })
    }

    /// Enables rank selection; the state must have been built at `D_max`.
    pub fn with_rank_selection(mut self, cfg: RankSelectionConfig) -> Result<Self> {
        cfg.validate(self.window())?;
        if cfg.d_max != self.rank() {
            return Err(Error::config(format!(
                "rank selection adapts at D_max = {} but the state has D = {}",
                cfg.d_max,
                self.rank()
            )));
        }
        self.rank_selection = cfg.enabled.then_some(cfg);
        Ok(self)
    }

    pub fn projection(&self) -> ProjectionMatrix {
        ProjectionMatrix::new(self.s.clone()).expect("state keeps a valid projection")
    }

    pub fn filter(&self) -> ReducedRankFilter {
        ReducedRankFilter::new(self.w.clone())
    }

    pub fn s(&self) -> &CMatrix {
        &self.s
    }

    pub fn w(&self) -> &CVector {
        &self.w
    }

    /// Replaces the adapted pair, e.g. to start from a custom initialisation.
    pub fn set_pair(&mut self, s: CMatrix, w: CVector) -> Result<()> {
        check_dims("projection rows", self.window(), s.nrows())?;
        check_dims("projection columns", self.rank(), s.ncols())?;
        check_dims("filter length", self.rank(), w.len())?;
        self.s = s;
        self.w = w;
        self.unscaled = self.norm_sq() < NORM_EPS;
        Ok(())
    }

    pub fn params(&self) -> &JioParams {
        &self.params
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: Mode) {
        self.mode = mode;
    }

    /// Rank used for the most recent detection.
    pub fn active_rank(&self) -> usize {
        self.active_rank
    }

    pub fn rank_selection(&self) -> Option<&RankSelectionConfig> {
        self.rank_selection.as_ref()
    }

    pub fn window(&self) -> usize {
        self.s.nrows()
    }

    /// Adapted rank (`D`, or `D_max` with rank selection).
    pub fn rank(&self) -> usize {
        self.s.ncols()
    }

    /// `wᴴSᴴSw`.
    pub fn norm_sq(&self) -> f64 {
        norm_sq(&(&self.s * &self.w))
    }

    /// True while the filter is still too small to be normalised (only before
    /// the first gradient step from the all-zero start).
    pub fn is_unscaled(&self) -> bool {
        self.unscaled
    }

    fn terms(&self, r: &CVector, b: Bit) -> CycleTerms {
        let rbar = adjoint_mul(&self.s, r);
        let sw = &self.s * &self.w;
        let re_x = inner(&self.w, &rbar).re;
        CycleTerms {
            gain: cycle_gain(re_x, self.params.rho, b),
            rbar,
            sw,
            re_x,
        }
    }

    fn filter_from(&self, t: &CycleTerms) -> CVector {
        let gram_w = adjoint_mul(&self.s, &t.sw);
        mber_filter_step(&self.w, &t.rbar, &gram_w, t.re_x, t.gain, self.params.mu_w)
    }

    fn projection_from(&self, r: &CVector, t: &CycleTerms) -> CMatrix {
        let step = Complex64::from(self.params.mu_s * t.gain);
        let re_x = Complex64::from(t.re_x);
        let mut s = self.s.clone();
        for (j, wj) in self.w.iter().enumerate() {
            let wj = wj.conj();
            if wj == Complex64::new(0.0, 0.0) {
                continue;
            }
            let mut col = s.column_mut(j);
            for (m, z) in col.iter_mut().enumerate() {
                *z += step * (r[m] * wj - t.sw[m] * wj * re_x);
            }
        }
        s
    }

    /// New filter from one gradient step at the current pair (not rescaled).
    pub fn update_filter(&self, r: &CVector, b: Bit) -> Result<ReducedRankFilter> {
        check_dims("received window length", self.window(), r.len())?;
        let t = self.terms(r, b);
        Ok(ReducedRankFilter::new(self.filter_from(&t)))
    }

    /// New projection from one gradient step at the current pair.
    pub fn update_projection(&self, r: &CVector, b: Bit) -> Result<ProjectionMatrix> {
        check_dims("received window length", self.window(), r.len())?;
        let t = self.terms(r, b);
        ProjectionMatrix::new(self.projection_from(r, &t))
    }

    /// One inner cycle: both updates from the current pair, then rescaling.
    fn cycle(&mut self, r: &CVector, b: Bit) {
        let t = self.terms(r, b);
        let w = self.filter_from(&t);
        let s = self.projection_from(r, &t);
        self.w = w;
        self.s = s;
        scale_filter(self);
    }

    /// Pre-update output `x̄ = wᴴSᴴr` at the full adapted rank.
    pub fn output(&self, r: &CVector) -> Result<Complex64> {
        check_dims("received window length", self.window(), r.len())?;
        Ok(inner(&self.w, &adjoint_mul(&self.s, r)))
    }

    /// Detects the current window and adapts on it.
    ///
    /// In training mode `known` must carry the transmitted bit; in
    /// decision-directed mode it is ignored and the full-rank decision drives
    /// the update.
    pub fn step(&mut self, r: &CVector, known: Option<Bit>) -> Result<StepOutcome> {
        let x = self.output(r)?;
        let own = Bit::decide(x.re);
        let reference = match self.mode {
            Mode::Training => known.ok_or_else(|| Error::contract("training mode needs the transmitted bit"))?,
            Mode::DecisionDirected => own,
        };

        let decision = match self.rank_selection {
            Some(cfg) => {
                let (costs, outputs) = self.candidate_costs(&cfg, r, reference);
                let costs = match (cfg.averaging, self.averaged_costs.as_mut()) {
                    (Some(lambda), Some(avg)) => {
                        for (a, c) in avg.iter_mut().zip(&costs) {
                            *a = lambda * *a + (1.0 - lambda) * c;
                        }
                        avg.clone()
                    }
                    (Some(_), None) => {
                        self.averaged_costs = Some(costs.clone());
                        costs
                    }
                    (None, _) => costs,
                };
                let best = argmin_first(&costs);
                self.active_rank = cfg.d_min + best;
                // Rescaling is by a positive factor, so the truncated output's sign decides.
                Bit::decide(outputs[best].re)
            }
            None => own,
        };

        for _ in 0..self.params.cycles {
            self.cycle(r, reference);
        }
        Ok(StepOutcome {
            decision,
            rank: self.active_rank,
            reference,
        })
    }

    /// Instantaneous candidate costs and unscaled outputs `x̄_D` for every `D`
    /// in the configured range, accumulated column by column.
    fn candidate_costs(&self, cfg: &RankSelectionConfig, r: &CVector, b: Bit) -> (Vec<f64>, Vec<Complex64>) {
        let y = adjoint_mul(&self.s, r);
        let m = self.window();
        let mut x = Complex64::new(0.0, 0.0);
        let mut v = CVector::zeros(m);
        let mut costs = Vec::with_capacity(cfg.d_max - cfg.d_min + 1);
        let mut outputs = Vec::with_capacity(cfg.d_max - cfg.d_min + 1);
        for d in 1..=cfg.d_max {
            let wd = self.w[d - 1];
            x += wd.conj() * y[d - 1];
            v.axpy(wd, &self.s.column(d - 1), Complex64::new(1.0, 0.0));
            if d >= cfg.d_min {
                costs.push(truncated_cost(x, norm_sq(&v), self.params.rho, b));
                outputs.push(x);
            }
        }
        (costs, outputs)
    }
}

fn truncated_cost(x: Complex64, norm_sq: f64, rho: f64, b: Bit) -> f64 {
    if !(norm_sq >= NORM_EPS) {
        return 0.5;
    }
    q_function(b.sign() * x.re / (norm_sq.sqrt() * rho))
}

fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

/// Normalises `w` so that `wᴴSᴴSw = 1`. Returns `false` and flags the state
/// when the norm is below [`NORM_EPS`].
pub fn scale_filter(state: &mut JioState) -> bool {
    let n = state.norm_sq();
    let scaled = scale_to_unit(&mut state.w, n);
    state.unscaled = !scaled;
    scaled
}

/// Executes one window; see [`JioState::step`].
pub fn jio_step(state: &mut JioState, r: &CVector, known: Option<Bit>) -> Result<StepOutcome> {
    state.step(r, known)
}

/// Leading `d` columns of `S` and entries of `w`, rescaled to unit norm.
/// Returns `None` when the truncated norm is below [`NORM_EPS`].
pub fn truncate_pair(state: &JioState, d: usize) -> Result<Option<(ProjectionMatrix, ReducedRankFilter)>> {
    if d < 1 || d > state.rank() {
        return Err(Error::contract(format!("truncation rank {d} outside 1..={}", state.rank())));
    }
    let s = state.s.columns(0, d).into_owned();
    let mut w = state.w.rows(0, d).into_owned();
    let n = norm_sq(&(&s * &w));
    if !scale_to_unit(&mut w, n) {
        return Ok(None);
    }
    Ok(Some((ProjectionMatrix::new(s)?, ReducedRankFilter::new(w))))
}

/// Estimated error probability of the rank-`d` truncation:
/// `Q(sign(b)·Re[x̄_d]/ρ)` with the truncated pair rescaled to unit norm.
/// Uninformative (`0.5`) when the truncated filter vanishes.
pub fn candidate_error(state: &JioState, d: usize, r: &CVector, b: Bit, rho: f64) -> Result<f64> {
    check_dims("received window length", state.window(), r.len())?;
    check_positive("kernel radius", rho)?;
    let Some((s, w)) = truncate_pair(state, d)? else {
        return Ok(0.5);
    };
    let x = inner(w.vector(), &adjoint_mul(s.matrix(), r));
    let stat = DecisionStatistic::new(x, b);
    Ok(q_function(stat.signed_real / rho))
}

/// `argmin_D` of the instantaneous candidate error over `[d_min, d_max]`;
/// ties go to the smallest `D`.
pub fn select_rank(state: &JioState, cfg: &RankSelectionConfig, r: &CVector, b: Bit) -> Result<usize> {
    cfg.validate(state.window())?;
    if cfg.d_max > state.rank() {
        return Err(Error::config(format!(
            "D_max = {} exceeds the adapted rank {}",
            cfg.d_max,
            state.rank()
        )));
    }
    check_dims("received window length", state.window(), r.len())?;
    let (costs, _) = state.candidate_costs(cfg, r, b);
    Ok(cfg.range().start() + argmin_first(&costs))
}
