//! Full-rank reference detectors: LMS (mean-square error) and the
//! stochastic-gradient minimum-BER filter.

use num_complex::Complex64;

use crate::detector::check_positive;
use crate::error::{check_dims, Error, Result};
use crate::jio::{cycle_gain, mber_filter_step, scale_to_unit, Mode};
use crate::linalg::{inner, norm_sq, CVector};
use crate::signal::Bit;

#[derive(Debug, Clone, PartialEq)]
pub struct FullRankState {
    pub w: CVector,
    pub mu: f64,
    /// Kernel radius; only the MBER update uses it.
    pub rho: f64,
    pub mode: Mode,
}

impl FullRankState {
    /// Zero filter of length `m`, training mode.
    pub fn new(m: usize, mu: f64, rho: f64) -> Result<Self> {
        if m == 0 {
            return Err(Error::config("filter length must be positive"));
        }
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::config(format!("step size must be nonnegative, got {mu}")));
        }
        check_positive("kernel radius", rho).map_err(|e| Error::Config(e.to_string()))?;
        Ok(Self {
            w: CVector::zeros(m),
            mu,
            rho,
            mode: Mode::Training,
        })
    }

    pub fn output(&self, r: &CVector) -> Result<Complex64> {
        check_dims("received window length", self.w.len(), r.len())?;
        Ok(inner(&self.w, r))
    }

    /// Unscaled minimum-BER step, `w + μ·g·(r − Re[x̄]·w)`.
    pub fn mber_direction(&self, r: &CVector, b: Bit) -> Result<CVector> {
        check_dims("received window length", self.w.len(), r.len())?;
        let re_x = inner(&self.w, r).re;
        let gain = cycle_gain(re_x, self.rho, b);
        Ok(mber_filter_step(&self.w, r, &self.w, re_x, gain, self.mu))
    }
}

/// `e = b − wᴴr`, `w ← w + μ·e*·r`.
pub fn lms_update(state: &mut FullRankState, r: &CVector, b: Bit) -> Result<()> {
    let e = Complex64::from(b.sign()) - state.output(r)?;
    let step = e.conj() * state.mu;
    state.w.axpy(step, r, Complex64::new(1.0, 0.0));
    Ok(())
}

/// Minimum-BER gradient step followed by rescaling to `‖w‖ = 1`.
///
/// Returns `false` if the filter was too small to rescale.
pub fn mber_full_rank_update(state: &mut FullRankState, r: &CVector, b: Bit) -> Result<bool> {
    let mut w = state.mber_direction(r, b)?;
    let n = norm_sq(&w);
    let scaled = scale_to_unit(&mut w, n);
    state.w = w;
    Ok(scaled)
}
