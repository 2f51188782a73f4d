//! Reduced-rank detection and the smoothed error-probability cost.
//!
//! A projection `S` (`M × D`) compresses the window, `r̄ = Sᴴ r`, and a filter
//! `w` (`D`) produces `x̄ = wᴴ r̄`. With a single-sample Gaussian kernel of
//! radius `ρ` the error probability of the current decision is
//!
//! ```text
//! P_e = Q( sign(b)·Re[x̄] / (ρ·√(wᴴSᴴSw)) )
//! ```
//!
//! Gradients are Wirtinger derivatives with respect to the conjugated
//! parameters (`∂/∂w*`, `∂/∂S*`). For a real cost `f(z)` with `z = a + jb`,
//! `∂f/∂z* = (∂f/∂a + j·∂f/∂b) / 2`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{check_dims, Error, Result};
use crate::linalg::{adjoint_mul, inner, projected_norm_sq, CMatrix, CVector};
use crate::signal::Bit;

/// `M × D` subspace projection, `1 ≤ D ≤ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix(CMatrix);

impl ProjectionMatrix {
    pub fn new(s: CMatrix) -> Result<Self> {
        let (m, d) = s.shape();
        if d < 1 || d > m {
            return Err(Error::config(format!("projection must be M×D with 1 ≤ D ≤ M, got {m}×{d}")));
        }
        if s.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::contract("projection has non-finite entries"));
        }
        Ok(Self(s))
    }

    /// `[I_D; 0]`.
    pub fn identity_block(m: usize, d: usize) -> Result<Self> {
        Self::new(CMatrix::identity(m, d))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_inner(self) -> CMatrix {
        self.0
    }

    /// Observation length `M`.
    pub fn window(&self) -> usize {
        self.0.nrows()
    }

    /// Subspace dimension `D`.
    pub fn rank(&self) -> usize {
        self.0.ncols()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedRankFilter(CVector);

impl ReducedRankFilter {
    pub fn new(w: CVector) -> Self {
        Self(w)
    }

    pub fn zeros(d: usize) -> Self {
        Self(CVector::zeros(d))
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_inner(self) -> CVector {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Filter output `x̄` and its sign-corrected real part `sign(b)·Re[x̄]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionStatistic {
    pub x: Complex64,
    pub signed_real: f64,
}

impl DecisionStatistic {
    pub fn new(x: Complex64, reference: Bit) -> Self {
        Self {
            x,
            signed_real: reference.sign() * x.re,
        }
    }

    /// Re-references the statistic to another bit.
    pub fn against(self, reference: Bit) -> Self {
        Self::new(self.x, reference)
    }
}

/// Kernel radius `ρ > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelConfig {
    rho: f64,
}

impl KernelConfig {
    pub fn new(rho: f64) -> Result<Self> {
        check_positive("kernel radius", rho)?;
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

pub(crate) fn check_positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::contract(format!("{what} must be positive and finite, got {v}")))
    }
}

/// `r̄ = Sᴴ r`.
pub fn project(s: &ProjectionMatrix, r: &CVector) -> Result<CVector> {
    check_dims("received window length", s.window(), r.len())?;
    Ok(adjoint_mul(&s.0, r))
}

/// `x̄ = wᴴ r̄` and the hard decision `sign(Re x̄)` (zero decides `+1`).
///
/// The returned statistic is referenced to the decided bit.
pub fn filter_and_decide(w: &ReducedRankFilter, rbar: &CVector) -> Result<(DecisionStatistic, Bit)> {
    check_dims("projected window length", w.len(), rbar.len())?;
    let x = inner(&w.0, rbar);
    let bit = Bit::decide(x.re);
    Ok((DecisionStatistic::new(x, bit), bit))
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Single-point kernel density of the sign-corrected statistic, centred at
/// `center` with variance `ρ²·norm_sq`.
pub fn kernel_density(x_tilde: f64, center: f64, norm_sq: f64, rho: f64) -> Result<f64> {
    check_positive("filter norm wᴴSᴴSw", norm_sq)?;
    check_positive("kernel radius", rho)?;
    let var = rho * rho * norm_sq;
    let d = x_tilde - center;
    Ok((-d * d / (2.0 * var)).exp() / (2.0 * PI * var).sqrt())
}

/// `Q( sign(b)·Re[x̄] / (ρ·√norm_sq) )`.
pub fn error_probability(stat: &DecisionStatistic, norm_sq: f64, rho: f64) -> Result<f64> {
    check_positive("filter norm wᴴSᴴSw", norm_sq)?;
    check_positive("kernel radius", rho)?;
    Ok(q_function(stat.signed_real / (rho * norm_sq.sqrt())))
}

/// Intermediate quantities shared by both gradients.
struct GradientTerms {
    rbar: CVector,
    sw: CVector,
    norm_sq: f64,
    re_x: f64,
    /// `−exp(−Re[x̄]²/(2ρ²n))·sign(b) / (2√(2π)ρ)`.
    coef: f64,
}

fn gradient_terms(s: &ProjectionMatrix, w: &ReducedRankFilter, r: &CVector, b: Bit, rho: f64) -> Result<GradientTerms> {
    check_dims("filter length", s.rank(), w.len())?;
    check_positive("kernel radius", rho)?;
    let rbar = project(s, r)?;
    let (sw, norm_sq) = projected_norm_sq(&s.0, &w.0);
    if !(norm_sq > 0.0) {
        return Err(Error::contract("wᴴSᴴSw is zero; scale the filter before taking gradients"));
    }
    let re_x = inner(&w.0, &rbar).re;
    let coef = -(-re_x * re_x / (2.0 * rho * rho * norm_sq)).exp() * b.sign() / (2.0 * (2.0 * PI).sqrt() * rho);
    Ok(GradientTerms {
        rbar,
        sw,
        norm_sq,
        re_x,
        coef,
    })
}

/// `∂P_e/∂w*`.
pub fn gradient_w(s: &ProjectionMatrix, w: &ReducedRankFilter, r: &CVector, b: Bit, rho: f64) -> Result<CVector> {
    let t = gradient_terms(s, w, r, b, rho)?;
    let root = t.norm_sq.sqrt();
    let gram_w = s.0.ad_mul(&t.sw);
    Ok((t.rbar / Complex64::from(root) - gram_w * Complex64::from(t.re_x / (t.norm_sq * root)))
        * Complex64::from(t.coef))
}

/// `∂P_e/∂S*`, an `M × D` matrix.
pub fn gradient_s(s: &ProjectionMatrix, w: &ReducedRankFilter, r: &CVector, b: Bit, rho: f64) -> Result<CMatrix> {
    let t = gradient_terms(s, w, r, b, rho)?;
    let root = t.norm_sq.sqrt();
    let wh = w.0.adjoint();
    let first = r * &wh * Complex64::from(1.0 / root);
    let second = &t.sw * &wh * Complex64::from(t.re_x / (t.norm_sq * root));
    Ok((first - second) * Complex64::from(t.coef))
}
