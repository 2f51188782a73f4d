#![allow(dead_code)]

use jiomber::{Bit, CMatrix, CVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cnormal(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn cvec(rng: &mut ChaCha8Rng, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| cnormal(rng))
}

pub fn cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| cnormal(rng))
}

pub fn bit(rng: &mut ChaCha8Rng) -> Bit {
    if rng.random::<bool>() {
        Bit::Plus
    } else {
        Bit::Minus
    }
}

/// `erf(z) = 2/√π · e^{−z²} · Σ 2ⁿ z^{2n+1} / (1·3·…·(2n+1))`; every term is positive.
pub fn erf_series(z: f64) -> f64 {
    let sign = z.signum();
    let z = z.abs();
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    while term > 1e-17 * sum {
        n += 1.0;
        term *= 2.0 * z * z / (2.0 * n + 1.0);
        sum += term;
    }
    sign * 2.0 / std::f64::consts::PI.sqrt() * (-z * z).exp() * sum
}

pub fn q_oracle(x: f64) -> f64 {
    0.5 * (1.0 - erf_series(x / std::f64::consts::SQRT_2))
}

/// `Q( b·Re[wᴴSᴴr] / (ρ·‖Sw‖) )`, written out from scratch.
pub fn cost_oracle(s: &CMatrix, w: &CVector, r: &CVector, b: Bit, rho: f64) -> f64 {
    let sw = s * w;
    let n: f64 = sw.iter().map(|z| z.norm_sqr()).sum();
    let x: Complex64 = sw.iter().zip(r.iter()).map(|(a, c)| a.conj() * c).sum();
    q_oracle(b.sign() * x.re / (rho * n.sqrt()))
}

pub fn rel_err(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

/// Unit-norm `w` for `S`: `wᴴSᴴSw = 1`.
pub fn normalise(s: &CMatrix, w: &CVector) -> CVector {
    let n = (s * w).norm();
    w / Complex64::from(n)
}
