//! Multipath Rayleigh fading via a sum-of-sinusoids (Jakes-type) generator.
//!
//! Each tap is
//!
//! ```text
//! h(t) = g / √N₀ · Σₙ [ cos(ωₙ t + φₙ) + j·sin(ωₙ t + ψₙ) ],
//! ωₙ = 2π·f_dT_s·cos αₙ,   αₙ = (2πn − π + θ) / (4N₀),   n = 1..N₀
//! ```
//!
//! with `θ`, `φₙ`, `ψₙ` drawn uniformly per tap from the seed. The arrival
//! angles are distinct, so the time-averaged power of every tap is exactly `g²`
//! and its autocorrelation approaches `J₀(2π f_dT_s τ)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Oscillators per tap.
pub const OSCILLATORS: usize = 16;

#[derive(Debug, Clone)]
struct TapOscillators {
    gain: f64,
    omega: [f64; OSCILLATORS],
    phase_i: [f64; OSCILLATORS],
    phase_q: [f64; OSCILLATORS],
}

impl TapOscillators {
    fn new(gain: f64, normalized_doppler: f64, rng: &mut ChaCha8Rng) -> Self {
        let theta = rng.random_range(-PI..PI);
        let mut omega = [0.0; OSCILLATORS];
        let mut phase_i = [0.0; OSCILLATORS];
        let mut phase_q = [0.0; OSCILLATORS];
        for n in 0..OSCILLATORS {
            let alpha = (2.0 * PI * (n + 1) as f64 - PI + theta) / (4.0 * OSCILLATORS as f64);
            omega[n] = 2.0 * PI * normalized_doppler * alpha.cos();
            phase_i[n] = rng.random_range(-PI..PI);
            phase_q[n] = rng.random_range(-PI..PI);
        }
        Self {
            gain,
            omega,
            phase_i,
            phase_q,
        }
    }

    fn sample(&self, t: f64) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for n in 0..OSCILLATORS {
            let wt = self.omega[n] * t;
            re += (wt + self.phase_i[n]).cos();
            im += (wt + self.phase_q[n]).sin();
        }
        Complex64::new(re, im) * (self.gain / (OSCILLATORS as f64).sqrt())
    }
}

/// Per-user `Lp`-tap fading process.
#[derive(Debug, Clone)]
pub struct ChannelState {
    taps: Vec<Complex64>,
    power_profile_db: Vec<f64>,
    normalized_doppler: f64,
    oscillators: Vec<TapOscillators>,
    time: u64,
    rng_seed: u64,
}

impl ChannelState {
    /// `power_profile_db` is relative; it is shifted so tap 0 sits at 0 dB.
    pub fn new(power_profile_db: &[f64], normalized_doppler: f64, rng_seed: u64) -> Result<Self> {
        if power_profile_db.is_empty() {
            return Err(Error::config("power profile needs at least one tap"));
        }
        if power_profile_db.iter().any(|p| !p.is_finite()) {
            return Err(Error::config("power profile entries must be finite"));
        }
        if !normalized_doppler.is_finite() || normalized_doppler < 0.0 {
            return Err(Error::config(format!(
                "normalized Doppler must be a nonnegative number, got {normalized_doppler}"
            )));
        }
        let reference = power_profile_db[0];
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let oscillators = power_profile_db
            .iter()
            .map(|&p| {
                let gain = 10f64.powf((p - reference) / 20.0);
                TapOscillators::new(gain, normalized_doppler, &mut rng)
            })
            .collect::<Vec<_>>();
        let taps = oscillators.iter().map(|o| o.sample(0.0)).collect();
        Ok(Self {
            taps,
            power_profile_db: power_profile_db.to_vec(),
            normalized_doppler,
            oscillators,
            time: 0,
            rng_seed,
        })
    }

    /// A frozen unit-gain single tap, `h = 1`. Handy for noiseless checks.
    pub fn flat_unit() -> Self {
        // All oscillators at phase zero: I sums to N₀, Q to zero.
        let osc = TapOscillators {
            gain: 1.0 / (OSCILLATORS as f64).sqrt(),
            omega: [0.0; OSCILLATORS],
            phase_i: [0.0; OSCILLATORS],
            phase_q: [0.0; OSCILLATORS],
        };
        Self {
            taps: vec![Complex64::new(1.0, 0.0)],
            power_profile_db: vec![0.0],
            normalized_doppler: 0.0,
            oscillators: vec![osc],
            time: 0,
            rng_seed: 0,
        }
    }

    pub fn paths(&self) -> usize {
        self.oscillators.len()
    }

    /// Taps produced by the most recent [`jakes_step`] (or the initial taps).
    pub fn taps(&self) -> &[Complex64] {
        &self.taps
    }

    pub fn power_profile_db(&self) -> &[f64] {
        &self.power_profile_db
    }

    pub fn normalized_doppler(&self) -> f64 {
        self.normalized_doppler
    }

    pub fn rng_seed(&self) -> u64 {
        self.rng_seed
    }

    /// Symbol index of the next step.
    pub fn time(&self) -> u64 {
        self.time
    }
}

/// Evaluates the fading process at the current symbol and advances by one symbol.
pub fn jakes_step(state: &mut ChannelState) -> &[Complex64] {
    let t = state.time as f64;
    for (tap, osc) in state.taps.iter_mut().zip(&state.oscillators) {
        *tap = osc.sample(t);
    }
    state.time += 1;
    &state.taps
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_doppler_freezes_taps() {
        let mut ch = ChannelState::new(&[0.0, -7.0, -10.0], 0.0, 11).unwrap();
        let first = jakes_step(&mut ch).to_vec();
        for _ in 0..100 {
            assert_eq!(jakes_step(&mut ch), first.as_slice());
        }
    }

    #[test]
    fn flat_unit_channel_is_one() {
        let mut ch = ChannelState::flat_unit();
        for _ in 0..5 {
            let h = jakes_step(&mut ch)[0];
            assert!((h - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn same_seed_same_taps() {
        let mut a = ChannelState::new(&[0.0, -3.0], 1e-3, 99).unwrap();
        let mut b = ChannelState::new(&[0.0, -3.0], 1e-3, 99).unwrap();
        for _ in 0..50 {
            assert_eq!(jakes_step(&mut a), jakes_step(&mut b));
        }
        let mut c = ChannelState::new(&[0.0, -3.0], 1e-3, 100).unwrap();
        assert_ne!(jakes_step(&mut a), jakes_step(&mut c));
    }

    #[test]
    fn profile_is_relative_to_first_tap() {
        let ch = ChannelState::new(&[3.0, -4.0], 0.0, 1).unwrap();
        assert!((ch.oscillators[0].gain - 1.0).abs() < 1e-15);
        assert!((ch.oscillators[1].gain - 10f64.powf(-7.0 / 20.0)).abs() < 1e-15);
    }

    #[test]
    fn bad_parameters_rejected() {
        assert!(ChannelState::new(&[], 0.0, 0).is_err());
        assert!(ChannelState::new(&[0.0], -1e-3, 0).is_err());
        assert!(ChannelState::new(&[f64::NAN], 0.0, 0).is_err());
    }
}
