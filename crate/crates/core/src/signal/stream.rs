//! Chip-level synthesis of the received observation windows.
//!
//! Every symbol's effective signature `A·b(i)·C·h(i)` spans `M = N + Lp − 1`
//! chips, so consecutive symbols overlap by `Lp − 1` chips. Window `i` covers
//! chips `[iN, iN + M)` and therefore picks up the tail of symbol `i − 1` and
//! the head of symbol `i + 1`: that overlap is the inter-symbol interference.
//! A warm-up symbol `−1` is generated so that every window sees both sides.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::convolution::{build_convolution_matrix, ConvolutionMatrix};
use super::gold::SpreadingCode;
use super::jakes::{jakes_step, ChannelState};
use super::Bit;
use crate::error::{check_dims, Error, Result};
use crate::linalg::CVector;

#[derive(Debug, Clone)]
pub struct UserConfig {
    pub amplitude: f64,
    pub code: SpreadingCode,
    pub channel: ChannelState,
}

impl UserConfig {
    pub fn new(amplitude: f64, code: SpreadingCode, channel: ChannelState) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::config(format!("user amplitude must be positive, got {amplitude}")));
        }
        Ok(Self {
            amplitude,
            code,
            channel,
        })
    }
}

/// Spreading gain and path count shared by every user of a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamShape {
    pub spreading_gain: usize,
    pub paths: usize,
}

impl StreamShape {
    /// Observation length `M = N + Lp − 1`.
    pub fn window(&self) -> usize {
        self.spreading_gain + self.paths - 1
    }
}

/// One observation window with its ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedSample {
    pub r: CVector,
    /// `b_k(i)` for every user, in the order the users were supplied.
    pub true_bits: Vec<Bit>,
    pub symbol_index: usize,
}

struct UserStream {
    amplitude: f64,
    conv: ConvolutionMatrix,
    channel: ChannelState,
    bits: ChaCha8Rng,
}

impl UserStream {
    /// Draws the next bit, advances the channel, and returns `(b, A·b·C·h)`.
    fn next_symbol(&mut self) -> (Bit, CVector) {
        let bit = if self.bits.random::<bool>() { Bit::Plus } else { Bit::Minus };
        let taps = jakes_step(&mut self.channel);
        let c = self.conv.entries();
        let scale = self.amplitude * bit.sign();
        let sig = CVector::from_fn(c.nrows(), |m, _| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (l, h) in taps.iter().enumerate() {
                acc += h * c[(m, l)];
            }
            acc * scale
        });
        (bit, sig)
    }
}

struct Symbol {
    bits: Vec<Bit>,
    signal: CVector,
}

/// Lazily produces [`ReceivedSample`]s. Deterministic for a given seed.
pub struct StreamGenerator {
    shape: StreamShape,
    users: Vec<UserStream>,
    sigma: f64,
    noise: ChaCha8Rng,
    prev: Symbol,
    cur: Symbol,
    next: Symbol,
    index: usize,
}

impl StreamGenerator {
    pub fn new(shape: StreamShape, users: &[UserConfig], sigma: f64, seed: u64) -> Result<Self> {
        if shape.spreading_gain == 0 || shape.paths == 0 {
            return Err(Error::config("stream shape needs N ≥ 1 and Lp ≥ 1"));
        }
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::config(format!("noise deviation must be ≥ 0, got {sigma}")));
        }
        let mut streams = Vec::with_capacity(users.len());
        for (k, u) in users.iter().enumerate() {
            if u.code.len() != shape.spreading_gain || u.channel.paths() != shape.paths {
                return Err(Error::config(format!(
                    "user {k} has N = {}, Lp = {} but the stream expects N = {}, Lp = {}",
                    u.code.len(),
                    u.channel.paths(),
                    shape.spreading_gain,
                    shape.paths
                )));
            }
            let mut bits = ChaCha8Rng::seed_from_u64(seed);
            bits.set_stream(u.code.user_id as u64 + 1);
            streams.push(UserStream {
                amplitude: u.amplitude,
                conv: build_convolution_matrix(&u.code, shape.paths)?,
                channel: u.channel.clone(),
                bits,
            });
        }
        let mut noise = ChaCha8Rng::seed_from_u64(seed);
        noise.set_stream(0);

        let m = shape.window();
        let empty = || Symbol {
            bits: Vec::new(),
            signal: CVector::zeros(m),
        };
        let mut gen = Self {
            shape,
            users: streams,
            sigma,
            noise,
            prev: empty(),
            cur: empty(),
            next: empty(),
            index: 0,
        };
        // Symbols −1 and 0; symbol 1 is drawn on the first call to `next`.
        gen.cur = gen.draw_symbol();
        gen.next = gen.draw_symbol();
        Ok(gen)
    }

    pub fn shape(&self) -> StreamShape {
        self.shape
    }

    fn draw_symbol(&mut self) -> Symbol {
        let m = self.shape.window();
        let mut signal = CVector::zeros(m);
        let mut bits = Vec::with_capacity(self.users.len());
        for u in &mut self.users {
            let (b, s) = u.next_symbol();
            bits.push(b);
            signal += s;
        }
        Symbol { bits, signal }
    }

    /// Produces window `i`.
    pub fn next_sample(&mut self) -> ReceivedSample {
        let upcoming = self.draw_symbol();
        self.prev = std::mem::replace(&mut self.cur, std::mem::replace(&mut self.next, upcoming));

        let n = self.shape.spreading_gain;
        let m = self.shape.window();
        let noise_sd = self.sigma / std::f64::consts::SQRT_2;
        let mut r = self.cur.signal.clone();
        for idx in 0..m {
            if idx + n < m {
                r[idx] += self.prev.signal[idx + n];
            }
            if idx >= n {
                r[idx] += self.next.signal[idx - n];
            }
        }
        if self.sigma > 0.0 {
            for z in r.iter_mut() {
                let re: f64 = StandardNormal.sample(&mut self.noise);
                let im: f64 = StandardNormal.sample(&mut self.noise);
                *z += Complex64::new(re, im) * noise_sd;
            }
        }
        let sample = ReceivedSample {
            r,
            true_bits: self.cur.bits.clone(),
            symbol_index: self.index,
        };
        self.index += 1;
        sample
    }
}

impl Iterator for StreamGenerator {
    type Item = ReceivedSample;

    fn next(&mut self) -> Option<ReceivedSample> {
        Some(self.next_sample())
    }
}

/// Generates `num_symbols` windows.
pub fn synthesize_stream(
    shape: StreamShape,
    users: &[UserConfig],
    num_symbols: usize,
    sigma: f64,
    seed: u64,
) -> Result<Vec<ReceivedSample>> {
    let gen = StreamGenerator::new(shape, users, sigma, seed)?;
    Ok(gen.take(num_symbols).collect())
}

/// Checks that a sample has the window length the detector expects.
pub fn check_window(sample: &ReceivedSample, m: usize) -> Result<()> {
    check_dims("received window length", m, sample.r.len())
}
