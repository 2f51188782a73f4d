//! Transmitter and channel: spreading codes, multipath fading, and the
//! received observation windows of a synchronous BPSK DS-CDMA uplink.

pub mod convolution;
pub mod gold;
pub mod jakes;
pub mod stream;

pub use convolution::{build_convolution_matrix, ConvolutionMatrix};
pub use gold::{generate_gold_family, SpreadingCode};
pub use jakes::{jakes_step, ChannelState};
pub use stream::{synthesize_stream, ReceivedSample, StreamGenerator, StreamShape, UserConfig};

use serde::{Deserialize, Serialize};

/// A BPSK symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Bit {
    Plus,
    Minus,
}

impl Bit {
    pub fn sign(self) -> f64 {
        match self {
            Bit::Plus => 1.0,
            Bit::Minus => -1.0,
        }
    }

    /// Hard decision on a real statistic; zero decides `+1`.
    pub fn decide(x: f64) -> Self {
        if x >= 0.0 {
            Bit::Plus
        } else {
            Bit::Minus
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Bit::Plus => Bit::Minus,
            Bit::Minus => Bit::Plus,
        }
    }
}

impl From<Bit> for i8 {
    fn from(b: Bit) -> i8 {
        b.sign() as i8
    }
}

impl TryFrom<i64> for Bit {
    type Error = crate::Error;

    fn try_from(v: i64) -> crate::Result<Self> {
        match v {
            1 => Ok(Bit::Plus),
            -1 => Ok(Bit::Minus),
            other => Err(crate::Error::Config(format!("bit must be ±1, got {other}"))),
        }
    }
}
