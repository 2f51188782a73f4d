//! Reduced-rank minimum-BER multiuser detection for synchronous DS-CDMA.
//!
//! - [`signal`]: Gold codes, multipath Jakes fading and received windows.
//! - [`detector`]: projection, decision, smoothed error probability and its gradients.
//! - [`jio`]: joint adaptation of projection and filter, with rank selection.
//! - [`baselines`]: full-rank LMS and full-rank minimum-BER detectors.
//! - [`complexity`]: per-symbol operation counts.
//! - [`harness`]: seeded Monte Carlo experiments and sweeps.

pub mod baselines;
pub mod complexity;
pub mod detector;
pub mod error;
pub mod harness;
pub mod jio;
pub mod linalg;
pub mod signal;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector};
pub use signal::Bit;
