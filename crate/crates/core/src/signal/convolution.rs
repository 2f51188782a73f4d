use nalgebra::DMatrix;

use super::gold::SpreadingCode;
use crate::error::{Error, Result};

/// `M × Lp` matrix whose column `ℓ` is the spreading code delayed by `ℓ` chips,
/// with `M = N + Lp − 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionMatrix {
    entries: DMatrix<f64>,
}

impl ConvolutionMatrix {
    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Observation length `M`.
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    /// Number of paths `Lp`.
    pub fn paths(&self) -> usize {
        self.entries.ncols()
    }
}

pub fn build_convolution_matrix(code: &SpreadingCode, paths: usize) -> Result<ConvolutionMatrix> {
    if paths < 1 {
        return Err(Error::config("number of propagation paths must be at least 1"));
    }
    if code.is_empty() {
        return Err(Error::config("spreading code is empty"));
    }
    let n = code.len();
    let m = n + paths - 1;
    let chips = code.chips();
    let mut entries = DMatrix::zeros(m, paths);
    for l in 0..paths {
        entries.view_mut((l, l), (n, 1)).copy_from_slice(chips);
    }
    Ok(ConvolutionMatrix { entries })
}
