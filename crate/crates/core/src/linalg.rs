//! Complex vector/matrix aliases and the few kernels the adaptive filters share.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CVector = DVector<Complex64>;
pub type CMatrix = DMatrix<Complex64>;

/// `‖v‖²` as a real number.
#[inline]
pub fn norm_sq(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// `aᴴ b`.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

/// `Sᴴ r` without materialising the adjoint.
pub fn adjoint_mul(s: &CMatrix, r: &CVector) -> CVector {
    CVector::from_iterator(
        s.ncols(),
        s.column_iter()
            .map(|col| col.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum()),
    )
}

/// The quadratic form `wᴴ Sᴴ S w = ‖S w‖²`, returned together with `S w`.
pub fn projected_norm_sq(s: &CMatrix, w: &CVector) -> (CVector, f64) {
    let sw = s * w;
    let n = norm_sq(&sw);
    (sw, n)
}
