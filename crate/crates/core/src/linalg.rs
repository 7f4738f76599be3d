//! Small dense-matrix helpers shared across the crate.
//!
//! Density matrices are stored as `faer::Mat<Complex64>`; superoperators act
//! on row-stacked vectorizations with `index(i, j) = i * dim + j`.

use faer::{Col, ColRef, Mat, MatRef};

pub use num_complex::Complex64 as C64;

/// Promote a real matrix to a complex one.
pub fn to_complex(m: MatRef<'_, f64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| C64::new(m[(i, j)], 0.0))
}

/// Entrywise complex conjugate as an owned matrix.
pub fn conj_mat(m: MatRef<'_, C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].conj())
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> Mat<C64> {
    let mut dst = Mat::zeros(a.nrows() * b.nrows(), a.ncols() * b.ncols());
    faer::linalg::kron::kron(dst.as_mut(), a, b);
    dst
}

/// Row-stacking vectorization: `out[i*d + j] = m[(i, j)]`.
pub fn vectorize(m: MatRef<'_, C64>) -> Col<C64> {
    let d = m.nrows();
    Col::from_fn(d * d, |k| m[(k / d, k % d)])
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: ColRef<'_, C64>, d: usize) -> Mat<C64> {
    Mat::from_fn(d, d, |i, j| v[i * d + j])
}

/// Hermitian part `(m + m†)/2`.
pub fn hermitize(m: MatRef<'_, C64>) -> Mat<C64> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        0.5 * (m[(i, j)] + m[(j, i)].conj())
    })
}

/// Largest entrywise absolute difference between two matrices.
pub fn max_abs_diff(a: MatRef<'_, C64>, b: MatRef<'_, C64>) -> f64 {
    assert_eq!(a.nrows(), b.nrows());
    assert_eq!(a.ncols(), b.ncols());
    let mut worst = 0.0_f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

/// Trace of a complex matrix.
pub fn trace(m: MatRef<'_, C64>) -> C64 {
    (0..m.nrows().min(m.ncols())).map(|i| m[(i, i)]).sum()
}
