//! Numeric kernels shared by every estimator: sample covariance, Hermitian
//! eigendecomposition, complex least squares, and polynomial rooting.
//!
//! All kernels are pure and allocation-local; matrices are dense
//! `ndarray::Array2<Complex64>`.

mod covariance;
mod eigen;
mod least_squares;
mod polynomial;

pub use covariance::{sample_covariance, CovarianceMatrix};
pub use eigen::{hermitian_eigendecomposition, HermitianEigen};
pub use least_squares::least_squares_solve;
pub use polynomial::{find_roots, ComplexPolynomial, RootSet};

use ndarray::Array2;
use num_complex::Complex64;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

/// A matrix is treated as numerically rank deficient when its smallest
/// retained pivot falls below `SINGULARITY_REL_TOL` times the largest,
/// i.e. the condition number exceeds `1 / SINGULARITY_REL_TOL`.
pub const SINGULARITY_REL_TOL: f64 = 100.0 * f64::EPSILON;

/// Coefficients at or below this fraction of the largest coefficient
/// magnitude are stripped before rooting.
pub const COEFFICIENT_STRIP_REL_TOL: f64 = 1e-14;

/// Relative tolerance for conjugate-reciprocal root pairing.
pub const ROOT_PAIRING_REL_TOL: f64 = 1e-6;

/// Conjugate transpose.
pub fn adjoint(a: &Array2<Complex64>) -> Array2<Complex64> {
    let mut out = Array2::zeros((a.ncols(), a.nrows()));
    for ((i, j), v) in a.indexed_iter() {
        out[[j, i]] = v.conj();
    }
    out
}

/// Frobenius norm.
pub fn frobenius_norm(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest absolute deviation of `a` from its own conjugate transpose,
/// relative to the Frobenius norm (0 for the zero matrix).
pub fn hermitian_asymmetry(a: &Array2<Complex64>) -> f64 {
    let norm = frobenius_norm(a);
    if norm == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0f64;
    for i in 0..a.nrows() {
        for j in i..a.ncols() {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            if d > worst {
                worst = d;
            }
        }
    }
    worst / norm
}
