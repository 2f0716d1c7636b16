//! Sample cross-spectral (covariance) matrix.

use ndarray::Array2;
use num_complex::Complex64;

use super::{adjoint, hermitian_asymmetry, HERMITIAN_REL_TOL};
use crate::array_model::SnapshotMatrix;
use crate::error::{DoaError, Result};

/// `M x M` Hermitian positive-semidefinite cross-spectral matrix.
///
/// Construction symmetrizes the input as `(R + R^H) / 2`, so the stored
/// matrix is Hermitian to machine precision.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    data: Array2<Complex64>,
}

impl CovarianceMatrix {
    /// Wrap a square matrix, enforcing Hermitian symmetry.
    ///
    /// Inputs with relative asymmetry above `1e-6` are rejected rather than
    /// silently symmetrized away.
    pub fn from_matrix(data: Array2<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() || data.nrows() == 0 {
            return Err(DoaError::DimensionMismatch(format!(
                "covariance matrix must be square and nonempty, got {}x{}",
                data.nrows(),
                data.ncols()
            )));
        }
        let asymmetry = hermitian_asymmetry(&data);
        if asymmetry > 1e-6 {
            return Err(DoaError::NotHermitian { asymmetry });
        }
        Ok(Self {
            data: symmetrize(&data),
        })
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Uniformly scaled copy; estimators must be invariant to this.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            data: self.data.mapv(|z| z * factor),
        }
    }
}

fn symmetrize(a: &Array2<Complex64>) -> Array2<Complex64> {
    let ah = adjoint(a);
    let mut out = (a + &ah) / Complex64::new(2.0, 0.0);
    for i in 0..out.nrows() {
        let d = out[[i, i]].re;
        out[[i, i]] = Complex64::new(d, 0.0);
    }
    out
}

/// Sample covariance `R = (1/N) * U U^H` of a snapshot matrix.
///
/// Accumulates the upper triangle and mirrors it, so the result is
/// Hermitian with a real diagonal by construction — the symmetrization
/// `(R + R^H)/2` is the identity here. This sits inside every estimator's
/// timed region, hence the explicit loop.
pub fn sample_covariance(snapshots: &SnapshotMatrix) -> CovarianceMatrix {
    let u = snapshots.matrix();
    let m = snapshots.sensor_count();
    let n = snapshots.snapshot_count();
    let scale = 1.0 / n as f64;
    let standard = u.as_standard_layout();
    let flat = standard.as_slice().expect("standard layout is contiguous");
    let mut data = Array2::zeros((m, m));
    for i in 0..m {
        let row_i = &flat[i * n..(i + 1) * n];
        for j in i..m {
            let row_j = &flat[j * n..(j + 1) * n];
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, b) in row_i.iter().zip(row_j) {
                acc += a * b.conj();
            }
            acc *= scale;
            if i == j {
                data[[i, i]] = Complex64::new(acc.re, 0.0);
            } else {
                data[[i, j]] = acc;
                data[[j, i]] = acc.conj();
            }
        }
    }
    debug_assert!(hermitian_asymmetry(&data) <= HERMITIAN_REL_TOL);
    CovarianceMatrix { data }
}
