//! Hermitian eigendecomposition via cyclic complex Jacobi rotations.
//!
//! Matrix orders here are small (a few dozen at most), where Jacobi is both
//! simple and accurate: eigenvectors stay orthonormal to machine precision
//! because the accumulated transform is a product of exact unitaries.

use ndarray::Array2;
use num_complex::Complex64;

use super::{frobenius_norm, hermitian_asymmetry, HERMITIAN_REL_TOL};
use crate::error::{DoaError, Result};

const MAX_SWEEPS: usize = 64;

/// Eigenvalues in descending order with matching eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Array2<Complex64>,
}

/// Decompose a Hermitian matrix as `R = V diag(lambda) V^H`.
///
/// Eigenvalues are real and sorted descending; eigenvector columns are
/// orthonormal. Inputs whose relative asymmetry exceeds the Hermitian
/// tolerance are rejected.
pub fn hermitian_eigendecomposition(r: &Array2<Complex64>) -> Result<HermitianEigen> {
    let n = r.nrows();
    if n == 0 || r.ncols() != n {
        return Err(DoaError::DimensionMismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let asymmetry = hermitian_asymmetry(r);
    if asymmetry > HERMITIAN_REL_TOL {
        return Err(DoaError::NotHermitian { asymmetry });
    }

    // Work on an exactly-Hermitian copy so rounding in the input cannot
    // leak into the rotations.
    let mut a = r.clone();
    for i in 0..n {
        a[[i, i]] = Complex64::new(a[[i, i]].re, 0.0);
        for j in i + 1..n {
            let avg = (a[[i, j]] + a[[j, i]].conj()) / 2.0;
            a[[i, j]] = avg;
            a[[j, i]] = avg.conj();
        }
    }

    let mut v = Array2::eye(n);
    let scale = frobenius_norm(&a);
    if scale == 0.0 {
        return Ok(HermitianEigen {
            eigenvalues: vec![0.0; n],
            eigenvectors: v,
        });
    }

    let target = scale * f64::EPSILON * n as f64;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        if off <= target {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged && off_diagonal_norm(&a) > target {
        return Err(DoaError::ConvergenceFailure("Jacobi sweeps exhausted"));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[[i, i]].re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut eigenvectors = Array2::zeros((n, n));
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).assign(&v.column(src));
    }
    Ok(HermitianEigen {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &Array2<Complex64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            sum += a[[p, q]].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

/// One complex Jacobi rotation zeroing `a[p][q]`: factor out the phase of
/// the off-diagonal entry, then apply the classic real rotation.
fn rotate(a: &mut Array2<Complex64>, v: &mut Array2<Complex64>, p: usize, q: usize) {
    let apq = a[[p, q]];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let phase = apq / mag;
    let app = a[[p, p]].re;
    let aqq = a[[q, q]].re;

    let tau = (aqq - app) / (2.0 * mag);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // Column update: A <- A J with J[[p,p]]=c, J[[p,q]]=s,
    // J[[q,p]]=-s*conj(phase), J[[q,q]]=c*conj(phase).
    let n = a.nrows();
    let phase_c = phase.conj();
    for i in 0..n {
        let aip = a[[i, p]];
        let aiq = a[[i, q]];
        a[[i, p]] = c * aip - s * phase_c * aiq;
        a[[i, q]] = s * aip + c * phase_c * aiq;
    }
    // Row update: A <- J^H A.
    for j in 0..n {
        let apj = a[[p, j]];
        let aqj = a[[q, j]];
        a[[p, j]] = c * apj - s * phase * aqj;
        a[[q, j]] = s * apj + c * phase * aqj;
    }
    // Pin the rotated pair to exact Hermitian form.
    a[[p, q]] = Complex64::new(0.0, 0.0);
    a[[q, p]] = Complex64::new(0.0, 0.0);
    a[[p, p]] = Complex64::new(a[[p, p]].re, 0.0);
    a[[q, q]] = Complex64::new(a[[q, q]].re, 0.0);

    for i in 0..n {
        let vip = v[[i, p]];
        let viq = v[[i, q]];
        v[[i, p]] = c * vip - s * phase_c * viq;
        v[[i, q]] = s * vip + c * phase_c * viq;
    }
}
