//! Complex least squares through Householder QR.

use ndarray::Array2;
use num_complex::Complex64;

use super::SINGULARITY_REL_TOL;
use crate::error::{DoaError, Result};

/// Solve `argmin_P ||G P - H||_F` for full-column-rank `G`.
///
/// `G` is `M x D`, `H` is `M x K`; the result is `D x K`. The factorization
/// is an orthogonal (Householder) decomposition, so the residual satisfies
/// `G^H (G P - H) ~ 0` without ever forming the normal equations.
/// Numerically rank-deficient `G` yields [`DoaError::SingularMatrix`].
pub fn least_squares_solve(
    g: &Array2<Complex64>,
    h: &Array2<Complex64>,
) -> Result<Array2<Complex64>> {
    let rows = g.nrows();
    let cols = g.ncols();
    let rhs_cols = h.ncols();
    if h.nrows() != rows {
        return Err(DoaError::DimensionMismatch(format!(
            "left side has {rows} rows but right side has {}",
            h.nrows()
        )));
    }
    if cols == 0 || cols > rows {
        return Err(DoaError::DimensionMismatch(format!(
            "system matrix must be tall, got {rows}x{cols}"
        )));
    }

    let mut q = g.clone();
    let mut b = h.clone();

    // Householder reflectors, applied to the trailing columns and the
    // right-hand side as they are formed.
    for col in 0..cols {
        let norm_x: f64 = (col..rows)
            .map(|i| q[[i, col]].norm_sqr())
            .sum::<f64>()
            .sqrt();
        if norm_x == 0.0 {
            return Err(DoaError::SingularMatrix);
        }
        let pivot = q[[col, col]];
        let sign = if pivot.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            pivot / pivot.norm()
        };
        let beta = -sign * norm_x;
        // v = x - beta*e1, stored in place of the column.
        q[[col, col]] = pivot - beta;
        let vhv: f64 = (col..rows).map(|i| q[[i, col]].norm_sqr()).sum();
        if vhv > 0.0 {
            let tau = 2.0 / vhv;
            for j in col + 1..cols {
                reflect_column(&mut q, col, j, tau, rows);
            }
            for j in 0..rhs_cols {
                reflect_into(&q, &mut b, col, j, tau, rows);
            }
        }
        q[[col, col]] = beta;
        for i in col + 1..rows {
            q[[i, col]] = Complex64::new(0.0, 0.0);
        }
    }

    // Rank check on the triangular pivots.
    let mut max_pivot = 0.0f64;
    let mut min_pivot = f64::INFINITY;
    for i in 0..cols {
        let p = q[[i, i]].norm();
        max_pivot = max_pivot.max(p);
        min_pivot = min_pivot.min(p);
    }
    if max_pivot == 0.0 || min_pivot < SINGULARITY_REL_TOL * max_pivot {
        return Err(DoaError::SingularMatrix);
    }

    // Back substitution: R x = (Q^H H) restricted to the top D rows.
    let mut x = Array2::zeros((cols, rhs_cols));
    for j in 0..rhs_cols {
        for i in (0..cols).rev() {
            let mut acc = b[[i, j]];
            for k in i + 1..cols {
                acc -= q[[i, k]] * x[[k, j]];
            }
            x[[i, j]] = acc / q[[i, i]];
        }
    }
    Ok(x)
}

/// Apply `I - tau v v^H` (v stored in `q[reflector.., reflector]`) to column
/// `target` of `q` itself.
fn reflect_column(q: &mut Array2<Complex64>, reflector: usize, target: usize, tau: f64, rows: usize) {
    let mut dot = Complex64::new(0.0, 0.0);
    for i in reflector..rows {
        dot += q[[i, reflector]].conj() * q[[i, target]];
    }
    let scale = tau * dot;
    for i in reflector..rows {
        let v = q[[i, reflector]];
        q[[i, target]] -= scale * v;
    }
}

/// Same reflector, applied to column `target` of `b`.
fn reflect_into(
    q: &Array2<Complex64>,
    b: &mut Array2<Complex64>,
    reflector: usize,
    target: usize,
    tau: f64,
    rows: usize,
) {
    let mut dot = Complex64::new(0.0, 0.0);
    for i in reflector..rows {
        dot += q[[i, reflector]].conj() * b[[i, target]];
    }
    let scale = tau * dot;
    for i in reflector..rows {
        b[[i, target]] -= scale * q[[i, reflector]];
    }
}
