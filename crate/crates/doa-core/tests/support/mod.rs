//! Shared oracle utilities for integration tests: an independent polynomial
//! root finder, multiset pairing, and exact-covariance construction.
//!
//! Each test binary compiles this module separately and uses a subset.
#![allow(dead_code)]

use doa_core::array_model::{steering_matrix, ArrayGeometry};
use doa_core::numerics::{adjoint, ComplexPolynomial, CovarianceMatrix};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Horner evaluation of ascending-power coefficients.
pub fn horner(ascending: &[Complex64], z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for &c in ascending.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Durand-Kerner simultaneous iteration: an independent root-finding oracle
/// (no companion matrix, no eigenvalues).
pub fn durand_kerner(ascending: &[Complex64]) -> Vec<Complex64> {
    let degree = ascending.len() - 1;
    assert!(degree >= 1, "oracle needs a nonconstant polynomial");
    let lead = ascending[degree];
    assert!(lead.norm() > 0.0, "oracle needs a nonzero leading coefficient");
    let monic: Vec<Complex64> = ascending.iter().map(|c| c / lead).collect();

    let base = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..degree).map(|i| base.powu(i as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..degree {
            let zi = roots[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in roots.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                // Perturb a collision and keep iterating.
                roots[i] += Complex64::new(1e-8, 1e-8);
                max_step = f64::INFINITY;
                continue;
            }
            let step = horner(&monic, zi) / denom;
            roots[i] = zi - step;
            max_step = max_step.max(step.norm() / zi.norm().max(1.0));
        }
        if max_step < 1e-13 {
            break;
        }
    }
    roots
}

/// Greedy closest-pair matching between two equal-length complex multisets;
/// returns the largest matched distance relative to `max(1, |a|)`.
pub fn pair_max_relative_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut left = a.to_vec();
    let mut right = b.to_vec();
    let mut worst = 0.0f64;
    while !left.is_empty() {
        let mut best = (0usize, 0usize, f64::INFINITY);
        for (i, &x) in left.iter().enumerate() {
            for (j, &y) in right.iter().enumerate() {
                let d = (x - y).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        worst = worst.max(best.2 / left[best.0].norm().max(1.0));
        left.swap_remove(best.0);
        right.swap_remove(best.1);
    }
    worst
}

/// Random conjugate-symmetric centered coefficients (`c_{-l} = conj(c_l)`,
/// real `c_0`), the shape diagonal sums of a Hermitian matrix produce.
pub fn random_conjugate_symmetric(half_order: usize, rng: &mut ChaCha8Rng) -> ComplexPolynomial {
    let mut coefficients = vec![Complex64::new(0.0, 0.0); 2 * half_order + 1];
    coefficients[half_order] = Complex64::new(rng.random::<f64>() * 2.0 - 1.0, 0.0);
    for l in 1..=half_order {
        let c = Complex64::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        );
        coefficients[half_order + l] = c;
        coefficients[half_order - l] = c.conj();
    }
    ComplexPolynomial::from_coefficients(coefficients).unwrap()
}

/// Random Hermitian positive-semidefinite matrix `B B^H`.
pub fn random_hermitian_psd(order: usize, rng: &mut ChaCha8Rng) -> Array2<Complex64> {
    let b = Array2::from_shape_fn((order, order), |_| {
        Complex64::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    });
    b.dot(&adjoint(&b))
}

/// Exact covariance of unit-power uncorrelated sources: `R = A A^H`.
pub fn exact_covariance(geometry: &ArrayGeometry, angles: &[f64]) -> CovarianceMatrix {
    let a = steering_matrix(geometry, angles).unwrap();
    CovarianceMatrix::from_matrix(a.dot(&adjoint(&a))).unwrap()
}

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Array2<Complex64> {
    Array2::from_shape_fn((rows, cols), |_| {
        Complex64::new(
            rng.random::<f64>() * 2.0 - 1.0,
            rng.random::<f64>() * 2.0 - 1.0,
        )
    })
}

/// Normal-equations oracle for least squares: solve `(G^H G) P = G^H H`
/// by Gaussian elimination with partial pivoting.
pub fn normal_equations_solve(g: &Array2<Complex64>, h: &Array2<Complex64>) -> Array2<Complex64> {
    let gh = adjoint(g);
    let mut a = gh.dot(g);
    let mut b = gh.dot(h);
    let n = a.nrows();
    let k = b.ncols();
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&i, &j| {
                a[[i, col]]
                    .norm()
                    .partial_cmp(&a[[j, col]].norm())
                    .unwrap()
            })
            .unwrap();
        if pivot_row != col {
            for j in 0..n {
                let tmp = a[[col, j]];
                a[[col, j]] = a[[pivot_row, j]];
                a[[pivot_row, j]] = tmp;
            }
            for j in 0..k {
                let tmp = b[[col, j]];
                b[[col, j]] = b[[pivot_row, j]];
                b[[pivot_row, j]] = tmp;
            }
        }
        let pivot = a[[col, col]];
        for row in col + 1..n {
            let factor = a[[row, col]] / pivot;
            for j in col..n {
                let v = a[[col, j]];
                a[[row, j]] -= factor * v;
            }
            for j in 0..k {
                let v = b[[col, j]];
                b[[row, j]] -= factor * v;
            }
        }
    }
    let mut x = Array2::zeros((n, k));
    for j in 0..k {
        for i in (0..n).rev() {
            let mut acc = b[[i, j]];
            for l in i + 1..n {
                acc -= a[[i, l]] * x[[l, j]];
            }
            x[[i, j]] = acc / a[[i, i]];
        }
    }
    x
}
