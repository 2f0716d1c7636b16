//! Oracle-backed checks of the numeric kernels: the root finder against an
//! independent simultaneous iteration, covariance against brute-force
//! summation, and rooting invariants as property tests.

mod support;

use doa_core::array_model::{simulate_snapshots, ArrayGeometry, Scenario};
use doa_core::numerics::{
    find_roots, hermitian_eigendecomposition, sample_covariance, ComplexPolynomial,
};
use doa_core::estimators::diagonal_sums;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use support::*;

#[test]
fn find_roots_matches_the_independent_iteration_oracle() {
    let mut rng = seeded_rng(0xC0FFEE);
    for case in 0..120 {
        let half_order = 1 + (case % 11); // degrees 2 through 22
        let poly = random_conjugate_symmetric(half_order, &mut rng);
        let roots = find_roots(&poly).expect("random polynomial roots");
        assert_eq!(roots.len(), 2 * half_order);

        let oracle = durand_kerner(&poly.normalized_ascending());
        let distance = pair_max_relative_distance(roots.roots(), &oracle);
        assert!(
            distance <= 1e-6,
            "case {case} (degree {}): pairing distance {distance}",
            2 * half_order
        );
    }
}

#[test]
fn hermitian_derived_roots_pair_conjugate_reciprocally() {
    let mut rng = seeded_rng(0xBEEF);
    for _ in 0..40 {
        let c = random_hermitian_psd(8, &mut rng);
        let poly = diagonal_sums(&c).unwrap();
        assert!(poly.conjugate_symmetry_defect() <= 1e-12);
        let roots = find_roots(&poly).unwrap();
        assert!(
            roots.conjugate_reciprocal_defect() <= 1e-6,
            "pairing defect {}",
            roots.conjugate_reciprocal_defect()
        );
    }
}

#[test]
fn noiseless_rank_one_covariance_has_dominant_eigenvector_along_steering() {
    let geometry = ArrayGeometry::new(6, 0.5).unwrap();
    let scenario = Scenario {
        geometry: geometry.clone(),
        true_angles_deg: vec![75.0],
        snr_db: f64::INFINITY,
        snapshot_count: 32,
        seed: 5,
    };
    let snapshots = simulate_snapshots(&scenario).unwrap();
    let r = sample_covariance(&snapshots);
    let eigen = hermitian_eigendecomposition(r.matrix()).unwrap();

    // Rank one: a single significant eigenvalue.
    assert!(eigen.eigenvalues[0] > 1e-8);
    for &lambda in &eigen.eigenvalues[1..] {
        assert!(lambda.abs() <= 1e-10 * eigen.eigenvalues[0]);
    }

    let a = doa_core::array_model::steering_vector(&geometry, 75.0);
    let v = eigen.eigenvectors.column(0);
    let dot: Complex64 = a.iter().zip(v.iter()).map(|(a, v)| a.conj() * v).sum();
    let overlap = dot.norm() / (a.len() as f64).sqrt();
    assert!(
        (overlap - 1.0).abs() < 1e-8,
        "dominant eigenvector overlap {overlap}"
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Residuals of returned roots stay below the stated bound for random
    /// polynomials of degree 2 through 22.
    #[test]
    fn root_residuals_stay_bounded(seed in any::<u64>(), half_order in 1usize..=11) {
        let mut rng = seeded_rng(seed);
        let poly = random_conjugate_symmetric(half_order, &mut rng);
        let max_coeff = poly
            .coefficients()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        prop_assume!(max_coeff > 1e-3);

        let roots = find_roots(&poly).unwrap();
        let ascending = poly.normalized_ascending();
        let degree = ascending.len() - 1;
        for &z in roots.roots() {
            let residual = horner(&ascending, z).norm();
            let bound = 1e-6 * max_coeff * z.norm().max(1.0).powi(degree as i32);
            prop_assert!(
                residual <= bound,
                "degree {degree}: residual {residual} above bound {bound} at z = {z}"
            );
        }
    }

    /// Conjugate-reciprocal closure for conjugate-symmetric input.
    #[test]
    fn symmetric_polynomials_have_reciprocal_root_sets(seed in any::<u64>(), half_order in 1usize..=11) {
        let mut rng = seeded_rng(seed);
        let poly = random_conjugate_symmetric(half_order, &mut rng);
        let max_coeff = poly
            .coefficients()
            .iter()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max);
        prop_assume!(max_coeff > 1e-3);
        // Keep the leading coefficient well away from the strip threshold
        // so the full degree survives.
        prop_assume!(poly.coefficient(half_order as isize).norm() > 1e-3 * max_coeff);

        let roots = find_roots(&poly).unwrap();
        prop_assert!(roots.conjugate_reciprocal_defect() <= 1e-6);
    }

    /// Sample covariance equals the brute-force double loop.
    #[test]
    fn covariance_matches_brute_force(seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let sensors = 2 + (rng.random::<u64>() % 5) as usize;
        let snapshots_n = 1 + (rng.random::<u64>() % 40) as usize;
        let data = ndarray::Array2::from_shape_fn((sensors, snapshots_n), |_| {
            Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
        });
        let r = sample_covariance(&doa_core::array_model::SnapshotMatrix::new(data.clone()));
        for i in 0..sensors {
            for j in 0..sensors {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..snapshots_n {
                    acc += data[[i, k]] * data[[j, k]].conj();
                }
                acc /= snapshots_n as f64;
                prop_assert!((r.matrix()[[i, j]] - acc).norm() <= 1e-12);
            }
        }
    }
}

#[test]
fn sample_covariance_is_positive_semidefinite() {
    let mut rng = seeded_rng(0xABCD);
    for _ in 0..10 {
        let data = random_matrix(6, 12, &mut rng);
        let r = sample_covariance(&doa_core::array_model::SnapshotMatrix::new(data));
        let eigen = hermitian_eigendecomposition(r.matrix()).unwrap();
        let largest = eigen.eigenvalues[0];
        let smallest = *eigen.eigenvalues.last().unwrap();
        assert!(smallest >= -1e-10 * largest.max(1e-300));
    }
}

#[test]
fn polynomial_coefficient_indexing_is_centered() {
    let coefficients = vec![
        Complex64::new(1.0, 1.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(3.0, 0.0),
        Complex64::new(2.0, 0.0),
        Complex64::new(1.0, -1.0),
    ];
    let poly = ComplexPolynomial::from_coefficients(coefficients).unwrap();
    assert_eq!(poly.half_order(), 2);
    assert_eq!(poly.coefficient(-2), Complex64::new(1.0, 1.0));
    assert_eq!(poly.coefficient(0), Complex64::new(3.0, 0.0));
    assert_eq!(poly.coefficient(2), Complex64::new(1.0, -1.0));
    assert_eq!(poly.coefficient(5), Complex64::new(0.0, 0.0));
}
