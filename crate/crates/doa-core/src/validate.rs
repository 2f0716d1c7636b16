//! Noiseless self-checks: every estimator against exact covariance input,
//! plus the structural identities the pipelines rely on.
//!
//! These back the CLI `validate` subcommand. The simulation geometry and
//! the estimation geometry are separate arguments so a deliberate mismatch
//! (wrong spacing between synthesis and estimation) is detectable.

use ndarray::Array2;
use num_complex::Complex64;

use crate::array_model::{steering_matrix, steering_vector, ArrayGeometry};
use crate::error::Result;
use crate::estimators::{
    diagonal_sums, estimate_propagator_model, music_estimate, pick_peaks, pm_spectrum,
    pm_spectrum_value, root_music_estimate, root_propagator_estimate, Algorithm, SPECTRUM_FLOOR,
};
use crate::numerics::{adjoint, find_roots, frobenius_norm, CovarianceMatrix};

/// One named check with its outcome and a human-readable measurement.
#[derive(Debug, Clone)]
pub struct ValidationCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl ValidationCheck {
    fn measure(name: &str, passed: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed,
            detail,
        }
    }
}

fn exact_covariance(geometry: &ArrayGeometry, angles: &[f64]) -> Result<CovarianceMatrix> {
    let a = steering_matrix(geometry, angles)?;
    CovarianceMatrix::from_matrix(a.dot(&adjoint(&a)))
}

/// Run the noiseless validation suite.
///
/// `sim_geometry` builds the exact covariance; `est_geometry` drives the
/// estimators. They are equal in normal operation.
pub fn run_noiseless_validation(
    sim_geometry: &ArrayGeometry,
    est_geometry: &ArrayGeometry,
    angles_deg: &[f64],
    grid_step_deg: f64,
) -> Result<Vec<ValidationCheck>> {
    sim_geometry.validate()?;
    est_geometry.validate()?;
    let source_count = angles_deg.len();
    let r = exact_covariance(sim_geometry, angles_deg)?;
    let mut checks = Vec::new();

    // Steering vector entries are unit magnitude.
    {
        let mut worst = 0.0f64;
        for &theta in angles_deg {
            for e in steering_vector(est_geometry, theta).iter() {
                worst = worst.max((e.norm() - 1.0).abs());
            }
        }
        checks.push(ValidationCheck::measure(
            "steering-unit-magnitude",
            worst <= 1e-12,
            format!("max |1 - |a_m|| = {worst:.3e}"),
        ));
    }

    // Q^H A = 0 on the exact covariance.
    {
        let model = estimate_propagator_model(&r, source_count)?;
        let a = steering_matrix(sim_geometry, angles_deg)?;
        let residual = frobenius_norm(&adjoint(model.q_matrix()).dot(&a));
        let bound = 1e-8 * frobenius_norm(&a);
        checks.push(ValidationCheck::measure(
            "propagator-annihilation",
            residual <= bound,
            format!("|Q^H A| = {residual:.3e} (bound {bound:.3e})"),
        ));

        // Spectrum values equal the polynomial on the unit circle.
        let poly = diagonal_sums(model.c_matrix())?;
        let mut worst_rel = 0.0f64;
        for k in 0..50 {
            let theta = 1.0 + 178.0 * (k as f64 / 49.0);
            let omega = est_geometry.phase_increment(theta);
            let denom = poly.evaluate_on_unit_circle(omega).re.max(0.0) + SPECTRUM_FLOOR;
            let from_poly = 1.0 / denom;
            let direct = pm_spectrum_value(&model, est_geometry, theta);
            let rel = (from_poly - direct).abs() / direct.max(f64::MIN_POSITIVE);
            worst_rel = worst_rel.max(rel);
        }
        checks.push(ValidationCheck::measure(
            "spectrum-polynomial-equivalence",
            worst_rel <= 1e-6,
            format!("max relative deviation {worst_rel:.3e}"),
        ));

        // Conjugate-reciprocal root pairing.
        let roots = find_roots(&poly)?;
        let defect = roots.conjugate_reciprocal_defect();
        checks.push(ValidationCheck::measure(
            "conjugate-reciprocal-pairing",
            defect <= 1e-6,
            format!("worst pairing defect {defect:.3e}"),
        ));

        // Rooted angles agree with a fine spectral search.
        let fine = pm_spectrum(&model, est_geometry, 0.001)?;
        let picked = pick_peaks(&fine, source_count, Algorithm::Propagator)?;
        let rooted = root_propagator_estimate(&r, est_geometry, source_count);
        match rooted {
            Ok(rooted) => {
                let mut worst = 0.0f64;
                for (a, b) in rooted.angles_deg.iter().zip(&picked.angles_deg) {
                    worst = worst.max((a - b).abs());
                }
                checks.push(ValidationCheck::measure(
                    "root-vs-grid-search",
                    worst <= 0.002,
                    format!("max |rooted - grid| = {worst:.3e} deg"),
                ));
            }
            Err(err) => checks.push(ValidationCheck::measure(
                "root-vs-grid-search",
                false,
                format!("rooting failed: {err}"),
            )),
        }
    }

    // Every estimator recovers the true angles.
    for (name, result, tol) in [
        (
            "recovery-propagator",
            crate::estimators::propagator_estimate(&r, est_geometry, source_count, grid_step_deg),
            grid_step_deg,
        ),
        (
            "recovery-root-propagator",
            root_propagator_estimate(&r, est_geometry, source_count),
            1e-3,
        ),
        (
            "recovery-advanced",
            crate::estimators::advanced_root_propagator_estimate(
                &r,
                est_geometry,
                source_count,
                5.0,
                grid_step_deg,
            ),
            grid_step_deg + 1e-3,
        ),
        (
            "recovery-music",
            music_estimate(&r, est_geometry, source_count, grid_step_deg),
            grid_step_deg,
        ),
        (
            "recovery-root-music",
            root_music_estimate(&r, est_geometry, source_count),
            1e-3,
        ),
    ] {
        match result {
            Ok(est) => {
                let mut sorted_truth = angles_deg.to_vec();
                sorted_truth.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let worst = est
                    .angles_deg
                    .iter()
                    .zip(&sorted_truth)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                checks.push(ValidationCheck::measure(
                    name,
                    worst <= tol + 1e-9,
                    format!("max angle error {worst:.3e} deg (tolerance {tol:.3e})"),
                ));
            }
            Err(err) => checks.push(ValidationCheck::measure(
                name,
                false,
                format!("estimation failed: {err}"),
            )),
        }
    }

    // Smallest legal model: M = 2, D = 1.
    {
        let tiny = ArrayGeometry::new(2, est_geometry.spacing_wavelengths)?;
        let r2 = exact_covariance(&tiny, &[75.0])?;
        let est = root_propagator_estimate(&r2, &tiny, 1);
        let (passed, detail) = match est {
            Ok(e) => {
                let err = (e.angles_deg[0] - 75.0).abs();
                (err <= 1e-3, format!("angle error {err:.3e} deg"))
            }
            Err(err) => (false, format!("estimation failed: {err}")),
        };
        checks.push(ValidationCheck::measure("minimal-array", passed, detail));
    }

    Ok(checks)
}

/// Structural identity used by tests: the quadratic form of a Hermitian
/// PSD matrix equals the diagonal-sum polynomial on the unit circle.
pub fn spectrum_polynomial_agreement(
    c: &Array2<Complex64>,
    geometry: &ArrayGeometry,
    angles_deg: &[f64],
) -> Result<f64> {
    let poly = diagonal_sums(c)?;
    let mut worst = 0.0f64;
    for &theta in angles_deg {
        let omega = geometry.phase_increment(theta);
        let from_poly = 1.0 / (poly.evaluate_on_unit_circle(omega).re.max(0.0) + SPECTRUM_FLOOR);
        let direct = crate::estimators::quadratic_form_value(c, geometry, theta);
        worst = worst.max((from_poly - direct).abs() / direct.max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}
