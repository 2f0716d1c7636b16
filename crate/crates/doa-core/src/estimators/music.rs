//! MUSIC and Root-MUSIC baselines.
//!
//! Both estimators eigendecompose the covariance matrix and use the span of
//! the `M - D` smallest eigenvectors as the noise subspace; the spectral and
//! rooted back ends are shared with the propagator variants, with
//! `E_n E_n^H` taking the place of `Q Q^H`.

use ndarray::{s, Array2};
use num_complex::Complex64;

use super::rooting::{diagonal_sums, roots_to_angles};
use super::spectrum::{pick_peaks, quadratic_form_spectrum};
use super::{Algorithm, DoaEstimate};
use crate::array_model::ArrayGeometry;
use crate::error::{DoaError, Result};
use crate::numerics::{adjoint, find_roots, hermitian_eigendecomposition, CovarianceMatrix};

/// Orthonormal basis of the noise subspace: the eigenvectors of the
/// `M - D` smallest eigenvalues, as columns. `D = M` leaves no noise
/// subspace and is rejected.
pub fn noise_subspace(r: &CovarianceMatrix, source_count: usize) -> Result<Array2<Complex64>> {
    let sensors = r.dim();
    if source_count == 0 || source_count >= sensors {
        return Err(DoaError::InvalidSourceCount {
            sources: source_count,
            sensors,
        });
    }
    let eigen = hermitian_eigendecomposition(r.matrix())?;
    Ok(eigen.eigenvectors.slice(s![.., source_count..]).to_owned())
}

/// MUSIC: spectral search over `1 / (a^H E_n E_n^H a + floor)`.
pub fn music_estimate(
    r: &CovarianceMatrix,
    geometry: &ArrayGeometry,
    source_count: usize,
    grid_step_deg: f64,
) -> Result<DoaEstimate> {
    check_dims(r, geometry)?;
    let en = noise_subspace(r, source_count)?;
    let projector = en.dot(&adjoint(&en));
    let spectrum = quadratic_form_spectrum(&projector, geometry, grid_step_deg)?;
    pick_peaks(&spectrum, source_count, Algorithm::Music)
}

/// Root-MUSIC: identical rooted back end to the rooted propagator, with the
/// noise-subspace projector as the quadratic-form matrix.
pub fn root_music_estimate(
    r: &CovarianceMatrix,
    geometry: &ArrayGeometry,
    source_count: usize,
) -> Result<DoaEstimate> {
    check_dims(r, geometry)?;
    let en = noise_subspace(r, source_count)?;
    let projector = en.dot(&adjoint(&en));
    let poly = diagonal_sums(&projector)?;
    let roots = find_roots(&poly)?;
    roots_to_angles(&roots, geometry, source_count, Algorithm::RootMusic)
}

fn check_dims(r: &CovarianceMatrix, geometry: &ArrayGeometry) -> Result<()> {
    if r.dim() != geometry.sensor_count {
        return Err(DoaError::DimensionMismatch(format!(
            "covariance order {} does not match sensor count {}",
            r.dim(),
            geometry.sensor_count
        )));
    }
    Ok(())
}
