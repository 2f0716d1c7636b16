//! The propagator model and its spectral estimator.
//!
//! The propagator `P` is the least-squares operator mapping the first `D`
//! columns of the covariance matrix onto the remaining `M - D`. Stacking
//! `Q = [P; -I]` gives a matrix whose columns annihilate the steering
//! matrix, playing the role of a noise subspace without any
//! eigendecomposition.

use ndarray::{s, Array2};
use num_complex::Complex64;

use super::spectrum::{pick_peaks, quadratic_form_spectrum, quadratic_form_value, AngleSpectrum};
use super::{Algorithm, DoaEstimate};
use crate::array_model::ArrayGeometry;
use crate::error::{DoaError, Result};
use crate::numerics::{least_squares_solve, CovarianceMatrix};

/// Propagator operator and the derived matrices used by every propagator
/// variant: `P` (`D x (M-D)`), `Q = [P; -I]` (`M x (M-D)`), and the
/// Hermitian PSD `C = Q Q^H` (`M x M`).
#[derive(Debug, Clone)]
pub struct PropagatorModel {
    propagator: Array2<Complex64>,
    q_matrix: Array2<Complex64>,
    c_matrix: Array2<Complex64>,
}

impl PropagatorModel {
    pub fn propagator(&self) -> &Array2<Complex64> {
        &self.propagator
    }

    pub fn q_matrix(&self) -> &Array2<Complex64> {
        &self.q_matrix
    }

    pub fn c_matrix(&self) -> &Array2<Complex64> {
        &self.c_matrix
    }

    pub fn sensor_count(&self) -> usize {
        self.q_matrix.nrows()
    }

    pub fn source_count(&self) -> usize {
        self.propagator.nrows()
    }
}

/// Estimate the propagator from a covariance matrix.
///
/// The covariance is partitioned by columns, `R = [G | H]` with `G` the
/// leading `D` columns, and `P` solves `min ||G P - H||_F`. A numerically
/// singular `G` (the model's "leading block is non-singular" hypothesis
/// failing) surfaces as [`DoaError::SingularMatrix`].
pub fn estimate_propagator_model(
    r: &CovarianceMatrix,
    source_count: usize,
) -> Result<PropagatorModel> {
    let sensors = r.dim();
    if source_count == 0 || source_count >= sensors {
        return Err(DoaError::InvalidSourceCount {
            sources: source_count,
            sensors,
        });
    }
    let data = r.matrix();
    let g = data.slice(s![.., ..source_count]).to_owned();
    let h = data.slice(s![.., source_count..]).to_owned();
    let propagator = least_squares_solve(&g, &h)?;

    let noise_dim = sensors - source_count;
    let mut q_matrix = Array2::zeros((sensors, noise_dim));
    q_matrix
        .slice_mut(s![..source_count, ..])
        .assign(&propagator);
    for i in 0..noise_dim {
        q_matrix[[source_count + i, i]] = Complex64::new(-1.0, 0.0);
    }
    let c_matrix = hermitian_gram(&q_matrix);
    Ok(PropagatorModel {
        propagator,
        q_matrix,
        c_matrix,
    })
}

/// `Q Q^H` accumulated over the upper triangle and mirrored, so the result
/// is exactly Hermitian with a real diagonal.
fn hermitian_gram(q: &Array2<Complex64>) -> Array2<Complex64> {
    let rows = q.nrows();
    let cols = q.ncols();
    let mut out = Array2::zeros((rows, rows));
    for i in 0..rows {
        let row_i = q.row(i);
        for j in i..rows {
            let row_j = q.row(j);
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..cols {
                acc += row_i[k] * row_j[k].conj();
            }
            if i == j {
                out[[i, i]] = Complex64::new(acc.re, 0.0);
            } else {
                out[[i, j]] = acc;
                out[[j, i]] = acc.conj();
            }
        }
    }
    out
}

/// Propagator spectrum `F(theta) = 1 / (a^H C a + floor)` over `[0, 180]`.
pub fn pm_spectrum(
    model: &PropagatorModel,
    geometry: &ArrayGeometry,
    grid_step_deg: f64,
) -> Result<AngleSpectrum> {
    check_geometry(model, geometry)?;
    quadratic_form_spectrum(model.c_matrix(), geometry, grid_step_deg)
}

/// Propagator spectrum at a single angle.
pub fn pm_spectrum_value(model: &PropagatorModel, geometry: &ArrayGeometry, theta_deg: f64) -> f64 {
    quadratic_form_value(model.c_matrix(), geometry, theta_deg)
}

/// The classic propagator method: spectral search over the full grid.
pub fn propagator_estimate(
    r: &CovarianceMatrix,
    geometry: &ArrayGeometry,
    source_count: usize,
    grid_step_deg: f64,
) -> Result<DoaEstimate> {
    let model = estimate_propagator_model(r, source_count)?;
    let spectrum = pm_spectrum(&model, geometry, grid_step_deg)?;
    pick_peaks(&spectrum, source_count, Algorithm::Propagator)
}

pub(crate) fn check_geometry(model: &PropagatorModel, geometry: &ArrayGeometry) -> Result<()> {
    if model.sensor_count() != geometry.sensor_count {
        return Err(DoaError::DimensionMismatch(format!(
            "model built for {} sensors but geometry has {}",
            model.sensor_count(),
            geometry.sensor_count
        )));
    }
    Ok(())
}
