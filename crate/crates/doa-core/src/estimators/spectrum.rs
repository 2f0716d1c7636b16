//! Angle spectra and peak picking.

use ndarray::Array2;
use num_complex::Complex64;

use super::{Algorithm, DoaEstimate};
use crate::array_model::ArrayGeometry;
use crate::error::{DoaError, Result};

/// Additive floor on the spectrum denominator. It prevents division
/// overflow at exact nulls and, being a constant shift at machine scale,
/// never moves a maximum.
pub const SPECTRUM_FLOOR: f64 = 1e-12;

/// A positive spectrum sampled on a uniform, strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleSpectrum {
    grid_deg: Vec<f64>,
    values: Vec<f64>,
}

impl AngleSpectrum {
    pub fn new(grid_deg: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid_deg.is_empty() || grid_deg.len() != values.len() {
            return Err(DoaError::DimensionMismatch(format!(
                "spectrum needs matching nonempty grid/value lengths, got {} and {}",
                grid_deg.len(),
                values.len()
            )));
        }
        if grid_deg.len() > 1 {
            let step = grid_deg[1] - grid_deg[0];
            if step <= 0.0 {
                return Err(DoaError::InvalidParameter(
                    "spectrum grid must be strictly increasing".into(),
                ));
            }
            for w in grid_deg.windows(2) {
                let d = w[1] - w[0];
                if d <= 0.0 || (d - step).abs() > 1e-9 * step.max(1.0) {
                    return Err(DoaError::InvalidParameter(
                        "spectrum grid must have a uniform step".into(),
                    ));
                }
            }
        }
        for &v in &values {
            if v <= 0.0 || !v.is_finite() {
                return Err(DoaError::InvalidParameter(format!(
                    "spectrum values must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { grid_deg, values })
    }

    pub fn grid_deg(&self) -> &[f64] {
        &self.grid_deg
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.grid_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid_deg.is_empty()
    }
}

/// `1 / (a(theta)^H C a(theta) + floor)` for a Hermitian PSD matrix `C`.
///
/// The quadratic form is evaluated entry by entry, so the cost is `O(M^2)`
/// per angle; the rounding-level negative excursions of the form are clamped
/// so the result stays positive.
pub fn quadratic_form_value(c: &Array2<Complex64>, geometry: &ArrayGeometry, theta_deg: f64) -> f64 {
    let m = c.nrows();
    debug_assert_eq!(m, c.ncols());
    debug_assert_eq!(m, geometry.sensor_count);

    let phi = geometry.phase_increment(theta_deg);
    let step = Complex64::from_polar(1.0, phi);
    let mut steering = Vec::with_capacity(m);
    let mut element = Complex64::new(1.0, 0.0);
    for _ in 0..m {
        element *= step;
        steering.push(element);
    }

    let standard = c.as_standard_layout();
    let data = standard.as_slice().expect("standard layout is contiguous");
    let mut form = 0.0f64;
    for (row, a_row) in steering.iter().enumerate() {
        let base = row * m;
        let mut acc = Complex64::new(0.0, 0.0);
        for (col, a_col) in steering.iter().enumerate() {
            acc += data[base + col] * a_col;
        }
        form += (a_row.conj() * acc).re;
    }
    1.0 / (form.max(0.0) + SPECTRUM_FLOOR)
}

/// Evaluate the quadratic-form spectrum over `[0, 180]` degrees with the
/// given uniform step.
pub fn quadratic_form_spectrum(
    c: &Array2<Complex64>,
    geometry: &ArrayGeometry,
    grid_step_deg: f64,
) -> Result<AngleSpectrum> {
    if grid_step_deg <= 0.0 || !grid_step_deg.is_finite() {
        return Err(DoaError::InvalidParameter(format!(
            "grid step must be positive, got {grid_step_deg}"
        )));
    }
    if c.nrows() != geometry.sensor_count {
        return Err(DoaError::DimensionMismatch(format!(
            "matrix order {} does not match sensor count {}",
            c.nrows(),
            geometry.sensor_count
        )));
    }
    let points = (180.0 / grid_step_deg + 1e-9).floor() as usize + 1;
    let mut grid = Vec::with_capacity(points);
    let mut values = Vec::with_capacity(points);
    for k in 0..points {
        let theta = (k as f64 * grid_step_deg).min(180.0);
        grid.push(theta);
        values.push(quadratic_form_value(c, geometry, theta));
    }
    AngleSpectrum::new(grid, values)
}

/// Pick the `count` largest local maxima, sorted by angle.
///
/// A peak is a strict three-point local maximum; a boundary sample
/// qualifies when it exceeds its single neighbour. When fewer than `count`
/// peaks exist the result is padded with the largest remaining grid values
/// and flagged degenerate.
pub fn pick_peaks(spectrum: &AngleSpectrum, count: usize, method: Algorithm) -> Result<DoaEstimate> {
    let values = spectrum.values();
    let n = values.len();
    if n == 0 {
        return Err(DoaError::EmptyInput("spectrum has no samples"));
    }
    if count == 0 || count > n {
        return Err(DoaError::DimensionMismatch(format!(
            "cannot pick {count} peaks from {n} samples"
        )));
    }

    let mut peaks: Vec<usize> = Vec::new();
    if n == 1 {
        peaks.push(0);
    } else {
        if values[0] > values[1] {
            peaks.push(0);
        }
        for i in 1..n - 1 {
            if values[i] > values[i - 1] && values[i] > values[i + 1] {
                peaks.push(i);
            }
        }
        if values[n - 1] > values[n - 2] {
            peaks.push(n - 1);
        }
    }

    let by_height_desc = |&i: &usize, &j: &usize| {
        values[j]
            .partial_cmp(&values[i])
            .unwrap()
            .then(i.cmp(&j))
    };
    peaks.sort_by(by_height_desc);

    let mut chosen: Vec<usize> = peaks.iter().copied().take(count).collect();
    let degenerate = chosen.len() < count;
    if degenerate {
        let mut rest: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
        rest.sort_by(by_height_desc);
        chosen.extend(rest.into_iter().take(count - chosen.len()));
    }

    let mut picked: Vec<(f64, f64)> = chosen
        .into_iter()
        .map(|i| (spectrum.grid_deg()[i], values[i]))
        .collect();
    picked.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    Ok(DoaEstimate {
        angles_deg: picked.iter().map(|p| p.0).collect(),
        method,
        diagnostics: picked.iter().map(|p| p.1).collect(),
        degenerate,
    })
}
