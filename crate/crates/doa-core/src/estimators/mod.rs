//! Bearing estimators behind a single interface.
//!
//! Five methods share the covariance-in, sorted-angles-out contract:
//!
//! - `propagator` — least-squares propagator model, spectral peak search.
//! - `root-propagator` — same model, angles from polynomial roots near the
//!   unit circle instead of a grid search.
//! - `advanced-root-propagator` — rooted angles refined by a short local
//!   scan of the propagator spectrum.
//! - `music` / `root-music` — eigendecomposition baselines with the same
//!   spectral and rooted back ends.

mod music;
mod propagator;
mod rooting;
mod spectrum;

pub use music::{music_estimate, noise_subspace, root_music_estimate};
pub use propagator::{
    estimate_propagator_model, pm_spectrum, pm_spectrum_value, propagator_estimate,
    PropagatorModel,
};
pub use rooting::{
    advanced_root_propagator_estimate, diagonal_sums, refine_estimates, root_propagator_estimate,
    roots_to_angles, scan_to_peak,
};
pub use spectrum::{
    pick_peaks, quadratic_form_spectrum, quadratic_form_value, AngleSpectrum, SPECTRUM_FLOOR,
};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::array_model::ArrayGeometry;
use crate::error::{DoaError, Result};
use crate::numerics::CovarianceMatrix;

/// Estimator identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Propagator,
    RootPropagator,
    AdvancedRootPropagator,
    Music,
    RootMusic,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Propagator,
        Algorithm::RootPropagator,
        Algorithm::AdvancedRootPropagator,
        Algorithm::Music,
        Algorithm::RootMusic,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Propagator => "propagator",
            Algorithm::RootPropagator => "root-propagator",
            Algorithm::AdvancedRootPropagator => "advanced-root-propagator",
            Algorithm::Music => "music",
            Algorithm::RootMusic => "root-music",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = DoaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "propagator" | "pm" => Ok(Algorithm::Propagator),
            "root-propagator" => Ok(Algorithm::RootPropagator),
            "advanced-root-propagator" | "advanced" => Ok(Algorithm::AdvancedRootPropagator),
            "music" => Ok(Algorithm::Music),
            "root-music" => Ok(Algorithm::RootMusic),
            other => Err(DoaError::UnknownAlgorithm(other.to_string())),
        }
    }
}

/// Tuning knobs shared by the estimators; defaults follow the benchmark
/// configuration (0.01 degree resolution, 5 degree scan threshold).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorOptions {
    /// Grid step for spectral search, degrees.
    pub grid_step_deg: f64,
    /// Local-scan radius for the advanced root propagator, degrees.
    pub scan_threshold_deg: f64,
    /// Local-scan step for the advanced root propagator, degrees.
    pub scan_step_deg: f64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        Self {
            grid_step_deg: 0.01,
            scan_threshold_deg: 5.0,
            scan_step_deg: 0.01,
        }
    }
}

/// A bearing estimate: exactly `D` angles in `[0, 180]` degrees, sorted
/// ascending.
///
/// `diagnostics` carries one figure of merit per angle, aligned with
/// `angles_deg`: root magnitude (close to 1 is good) for rooted methods,
/// spectrum peak height for spectral methods. `degenerate` marks estimates
/// produced through a degraded path: fewer spectrum peaks than sources
/// (padded with the largest remaining grid values) or an out-of-range root
/// argument clamped before `acos`.
#[derive(Debug, Clone, PartialEq)]
pub struct DoaEstimate {
    pub angles_deg: Vec<f64>,
    pub method: Algorithm,
    pub diagnostics: Vec<f64>,
    pub degenerate: bool,
}

/// Run one estimator against a covariance matrix.
pub fn estimate(
    algorithm: Algorithm,
    r: &CovarianceMatrix,
    geometry: &ArrayGeometry,
    source_count: usize,
    options: &EstimatorOptions,
) -> Result<DoaEstimate> {
    match algorithm {
        Algorithm::Propagator => {
            propagator_estimate(r, geometry, source_count, options.grid_step_deg)
        }
        Algorithm::RootPropagator => root_propagator_estimate(r, geometry, source_count),
        Algorithm::AdvancedRootPropagator => advanced_root_propagator_estimate(
            r,
            geometry,
            source_count,
            options.scan_threshold_deg,
            options.scan_step_deg,
        ),
        Algorithm::Music => music_estimate(r, geometry, source_count, options.grid_step_deg),
        Algorithm::RootMusic => root_music_estimate(r, geometry, source_count),
    }
}
