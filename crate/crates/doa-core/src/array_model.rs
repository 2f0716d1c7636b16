//! Uniform linear array geometry, steering vectors, and snapshot synthesis.
//!
//! The signal model is narrowband and far-field: `D` plane waves from
//! distinct azimuth angles impinge on `M` collinear sensors, and each
//! snapshot is `u(t) = A(theta) s(t) + n(t)` with circularly-symmetric
//! complex Gaussian source samples and sensor noise.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::error::{DoaError, Result};

/// Default inter-element spacing as a fraction of the carrier wavelength.
/// Half-wavelength spacing keeps the root-to-angle map unambiguous over
/// the full (0, 180) degree domain.
pub const DEFAULT_SPACING_WAVELENGTHS: f64 = 0.5;

/// Default carrier frequency. Informational only; every computation uses
/// the spacing-to-wavelength ratio directly.
pub const DEFAULT_CARRIER_FREQUENCY_HZ: f64 = 850.0e6;

/// Uniform linear array along the x-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    /// Number of sensors `M >= 2`.
    pub sensor_count: usize,
    /// Inter-element spacing divided by the carrier wavelength, `> 0`.
    pub spacing_wavelengths: f64,
    /// Carrier frequency in Hz (metadata; not used numerically).
    pub carrier_frequency_hz: f64,
}

impl ArrayGeometry {
    pub fn new(sensor_count: usize, spacing_wavelengths: f64) -> Result<Self> {
        let geometry = Self {
            sensor_count,
            spacing_wavelengths,
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
        };
        geometry.validate()?;
        Ok(geometry)
    }

    pub fn validate(&self) -> Result<()> {
        if self.sensor_count < 2 {
            return Err(DoaError::InvalidParameter(format!(
                "sensor count must be at least 2, got {}",
                self.sensor_count
            )));
        }
        if self.spacing_wavelengths <= 0.0 || !self.spacing_wavelengths.is_finite() {
            return Err(DoaError::InvalidParameter(format!(
                "spacing must be a positive wavelength ratio, got {}",
                self.spacing_wavelengths
            )));
        }
        if self.carrier_frequency_hz < 0.0 || self.carrier_frequency_hz.is_nan() {
            return Err(DoaError::InvalidParameter(format!(
                "carrier frequency must be nonnegative, got {}",
                self.carrier_frequency_hz
            )));
        }
        Ok(())
    }

    /// Electrical phase increment between adjacent sensors for a source at
    /// `theta_deg`: `2*pi*(d/lambda)*cos(theta)`.
    pub fn phase_increment(&self, theta_deg: f64) -> f64 {
        TAU * self.spacing_wavelengths * theta_deg.to_radians().cos()
    }
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self {
            sensor_count: 12,
            spacing_wavelengths: DEFAULT_SPACING_WAVELENGTHS,
            carrier_frequency_hz: DEFAULT_CARRIER_FREQUENCY_HZ,
        }
    }
}

/// A simulated ground truth: geometry, source bearings, SNR, snapshot count,
/// and the seed that makes the realization reproducible.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub geometry: ArrayGeometry,
    /// Source bearings in degrees, all distinct, strictly inside (0, 180).
    pub true_angles_deg: Vec<f64>,
    /// Per-source SNR in dB against per-sensor noise power. `+inf` disables
    /// noise entirely.
    pub snr_db: f64,
    pub snapshot_count: usize,
    pub seed: u64,
}

impl Scenario {
    pub fn source_count(&self) -> usize {
        self.true_angles_deg.len()
    }

    /// Noise variance per sensor, `sigma^2 = 10^(-SNR_dB/10)`.
    pub fn noise_variance(&self) -> f64 {
        10f64.powf(-self.snr_db / 10.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        validate_angles(&self.true_angles_deg, self.geometry.sensor_count)?;
        if self.snr_db.is_nan() {
            return Err(DoaError::InvalidParameter("SNR must not be NaN".into()));
        }
        if self.snapshot_count == 0 {
            return Err(DoaError::InvalidParameter(
                "snapshot count must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

pub(crate) fn validate_angles(angles_deg: &[f64], sensor_count: usize) -> Result<()> {
    let sources = angles_deg.len();
    if sources == 0 || sources >= sensor_count {
        return Err(DoaError::InvalidSourceCount {
            sources,
            sensors: sensor_count,
        });
    }
    for &a in angles_deg {
        if !(a > 0.0 && a < 180.0) {
            return Err(DoaError::InvalidParameter(format!(
                "angle {a} deg is outside the open interval (0, 180)"
            )));
        }
    }
    for i in 0..sources {
        for j in i + 1..sources {
            if angles_deg[i] == angles_deg[j] {
                return Err(DoaError::InvalidParameter(format!(
                    "source angles must be distinct, {} deg repeats",
                    angles_deg[i]
                )));
            }
        }
    }
    Ok(())
}

/// `M x N` matrix of array snapshots; column `n` is the sensor vector
/// `u(t_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotMatrix {
    data: Array2<Complex64>,
}

impl SnapshotMatrix {
    pub fn new(data: Array2<Complex64>) -> Self {
        Self { data }
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.data
    }

    pub fn sensor_count(&self) -> usize {
        self.data.nrows()
    }

    pub fn snapshot_count(&self) -> usize {
        self.data.ncols()
    }
}

/// Steering vector of the array towards `theta_deg`.
///
/// Element `m` (1-based, `m = 1..=M`) is `exp(j*2*pi*m*(d/lambda)*cos(theta))`;
/// every entry has unit magnitude.
pub fn steering_vector(geometry: &ArrayGeometry, theta_deg: f64) -> Array1<Complex64> {
    let phi = geometry.phase_increment(theta_deg);
    let step = Complex64::from_polar(1.0, phi);
    let mut element = Complex64::new(1.0, 0.0);
    Array1::from_iter((0..geometry.sensor_count).map(|_| {
        element *= step;
        element
    }))
}

/// Steering matrix `A = [a(theta_1) ... a(theta_D)]`, one column per source
/// in input order. Requires `D < M` and distinct angles.
pub fn steering_matrix(geometry: &ArrayGeometry, angles_deg: &[f64]) -> Result<Array2<Complex64>> {
    geometry.validate()?;
    let sources = angles_deg.len();
    if sources == 0 || sources >= geometry.sensor_count {
        return Err(DoaError::InvalidSourceCount {
            sources,
            sensors: geometry.sensor_count,
        });
    }
    for i in 0..sources {
        for j in i + 1..sources {
            if angles_deg[i] == angles_deg[j] {
                return Err(DoaError::InvalidParameter(format!(
                    "steering angles must be distinct, {} deg repeats",
                    angles_deg[i]
                )));
            }
        }
    }
    let mut a = Array2::zeros((geometry.sensor_count, sources));
    for (col, &theta) in angles_deg.iter().enumerate() {
        let v = steering_vector(geometry, theta);
        a.column_mut(col).assign(&v);
    }
    Ok(a)
}

/// Per-source signal power: constant-envelope sources with unit amplitude
/// in each quadrature (`|s|^2 = 2`), the usual digital-modulation
/// convention.
pub const SOURCE_POWER: f64 = 2.0;

/// One draw of a circularly-symmetric complex Gaussian with unit variance
/// (`E|z|^2 = 1`), via the polar transform.
fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    // 1 - u1 lies in (0, 1], so the log is finite.
    let radius = (-(1.0 - u1).ln()).sqrt();
    Complex64::from_polar(radius, TAU * u2)
}

/// One constant-envelope source sample: fixed modulus `sqrt(SOURCE_POWER)`,
/// phase uniform on the circle.
fn source_sample<R: Rng>(rng: &mut R) -> Complex64 {
    let phase: f64 = rng.random();
    Complex64::from_polar(SOURCE_POWER.sqrt(), TAU * phase)
}

/// Synthesize `u(t_n) = A s(t_n) + n(t_n)` for `n = 1..=N`.
///
/// Sources are independent equal-strength constant-envelope signals
/// (power [`SOURCE_POWER`] each, uniform random phase per snapshot); noise
/// is circularly-symmetric complex Gaussian, white across sensors, with
/// per-sensor variance `sigma^2 = 10^(-SNR_dB/10)`. Deterministic for a
/// fixed scenario seed.
pub fn simulate_snapshots(scenario: &Scenario) -> Result<SnapshotMatrix> {
    scenario.validate()?;
    let a = steering_matrix(&scenario.geometry, &scenario.true_angles_deg)?;
    let sensors = scenario.geometry.sensor_count;
    let sources = scenario.source_count();
    let sigma = scenario.noise_variance().sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let mut data = Array2::zeros((sensors, scenario.snapshot_count));
    let mut signal = Array1::zeros(sources);
    for n in 0..scenario.snapshot_count {
        for s in signal.iter_mut() {
            *s = source_sample(&mut rng);
        }
        let mut column = data.column_mut(n);
        column.assign(&a.dot(&signal));
        for u in column.iter_mut() {
            *u += sigma * complex_gaussian(&mut rng);
        }
    }
    Ok(SnapshotMatrix::new(data))
}
