//! Seeded Monte Carlo benchmark engine.
//!
//! For every (algorithm, SNR) cell the harness runs `L` trials. The trial
//! seed depends only on the master seed, the SNR, and the trial index —
//! never on the algorithm — so every estimator consumes a bit-identical
//! snapshot realization per trial and cells are directly comparable.
//!
//! Timing covers the estimation call only: sample covariance plus the
//! estimator, excluding snapshot synthesis and error matching.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::array_model::{simulate_snapshots, ArrayGeometry, Scenario};
use crate::error::{DoaError, Result};
use crate::estimators::{estimate, Algorithm, DoaEstimate, EstimatorOptions};
use crate::numerics::sample_covariance;

/// Default resolve threshold in degrees: a trial counts as resolved when
/// every per-angle error is strictly below it.
pub const DEFAULT_RESOLVE_THRESHOLD_DEG: f64 = 7.0;

/// Default local-scan threshold in degrees for the advanced estimator.
pub const DEFAULT_SCAN_THRESHOLD_DEG: f64 = 5.0;

/// Default spectral grid step in degrees.
pub const DEFAULT_GRID_STEP_DEG: f64 = 0.01;

/// Experiment description: scenario template plus sweep lists and seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub geometry: ArrayGeometry,
    pub true_angles_deg: Vec<f64>,
    pub snapshot_count: usize,
    pub snr_list_db: Vec<f64>,
    pub trial_count: usize,
    pub algorithms: Vec<Algorithm>,
    pub resolve_threshold_deg: f64,
    pub scan_threshold_deg: f64,
    pub grid_step_deg: f64,
    pub master_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            geometry: ArrayGeometry::default(),
            true_angles_deg: vec![40.0, 50.0],
            snapshot_count: 200,
            snr_list_db: vec![-10.0, -5.0, 0.0, 5.0, 10.0],
            trial_count: 200,
            algorithms: vec![
                Algorithm::Propagator,
                Algorithm::RootPropagator,
                Algorithm::AdvancedRootPropagator,
            ],
            resolve_threshold_deg: DEFAULT_RESOLVE_THRESHOLD_DEG,
            scan_threshold_deg: DEFAULT_SCAN_THRESHOLD_DEG,
            grid_step_deg: DEFAULT_GRID_STEP_DEG,
            master_seed: 42,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.geometry.validate()?;
        crate::array_model::validate_angles(&self.true_angles_deg, self.geometry.sensor_count)?;
        if self.snapshot_count == 0 {
            return Err(DoaError::InvalidParameter(
                "snapshot count must be at least 1".into(),
            ));
        }
        if self.trial_count == 0 {
            return Err(DoaError::InvalidParameter(
                "trial count must be at least 1".into(),
            ));
        }
        if self.snr_list_db.is_empty() {
            return Err(DoaError::InvalidParameter("SNR list must not be empty".into()));
        }
        if self.snr_list_db.iter().any(|s| s.is_nan()) {
            return Err(DoaError::InvalidParameter("SNR must not be NaN".into()));
        }
        if self.algorithms.is_empty() {
            return Err(DoaError::InvalidParameter(
                "algorithm list must not be empty".into(),
            ));
        }
        for (name, v) in [
            ("resolve threshold", self.resolve_threshold_deg),
            ("scan threshold", self.scan_threshold_deg),
            ("grid step", self.grid_step_deg),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(DoaError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        Ok(())
    }

    pub fn source_count(&self) -> usize {
        self.true_angles_deg.len()
    }

    fn estimator_options(&self) -> EstimatorOptions {
        EstimatorOptions {
            grid_step_deg: self.grid_step_deg,
            scan_threshold_deg: self.scan_threshold_deg,
            scan_step_deg: self.grid_step_deg,
        }
    }
}

/// Outcome of a single trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialMetrics {
    /// Signed errors, estimate minus truth, in truth order. A failed
    /// pipeline contributes the resolve threshold per angle so the
    /// all-trials RMSE stays total.
    pub per_angle_error_deg: Vec<f64>,
    pub resolved: bool,
    /// Wall time of covariance estimation plus the estimator call, seconds.
    pub elapsed_estimation_secs: f64,
    pub failure_reason: Option<String>,
}

/// SplitMix64 finalizer.
fn mix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed from (master seed, SNR, trial index). Algorithm identity
/// deliberately does not enter: paired trials across algorithms.
pub fn derive_trial_seed(master_seed: u64, snr_db: f64, trial_index: u64) -> u64 {
    let a = mix(master_seed ^ snr_db.to_bits());
    mix(a ^ trial_index)
}

/// Order-preserving error assignment between sorted truth and sorted
/// estimates; for equal-length sorted lists this minimizes the total
/// absolute error. Errors come back in the original truth order.
pub fn match_estimates(truth_deg: &[f64], estimate: &DoaEstimate) -> Result<Vec<f64>> {
    match_angle_lists(truth_deg, &estimate.angles_deg)
}

pub(crate) fn match_angle_lists(truth_deg: &[f64], estimates_deg: &[f64]) -> Result<Vec<f64>> {
    if truth_deg.len() != estimates_deg.len() {
        return Err(DoaError::DimensionMismatch(format!(
            "{} truth angles vs {} estimates",
            truth_deg.len(),
            estimates_deg.len()
        )));
    }
    let mut truth_order: Vec<usize> = (0..truth_deg.len()).collect();
    truth_order.sort_by(|&i, &j| truth_deg[i].partial_cmp(&truth_deg[j]).unwrap());
    let mut sorted_estimates = estimates_deg.to_vec();
    sorted_estimates.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut errors = vec![0.0; truth_deg.len()];
    for (rank, &truth_idx) in truth_order.iter().enumerate() {
        errors[truth_idx] = sorted_estimates[rank] - truth_deg[truth_idx];
    }
    Ok(errors)
}

/// Root mean square of a flat error list (over trials and angles).
pub fn compute_rmse(errors_deg: &[f64]) -> Result<f64> {
    if errors_deg.is_empty() {
        return Err(DoaError::EmptyInput("no errors to aggregate"));
    }
    let mean_sq = errors_deg.iter().map(|e| e * e).sum::<f64>() / errors_deg.len() as f64;
    Ok(mean_sq.sqrt())
}

/// Run one seeded trial of one algorithm. Estimation failures are data,
/// not errors: they produce `resolved = false` with threshold-sized errors.
pub fn run_trial(
    config: &ExperimentConfig,
    snr_db: f64,
    algorithm: Algorithm,
    trial_index: u64,
) -> TrialMetrics {
    let scenario = Scenario {
        geometry: config.geometry.clone(),
        true_angles_deg: config.true_angles_deg.clone(),
        snr_db,
        snapshot_count: config.snapshot_count,
        seed: derive_trial_seed(config.master_seed, snr_db, trial_index),
    };
    let snapshots = simulate_snapshots(&scenario).expect("validated config");
    let options = config.estimator_options();
    let source_count = config.source_count();

    let started = Instant::now();
    let covariance = sample_covariance(&snapshots);
    let outcome = estimate(
        algorithm,
        &covariance,
        &config.geometry,
        source_count,
        &options,
    );
    let elapsed_estimation_secs = started.elapsed().as_secs_f64();

    match outcome {
        Ok(est) => {
            let errors = match_estimates(&config.true_angles_deg, &est)
                .expect("estimator returns source_count angles");
            let resolved = errors
                .iter()
                .all(|e| e.abs() < config.resolve_threshold_deg);
            TrialMetrics {
                per_angle_error_deg: errors,
                resolved,
                elapsed_estimation_secs,
                failure_reason: None,
            }
        }
        Err(err) => TrialMetrics {
            per_angle_error_deg: vec![config.resolve_threshold_deg; source_count],
            resolved: false,
            elapsed_estimation_secs,
            failure_reason: Some(err.to_string()),
        },
    }
}

/// Aggregates for one (algorithm, SNR) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub algorithm: Algorithm,
    pub snr_db: f64,
    pub trial_count: usize,
    /// RMSE over every trial; failed pipelines contribute threshold-sized
    /// errors.
    pub rmse_all_deg: f64,
    /// RMSE over resolved trials only; absent when nothing resolved.
    pub rmse_resolved_deg: Option<f64>,
    pub unresolved: usize,
    /// Mean estimation time per trial, microseconds.
    pub mean_time_us: f64,
}

/// Full experiment output: config echo plus one cell per
/// (algorithm, SNR) pair, in configuration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub software_version: String,
    pub config: ExperimentConfig,
    pub cells: Vec<CellReport>,
}

pub const CSV_HEADER: &str =
    "algorithm,snr_db,trial_count,rmse_all_deg,rmse_resolved_deg,unresolved,mean_time_us";

impl ExperimentReport {
    /// Flat CSV, one row per cell. The timing column is last so consumers
    /// comparing deterministic output can strip it.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for cell in &self.cells {
            let resolved = match cell.rmse_resolved_deg {
                Some(v) => format!("{v:.6}"),
                None => String::new(),
            };
            out.push_str(&format!(
                "{},{},{},{:.6},{},{},{:.3}\n",
                cell.algorithm,
                cell.snr_db,
                cell.trial_count,
                cell.rmse_all_deg,
                resolved,
                cell.unresolved,
                cell.mean_time_us
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Run the full experiment grid serially (deterministic aggregation and
/// contention-free timing).
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.algorithms.len() * config.snr_list_db.len());
    for &algorithm in &config.algorithms {
        for &snr_db in &config.snr_list_db {
            cells.push(run_cell(config, algorithm, snr_db));
        }
    }
    Ok(ExperimentReport {
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        cells,
    })
}

fn run_cell(config: &ExperimentConfig, algorithm: Algorithm, snr_db: f64) -> CellReport {
    let mut all_errors = Vec::new();
    let mut resolved_errors = Vec::new();
    let mut unresolved = 0usize;
    let mut total_time = 0.0f64;
    for trial in 0..config.trial_count as u64 {
        let metrics = run_trial(config, snr_db, algorithm, trial);
        total_time += metrics.elapsed_estimation_secs;
        if metrics.resolved {
            resolved_errors.extend_from_slice(&metrics.per_angle_error_deg);
        } else {
            unresolved += 1;
        }
        all_errors.extend_from_slice(&metrics.per_angle_error_deg);
    }
    CellReport {
        algorithm,
        snr_db,
        trial_count: config.trial_count,
        rmse_all_deg: compute_rmse(&all_errors).expect("trial_count >= 1"),
        rmse_resolved_deg: compute_rmse(&resolved_errors).ok(),
        unresolved,
        mean_time_us: total_time / config.trial_count as f64 * 1e6,
    }
}

/// One row of a scan-threshold sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub scan_threshold_deg: f64,
    pub snr_db: f64,
    pub trial_count: usize,
    pub unresolved: usize,
}

/// Threshold-sweep table for the advanced estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSweepReport {
    pub software_version: String,
    pub config: ExperimentConfig,
    pub thresholds_deg: Vec<f64>,
    pub rows: Vec<SweepCell>,
}

pub const SWEEP_CSV_HEADER: &str = "threshold_deg,snr_db,unresolved";

impl ThresholdSweepReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{}\n",
                row.scan_threshold_deg, row.snr_db, row.unresolved
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Rerun the advanced estimator over the same paired trial seeds for each
/// scan threshold, tallying unresolved counts per (threshold, SNR).
///
/// Thresholds must be ascending and nonnegative; zero is the degenerate
/// scan that refines nothing and reproduces the rooted propagator.
pub fn threshold_sweep(
    config: &ExperimentConfig,
    thresholds_deg: &[f64],
) -> Result<ThresholdSweepReport> {
    config.validate()?;
    if thresholds_deg.is_empty() {
        return Err(DoaError::InvalidParameter(
            "threshold list must not be empty".into(),
        ));
    }
    for w in thresholds_deg.windows(2) {
        if w[1] <= w[0] {
            return Err(DoaError::InvalidParameter(
                "thresholds must be strictly ascending".into(),
            ));
        }
    }
    if thresholds_deg[0] < 0.0 {
        return Err(DoaError::InvalidParameter(
            "thresholds must be nonnegative".into(),
        ));
    }

    let mut rows = Vec::with_capacity(thresholds_deg.len() * config.snr_list_db.len());
    for &threshold in thresholds_deg {
        for &snr_db in &config.snr_list_db {
            let mut unresolved = 0usize;
            for trial in 0..config.trial_count as u64 {
                let metrics = run_sweep_trial(config, snr_db, trial, threshold);
                if !metrics.resolved {
                    unresolved += 1;
                }
            }
            rows.push(SweepCell {
                scan_threshold_deg: threshold,
                snr_db,
                trial_count: config.trial_count,
                unresolved,
            });
        }
    }
    Ok(ThresholdSweepReport {
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        thresholds_deg: thresholds_deg.to_vec(),
        rows,
    })
}

// Separate from `run_trial` because the sweep passes the threshold
// directly, including the degenerate zero a full config would reject.
fn run_sweep_trial(
    config: &ExperimentConfig,
    snr_db: f64,
    trial_index: u64,
    threshold: f64,
) -> TrialMetrics {
    let scenario = Scenario {
        geometry: config.geometry.clone(),
        true_angles_deg: config.true_angles_deg.clone(),
        snr_db,
        snapshot_count: config.snapshot_count,
        seed: derive_trial_seed(config.master_seed, snr_db, trial_index),
    };
    let snapshots = simulate_snapshots(&scenario).expect("validated config");
    let covariance = sample_covariance(&snapshots);
    let outcome = crate::estimators::advanced_root_propagator_estimate(
        &covariance,
        &config.geometry,
        config.source_count(),
        threshold,
        config.grid_step_deg,
    );
    match outcome {
        Ok(est) => {
            let errors = match_estimates(&config.true_angles_deg, &est).expect("length match");
            let resolved = errors
                .iter()
                .all(|e| e.abs() < config.resolve_threshold_deg);
            TrialMetrics {
                per_angle_error_deg: errors,
                resolved,
                elapsed_estimation_secs: 0.0,
                failure_reason: None,
            }
        }
        Err(err) => TrialMetrics {
            per_angle_error_deg: vec![config.resolve_threshold_deg; config.source_count()],
            resolved: false,
            elapsed_estimation_secs: 0.0,
            failure_reason: Some(err.to_string()),
        },
    }
}
