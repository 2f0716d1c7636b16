//! Direction-of-arrival (DOA) estimation for uniform linear arrays.
//!
//! The crate provides:
//!
//! - [`array_model`] — array geometry, steering vectors, and seeded synthesis
//!   of noisy snapshot matrices for the narrowband far-field signal model.
//! - [`numerics`] — the numeric substrate: sample covariance, Hermitian
//!   eigendecomposition, complex least squares, and a companion-matrix
//!   polynomial root solver.
//! - [`estimators`] — five bearing estimators behind one interface:
//!   the propagator method (spectral search), its rooted variant, a rooted
//!   variant with local spectrum refinement, plus MUSIC and Root-MUSIC
//!   baselines.
//! - [`harness`] — a seeded Monte Carlo engine producing RMSE, unresolved
//!   failure counts, scan-threshold sweeps, and per-estimator timings, with
//!   CSV and JSON report output.
//! - [`validate`] — noiseless self-checks used by the CLI `validate`
//!   subcommand.
//!
//! All estimators are pure functions of their inputs; trials are reproducible
//! from a single master seed.

pub mod array_model;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod numerics;
pub mod validate;

pub use error::{DoaError, Result};
