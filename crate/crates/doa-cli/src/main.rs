//! `doa` — Monte Carlo benchmarks and one-shot estimates for uniform
//! linear array bearing estimation.
//!
//! Subcommands:
//! - `run` — full (algorithm x SNR) benchmark grid, Table-style summary on
//!   stdout, optional CSV/JSON report file.
//! - `sweep` — unresolved-failure counts of the refined estimator across
//!   scan thresholds.
//! - `single` — simulate one trial and print the estimate.
//! - `validate` — noiseless self-checks; nonzero exit on any failure.
//!
//! Exit codes: 0 success, 1 configuration error, 2 internal failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use doa_core::array_model::{simulate_snapshots, Scenario};
use doa_core::estimators::{estimate, Algorithm, EstimatorOptions};
use doa_core::harness::{
    match_estimates, run_experiment, threshold_sweep, ExperimentConfig, ExperimentReport,
    ThresholdSweepReport,
};
use doa_core::numerics::sample_covariance;
use doa_core::validate::run_noiseless_validation;

#[derive(Parser)]
#[command(name = "doa", version, about = "Direction-of-arrival estimation benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the Monte Carlo benchmark grid.
    Run(RunArgs),
    /// Sweep the refined estimator's scan threshold.
    Sweep(SweepArgs),
    /// Simulate and estimate one trial.
    Single(SingleArgs),
    /// Run the noiseless self-checks (writes nothing).
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Ascending scan thresholds in degrees.
    #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5,6,7")]
    thresholds: Vec<f64>,
}

#[derive(Args)]
struct SingleArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Estimator to run.
    #[arg(long, default_value = "root-propagator")]
    algorithm: String,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

/// Flags shared by every subcommand. Each has a config-file twin; flags
/// override file values, which override the built-in defaults.
#[derive(Args)]
struct CommonArgs {
    /// JSON config file with the same keys as these flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of sensors M.
    #[arg(long)]
    sensors: Option<usize>,
    /// Number of sources D; must match the angle count.
    #[arg(long)]
    sources: Option<usize>,
    /// Snapshots per trial N.
    #[arg(long)]
    snapshots: Option<usize>,
    /// Inter-element spacing as a fraction of the wavelength.
    #[arg(long)]
    spacing_wavelengths: Option<f64>,
    /// True source bearings in degrees.
    #[arg(long, value_delimiter = ',')]
    angles: Option<Vec<f64>>,
    /// SNR grid in dB; negative values are fine (`--snr -10,-5,0`).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    snr: Option<Vec<f64>>,
    /// Trials per (algorithm, SNR) cell.
    #[arg(long)]
    trials: Option<usize>,
    /// Spectral grid step in degrees.
    #[arg(long)]
    grid_step: Option<f64>,
    /// Resolve threshold in degrees (a trial fails at or beyond it).
    #[arg(long)]
    resolve_threshold: Option<f64>,
    /// Scan threshold in degrees for the refined estimator.
    #[arg(long)]
    scan_threshold: Option<f64>,
    /// Estimators to run.
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,
    /// Master seed for paired trials.
    #[arg(long)]
    seed: Option<u64>,
    /// Report file path.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Report file format.
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Clone, Copy, Default, PartialEq, ValueEnum)]
enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Config-file document: flat, same keys as the flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    sensors: Option<usize>,
    sources: Option<usize>,
    snapshots: Option<usize>,
    spacing_wavelengths: Option<f64>,
    angles: Option<Vec<f64>>,
    snr: Option<Vec<f64>>,
    trials: Option<usize>,
    grid_step: Option<f64>,
    resolve_threshold: Option<f64>,
    scan_threshold: Option<f64>,
    algorithms: Option<Vec<String>>,
    seed: Option<u64>,
}

enum CliError {
    Config(String),
    Internal(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(1),
            CliError::Internal(_) => ExitCode::from(2),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Internal(m) => m,
        }
    }
}

fn config_error<T: std::fmt::Display>(e: T) -> CliError {
    CliError::Config(e.to_string())
}

fn merge_config(common: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let file: FileConfig = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("cannot parse {}: {e}", path.display())))?
        }
        None => FileConfig::default(),
    };

    let mut config = ExperimentConfig::default();

    if let Some(v) = file.sensors {
        config.geometry.sensor_count = v;
    }
    if let Some(v) = file.spacing_wavelengths {
        config.geometry.spacing_wavelengths = v;
    }
    if let Some(v) = file.angles {
        config.true_angles_deg = v;
    }
    if let Some(v) = file.snapshots {
        config.snapshot_count = v;
    }
    if let Some(v) = file.snr {
        config.snr_list_db = v;
    }
    if let Some(v) = file.trials {
        config.trial_count = v;
    }
    if let Some(v) = file.grid_step {
        config.grid_step_deg = v;
    }
    if let Some(v) = file.resolve_threshold {
        config.resolve_threshold_deg = v;
    }
    if let Some(v) = file.scan_threshold {
        config.scan_threshold_deg = v;
    }
    if let Some(v) = file.seed {
        config.master_seed = v;
    }
    if let Some(v) = &file.algorithms {
        config.algorithms = parse_algorithms(v)?;
    }

    if let Some(v) = common.sensors {
        config.geometry.sensor_count = v;
    }
    if let Some(v) = common.spacing_wavelengths {
        config.geometry.spacing_wavelengths = v;
    }
    if let Some(v) = &common.angles {
        config.true_angles_deg = v.clone();
    }
    if let Some(v) = common.snapshots {
        config.snapshot_count = v;
    }
    if let Some(v) = &common.snr {
        config.snr_list_db = v.clone();
    }
    if let Some(v) = common.trials {
        config.trial_count = v;
    }
    if let Some(v) = common.grid_step {
        config.grid_step_deg = v;
    }
    if let Some(v) = common.resolve_threshold {
        config.resolve_threshold_deg = v;
    }
    if let Some(v) = common.scan_threshold {
        config.scan_threshold_deg = v;
    }
    if let Some(v) = common.seed {
        config.master_seed = v;
    }
    if let Some(v) = &common.algorithms {
        config.algorithms = parse_algorithms(v)?;
    }

    if let Some(d) = common.sources.or(file.sources) {
        if d != config.true_angles_deg.len() {
            return Err(CliError::Config(format!(
                "sources = {d} does not match the {} configured angles",
                config.true_angles_deg.len()
            )));
        }
    }

    config.validate().map_err(config_error)?;
    Ok(config)
}

fn parse_algorithms(names: &[String]) -> Result<Vec<Algorithm>, CliError> {
    names
        .iter()
        .map(|n| Algorithm::from_str(n).map_err(config_error))
        .collect()
}

fn write_output(
    path: &PathBuf,
    format: OutputFormat,
    csv: String,
    json: String,
) -> Result<(), CliError> {
    let body = match format {
        OutputFormat::Csv => csv,
        OutputFormat::Json => json,
    };
    std::fs::write(path, body)
        .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))
}

fn summary_grid(report: &ExperimentReport) -> String {
    let snrs = &report.config.snr_list_db;
    let mut out = String::new();
    let header = |title: &str, out: &mut String| {
        let _ = writeln!(out, "{title}");
        let _ = write!(out, "{:<26}", "algorithm");
        for snr in snrs {
            let _ = write!(out, "{:>10}", format!("{snr} dB"));
        }
        let _ = writeln!(out);
    };

    header(
        &format!(
            "unresolved failures (of {} trials, threshold {} deg)",
            report.config.trial_count, report.config.resolve_threshold_deg
        ),
        &mut out,
    );
    for &algorithm in &report.config.algorithms {
        let _ = write!(out, "{:<26}", algorithm.to_string());
        for &snr in snrs {
            let cell = report
                .cells
                .iter()
                .find(|c| c.algorithm == algorithm && c.snr_db == snr)
                .expect("cell exists");
            let _ = write!(out, "{:>10}", cell.unresolved);
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out);
    header("resolved-only RMSE (deg)", &mut out);
    for &algorithm in &report.config.algorithms {
        let _ = write!(out, "{:<26}", algorithm.to_string());
        for &snr in snrs {
            let cell = report
                .cells
                .iter()
                .find(|c| c.algorithm == algorithm && c.snr_db == snr)
                .expect("cell exists");
            match cell.rmse_resolved_deg {
                Some(v) => {
                    let _ = write!(out, "{:>10.4}", v);
                }
                None => {
                    let _ = write!(out, "{:>10}", "-");
                }
            }
        }
        let _ = writeln!(out);
    }

    let _ = writeln!(out);
    header("mean estimation time (us)", &mut out);
    for &algorithm in &report.config.algorithms {
        let _ = write!(out, "{:<26}", algorithm.to_string());
        for &snr in snrs {
            let cell = report
                .cells
                .iter()
                .find(|c| c.algorithm == algorithm && c.snr_db == snr)
                .expect("cell exists");
            let _ = write!(out, "{:>10.1}", cell.mean_time_us);
        }
        let _ = writeln!(out);
    }
    out
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let config = merge_config(&args.common)?;
    let report = run_experiment(&config).map_err(config_error)?;
    print!("{}", summary_grid(&report));
    if let Some(path) = &args.common.output {
        write_output(path, args.common.format, report.to_csv(), report.to_json())?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    let config = merge_config(&args.common)?;
    let report: ThresholdSweepReport =
        threshold_sweep(&config, &args.thresholds).map_err(config_error)?;

    println!(
        "unresolved failures (of {} trials) per scan threshold",
        config.trial_count
    );
    print!("{:<16}", "threshold (deg)");
    for snr in &config.snr_list_db {
        print!("{:>10}", format!("{snr} dB"));
    }
    println!();
    for &threshold in &args.thresholds {
        print!("{:<16}", threshold);
        for &snr in &config.snr_list_db {
            let row = report
                .rows
                .iter()
                .find(|r| r.scan_threshold_deg == threshold && r.snr_db == snr)
                .expect("sweep row exists");
            print!("{:>10}", row.unresolved);
        }
        println!();
    }

    if let Some(path) = &args.common.output {
        write_output(path, args.common.format, report.to_csv(), report.to_json())?;
        println!("sweep written to {}", path.display());
    }
    Ok(())
}

fn cmd_single(args: &SingleArgs) -> Result<(), CliError> {
    let config = merge_config(&args.common)?;
    let algorithm = Algorithm::from_str(&args.algorithm).map_err(config_error)?;
    let snr_db = config.snr_list_db[0];
    let scenario = Scenario {
        geometry: config.geometry.clone(),
        true_angles_deg: config.true_angles_deg.clone(),
        snr_db,
        snapshot_count: config.snapshot_count,
        seed: config.master_seed,
    };
    let snapshots = simulate_snapshots(&scenario).map_err(config_error)?;
    let covariance = sample_covariance(&snapshots);
    let options = EstimatorOptions {
        grid_step_deg: config.grid_step_deg,
        scan_threshold_deg: config.scan_threshold_deg,
        scan_step_deg: config.grid_step_deg,
    };

    println!("algorithm: {algorithm}");
    println!(
        "scenario: M={} d/lambda={} N={} SNR={} dB seed={}",
        config.geometry.sensor_count,
        config.geometry.spacing_wavelengths,
        config.snapshot_count,
        snr_db,
        config.master_seed
    );
    let fmt_list = |values: &[f64]| -> String {
        values
            .iter()
            .map(|v| format!("{v:9.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!("truth (deg):    {}", fmt_list(&config.true_angles_deg));

    match estimate(
        algorithm,
        &covariance,
        &config.geometry,
        config.true_angles_deg.len(),
        &options,
    ) {
        Ok(est) => {
            let errors = match_estimates(&config.true_angles_deg, &est)
                .expect("estimate length matches truth");
            println!("estimate (deg): {}", fmt_list(&est.angles_deg));
            println!("error (deg):    {}", fmt_list(&errors));
            let label = match algorithm {
                Algorithm::Propagator | Algorithm::Music => "peak heights",
                _ => "root magnitudes",
            };
            println!("{label}:  {}", fmt_list(&est.diagnostics));
            if est.degenerate {
                println!("note: degenerate estimate (peak padding or clamped root)");
            }
        }
        Err(e) => println!("estimation failed: {e}"),
    }
    Ok(())
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), CliError> {
    let config = merge_config(&args.common)?;
    let checks = run_noiseless_validation(
        &config.geometry,
        &config.geometry,
        &config.true_angles_deg,
        config.grid_step_deg,
    )
    .map_err(config_error)?;

    let mut failures = 0;
    for check in &checks {
        let status = if check.passed { "PASS" } else { "FAIL" };
        println!("{status} {:<34} {}", check.name, check.detail);
        if !check.passed {
            failures += 1;
        }
    }
    if failures > 0 {
        return Err(CliError::Internal(format!(
            "{failures} of {} validation checks failed",
            checks.len()
        )));
    }
    println!("all {} checks passed", checks.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Single(args) => cmd_single(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {}", err.message());
            err.exit_code()
        }
    }
}
