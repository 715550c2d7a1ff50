//! Experiment runner for the dissipative Boussinesq solver: reads a TOML
//! configuration, runs the selected experiments and writes `report.json`,
//! per-experiment `series.csv` / `rates.csv` tables and SVG plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiments;
pub mod output;
pub mod plot;

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig, ExperimentId};
use crate::experiments::{box_data, run_experiment, ExperimentError, ExperimentResult};
use crate::output::{read_series, write_plots, write_rates, write_series, RATES_FILE, REPORT_FILE, SERIES_FILE};

/// Default output directory when `--out` is absent.
pub const OUT_DIR_ENV: &str = "BOUSSINESQ_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "boussinesq-out";

/// JSON schema that every `report.json` satisfies.
pub const REPORT_SCHEMA: &str = include_str!("../schema/report.schema.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Passed = 0,
    VerdictsFailed = 1,
    InvalidConfig = 2,
    BlowUp = 3,
    RuntimeError = 4,
}

impl ExitStatus {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Config { path: PathBuf, source: ConfigError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("cannot build thread pool: {0}")]
    Threads(String),
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Config { .. } => ExitStatus::InvalidConfig,
            _ => ExitStatus::RuntimeError,
        }
    }

    fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io { path: path.to_path_buf(), source }
    }

    fn csv(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
        move |source| CliError::Csv { path: path.to_path_buf(), source }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    BlowUp,
    Numerical,
}

/// An experiment that stopped before producing results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunFailure {
    pub experiment: ExperimentId,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool_version: String,
    pub config: ExperimentConfig,
    pub experiments: Vec<ExperimentResult>,
    pub failures: Vec<RunFailure>,
    pub passed: bool,
    pub wall_clock_s: f64,
}

impl RunReport {
    pub fn exit_status(&self) -> ExitStatus {
        if self.failures.iter().any(|f| f.kind == FailureKind::BlowUp) {
            ExitStatus::BlowUp
        } else if !self.failures.is_empty() {
            ExitStatus::RuntimeError
        } else if self.passed {
            ExitStatus::Passed
        } else {
            ExitStatus::VerdictsFailed
        }
    }
}

/// `id → result` lines, one per experiment.
pub fn list_experiments() -> String {
    ExperimentId::ALL
        .iter()
        .map(|id| format!("{} → {}\n", id.as_str(), id.verifies()))
        .collect()
}

fn write_experiment(dir: &Path, result: &ExperimentResult) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    let series_path = dir.join(SERIES_FILE);
    let file = File::create(&series_path).map_err(CliError::io(&series_path))?;
    write_series(BufWriter::new(file), &result.series).map_err(CliError::csv(&series_path))?;
    let rates_path = dir.join(RATES_FILE);
    let file = File::create(&rates_path).map_err(CliError::io(&rates_path))?;
    write_rates(BufWriter::new(file), &result.fits).map_err(CliError::csv(&rates_path))?;
    write_plots(dir, &result.series).map_err(CliError::io(dir))?;
    Ok(())
}

/// Runs every experiment of the configuration at `config_path`, writing
/// results under `out_dir`.
pub fn run(config_path: &Path, out_dir: &Path, threads: Option<usize>) -> Result<RunReport, CliError> {
    let start = Instant::now();
    let config = ExperimentConfig::from_path(config_path)
        .map_err(|source| CliError::Config { path: config_path.to_path_buf(), source })?;
    let base_dir = config_path.parent().unwrap_or(Path::new("."));
    let data = if config.experiment.ids.iter().any(|id| id.uses_box()) {
        Some(box_data(&config, base_dir).map_err(|source| CliError::Config { path: config_path.to_path_buf(), source })?)
    } else {
        None
    };
    fs::create_dir_all(out_dir).map_err(CliError::io(out_dir))?;

    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = threads {
        builder = builder.num_threads(k);
    }
    let pool = builder.build().map_err(|e| CliError::Threads(e.to_string()))?;
    let outcomes: Vec<(ExperimentId, Result<ExperimentResult, ExperimentError>)> = pool.install(|| {
        config
            .experiment
            .ids
            .par_iter()
            .map(|&id| (id, run_experiment(id, &config, data.as_ref())))
            .collect()
    });

    let mut experiments = Vec::new();
    let mut failures = Vec::new();
    for (id, outcome) in outcomes {
        match outcome {
            Ok(result) => {
                write_experiment(&out_dir.join(id.as_str()), &result)?;
                experiments.push(result);
            }
            Err(e) => {
                let kind = match e {
                    ExperimentError::BlowUp { .. } => FailureKind::BlowUp,
                    ExperimentError::Numerical(_) => FailureKind::Numerical,
                };
                log::error!("{id}: {e}");
                failures.push(RunFailure { experiment: id, kind, message: e.to_string() });
            }
        }
    }
    let passed = failures.is_empty() && experiments.iter().all(ExperimentResult::passed);
    let report = RunReport {
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        config,
        experiments,
        failures,
        passed,
        wall_clock_s: start.elapsed().as_secs_f64(),
    };
    let report_path = out_dir.join(REPORT_FILE);
    let json = serde_json::to_string_pretty(&report).expect("report serialises");
    fs::write(&report_path, json + "\n").map_err(CliError::io(&report_path))?;
    Ok(report)
}

fn find_report(series_path: &Path) -> Option<RunReport> {
    let dir = series_path.parent()?;
    [dir.join(REPORT_FILE), dir.parent()?.join(REPORT_FILE)]
        .iter()
        .find_map(|p| serde_json::from_str(&fs::read_to_string(p).ok()?).ok())
}

/// Regenerates the SVG plots of a `series.csv` next to it. Guide lines are
/// taken from a `report.json` in the same or the parent directory, if any.
pub fn replot(series_path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let file = File::open(series_path).map_err(CliError::io(series_path))?;
    let mut series = read_series(file).map_err(CliError::csv(series_path))?;
    if let Some(report) = find_report(series_path) {
        let known: Vec<_> = report.experiments.iter().flat_map(|e| &e.series).collect();
        for s in &mut series {
            s.theory_slope = known
                .iter()
                .find(|r| r.experiment_id == s.experiment_id && r.norm_kind == s.norm_kind && r.k == s.k)
                .and_then(|r| r.theory_slope);
        }
    }
    let dir = series_path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    write_plots(dir, &series).map_err(CliError::io(dir))
}
