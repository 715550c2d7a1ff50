//! Experiment configuration: a single TOML file with a closed key set.

use std::collections::BTreeSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use boussinesq_core::nonlinear::{NonlinearKind, SourceConvention};
use boussinesq_core::symbols::ModelParams;

/// A configuration problem, located as precisely as the source allows.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}{field}: {message}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl ConfigError {
    fn new(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self { line: None, field: field.into(), message: message.into() }
    }

    fn at(mut self, source: &str) -> Self {
        if self.line.is_none() {
            self.line = locate(source, &self.field);
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Quadratic,
    Cubic,
    None,
}

impl From<FunctionKind> for NonlinearKind {
    fn from(k: FunctionKind) -> Self {
        match k {
            FunctionKind::Quadratic => NonlinearKind::Quadratic,
            FunctionKind::Cubic => NonlinearKind::Cubic,
            FunctionKind::None => NonlinearKind::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    #[default]
    Standard,
    Swapped,
    NegativeBeta,
}

impl From<Convention> for SourceConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Standard => SourceConvention::Standard,
            Convention::Swapped => SourceConvention::SwappedArguments,
            Convention::NegativeBeta => SourceConvention::NegativeBeta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub alpha: f64,
    pub beta: f64,
    pub f_kind: FunctionKind,
    pub g_kind: FunctionKind,
    #[serde(default)]
    pub convention: Convention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscretizationSection {
    pub n: usize,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "N")]
    pub points: usize,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub output_cadence: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataKind {
    #[serde(rename = "gaussian")]
    Gaussian,
    #[serde(rename = "radial_L2")]
    RadialL2,
    #[serde(rename = "custom-file")]
    CustomFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    pub kind: DataKind,
    pub amplitude: f64,
    /// Gaussian width σ, or the exponent offset ε of the `L²` profile.
    #[serde(default = "default_width")]
    pub width: f64,
    /// CSV with columns `u0,u1`, one row per grid point in row-major order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
}

fn default_width() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentId {
    LinearRates,
    NonlinearRates,
    ProfileGap,
    NlVsLinearGap,
    LemmaCertify,
    OracleCrosscheck,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 6] = [
        ExperimentId::LinearRates,
        ExperimentId::NonlinearRates,
        ExperimentId::ProfileGap,
        ExperimentId::NlVsLinearGap,
        ExperimentId::LemmaCertify,
        ExperimentId::OracleCrosscheck,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentId::LinearRates => "linear_rates",
            ExperimentId::NonlinearRates => "nonlinear_rates",
            ExperimentId::ProfileGap => "profile_gap",
            ExperimentId::NlVsLinearGap => "nl_vs_linear_gap",
            ExperimentId::LemmaCertify => "lemma_certify",
            ExperimentId::OracleCrosscheck => "oracle_crosscheck",
        }
    }

    /// Result of the analysis that the experiment checks.
    pub fn verifies(self) -> &'static str {
        match self {
            ExperimentId::LinearRates => "Theorem 3.1 (Eq. 43)",
            ExperimentId::NonlinearRates => "Theorem 3.1 (Eq. 44)",
            ExperimentId::ProfileGap => "§4 Theorem (Eq. 61)",
            ExperimentId::NlVsLinearGap => "Lemma 3.2 (Eq. 410)",
            ExperimentId::LemmaCertify => "Lemma 2.2 (Eqs. 37-38)",
            ExperimentId::OracleCrosscheck => "solver consistency",
        }
    }

    /// Experiments evaluated on continuum radial data rather than the box.
    pub fn is_radial(self) -> bool {
        matches!(self, ExperimentId::LinearRates | ExperimentId::ProfileGap)
    }

    pub fn uses_box(self) -> bool {
        matches!(
            self,
            ExperimentId::NonlinearRates | ExperimentId::NlVsLinearGap | ExperimentId::OracleCrosscheck
        )
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ExperimentId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| format!("unknown experiment '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub ids: Vec<ExperimentId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisSection {
    #[serde(default = "default_k_list")]
    pub k_list: Vec<u32>,
    #[serde(default = "default_fit_window")]
    pub fit_window: [f64; 2],
    /// Smallest acceptable certified rate.
    #[serde(default = "default_c_floor")]
    pub c_floor: f64,
    /// Sample count of radial series.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_k_list() -> Vec<u32> {
    vec![0, 1, 2]
}

fn default_fit_window() -> [f64; 2] {
    [1e2, 1e4]
}

fn default_c_floor() -> f64 {
    0.1
}

fn default_samples() -> usize {
    30
}

impl Default for AnalysisSection {
    fn default() -> Self {
        Self {
            k_list: default_k_list(),
            fit_window: default_fit_window(),
            c_floor: default_c_floor(),
            samples: default_samples(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    pub model: ModelSection,
    pub discretization: DiscretizationSection,
    pub data: DataSection,
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub analysis: AnalysisSection,
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// 1-based line of `section.key` in a TOML source, if it appears literally.
pub fn locate(source: &str, field: &str) -> Option<usize> {
    let (section, key) = match field.split_once('.') {
        Some((s, k)) => (s, k),
        None => ("", field),
    };
    let mut current = String::new();
    let mut header_line = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            if current == section {
                header_line = Some(i + 1);
            }
            continue;
        }
        if current != section {
            continue;
        }
        if let Some((lhs, _)) = line.split_once('=') {
            if lhs.trim().trim_matches('"') == key {
                return Some(i + 1);
            }
        }
    }
    header_line
}

fn whole_ratio(total: f64, unit: f64) -> bool {
    let r = total / unit;
    r.round() >= 1.0 && (r - r.round()).abs() <= 1e-9 * r.round()
}

impl ExperimentConfig {
    /// Parses and validates a TOML document.
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(source).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(source, s.start));
            ConfigError { line, field: "config".into(), message: e.message().trim().to_string() }
        })?;
        config.validate().map_err(|e| e.at(source))?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConfigError> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::new("config", format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&source)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration serialises")
    }

    pub fn params(&self) -> ModelParams {
        ModelParams::new(self.model.alpha, self.model.beta).expect("validated parameters")
    }

    pub fn fit_window(&self) -> (f64, f64) {
        (self.analysis.fit_window[0], self.analysis.fit_window[1])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let m = &self.model;
        if !(m.alpha.is_finite() && m.alpha <= -1.0) {
            return Err(ConfigError::new("model.alpha", format!("{} must be finite and <= -1", m.alpha)));
        }
        if !(m.beta.is_finite() && m.beta > 0.0) {
            return Err(ConfigError::new("model.beta", format!("{} must be finite and positive", m.beta)));
        }

        let d = &self.discretization;
        if !(1..=3).contains(&d.n) {
            return Err(ConfigError::new("discretization.n", format!("dimension {} must be 1, 2 or 3", d.n)));
        }
        if !(d.length.is_finite() && d.length > 0.0) {
            return Err(ConfigError::new("discretization.L", format!("{} must be positive", d.length)));
        }
        if d.points < 8 || !d.points.is_multiple_of(2) {
            return Err(ConfigError::new("discretization.N", format!("{} must be even and at least 8", d.points)));
        }
        if !(d.dt.is_finite() && d.dt > 0.0) {
            return Err(ConfigError::new("discretization.dt", format!("{} must be positive", d.dt)));
        }
        if !(d.t_final.is_finite() && d.t_final > 0.0) {
            return Err(ConfigError::new("discretization.T", format!("{} must be positive", d.t_final)));
        }
        if !(d.output_cadence.is_finite() && d.output_cadence > 0.0 && whole_ratio(d.output_cadence, d.dt)) {
            return Err(ConfigError::new(
                "discretization.output_cadence",
                format!("{} must be a whole multiple of dt = {}", d.output_cadence, d.dt),
            ));
        }
        if !whole_ratio(d.t_final, d.output_cadence) {
            return Err(ConfigError::new(
                "discretization.T",
                format!("{} must be a whole multiple of the output cadence {}", d.t_final, d.output_cadence),
            ));
        }

        let data = &self.data;
        if !(data.amplitude.is_finite() && data.amplitude >= 0.0) {
            return Err(ConfigError::new("data.amplitude", format!("{} must be finite and nonnegative", data.amplitude)));
        }
        match data.kind {
            DataKind::Gaussian if !(data.width.is_finite() && data.width > 0.0) => {
                return Err(ConfigError::new("data.width", format!("Gaussian width {} must be positive", data.width)));
            }
            DataKind::RadialL2 if !(data.width > 0.0 && data.width < d.n as f64) => {
                return Err(ConfigError::new(
                    "data.width",
                    format!("exponent offset {} must lie in (0, {})", data.width, d.n),
                ));
            }
            DataKind::CustomFile if data.path.is_none() => {
                return Err(ConfigError::new("data.path", "custom-file data needs a path"));
            }
            _ => {}
        }

        let ids = &self.experiment.ids;
        if ids.is_empty() {
            return Err(ConfigError::new("experiment.ids", "no experiments selected"));
        }
        if ids.iter().collect::<BTreeSet<_>>().len() != ids.len() {
            return Err(ConfigError::new("experiment.ids", "experiments listed more than once"));
        }
        for id in ids {
            if id.is_radial() && data.kind == DataKind::CustomFile {
                return Err(ConfigError::new("data.kind", format!("{id} needs radial data (gaussian or radial_L2)")));
            }
            if id.uses_box() && data.kind == DataKind::RadialL2 {
                return Err(ConfigError::new("data.kind", format!("{id} runs on the box and cannot use radial_L2 data")));
            }
        }

        let a = &self.analysis;
        if a.k_list.is_empty() || a.k_list.len() > 8 {
            return Err(ConfigError::new("analysis.k_list", "between one and eight derivative orders are needed"));
        }
        if a.k_list.iter().any(|&k| k > 6) {
            return Err(ConfigError::new("analysis.k_list", "derivative orders above 6 are not supported"));
        }
        let [lo, hi] = a.fit_window;
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(ConfigError::new("analysis.fit_window", format!("[{lo}, {hi}] is not an increasing window")));
        }
        if ids.iter().any(|id| id.uses_box()) && lo >= d.t_final {
            return Err(ConfigError::new(
                "analysis.fit_window",
                format!("window starts at {lo}, after the horizon T = {}", d.t_final),
            ));
        }
        if ids.iter().any(|id| id.is_radial()) && lo <= 0.0 {
            return Err(ConfigError::new("analysis.fit_window", "radial series are log-spaced and need a window starting above 0"));
        }
        if ids.iter().any(|id| id.uses_box()) && (d.t_final / d.output_cadence).round() < 8.0 {
            return Err(ConfigError::new(
                "discretization.output_cadence",
                format!("{} leaves fewer than 8 recorded states before T = {}", d.output_cadence, d.t_final),
            ));
        }
        if !(a.c_floor.is_finite() && a.c_floor >= 0.0) {
            return Err(ConfigError::new("analysis.c_floor", format!("{} must be nonnegative", a.c_floor)));
        }
        if a.samples < 8 || a.samples > 10_000 {
            return Err(ConfigError::new("analysis.samples", format!("{} must lie in [8, 10000]", a.samples)));
        }
        Ok(())
    }
}
