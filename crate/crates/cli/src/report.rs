//! `report.json` and `forecast.csv`.
//!
//! Reports carry no timestamps or host details, so a fixed seed and fixed
//! inputs reproduce them byte for byte.

use std::fmt::Write as _;
use std::path::Path;

use seds_forecast_core::forecast::Forecast;
use seds_forecast_core::selection::{BacktestEntry, BacktestReport};
use seds_forecast_core::TimeSeriesF64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const TOOL_NAME: &str = "seds-forecast";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CSV_HEADER: &str = "year,point,lower,upper";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastReport {
    pub name: String,
    pub model: ModelSummary,
    pub backtest: Option<BacktestSummary>,
    pub forecast: ForecastTable,
    pub history: History,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecSummary {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub include_constant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HoltSummary {
    pub alpha: f64,
    pub beta_star: f64,
    pub phi: f64,
    pub phi_estimated: bool,
    pub l0: f64,
    pub b0: f64,
    pub sse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub family: String,
    pub response: String,
    pub exog: Vec<String>,
    /// `auto` or `fixed`.
    pub selection: String,
    /// Differencing order chosen by the KPSS sequence when selecting.
    pub kpss_d: Option<usize>,
    pub spec: Option<SpecSummary>,
    pub exog_lag: usize,
    pub intercept: Option<f64>,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub gamma: Vec<NamedValue>,
    pub holt: Option<HoltSummary>,
    pub aicc: Option<f64>,
    pub loglik: Option<f64>,
    pub sigma2: f64,
    pub n_obs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    pub model: String,
    pub exog: String,
    pub n_params: usize,
    pub aicc: Option<f64>,
    pub mse: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestSummary {
    pub holdout_years: usize,
    pub rows: Vec<BacktestRow>,
    pub winner: Option<BacktestRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastRow {
    pub year: i32,
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastTable {
    pub level: f64,
    pub unit: String,
    pub rows: Vec<ForecastRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub start_year: i32,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnProvenance {
    pub label: String,
    pub origin: String,
    pub conversion: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioProvenance {
    /// `auto`, `file` or `none`.
    pub source: String,
    pub path: Option<String>,
    pub method: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub tool_version: String,
    pub data_files: Vec<String>,
    pub state: Option<String>,
    pub response: ColumnProvenance,
    pub exog: Vec<ColumnProvenance>,
    pub scenario: ScenarioProvenance,
    pub excluded_after: Option<i32>,
    pub training_years: [i32; 2],
    pub inflation_adjusted: bool,
    pub seed: u64,
}

pub(crate) fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

impl BacktestRow {
    pub fn from_entry(e: &BacktestEntry) -> Self {
        Self {
            model: e.spec.to_string(),
            exog: e.exog_label.clone(),
            n_params: e.n_params,
            aicc: finite(e.aicc),
            mse: e.mse,
            failure: e.failure_reason.clone(),
        }
    }
}

impl BacktestSummary {
    pub fn from_report(r: &BacktestReport) -> Self {
        Self {
            holdout_years: r.holdout_years,
            rows: r
                .per_candidate_mse
                .iter()
                .map(BacktestRow::from_entry)
                .collect(),
            winner: Some(BacktestRow::from_entry(&r.winner)),
        }
    }
}

impl ForecastTable {
    pub fn from_forecast(f: &Forecast<f64>, unit: impl Into<String>) -> Self {
        Self {
            level: f.level,
            unit: unit.into(),
            rows: f
                .years()
                .enumerate()
                .map(|(i, year)| ForecastRow {
                    year,
                    point: f.point[i],
                    lower: f.lower[i],
                    upper: f.upper[i],
                })
                .collect(),
        }
    }

    pub fn to_forecast(&self) -> Result<Forecast<f64>> {
        let first = self
            .rows
            .first()
            .ok_or_else(|| CliError::Usage("forecast table is empty".into()))?;
        Ok(Forecast::from_bounds(
            first.year,
            self.rows.iter().map(|r| r.point).collect(),
            self.rows.iter().map(|r| r.lower).collect(),
            self.rows.iter().map(|r| r.upper).collect(),
            self.level,
        )?)
    }
}

impl History {
    pub fn from_series(s: &TimeSeriesF64) -> Self {
        Self {
            start_year: s.start_year(),
            values: s.values().to_vec(),
        }
    }

    pub fn to_series(&self, label: &str) -> Result<TimeSeriesF64> {
        Ok(TimeSeriesF64::new(
            self.start_year,
            self.values.clone(),
            label,
        )?)
    }
}

impl ForecastReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Report {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
    }
}

/// `year,point,lower,upper`, one row per forecast year.
pub fn forecast_csv(f: &Forecast<f64>) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (i, year) in f.years().enumerate() {
        writeln!(out, "{year},{},{},{}", f.point[i], f.lower[i], f.upper[i]).expect("string write");
    }
    out
}

pub(crate) fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| CliError::write(path, e))
}
