//! The nine pinned-order sector models plus damped-trend forecasts for each
//! renewable source, run concurrently over one data directory.
//!
//! Data directory layout: `seds.csv` (required), `deflator.csv` (optional;
//! enables inflation adjustment of price columns) and one `<name>.csv`
//! `year,value` file per side series a model references, such as
//! `population.csv`. Each model writes into `<out>/<name>/`.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use seds_forecast_core::ingest::SeriesRef;
use serde::{Deserialize, Serialize};

use crate::config::{Family, PhiSetting, RunConfig, SpecChoice, DEFAULT_MAX_P, DEFAULT_MAX_Q};
use crate::error::{CliError, Result};
use crate::pipeline::{execute, write_outputs, Inputs, RunResult};
use crate::report::write_file;

pub const SEDS_FILE: &str = "seds.csv";
pub const DEFLATOR_FILE: &str = "deflator.csv";
pub const SUMMARY_FILE: &str = "suite.json";

/// The bundled suite, identical to `configs/suite.toml`.
pub const BUNDLED_SUITE_TOML: &str = include_str!("../../../configs/suite.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteModel {
    pub name: String,
    pub response: String,
    #[serde(default)]
    pub exog: Vec<String>,
    pub spec: String,
    pub exclude_after: Option<i32>,
    pub horizon: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteHolt {
    pub name: String,
    pub response: String,
    pub phi: PhiSetting,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seed: u64,
    pub holdout: usize,
    pub horizon: usize,
    pub level: f64,
    pub state: Option<String>,
    #[serde(rename = "model", default)]
    pub models: Vec<SuiteModel>,
    #[serde(rename = "holt", default)]
    pub holt: Vec<SuiteHolt>,
}

impl SuiteConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let suite: SuiteConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))?;
        let mut names: Vec<&str> = suite
            .models
            .iter()
            .map(|m| m.name.as_str())
            .chain(suite.holt.iter().map(|h| h.name.as_str()))
            .collect();
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(CliError::Config(format!(
                "suite model name {:?} used twice",
                w[0]
            )));
        }
        if let Some(bad) = names
            .iter()
            .find(|n| n.is_empty() || n.contains(['/', '\\', '.']))
        {
            return Err(CliError::Config(format!(
                "suite model name {bad:?} is not a plain directory name"
            )));
        }
        Ok(suite)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        Self::from_toml(&text)
    }

    pub fn bundled() -> Self {
        Self::from_toml(BUNDLED_SUITE_TOML).expect("bundled suite parses")
    }

    /// Side series names any model references.
    fn side_names(&self) -> Result<Vec<String>> {
        let mut names = Vec::new();
        for m in &self.models {
            for r in m.exog.iter().chain(std::iter::once(&m.response)) {
                if let SeriesRef::Side(n) = SeriesRef::parse(r)? {
                    names.push(n);
                }
            }
        }
        names.sort();
        names.dedup();
        Ok(names)
    }

    fn run_configs(&self, data_dir: &Path, out_dir: &Path) -> Result<Vec<(String, RunConfig)>> {
        let side: Vec<PathBuf> = self
            .side_names()?
            .into_iter()
            .map(|n| data_dir.join(format!("{n}.csv")))
            .filter(|p| p.is_file())
            .collect();
        let deflator = Some(data_dir.join(DEFLATOR_FILE)).filter(|p| p.is_file());
        let base = |name: &str, response: &str| -> Result<RunConfig> {
            Ok(RunConfig {
                seds: data_dir.join(SEDS_FILE),
                side: side.clone(),
                deflator: deflator.clone(),
                msn_table: None,
                state: self.state.clone(),
                scenario: None,
                family: Family::Arima,
                response: SeriesRef::parse(response)?,
                exog: vec![],
                spec: SpecChoice::Auto,
                phi: seds_forecast_core::holt::PhiMode::default_fixed(),
                exog_lag: 0,
                holdout: self.holdout,
                horizon: self.horizon,
                level: self.level,
                exclude_after: None,
                seed: self.seed,
                max_p: DEFAULT_MAX_P,
                max_q: DEFAULT_MAX_Q,
                out: out_dir.join(name),
            })
        };
        let mut jobs = Vec::new();
        for m in &self.models {
            let mut c = base(&m.name, &m.response)?;
            c.exog = m
                .exog
                .iter()
                .map(|e| SeriesRef::parse(e))
                .collect::<seds_forecast_core::Result<_>>()?;
            c.family = if c.exog.is_empty() {
                Family::Arima
            } else {
                Family::Arimax
            };
            c.spec = m.spec.parse()?;
            c.exclude_after = m.exclude_after;
            c.horizon = m.horizon.unwrap_or(self.horizon);
            jobs.push((m.name.clone(), c));
        }
        for h in &self.holt {
            let mut c = base(&h.name, &h.response)?;
            c.family = Family::Holt;
            c.phi = h.phi.to_mode()?;
            jobs.push((h.name.clone(), c));
        }
        for (_, c) in &jobs {
            c.validate()?;
        }
        Ok(jobs)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedModel {
    pub name: String,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub completed: Vec<String>,
    pub skipped: Vec<SkippedModel>,
}

#[derive(Debug)]
pub struct SuiteOutcome {
    pub summary: SuiteSummary,
    pub results: Vec<(String, RunResult)>,
}

impl SuiteOutcome {
    /// 0 when every model ran, 2 when some were skipped, 1 when none ran.
    pub fn exit_code(&self) -> u8 {
        match (
            self.summary.completed.is_empty(),
            self.summary.skipped.is_empty(),
        ) {
            (_, true) => 0,
            (true, false) => 1,
            (false, false) => 2,
        }
    }
}

/// Runs every suite model; failures skip that model only.
pub fn paper_suite(data_dir: &Path, out_dir: &Path, suite: &SuiteConfig) -> Result<SuiteOutcome> {
    let jobs = suite.run_configs(data_dir, out_dir)?;
    let first = &jobs
        .first()
        .ok_or_else(|| CliError::Config("suite defines no models".into()))?
        .1;
    let inputs = Inputs::from_config(first)?;
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::write(out_dir, e))?;

    let outcomes: Vec<(String, Result<RunResult>)> = jobs
        .par_iter()
        .map(|(name, config)| {
            let run = execute(config, &inputs, name).and_then(|r| {
                write_outputs(&r, &config.out)?;
                Ok(r)
            });
            (name.clone(), run)
        })
        .collect();

    let mut summary = SuiteSummary {
        completed: vec![],
        skipped: vec![],
    };
    let mut results = Vec::new();
    for (name, outcome) in outcomes {
        match outcome {
            Ok(r) => {
                summary.completed.push(name.clone());
                results.push((name, r));
            }
            Err(e) => summary.skipped.push(SkippedModel {
                name,
                code: e.code().into(),
                message: e.to_string(),
            }),
        }
    }
    let mut json = serde_json::to_string_pretty(&summary).expect("summary serializes");
    json.push('\n');
    write_file(&out_dir.join(SUMMARY_FILE), &json)?;
    Ok(SuiteOutcome { summary, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_suite_inventory() {
        let s = SuiteConfig::bundled();
        assert_eq!(s.models.len(), 9);
        assert_eq!(s.holt.len(), 4);
        assert!(s.holt.iter().all(|h| h.phi == PhiSetting::Value(0.95)));
        let orders: Vec<&str> = s.models.iter().map(|m| m.spec.as_str()).collect();
        assert_eq!(
            orders,
            ["2,0,0", "2,1,0", "2,1,0", "1,1,1", "2,1,2", "4,1,0", "4,1,0", "2,1,2", "2,1,2"]
        );
        assert_eq!(s.models[2].exclude_after, Some(2019));
        assert!(s.models[4].exog.is_empty());
    }

    #[test]
    fn duplicate_names_rejected() {
        let text = "seed = 1\nholdout = 10\nhorizon = 10\nlevel = 0.95\n\
                    [[model]]\nname = \"a\"\nresponse = \"TETCB\"\nspec = \"1,0,0\"\n\
                    [[holt]]\nname = \"a\"\nresponse = \"SOTCB\"\nphi = 0.95\n";
        assert!(SuiteConfig::from_toml(text)
            .unwrap_err()
            .to_string()
            .contains("twice"));
    }

    #[test]
    fn exit_codes() {
        let outcome = |c: Vec<&str>, s: usize| SuiteOutcome {
            summary: SuiteSummary {
                completed: c.into_iter().map(String::from).collect(),
                skipped: (0..s)
                    .map(|i| SkippedModel {
                        name: format!("m{i}"),
                        code: "E_MISSING_SERIES".into(),
                        message: String::new(),
                    })
                    .collect(),
            },
            results: vec![],
        };
        assert_eq!(outcome(vec!["a"], 0).exit_code(), 0);
        assert_eq!(outcome(vec!["a"], 1).exit_code(), 2);
        assert_eq!(outcome(vec![], 1).exit_code(), 1);
    }
}
