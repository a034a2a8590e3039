//! Run configuration: a flat TOML file, command-line overrides, defaults.
//!
//! Both layers deserialize into [`ConfigLayer`]; [`RunConfig::resolve`]
//! applies flags over the file over the built-in defaults and validates.
//! Relative paths are taken from the working directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use seds_forecast_core::arima::ArimaSpec;
use seds_forecast_core::holt::{PhiMode, DEFAULT_PHI};
use seds_forecast_core::ingest::SeriesRef;
use seds_forecast_core::optim::OptimizerOptions;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const DEFAULT_HOLDOUT: usize = 10;
pub const DEFAULT_HORIZON: usize = 10;
pub const DEFAULT_LEVEL: f64 = 0.95;
pub const DEFAULT_MAX_P: usize = 4;
pub const DEFAULT_MAX_Q: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Arima,
    Arimax,
    Holt,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Arima => "arima",
            Family::Arimax => "arimax",
            Family::Holt => "holt",
        })
    }
}

/// `auto` or a pinned `p,d,q` order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecChoice {
    Auto,
    Fixed(ArimaSpec),
}

impl FromStr for SpecChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            return Ok(SpecChoice::Auto);
        }
        let parts = s
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| CliError::Config(format!("spec {s:?} is not `auto` or `p,d,q`")))?;
        match parts[..] {
            [p, d, q] => Ok(SpecChoice::Fixed(ArimaSpec::new(p, d, q)?)),
            _ => Err(CliError::Config(format!(
                "spec {s:?} is not `auto` or `p,d,q`"
            ))),
        }
    }
}

/// Holt damping: a number or `estimated`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhiSetting {
    Value(f64),
    Word(String),
}

impl PhiSetting {
    pub fn to_mode(&self) -> Result<PhiMode> {
        match self {
            PhiSetting::Value(v) if *v > 0.0 && *v <= 1.0 => Ok(PhiMode::Fixed(*v)),
            PhiSetting::Value(v) => Err(CliError::Config(format!("phi {v} outside (0, 1]"))),
            PhiSetting::Word(w) if w.eq_ignore_ascii_case("estimated") => Ok(PhiMode::Estimated),
            PhiSetting::Word(w) => w
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("phi {w:?} is not a number or `estimated`")))
                .and_then(|v| PhiSetting::Value(v).to_mode()),
        }
    }
}

/// One configuration layer; every key optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigLayer {
    pub seds: Option<PathBuf>,
    pub side: Option<Vec<PathBuf>>,
    pub deflator: Option<PathBuf>,
    pub msn_table: Option<PathBuf>,
    pub state: Option<String>,
    pub scenario: Option<PathBuf>,
    pub family: Option<Family>,
    pub response: Option<String>,
    pub exog: Option<Vec<String>>,
    pub spec: Option<String>,
    pub phi: Option<PhiSetting>,
    pub exog_lag: Option<usize>,
    pub holdout: Option<usize>,
    pub horizon: Option<usize>,
    pub level: Option<f64>,
    pub exclude_after: Option<i32>,
    pub seed: Option<u64>,
    pub max_p: Option<usize>,
    pub max_q: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ConfigLayer {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
        Self::from_toml(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// `other` wins wherever it sets a key.
    pub fn overlay(self, other: ConfigLayer) -> ConfigLayer {
        macro_rules! pick {
            ($($f:ident),*) => { ConfigLayer { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            seds,
            side,
            deflator,
            msn_table,
            state,
            scenario,
            family,
            response,
            exog,
            spec,
            phi,
            exog_lag,
            holdout,
            horizon,
            level,
            exclude_after,
            seed,
            max_p,
            max_q,
            out
        )
    }
}

/// Fully resolved settings for one forecasting run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seds: PathBuf,
    pub side: Vec<PathBuf>,
    pub deflator: Option<PathBuf>,
    pub msn_table: Option<PathBuf>,
    pub state: Option<String>,
    pub scenario: Option<PathBuf>,
    pub family: Family,
    pub response: SeriesRef,
    pub exog: Vec<SeriesRef>,
    pub spec: SpecChoice,
    pub phi: PhiMode,
    pub exog_lag: usize,
    pub holdout: usize,
    pub horizon: usize,
    pub level: f64,
    pub exclude_after: Option<i32>,
    pub seed: u64,
    pub max_p: usize,
    pub max_q: usize,
    pub out: PathBuf,
}

impl RunConfig {
    /// Applies `flags` over `file` over the defaults.
    pub fn resolve(file: ConfigLayer, flags: ConfigLayer) -> Result<Self> {
        let c = file.overlay(flags);
        let seds = c
            .seds
            .ok_or_else(|| CliError::Config("no SEDS data file given (`seds`)".into()))?;
        let response =
            SeriesRef::parse(c.response.as_deref().ok_or_else(|| {
                CliError::Config("no response series given (`response`)".into())
            })?)?;
        let exog = c
            .exog
            .unwrap_or_default()
            .iter()
            .map(|e| SeriesRef::parse(e))
            .collect::<seds_forecast_core::Result<Vec<_>>>()?;
        let family = c.family.unwrap_or(if exog.is_empty() {
            Family::Arima
        } else {
            Family::Arimax
        });
        let spec = match &c.spec {
            Some(s) => s.parse()?,
            None => SpecChoice::Auto,
        };
        let phi = match &c.phi {
            Some(p) => p.to_mode()?,
            None => PhiMode::Fixed(DEFAULT_PHI),
        };
        let config = RunConfig {
            seds,
            side: c.side.unwrap_or_default(),
            deflator: c.deflator,
            msn_table: c.msn_table,
            state: c.state,
            scenario: c.scenario,
            family,
            response,
            exog,
            spec,
            phi,
            exog_lag: c.exog_lag.unwrap_or(0),
            holdout: c.holdout.unwrap_or(DEFAULT_HOLDOUT),
            horizon: c.horizon.unwrap_or(DEFAULT_HORIZON),
            level: c.level.unwrap_or(DEFAULT_LEVEL),
            exclude_after: c.exclude_after,
            seed: c.seed.unwrap_or(OptimizerOptions::default().seed),
            max_p: c.max_p.unwrap_or(DEFAULT_MAX_P),
            max_q: c.max_q.unwrap_or(DEFAULT_MAX_Q),
            out: c.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(CliError::Config("horizon must be at least 1".into()));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(CliError::Config(format!(
                "level {} outside (0, 1)",
                self.level
            )));
        }
        if self.holdout == 0 {
            return Err(CliError::Config("holdout must be at least 1 year".into()));
        }
        match self.family {
            Family::Arimax if self.exog.is_empty() => Err(CliError::Config(
                "arimax needs at least one exogenous series".into(),
            )),
            Family::Arima | Family::Holt if !self.exog.is_empty() => Err(CliError::Config(
                format!("{} takes no exogenous series", self.family),
            )),
            Family::Holt if matches!(self.spec, SpecChoice::Fixed(_)) => {
                Err(CliError::Config("holt takes no ARIMA order".into()))
            }
            _ if self.exog_lag > 0 && self.family != Family::Arimax => {
                Err(CliError::Config("exog_lag applies to arimax only".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn optimizer(&self) -> OptimizerOptions {
        OptimizerOptions {
            seed: self.seed,
            ..OptimizerOptions::default()
        }
    }
}
