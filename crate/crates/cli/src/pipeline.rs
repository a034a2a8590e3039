//! One forecasting run: ingest, optional order selection, final fit on the
//! full panel, forecast and report assembly.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use seds_forecast_core::arima::{fit_arima, forecast_arima, ArimaSpec, FitOptions};
use seds_forecast_core::arimax::{auto_scenario_with, fit_arimax, forecast_arimax, ExogMatrix};
use seds_forecast_core::forecast::Forecast;
use seds_forecast_core::holt::{fit_holt, forecast_holt, PhiMode, DEFAULT_PHI};
use seds_forecast_core::ingest::{
    build_panel, exclude_years, parse_seds_file, read_side_file, read_year_table_file,
    ColumnSource, Conversion, MsnTable, Panel, PanelSources, SedsRecord, SeriesRef,
};
use seds_forecast_core::optim::OptimizerOptions;
use seds_forecast_core::selection::{
    backtest_select, holdout_split, mse, order_grid, select_d, ExogSet, SelectionOptions,
};
use seds_forecast_core::{ArimaFitF64, ArimaxFitF64, HoltFitF64, TimeSeriesF64};

use crate::config::{Family, RunConfig, SpecChoice};
use crate::error::{CliError, Result};
use crate::report::{
    finite, forecast_csv, write_file, BacktestRow, BacktestSummary, ColumnProvenance,
    ForecastReport, ForecastTable, History, HoltSummary, ModelSummary, NamedValue, Provenance,
    ScenarioProvenance, SpecSummary, TOOL_NAME, TOOL_VERSION,
};
use crate::svg::{render_forecast_svg, SvgStyle};

pub const REPORT_FILE: &str = "report.json";
pub const CSV_FILE: &str = "forecast.csv";
pub const SVG_FILE: &str = "forecast.svg";

/// Parsed input files, shared across runs that read the same data.
#[derive(Debug, Clone)]
pub struct Inputs {
    pub records: Vec<SedsRecord>,
    pub table: MsnTable,
    pub side: BTreeMap<String, TimeSeriesF64>,
    pub deflator: Option<TimeSeriesF64>,
    seds_path: PathBuf,
    side_paths: BTreeMap<String, PathBuf>,
    deflator_path: Option<PathBuf>,
    msn_table_path: Option<PathBuf>,
}

impl Inputs {
    /// Side series are named after their file stem.
    pub fn load(
        seds: &Path,
        side: &[PathBuf],
        deflator: Option<&Path>,
        msn_table: Option<&Path>,
    ) -> Result<Self> {
        let records = parse_seds_file(seds)?;
        let mut table = MsnTable::bundled().clone();
        if let Some(p) = msn_table {
            table.extend_from_path(p)?;
        }
        let mut series = BTreeMap::new();
        let mut side_paths = BTreeMap::new();
        for path in side {
            let name = path
                .file_stem()
                .and_then(|s| s.to_str())
                .ok_or_else(|| {
                    CliError::Config(format!("side file {} has no usable name", path.display()))
                })?
                .to_string();
            series.insert(name.clone(), read_side_file(path, &name)?);
            side_paths.insert(name, path.clone());
        }
        let deflator_series = deflator
            .map(|p| read_side_file(p, "deflator"))
            .transpose()?;
        Ok(Self {
            records,
            table,
            side: series,
            deflator: deflator_series,
            seds_path: seds.to_path_buf(),
            side_paths,
            deflator_path: deflator.map(Path::to_path_buf),
            msn_table_path: msn_table.map(Path::to_path_buf),
        })
    }

    pub fn from_config(config: &RunConfig) -> Result<Self> {
        Self::load(
            &config.seds,
            &config.side,
            config.deflator.as_deref(),
            config.msn_table.as_deref(),
        )
    }

    fn sources(&self, state: Option<&str>) -> PanelSources<'_> {
        PanelSources {
            records: &self.records,
            table: &self.table,
            side: self.side.clone(),
            deflator: self.deflator.clone(),
            inflation_adjust: self.deflator.is_some(),
            state: state.map(str::to_string),
        }
    }

    /// Files that fed the given panel columns.
    fn files_for(&self, refs: &[&SeriesRef], columns: &[&ColumnSource]) -> Vec<String> {
        let mut files = vec![self.seds_path.display().to_string()];
        if let Some(p) = &self.msn_table_path {
            files.push(p.display().to_string());
        }
        for r in refs {
            match r {
                SeriesRef::Side(name) => {
                    if let Some(p) = self.side_paths.get(name) {
                        files.push(p.display().to_string());
                    }
                }
                SeriesRef::File { path, .. } => files.push(path.display().to_string()),
                SeriesRef::Msn(_) => {}
            }
        }
        if columns.iter().any(|c| c.conversion == Conversion::Deflated) {
            if let Some(p) = &self.deflator_path {
                files.push(p.display().to_string());
            }
        }
        files.dedup();
        files
    }
}

/// The final model, kept so callers can forecast further.
#[derive(Debug, Clone, PartialEq)]
pub enum FittedModel {
    Arima(ArimaFitF64),
    Arimax {
        fit: ArimaxFitF64,
        exog: ExogMatrix<f64>,
    },
    Holt(HoltFitF64),
}

impl FittedModel {
    /// Forecast with damped-trend exogenous paths where a scenario is needed.
    pub fn forecast_auto(
        &self,
        horizon: usize,
        level: f64,
        options: &OptimizerOptions,
    ) -> Result<Forecast<f64>> {
        Ok(match self {
            FittedModel::Arima(f) => forecast_arima(f, horizon, level)?,
            FittedModel::Arimax { fit, exog } => forecast_arimax(
                fit,
                &auto_scenario_with(exog, horizon, options)?,
                horizon,
                level,
            )?,
            FittedModel::Holt(f) => forecast_holt(f, horizon, level)?,
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub report: ForecastReport,
    pub model: FittedModel,
    pub history: TimeSeriesF64,
    pub forecast: Forecast<f64>,
}

fn conversion_tag(c: Conversion) -> &'static str {
    match c {
        Conversion::None => "none",
        Conversion::BillionToTrillionBtu => "billion_to_trillion_btu",
        Conversion::Deflated => "deflated",
    }
}

fn unit_of(c: Conversion) -> &'static str {
    match c {
        Conversion::BillionToTrillionBtu => "trillion Btu",
        Conversion::Deflated => "real dollars per million Btu",
        Conversion::None => "as supplied",
    }
}

fn column_provenance(c: &ColumnSource) -> ColumnProvenance {
    ColumnProvenance {
        label: c.label.clone(),
        origin: c.origin.clone(),
        conversion: conversion_tag(c.conversion).into(),
    }
}

fn spec_summary(s: ArimaSpec) -> SpecSummary {
    SpecSummary {
        p: s.p,
        d: s.d,
        q: s.q,
        include_constant: s.include_constant,
    }
}

/// Resolves the configured series and applies the exclusion cutoff.
pub fn load_panel(config: &RunConfig, inputs: &Inputs) -> Result<Panel> {
    let panel = build_panel(
        &inputs.sources(config.state.as_deref()),
        &config.response,
        &config.exog,
    )?;
    Ok(match config.exclude_after {
        Some(cutoff) => exclude_years(&panel, cutoff)?,
        None => panel,
    })
}

fn exog_set_label(config: &RunConfig) -> String {
    config
        .exog
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

struct Selected {
    spec: ArimaSpec,
    kpss_d: Option<usize>,
    backtest: Option<BacktestSummary>,
}

/// Picks the order (auto) or scores the pinned one on the holdout.
fn choose_spec(config: &RunConfig, panel: &Panel) -> Result<Selected> {
    let options = SelectionOptions {
        fit: FitOptions::with_seed(config.seed),
        exog_lag: config.exog_lag,
    };
    let sets = match config.family {
        Family::Arimax => vec![ExogSet::new(exog_set_label(config), panel.exog.clone())],
        _ => vec![ExogSet::none()],
    };
    match config.spec {
        SpecChoice::Auto => {
            let d = select_d(&panel.response, 2)?;
            let specs = order_grid(d, config.max_p, config.max_q)?;
            let report = backtest_select(&panel.response, &sets, &specs, config.holdout, &options)?;
            Ok(Selected {
                spec: report.winner.spec,
                kpss_d: Some(d),
                backtest: Some(BacktestSummary::from_report(&report)),
            })
        }
        SpecChoice::Fixed(spec) => {
            let backtest =
                match backtest_select(&panel.response, &sets, &[spec], config.holdout, &options) {
                    Ok(r) => BacktestSummary::from_report(&r),
                    Err(e) => BacktestSummary {
                        holdout_years: config.holdout,
                        rows: vec![BacktestRow {
                            model: spec.to_string(),
                            exog: sets[0].label.clone(),
                            n_params: spec.n_params() + panel.exog.n_columns(),
                            aicc: None,
                            mse: None,
                            failure: Some(e.to_string()),
                        }],
                        winner: None,
                    },
                };
            Ok(Selected {
                spec,
                kpss_d: None,
                backtest: Some(backtest),
            })
        }
    }
}

fn holt_label(mode: PhiMode) -> String {
    match mode {
        PhiMode::Fixed(phi) => format!("holt(phi={phi})"),
        PhiMode::Estimated => "holt(phi=estimated)".into(),
    }
}

fn holt_backtest(config: &RunConfig, series: &TimeSeriesF64) -> BacktestSummary {
    let label = holt_label(config.phi);
    let scored = holdout_split(series, config.holdout).and_then(|(train, test)| {
        let fit = fit_holt(&train, config.phi, &config.optimizer())?;
        let fc = forecast_holt(&fit, test.len(), config.level)?;
        mse(&fc.point, test.values())
    });
    let row = BacktestRow {
        model: label,
        exog: "none".into(),
        n_params: 4 + usize::from(config.phi == PhiMode::Estimated),
        aicc: None,
        mse: scored.as_ref().ok().copied(),
        failure: scored.as_ref().err().map(ToString::to_string),
    };
    BacktestSummary {
        holdout_years: config.holdout,
        winner: row.mse.is_some().then(|| row.clone()),
        rows: vec![row],
    }
}

/// Runs the pipeline without touching the file system beyond reading.
pub fn execute(config: &RunConfig, inputs: &Inputs, name: &str) -> Result<RunResult> {
    config.validate()?;
    let panel = load_panel(config, inputs)?;
    let y = &panel.response;
    let fit_options = FitOptions::with_seed(config.seed);
    let mut scenario = ScenarioProvenance {
        source: "none".into(),
        path: None,
        method: None,
    };

    let (model, forecast, summary, backtest) = match config.family {
        Family::Holt => {
            let fit = fit_holt(y, config.phi, &config.optimizer())?;
            let forecast = forecast_holt(&fit, config.horizon, config.level)?;
            let p = fit.params;
            let summary = ModelSummary {
                family: config.family.to_string(),
                response: panel.metadata.response.label.clone(),
                exog: vec![],
                selection: "fixed".into(),
                kpss_d: None,
                spec: None,
                exog_lag: 0,
                intercept: None,
                ar: vec![],
                ma: vec![],
                gamma: vec![],
                holt: Some(HoltSummary {
                    alpha: p.alpha,
                    beta_star: p.beta_star,
                    phi: p.phi,
                    phi_estimated: config.phi == PhiMode::Estimated,
                    l0: p.l0,
                    b0: p.b0,
                    sse: fit.sse,
                }),
                aicc: None,
                loglik: None,
                sigma2: fit.sigma2(),
                n_obs: fit.n,
            };
            let backtest = holt_backtest(config, y);
            (FittedModel::Holt(fit), forecast, summary, Some(backtest))
        }
        Family::Arima | Family::Arimax => {
            let selected = choose_spec(config, &panel)?;
            let (model, forecast) = if config.family == Family::Arima {
                let fit = fit_arima(y, selected.spec, &fit_options)?;
                let fc = forecast_arima(&fit, config.horizon, config.level)?;
                (FittedModel::Arima(fit), fc)
            } else {
                let fit = fit_arimax(y, &panel.exog, selected.spec, config.exog_lag, &fit_options)?;
                let future = match &config.scenario {
                    Some(path) => {
                        scenario.source = "file".into();
                        scenario.path = Some(path.display().to_string());
                        ExogMatrix::new(read_year_table_file(path)?)?
                    }
                    None => {
                        scenario.source = "auto".into();
                        scenario.method =
                            Some(format!("damped trend, phi {DEFAULT_PHI}, per column"));
                        auto_scenario_with(&panel.exog, config.horizon, &config.optimizer())?
                    }
                };
                let fc = forecast_arimax(&fit, &future, config.horizon, config.level)?;
                (
                    FittedModel::Arimax {
                        fit,
                        exog: panel.exog.clone(),
                    },
                    fc,
                )
            };
            let (arima, gamma, aicc) = match &model {
                FittedModel::Arima(f) => (f, vec![], f.aicc()),
                FittedModel::Arimax { fit, .. } => (
                    &fit.arima,
                    fit.exog_names
                        .iter()
                        .zip(&fit.gamma)
                        .map(|(n, &g)| NamedValue {
                            name: n.clone(),
                            value: g,
                        })
                        .collect(),
                    fit.aicc(),
                ),
                FittedModel::Holt(_) => unreachable!("holt handled above"),
            };
            let summary = ModelSummary {
                family: config.family.to_string(),
                response: panel.metadata.response.label.clone(),
                exog: panel.exog.names(),
                selection: match config.spec {
                    SpecChoice::Auto => "auto".into(),
                    SpecChoice::Fixed(_) => "fixed".into(),
                },
                kpss_d: selected.kpss_d,
                spec: Some(spec_summary(selected.spec)),
                exog_lag: config.exog_lag,
                intercept: selected.spec.include_constant.then_some(arima.intercept),
                ar: arima.ar_coeffs.clone(),
                ma: arima.ma_coeffs.clone(),
                gamma,
                holt: None,
                aicc: finite(aicc),
                loglik: finite(arima.loglik),
                sigma2: arima.sigma2,
                n_obs: arima.n_effective,
            };
            (model, forecast, summary, selected.backtest)
        }
    };

    let mut refs: Vec<&SeriesRef> = vec![&config.response];
    refs.extend(&config.exog);
    let mut columns = vec![&panel.metadata.response];
    columns.extend(&panel.metadata.exog);
    let mut data_files = inputs.files_for(&refs, &columns);
    if let Some(p) = &scenario.path {
        data_files.push(p.clone());
    }
    let provenance = Provenance {
        tool: TOOL_NAME.into(),
        tool_version: TOOL_VERSION.into(),
        data_files,
        state: config
            .state
            .clone()
            .or_else(|| inputs.records.first().map(|r| r.state.clone())),
        response: column_provenance(&panel.metadata.response),
        exog: panel.metadata.exog.iter().map(column_provenance).collect(),
        scenario,
        excluded_after: panel.metadata.excluded_after,
        training_years: [panel.start_year(), panel.end_year()],
        inflation_adjusted: panel.metadata.inflation_adjusted,
        seed: config.seed,
    };
    let report = ForecastReport {
        name: name.to_string(),
        model: summary,
        backtest,
        forecast: ForecastTable::from_forecast(
            &forecast,
            unit_of(panel.metadata.response.conversion),
        ),
        history: History::from_series(y),
        provenance,
    };
    Ok(RunResult {
        report,
        model,
        history: y.clone(),
        forecast,
    })
}

pub fn chart_style(report: &ForecastReport) -> SvgStyle {
    let model = match &report.model.spec {
        Some(s) => format!(
            "{} ({},{},{})",
            report.model.family.to_uppercase(),
            s.p,
            s.d,
            s.q
        ),
        None => "damped trend".into(),
    };
    SvgStyle {
        title: format!("{}: {} {model}", report.name, report.model.response),
        y_label: report.forecast.unit.clone(),
        ..SvgStyle::default()
    }
}

/// Writes `report.json`, `forecast.csv` and `forecast.svg` into `dir`.
pub fn write_outputs(result: &RunResult, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::write(dir, e))?;
    write_file(&dir.join(REPORT_FILE), &result.report.to_json())?;
    write_file(&dir.join(CSV_FILE), &forecast_csv(&result.forecast))?;
    let svg = render_forecast_svg(
        &result.history,
        &result.forecast,
        &chart_style(&result.report),
    )?;
    write_file(&dir.join(SVG_FILE), &svg)
}

/// Loads inputs, runs the pipeline and writes the three output files.
pub fn run_config(config: &RunConfig) -> Result<RunResult> {
    let inputs = Inputs::from_config(config)?;
    let result = execute(config, &inputs, &config.response.to_string())?;
    write_outputs(&result, &config.out)?;
    Ok(result)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridRow {
    pub model: String,
    pub exog: Option<String>,
    pub aicc: Option<f64>,
    pub n_params: usize,
    pub fit_ok: bool,
    pub failure: Option<String>,
}

/// Output of the `select` subcommand.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SelectionReport {
    pub response: String,
    pub exog: Vec<String>,
    pub kpss_d: usize,
    pub training_years: [i32; 2],
    /// Training-window AICc, best first.
    pub grid: Vec<GridRow>,
    pub backtest: BacktestSummary,
    pub seed: u64,
}

/// KPSS differencing choice, AICc grid and holdout backtest, whatever the
/// configured spec.
pub fn select_orders(config: &RunConfig, inputs: &Inputs) -> Result<SelectionReport> {
    if config.family == Family::Holt {
        return Err(CliError::Config(
            "order selection applies to arima and arimax".into(),
        ));
    }
    let panel = load_panel(config, inputs)?;
    let options = SelectionOptions {
        fit: FitOptions::with_seed(config.seed),
        exog_lag: config.exog_lag,
    };
    let sets = match config.family {
        Family::Arimax => vec![ExogSet::new(exog_set_label(config), panel.exog.clone())],
        _ => vec![ExogSet::none()],
    };
    let d = select_d(&panel.response, 2)?;
    let specs = order_grid(d, config.max_p, config.max_q)?;
    let report = backtest_select(&panel.response, &sets, &specs, config.holdout, &options)?;
    Ok(SelectionReport {
        response: panel.metadata.response.label.clone(),
        exog: panel.exog.names(),
        kpss_d: d,
        training_years: [panel.start_year(), panel.end_year()],
        grid: report
            .candidates
            .iter()
            .map(|c| GridRow {
                model: c.spec.to_string(),
                exog: c.exog_label.clone(),
                aicc: finite(c.aicc),
                n_params: c.n_params,
                fit_ok: c.fit_ok,
                failure: c.failure_reason.clone(),
            })
            .collect(),
        backtest: BacktestSummary::from_report(&report),
        seed: config.seed,
    })
}
