//! Differencing-order choice, AICc grid search and holdout backtesting.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::arima::{fit_arima, forecast_arima, ArimaSpec, FitOptions};
use crate::arimax::{fit_arimax, forecast_arimax, ExogMatrix};
use crate::error::{Error, Result};
use crate::scalar::{count, lit, mean, to_f64, Scalar};
use crate::series::{difference, TimeSeries};

/// 5% critical value of the level-stationarity KPSS test.
pub const KPSS_CRITICAL_5PCT: f64 = 0.463;
pub const KPSS_MIN_LEN: usize = 10;
/// Observations that must remain in the training part of a holdout split.
pub const MIN_TRAIN_LEN: usize = 15;

/// Level-stationarity KPSS statistic with a Bartlett long-run variance and
/// lag truncation `⌊4 (n/100)^0.25⌋`. Returns 0 for a constant series.
pub fn kpss_statistic<T: Scalar>(series: &TimeSeries<T>) -> Result<T> {
    let n = series.len();
    if n < KPSS_MIN_LEN {
        return Err(Error::InsufficientData {
            what: "KPSS statistic",
            needed: KPSS_MIN_LEN,
            got: n,
        });
    }
    let m = mean(series.values());
    let e: Vec<T> = series.values().iter().map(|&v| v - m).collect();
    let nn: T = count(n);
    let gamma = |lag: usize| -> T {
        e[lag..]
            .iter()
            .zip(&e)
            .fold(T::zero(), |acc, (&a, &b)| acc + a * b)
            / nn
    };
    let g0 = gamma(0);
    if g0 <= T::zero() {
        return Ok(T::zero());
    }
    let lags = (4.0 * (n as f64 / 100.0).powf(0.25)).floor() as usize;
    let mut lrv = g0;
    for l in 1..=lags.min(n - 1) {
        let w = T::one() - count::<T>(l) / count::<T>(lags + 1);
        lrv = lrv + lit::<T>(2.0) * w * gamma(l);
    }
    let mut s = T::zero();
    let mut ss = T::zero();
    for &v in &e {
        s = s + v;
        ss = ss + s * s;
    }
    Ok(ss / (nn * nn * lrv))
}

/// Smallest `d ≤ max_d` whose differenced series passes KPSS at 5%, or
/// `max_d` when none does.
pub fn select_d<T: Scalar>(series: &TimeSeries<T>, max_d: usize) -> Result<usize> {
    if max_d > 2 {
        return Err(Error::Argument(format!(
            "max_d must be at most 2, got {max_d}"
        )));
    }
    if series.len() < KPSS_MIN_LEN + max_d {
        return Err(Error::InsufficientData {
            what: "differencing order selection",
            needed: KPSS_MIN_LEN + max_d,
            got: series.len(),
        });
    }
    for d in 0..max_d {
        let stat = kpss_statistic(&difference(series, d)?)?;
        if stat <= lit(KPSS_CRITICAL_5PCT) {
            return Ok(d);
        }
    }
    Ok(max_d)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CandidateResult {
    pub spec: ArimaSpec,
    pub exog_label: Option<String>,
    /// `+inf` when the fit failed.
    pub aicc: f64,
    pub n_params: usize,
    pub fit_ok: bool,
    pub failure_reason: Option<String>,
}

fn ascending_aicc(a: &CandidateResult, b: &CandidateResult) -> Ordering {
    a.aicc.total_cmp(&b.aicc)
}

fn evaluate_candidate<T: Scalar>(
    series: &TimeSeries<T>,
    exog: Option<&ExogMatrix<T>>,
    exog_lag: usize,
    spec: ArimaSpec,
    options: &FitOptions,
) -> CandidateResult {
    let fitted = match exog {
        Some(x) => fit_arimax(series, x, spec, exog_lag, options).map(|f| (f.aicc(), f.n_params())),
        None => fit_arima(series, spec, options).map(|f| (f.aicc(), spec.n_params())),
    };
    match fitted {
        Ok((aicc, n_params)) => CandidateResult {
            spec,
            exog_label: None,
            aicc,
            n_params,
            fit_ok: true,
            failure_reason: None,
        },
        Err(e) => CandidateResult {
            spec,
            exog_label: None,
            aicc: f64::INFINITY,
            n_params: spec.n_params() + exog.map_or(0, |x| x.n_columns()),
            fit_ok: false,
            failure_reason: Some(e.to_string()),
        },
    }
}

/// Fits each spec independently (in parallel) and ranks by AICc. Failed
/// fits stay in the list with `fit_ok = false`.
pub fn grid_search_specs<T: Scalar>(
    series: &TimeSeries<T>,
    exog: Option<&ExogMatrix<T>>,
    specs: &[ArimaSpec],
    options: &FitOptions,
) -> Result<Vec<CandidateResult>> {
    let mut out: Vec<CandidateResult> = specs
        .par_iter()
        .map(|&spec| evaluate_candidate(series, exog, 0, spec, options))
        .collect();
    if !out.iter().any(|c| c.fit_ok) {
        let reasons: Vec<String> = out
            .iter()
            .map(|c| format!("{}: {}", c.spec, c.failure_reason.as_deref().unwrap_or("?")))
            .collect();
        return Err(Error::EmptyGrid(reasons.join("; ")));
    }
    out.sort_by(ascending_aicc);
    Ok(out)
}

/// Every `(p, d, q)` with `p ≤ p_max`, `q ≤ q_max`, sorted by AICc.
pub fn grid_search_aicc<T: Scalar>(
    series: &TimeSeries<T>,
    exog: Option<&ExogMatrix<T>>,
    d: usize,
    p_max: usize,
    q_max: usize,
    options: &FitOptions,
) -> Result<Vec<CandidateResult>> {
    grid_search_specs(series, exog, &order_grid(d, p_max, q_max)?, options)
}

/// Specs of a `(p, d, q)` grid with the default intercept convention.
pub fn order_grid(d: usize, p_max: usize, q_max: usize) -> Result<Vec<ArimaSpec>> {
    let mut specs = Vec::with_capacity((p_max + 1) * (q_max + 1));
    for p in 0..=p_max {
        for q in 0..=q_max {
            specs.push(ArimaSpec::new(p, d, q)?);
        }
    }
    Ok(specs)
}

/// Trailing holdout: `1 ≤ holdout ≤ len - 15`.
pub fn holdout_split<T: Scalar>(
    series: &TimeSeries<T>,
    holdout: usize,
) -> Result<(TimeSeries<T>, TimeSeries<T>)> {
    if holdout == 0 || holdout + MIN_TRAIN_LEN > series.len() {
        return Err(Error::Argument(format!(
            "holdout {holdout} outside 1..={} for a series of length {}",
            series.len().saturating_sub(MIN_TRAIN_LEN),
            series.len()
        )));
    }
    series.split_at(series.len() - holdout)
}

pub fn mse<T: Scalar>(forecast_points: &[T], actual: &[T]) -> Result<T> {
    if forecast_points.len() != actual.len() || actual.is_empty() {
        return Err(Error::Argument(format!(
            "mse needs equal non-empty lengths, got {} and {}",
            forecast_points.len(),
            actual.len()
        )));
    }
    let sum = forecast_points
        .iter()
        .zip(actual)
        .fold(T::zero(), |acc, (&f, &a)| acc + (f - a) * (f - a));
    Ok(sum / count(actual.len()))
}

/// A named exogenous set; `None` means plain ARIMA.
#[derive(Debug, Clone)]
pub struct ExogSet<T: Scalar = f64> {
    pub label: String,
    pub exog: Option<ExogMatrix<T>>,
}

impl<T: Scalar> ExogSet<T> {
    pub fn none() -> Self {
        Self {
            label: "none".into(),
            exog: None,
        }
    }

    pub fn new(label: impl Into<String>, exog: ExogMatrix<T>) -> Self {
        Self {
            label: label.into(),
            exog: Some(exog),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestEntry {
    pub spec: ArimaSpec,
    pub exog_label: String,
    pub n_params: usize,
    pub aicc: f64,
    /// `None` when fitting or forecasting failed.
    pub mse: Option<f64>,
    pub failure_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    /// Training-sample fits ranked by AICc.
    pub candidates: Vec<CandidateResult>,
    pub holdout_years: usize,
    pub per_candidate_mse: Vec<BacktestEntry>,
    pub winner: BacktestEntry,
}

impl BacktestReport {
    pub fn mse_of(&self, spec: ArimaSpec, exog_label: &str) -> Option<f64> {
        self.per_candidate_mse
            .iter()
            .find(|e| e.spec == spec && e.exog_label == exog_label)
            .and_then(|e| e.mse)
    }
}

/// Lower MSE, then fewer parameters, then lower AICc, then `(p, d, q)`,
/// then exogenous-set label.
fn winner_order(a: &BacktestEntry, b: &BacktestEntry) -> Ordering {
    let ma = a.mse.unwrap_or(f64::INFINITY);
    let mb = b.mse.unwrap_or(f64::INFINITY);
    ma.total_cmp(&mb)
        .then(a.n_params.cmp(&b.n_params))
        .then(a.aicc.total_cmp(&b.aicc))
        .then(a.spec.order().cmp(&b.spec.order()))
        .then(a.exog_label.cmp(&b.exog_label))
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SelectionOptions {
    pub fit: FitOptions,
    pub exog_lag: usize,
}

fn backtest_one<T: Scalar>(
    train: &TimeSeries<T>,
    test: &TimeSeries<T>,
    set: &ExogSet<T>,
    spec: ArimaSpec,
    options: &SelectionOptions,
) -> (CandidateResult, BacktestEntry) {
    let holdout = test.len();
    let outcome: Result<(f64, usize, Vec<T>)> = match &set.exog {
        None => fit_arima(train, spec, &options.fit).and_then(|f| {
            let fc = forecast_arima(&f, holdout, 0.95)?;
            Ok((f.aicc(), spec.n_params(), fc.point))
        }),
        Some(x) => fit_arimax(train, x, spec, options.exog_lag, &options.fit).and_then(|f| {
            // held-out actual exogenous values serve as the future path
            let fc = forecast_arimax(&f, x, holdout, 0.95)?;
            Ok((f.aicc(), f.n_params(), fc.point))
        }),
    };
    let n_cols = set.exog.as_ref().map_or(0, |x| x.n_columns());
    let scored =
        outcome.and_then(|(aicc, k, point)| Ok((aicc, k, to_f64(mse(&point, test.values())?))));
    match scored {
        Ok((aicc, n_params, m)) => (
            CandidateResult {
                spec,
                exog_label: Some(set.label.clone()),
                aicc,
                n_params,
                fit_ok: true,
                failure_reason: None,
            },
            BacktestEntry {
                spec,
                exog_label: set.label.clone(),
                n_params,
                aicc,
                mse: Some(m),
                failure_reason: None,
            },
        ),
        Err(e) => {
            let reason = e.to_string();
            (
                CandidateResult {
                    spec,
                    exog_label: Some(set.label.clone()),
                    aicc: f64::INFINITY,
                    n_params: spec.n_params() + n_cols,
                    fit_ok: false,
                    failure_reason: Some(reason.clone()),
                },
                BacktestEntry {
                    spec,
                    exog_label: set.label.clone(),
                    n_params: spec.n_params() + n_cols,
                    aicc: f64::INFINITY,
                    mse: None,
                    failure_reason: Some(reason),
                },
            )
        }
    }
}

/// Fits every `(spec, exog set)` on the training part, forecasts the
/// holdout and picks the lowest MSE.
pub fn backtest_select<T: Scalar>(
    series: &TimeSeries<T>,
    exog_sets: &[ExogSet<T>],
    candidate_specs: &[ArimaSpec],
    holdout: usize,
    options: &SelectionOptions,
) -> Result<BacktestReport> {
    if candidate_specs.is_empty() || exog_sets.is_empty() {
        return Err(Error::Argument(
            "backtest needs at least one spec and one exogenous set".into(),
        ));
    }
    let (train, test) = holdout_split(series, holdout)?;
    let jobs: Vec<(&ExogSet<T>, ArimaSpec)> = exog_sets
        .iter()
        .flat_map(|s| candidate_specs.iter().map(move |&spec| (s, spec)))
        .collect();
    let results: Vec<(CandidateResult, BacktestEntry)> = jobs
        .par_iter()
        .map(|&(set, spec)| backtest_one(&train, &test, set, spec, options))
        .collect();
    let (mut candidates, entries): (Vec<_>, Vec<_>) = results.into_iter().unzip();
    candidates.sort_by(ascending_aicc);

    let winner = entries
        .iter()
        .filter(|e| e.mse.is_some())
        .min_by(|a, b| winner_order(a, b))
        .cloned();
    match winner {
        Some(winner) => Ok(BacktestReport {
            candidates,
            holdout_years: holdout,
            per_candidate_mse: entries,
            winner,
        }),
        None => Err(Error::Selection {
            reasons: entries
                .iter()
                .map(|e| {
                    format!(
                        "{} [{}]: {}",
                        e.spec,
                        e.exog_label,
                        e.failure_reason.as_deref().unwrap_or("?")
                    )
                })
                .collect(),
        }),
    }
}
