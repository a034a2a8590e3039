//! Regression with ARIMA errors.
//!
//! The response is modelled as `y_t = Σ γ_k x_{k,t-L} + η_t` where `η`
//! follows an ARIMA(p,d,q) process (with the intercept, when present, inside
//! the error model). Response and regressors are differenced together and
//! `γ` is estimated jointly with the ARMA coefficients. The stored
//! [`ArimaFit`] describes `η` in levels, so forecasting adds the regression
//! part to an ordinary ARIMA forecast of the errors.

use crate::arima::{
    assemble, forecast_arima, sigma2_floor, ArimaFit, ArimaSpec, ArmaParams, CssProblem, FitOptions,
};
use crate::error::{Error, Result};
use crate::forecast::{check_horizon, Forecast};
use crate::holt::{fit_holt, forecast_holt, PhiMode};
use crate::linalg::{least_squares, min_correlation_pivot};
use crate::optim::OptimizerOptions;
use crate::scalar::{lit, variance, Scalar};
use crate::series::{align_panel, difference_values, TimeSeries};

/// Correlation-matrix pivot below which columns count as collinear.
pub const COLLINEARITY_TOL: f64 = 1e-8;

/// Named exogenous columns sharing one year range. Column names are the
/// series labels.
#[derive(Debug, Clone, PartialEq)]
pub struct ExogMatrix<T: Scalar = f64> {
    columns: Vec<TimeSeries<T>>,
}

impl<T: Scalar> ExogMatrix<T> {
    /// Columns must cover identical years and carry distinct labels.
    pub fn new(columns: Vec<TimeSeries<T>>) -> Result<Self> {
        if let Some(first) = columns.first() {
            for c in &columns[1..] {
                if c.start_year() != first.start_year() || c.len() != first.len() {
                    return Err(Error::Argument(format!(
                        "exogenous column {} covers {}..={} but {} covers {}..={}",
                        c.label(),
                        c.start_year(),
                        c.end_year(),
                        first.label(),
                        first.start_year(),
                        first.end_year()
                    )));
                }
            }
        }
        for (i, c) in columns.iter().enumerate() {
            if columns[..i].iter().any(|o| o.label() == c.label()) {
                return Err(Error::Argument(format!(
                    "duplicate exogenous column name {}",
                    c.label()
                )));
            }
        }
        Ok(Self { columns })
    }

    /// Trims the columns to their common years first.
    pub fn aligned(columns: Vec<TimeSeries<T>>) -> Result<Self> {
        if columns.is_empty() {
            return Ok(Self { columns });
        }
        Self::new(align_panel(&columns)?.into_series())
    }

    pub fn empty() -> Self {
        Self {
            columns: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[TimeSeries<T>] {
        &self.columns
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(|c| c.label().to_string()).collect()
    }

    pub fn column(&self, name: &str) -> Option<&TimeSeries<T>> {
        self.columns.iter().find(|c| c.label() == name)
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// `(first, last)` year, `None` for an empty matrix.
    pub fn year_range(&self) -> Option<(i32, i32)> {
        self.columns.first().map(|c| (c.start_year(), c.end_year()))
    }

    pub fn slice_years(&self, first: i32, last: i32) -> Result<Self> {
        Ok(Self {
            columns: self
                .columns
                .iter()
                .map(|c| c.slice_years(first, last))
                .collect::<Result<_>>()?,
        })
    }

    /// Replaces column `index` by `f` applied element-wise.
    pub fn map_column(&self, index: usize, f: impl Fn(T) -> T) -> Result<Self> {
        let mut columns = self.columns.clone();
        columns[index] = columns[index].map(|&v| f(v))?;
        Ok(Self { columns })
    }

    /// Rejects constant columns and exactly collinear sets.
    pub fn check_rank(&self) -> Result<()> {
        for c in &self.columns {
            if variance(c.values()) <= T::zero() {
                return Err(Error::Collinear(format!(
                    "column {} is constant",
                    c.label()
                )));
            }
        }
        if self.columns.len() < 2 {
            return Ok(());
        }
        let cols: Vec<Vec<T>> = self.columns.iter().map(|c| c.values().to_vec()).collect();
        match min_correlation_pivot(&cols) {
            Some(p) if p > lit(COLLINEARITY_TOL) => Ok(()),
            _ => Err(Error::Collinear(format!(
                "columns {} are linearly dependent",
                self.names().join(", ")
            ))),
        }
    }
}

/// Regression coefficients plus the ARIMA model of the regression errors.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaxFit<T: Scalar = f64> {
    /// Fit of the level errors `η_t = y_t - Σ γ_k x_{k,t-L}`.
    pub arima: ArimaFit<T>,
    pub gamma: Vec<T>,
    pub exog_names: Vec<String>,
    pub exog_lag: usize,
    /// Exogenous values from training data for years after the last year
    /// used in estimation, consulted before any scenario when `exog_lag > 0`.
    pub known_exog: ExogMatrix<T>,
    /// One-step fitted values of the differenced response.
    pub fitted: Vec<T>,
    /// First year of the estimation sample.
    pub start_year: i32,
}

impl<T: Scalar> ArimaxFit<T> {
    /// Wraps an error-model fit with given coefficients; used for
    /// counterfactuals such as `γ = 0`.
    pub fn from_parts(
        arima: ArimaFit<T>,
        gamma: Vec<T>,
        exog_names: Vec<String>,
        exog_lag: usize,
    ) -> Result<Self> {
        if gamma.len() != exog_names.len() {
            return Err(Error::Argument(format!(
                "{} coefficients for {} exogenous columns",
                gamma.len(),
                exog_names.len()
            )));
        }
        Ok(Self {
            arima,
            gamma,
            exog_names,
            exog_lag,
            known_exog: ExogMatrix::empty(),
            fitted: Vec::new(),
            start_year: 0,
        })
    }

    pub fn spec(&self) -> ArimaSpec {
        self.arima.spec
    }

    pub fn loglik(&self) -> T {
        self.arima.loglik
    }

    /// AICc with the regression coefficients counted as parameters.
    pub fn aicc(&self) -> f64 {
        self.arima.aicc_with_extra(self.gamma.len())
    }

    pub fn n_params(&self) -> usize {
        self.arima.spec.n_params() + self.gamma.len()
    }
}

/// Joint estimation of regression coefficients and ARIMA error structure.
///
/// With `exog_lag = L`, `x_{t-L}` explains `y_t`; the estimation sample is
/// the set of response years whose lagged regressors exist.
pub fn fit_arimax<T: Scalar>(
    series: &TimeSeries<T>,
    exog: &ExogMatrix<T>,
    spec: ArimaSpec,
    exog_lag: usize,
    options: &FitOptions,
) -> Result<ArimaxFit<T>> {
    let lag = exog_lag as i32;
    let (first, last) = match exog.year_range() {
        None => (series.start_year(), series.end_year()),
        Some((xs, xe)) => (
            series.start_year().max(xs + lag),
            series.end_year().min(xe + lag),
        ),
    };
    if first > last {
        return Err(Error::NoOverlap);
    }
    let y = series.slice_years(first, last)?;
    let x = if exog.is_empty() {
        ExogMatrix::empty()
    } else {
        exog.slice_years(first - lag, last - lag)?
    };
    x.check_rank()?;

    let n = y.len();
    let needed = spec.d + spec.p + spec.q + options.min_sample_margin;
    if n < needed.max(spec.p + spec.d + 1) {
        return Err(Error::InsufficientData {
            what: "ARIMAX estimation",
            needed: needed.max(spec.p + spec.d + 1),
            got: n,
        });
    }

    let w = difference_values(y.values(), spec.d);
    if variance(&w) <= T::zero() {
        return Err(Error::Degenerate(format!(
            "response {} is constant after {} difference(s)",
            series.label(),
            spec.d
        )));
    }
    let xd: Vec<Vec<T>> = x
        .columns()
        .iter()
        .map(|c| difference_values(c.values(), spec.d))
        .collect();

    let mut design = xd.clone();
    if spec.include_constant {
        design.insert(0, vec![T::one(); w.len()]);
    }
    if least_squares(&design, &w, lit(1e-10)).is_none() {
        return Err(Error::Collinear(format!(
            "differenced regressors {} are linearly dependent",
            x.names().join(", ")
        )));
    }

    let floor = sigma2_floor(&w);
    let problem = CssProblem {
        w,
        exog: xd,
        p: spec.p,
        q: spec.q,
        constant: spec.include_constant,
        sigma2_floor: floor,
    };
    let sol = problem.solve(&options.optimizer)?;

    let eta_values: Vec<T> = (0..n)
        .map(|t| {
            x.columns()
                .iter()
                .zip(&sol.gamma)
                .fold(y.values()[t], |acc, (c, &g)| acc - g * c.values()[t])
        })
        .collect();
    let eta = TimeSeries::new(first, eta_values, format!("{} errors", series.label()))?;
    let arima = assemble(
        &eta,
        spec,
        ArmaParams::new(sol.intercept, sol.ar, sol.ma),
        floor,
        sol.evaluations,
    )?;

    let wy = difference_values(y.values(), spec.d);
    let fitted = wy[spec.p..]
        .iter()
        .zip(&arima.residuals)
        .map(|(&v, &e)| v - e)
        .collect();

    let known_exog = match exog.year_range() {
        Some((_, xe)) if exog_lag > 0 && xe > last - lag => exog.slice_years(last - lag + 1, xe)?,
        _ => ExogMatrix::empty(),
    };

    Ok(ArimaxFit {
        arima,
        gamma: sol.gamma,
        exog_names: x.names(),
        exog_lag,
        known_exog,
        fitted,
        start_year: first,
    })
}

/// Forecast given future exogenous paths. Intervals come from the error
/// model alone; the exogenous path is treated as known.
pub fn forecast_arimax<T: Scalar>(
    fit: &ArimaxFit<T>,
    future_exog: &ExogMatrix<T>,
    horizon: usize,
    level: f64,
) -> Result<Forecast<T>> {
    check_horizon(horizon)?;
    let regression = regression_path(fit, future_exog, horizon)?;
    let base = forecast_arima(&fit.arima, horizon, level)?;
    let point = base
        .point
        .iter()
        .zip(&regression)
        .map(|(&a, &r)| a + r)
        .collect();
    Forecast::from_half_widths(base.start_year, point, base.half_width, level)
}

/// `Σ γ_k x_{k, year - L}` for each forecast year.
fn regression_path<T: Scalar>(
    fit: &ArimaxFit<T>,
    future_exog: &ExogMatrix<T>,
    horizon: usize,
) -> Result<Vec<T>> {
    let end = fit.arima.end_year;
    let lag = fit.exog_lag as i32;
    let mut out = vec![T::zero(); horizon];
    for (name, &g) in fit.exog_names.iter().zip(&fit.gamma) {
        let known = fit.known_exog.column(name);
        let future = future_exog.column(name);
        if known.is_none() && future.is_none() {
            return Err(Error::ScenarioIncomplete(format!(
                "no future values for exogenous column {name}"
            )));
        }
        for (h, slot) in out.iter_mut().enumerate() {
            let year = end + 1 + h as i32 - lag;
            let value = known
                .and_then(|c| c.value_at_year(year))
                .or_else(|| future.and_then(|c| c.value_at_year(year)))
                .ok_or_else(|| {
                    Error::ScenarioIncomplete(format!("column {name} has no value for year {year}"))
                })?;
            *slot = *slot + g * *value;
        }
    }
    Ok(out)
}

/// Future exogenous paths from damped-trend forecasts (φ = 0.95) of each
/// column, covering the `horizon` years after the matrix ends.
pub fn auto_scenario<T: Scalar>(exog: &ExogMatrix<T>, horizon: usize) -> Result<ExogMatrix<T>> {
    auto_scenario_with(exog, horizon, &OptimizerOptions::default())
}

pub fn auto_scenario_with<T: Scalar>(
    exog: &ExogMatrix<T>,
    horizon: usize,
    options: &OptimizerOptions,
) -> Result<ExogMatrix<T>> {
    check_horizon(horizon)?;
    let columns = exog
        .columns()
        .iter()
        .map(|c| {
            let fit = fit_holt(c, PhiMode::default_fixed(), options)?;
            let fc = forecast_holt(&fit, horizon, 0.95)?;
            TimeSeries::new(c.end_year() + 1, fc.point, c.label())
        })
        .collect::<Result<Vec<_>>>()?;
    ExogMatrix::new(columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::fit_arima;

    fn col(start: i32, v: Vec<f64>, name: &str) -> TimeSeries<f64> {
        TimeSeries::new(start, v, name).unwrap()
    }

    fn wiggle(n: usize, seed: f64) -> Vec<f64> {
        (0..n)
            .map(|i| ((i as f64 + seed) * 1.3).sin() + 0.05 * i as f64)
            .collect()
    }

    #[test]
    fn constant_column_is_collinear() {
        let y = col(1990, wiggle(30, 0.0), "y");
        let x = ExogMatrix::new(vec![col(1990, vec![2.0; 30], "c")]).unwrap();
        let err = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(0, 0, 0).unwrap(),
            0,
            &FitOptions::default(),
        );
        assert!(matches!(err, Err(Error::Collinear(_))));
    }

    #[test]
    fn duplicated_column_is_collinear() {
        let y = col(1990, wiggle(30, 0.0), "y");
        let a = wiggle(30, 2.0);
        let b: Vec<f64> = a.iter().map(|v| 4.0 * v - 1.0).collect();
        let x = ExogMatrix::new(vec![col(1990, a, "a"), col(1990, b, "b")]).unwrap();
        let err = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(1, 0, 0).unwrap(),
            0,
            &FitOptions::default(),
        );
        assert!(matches!(err, Err(Error::Collinear(_))));
    }

    #[test]
    fn disjoint_years_do_not_overlap() {
        let y = col(1960, wiggle(11, 0.0), "y");
        let x = ExogMatrix::new(vec![col(1990, wiggle(11, 1.0), "x")]).unwrap();
        let err = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(0, 0, 0).unwrap(),
            0,
            &FitOptions::default(),
        );
        assert!(matches!(err, Err(Error::NoOverlap)));
    }

    #[test]
    fn deterministic_regression_forecast() {
        let xv = wiggle(30, 0.5);
        let y = col(1990, xv.iter().map(|v| 3.0 * v).collect(), "y");
        let x = ExogMatrix::new(vec![col(1990, xv, "x")]).unwrap();
        let fit = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(0, 0, 0).unwrap(),
            0,
            &FitOptions::default(),
        )
        .unwrap();
        assert!((fit.gamma[0] - 3.0).abs() < 1e-12);
        assert!(fit.arima.degenerate);
        let future = ExogMatrix::new(vec![col(2020, vec![1.0, -2.0, 0.5], "x")]).unwrap();
        let fc = forecast_arimax(&fit, &future, 3, 0.95).unwrap();
        for (p, x) in fc.point.iter().zip([1.0, -2.0, 0.5]) {
            assert!((p - 3.0 * x).abs() < 1e-9, "{p}");
        }
    }

    #[test]
    fn short_scenario_is_incomplete() {
        let xv = wiggle(30, 0.5);
        let y = col(
            1990,
            xv.iter()
                .enumerate()
                .map(|(i, v)| 2.0 * v + (i as f64 * 0.7).cos())
                .collect(),
            "y",
        );
        let x = ExogMatrix::new(vec![col(1990, xv, "x")]).unwrap();
        let fit = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(1, 0, 0).unwrap(),
            0,
            &FitOptions::default(),
        )
        .unwrap();
        let future = ExogMatrix::new(vec![col(2020, vec![0.0; 9], "x")]).unwrap();
        let err = forecast_arimax(&fit, &future, 10, 0.95).unwrap_err();
        match err {
            Error::ScenarioIncomplete(msg) => assert!(msg.contains("2029"), "{msg}"),
            other => panic!("unexpected {other:?}"),
        }
        let wrong_name = ExogMatrix::new(vec![col(2020, vec![0.0; 10], "z")]).unwrap();
        assert!(matches!(
            forecast_arimax(&fit, &wrong_name, 10, 0.95),
            Err(Error::ScenarioIncomplete(_))
        ));
    }

    #[test]
    fn empty_exog_matches_plain_arima() {
        let y = col(
            1970,
            wiggle(40, 0.3)
                .iter()
                .enumerate()
                .map(|(i, v)| v + (i as f64 * 2.1).cos())
                .collect(),
            "y",
        );
        let spec = ArimaSpec::new(1, 0, 1).unwrap();
        let a = fit_arimax(&y, &ExogMatrix::empty(), spec, 0, &FitOptions::default()).unwrap();
        let b = fit_arima(&y, spec, &FitOptions::default()).unwrap();
        assert!((a.loglik() - b.loglik).abs() < 1e-8);
    }

    #[test]
    fn lagged_regressor_uses_training_tail() {
        let xv = wiggle(31, 1.0);
        // y_t = 2 x_{t-1} + small wobble, years 1991..=2020
        let yv: Vec<f64> = (1..31)
            .map(|t| 2.0 * xv[t - 1] + 0.3 * ((t as f64) * 0.9).sin())
            .collect();
        let y = col(1991, yv, "y");
        let x = ExogMatrix::new(vec![col(1990, xv.clone(), "x")]).unwrap();
        let fit = fit_arimax(
            &y,
            &x,
            ArimaSpec::new(0, 0, 0).unwrap(),
            1,
            &FitOptions::default(),
        )
        .unwrap();
        assert_eq!(fit.start_year, 1991);
        assert_eq!(fit.known_exog.year_range(), Some((2020, 2020)));
        // horizon 2 needs x for 2020 (known) and 2021 (scenario)
        let future = ExogMatrix::new(vec![col(2021, vec![0.25], "x")]).unwrap();
        let fc = forecast_arimax(&fit, &future, 2, 0.95).unwrap();
        let base = forecast_arima(&fit.arima, 2, 0.95).unwrap();
        assert!((fc.point[0] - (base.point[0] + fit.gamma[0] * xv[30])).abs() < 1e-12);
        assert!((fc.point[1] - (base.point[1] + fit.gamma[0] * 0.25)).abs() < 1e-12);
    }
}
