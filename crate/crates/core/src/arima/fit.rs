use crate::error::{Error, Result};
use crate::scalar::{lit, variance, Scalar};
use crate::series::{difference_values, TimeSeries};

use super::css::{css_residuals, gaussian_loglik, CssProblem};
use super::spec::{ArimaSpec, ArmaParams, FitOptions};
use super::{aicc, transform};

/// Variance floor relative to the differenced-series variance.
pub const SIGMA2_FLOOR_RATIO: f64 = 1e-12;

/// A fitted ARIMA model.
///
/// `ar_coeffs` and `ma_coeffs` follow the sign convention
/// `w_t = intercept + Σ ar_i w_{t-i} + e_t + Σ ma_j e_{t-j}` on the
/// `d`-times differenced series `w`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArimaFit<T: Scalar = f64> {
    pub spec: ArimaSpec,
    pub intercept: T,
    pub ar_coeffs: Vec<T>,
    pub ma_coeffs: Vec<T>,
    pub sigma2: T,
    pub residuals: Vec<T>,
    pub loglik: T,
    pub n_effective: usize,
    /// Last `max(p, q) + d` observations of the (level) training series.
    pub train_tail: Vec<T>,
    /// Year of the final training observation.
    pub end_year: i32,
    /// Set when the variance estimate hit the floor.
    pub degenerate: bool,
    pub evaluations: usize,
}

impl<T: Scalar> ArimaFit<T> {
    pub fn params(&self) -> ArmaParams<T> {
        ArmaParams::new(
            self.intercept,
            self.ar_coeffs.clone(),
            self.ma_coeffs.clone(),
        )
    }

    /// Small-sample AIC counting AR, MA, constant and the variance.
    pub fn aicc(&self) -> f64 {
        self.aicc_with_extra(0)
    }

    pub(crate) fn aicc_with_extra(&self, extra: usize) -> f64 {
        aicc(
            crate::scalar::to_f64(self.loglik),
            self.spec.n_params() + extra,
            self.n_effective,
        )
    }

    /// In-sample one-step fitted values of the differenced series.
    pub fn fitted_differenced(&self, series: &TimeSeries<T>) -> Vec<T> {
        let w = difference_values(series.values(), self.spec.d);
        w[self.spec.p..]
            .iter()
            .zip(&self.residuals)
            .map(|(&v, &e)| v - e)
            .collect()
    }
}

pub(crate) fn sigma2_floor<T: Scalar>(w: &[T]) -> T {
    (lit::<T>(SIGMA2_FLOOR_RATIO) * variance(w)).max(T::min_positive_value())
}

/// Builds a fit from known coefficients on a level series: residuals,
/// variance and likelihood are recomputed from the recursion.
pub(crate) fn assemble<T: Scalar>(
    series: &TimeSeries<T>,
    spec: ArimaSpec,
    params: ArmaParams<T>,
    floor: T,
    evaluations: usize,
) -> Result<ArimaFit<T>> {
    let w = difference_values(series.values(), spec.d);
    if w.len() <= spec.p {
        return Err(Error::InsufficientData {
            what: "ARIMA residuals",
            needed: spec.p + spec.d + 1,
            got: series.len(),
        });
    }
    let residuals = css_residuals(&w, &params);
    let sse = residuals.iter().fold(T::zero(), |s, &v| s + v * v);
    let n_eff = residuals.len();
    let (loglik, sigma2) = gaussian_loglik(sse, n_eff, floor);
    let degenerate = sigma2 <= floor;
    let keep = (spec.p.max(spec.q) + spec.d).min(series.len());
    Ok(ArimaFit {
        spec,
        intercept: params.intercept,
        ar_coeffs: params.ar,
        ma_coeffs: params.ma,
        sigma2,
        residuals,
        loglik,
        n_effective: n_eff,
        train_tail: series.values()[series.len() - keep..].to_vec(),
        end_year: series.end_year(),
        degenerate,
        evaluations,
    })
}

/// Builds a fit from caller-supplied coefficients, validating them.
pub fn arima_from_params<T: Scalar>(
    series: &TimeSeries<T>,
    spec: ArimaSpec,
    params: ArmaParams<T>,
) -> Result<ArimaFit<T>> {
    super::css::check_params(&spec, &params)?;
    let w = difference_values(series.values(), spec.d);
    let floor = sigma2_floor(&w);
    assemble(series, spec, params, floor, 0)
}

/// Conditional-sum-of-squares estimation of an ARIMA model.
///
/// The intercept is solved exactly by least squares at every ARMA parameter
/// point; the AR and MA blocks are searched in partial-autocorrelation space
/// so every candidate is stationary and invertible.
pub fn fit_arima<T: Scalar>(
    series: &TimeSeries<T>,
    spec: ArimaSpec,
    options: &FitOptions,
) -> Result<ArimaFit<T>> {
    let needed = spec.p + spec.q + spec.d + options.min_sample_margin;
    if series.len() < needed.max(spec.p + spec.d + 1) {
        return Err(Error::InsufficientData {
            what: "ARIMA estimation",
            needed: needed.max(spec.p + spec.d + 1),
            got: series.len(),
        });
    }
    let w = difference_values(series.values(), spec.d);
    if variance(&w) <= T::zero() {
        return Err(Error::Degenerate(format!(
            "series {} is constant after {} difference(s)",
            series.label(),
            spec.d
        )));
    }
    let floor = sigma2_floor(&w);
    let problem = CssProblem {
        w,
        exog: Vec::new(),
        p: spec.p,
        q: spec.q,
        constant: spec.include_constant,
        sigma2_floor: floor,
    };
    let sol = problem.solve(&options.optimizer)?;
    debug_assert!(transform::check_stationary(&sol.ar).is_ok());
    assemble(
        series,
        spec,
        ArmaParams::new(sol.intercept, sol.ar, sol.ma),
        floor,
        sol.evaluations,
    )
}
