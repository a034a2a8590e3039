//! Holt's linear trend with damping.
//!
//! ```text
//! level     l_t = α y_t + (1 - α)(l_{t-1} + φ b_{t-1})
//! trend     b_t = β*(l_t - l_{t-1}) + (1 - β*) φ b_{t-1}
//! forecast  ŷ_{n+h} = l_n + (φ + φ² + ... + φ^h) b_n
//! ```
//!
//! Interval variances use the additive-error state-space weights
//! `c_j = α(1 + β* φ_j)` with `φ_j = φ + ... + φ^j`, giving
//! `var_h = σ̂² (1 + Σ_{j=1}^{h-1} c_j²)` and `σ̂² = sse / (n - 4)`.

use crate::error::{Error, Result};
use crate::forecast::{check_horizon, Forecast};
use crate::optim::{from_bounded, multistart, to_bounded, OptimizerOptions};
use crate::scalar::{count, lit, variance, Scalar};
use crate::series::TimeSeries;

pub const SMOOTHING_BOUNDS: (f64, f64) = (1e-4, 1.0 - 1e-4);
pub const PHI_BOUNDS: (f64, f64) = (0.8, 0.98);
pub const DEFAULT_PHI: f64 = 0.95;
pub const MIN_FILTER_LEN: usize = 4;
pub const MIN_FIT_LEN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoltParams<T: Scalar = f64> {
    pub alpha: T,
    pub beta_star: T,
    pub phi: T,
    pub l0: T,
    pub b0: T,
}

impl<T: Scalar> HoltParams<T> {
    pub fn new(alpha: T, beta_star: T, phi: T, l0: T, b0: T) -> Self {
        Self {
            alpha,
            beta_star,
            phi,
            l0,
            b0,
        }
    }

    /// The filter accepts the closed ranges `α, β* ∈ [0, 1]`, `φ ∈ (0, 1]`;
    /// estimation keeps to the narrower [`SMOOTHING_BOUNDS`] and [`PHI_BOUNDS`].
    fn check(&self) -> Result<()> {
        let unit = |x: T| x >= T::zero() && x <= T::one();
        if !unit(self.alpha) || !unit(self.beta_star) {
            return Err(Error::Argument(format!(
                "smoothing parameters must lie in [0, 1], got alpha={:?} beta*={:?}",
                self.alpha, self.beta_star
            )));
        }
        if !(self.phi > T::zero() && self.phi <= T::one()) {
            return Err(Error::Argument(format!(
                "damping must lie in (0, 1], got {:?}",
                self.phi
            )));
        }
        if !self.l0.is_finite() || !self.b0.is_finite() {
            return Err(Error::Argument("initial states must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiMode {
    Fixed(f64),
    Estimated,
}

impl PhiMode {
    /// φ pinned at 0.95.
    pub fn default_fixed() -> Self {
        PhiMode::Fixed(DEFAULT_PHI)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HoltFit<T: Scalar = f64> {
    pub params: HoltParams<T>,
    pub levels: Vec<T>,
    pub trends: Vec<T>,
    pub fitted: Vec<T>,
    pub sse: T,
    pub n: usize,
    pub end_year: i32,
    pub evaluations: usize,
}

impl<T: Scalar> HoltFit<T> {
    pub fn last_level(&self) -> T {
        *self.levels.last().expect("non-empty filter")
    }

    pub fn last_trend(&self) -> T {
        *self.trends.last().expect("non-empty filter")
    }

    /// `sse / (n - 4)`, or `sse / n` for the shortest series.
    pub fn sigma2(&self) -> T {
        let dof = if self.n > 4 { self.n - 4 } else { self.n };
        self.sse / count(dof)
    }
}

fn run_filter<T: Scalar>(y: &[T], p: &HoltParams<T>) -> (Vec<T>, Vec<T>, Vec<T>, T) {
    let n = y.len();
    let mut levels = Vec::with_capacity(n);
    let mut trends = Vec::with_capacity(n);
    let mut fitted = Vec::with_capacity(n);
    let (mut l, mut b) = (p.l0, p.b0);
    let mut sse = T::zero();
    for &v in y {
        let f = l + p.phi * b;
        let e = v - f;
        sse = sse + e * e;
        let l_new = p.alpha * v + (T::one() - p.alpha) * f;
        b = p.beta_star * (l_new - l) + (T::one() - p.beta_star) * p.phi * b;
        l = l_new;
        fitted.push(f);
        levels.push(l);
        trends.push(b);
    }
    (levels, trends, fitted, sse)
}

/// Runs the level and trend recursions from `(l0, b0)`.
pub fn holt_filter<T: Scalar>(series: &TimeSeries<T>, params: HoltParams<T>) -> Result<HoltFit<T>> {
    if series.len() < MIN_FILTER_LEN {
        return Err(Error::InsufficientData {
            what: "Holt filter",
            needed: MIN_FILTER_LEN,
            got: series.len(),
        });
    }
    params.check()?;
    let (levels, trends, fitted, sse) = run_filter(series.values(), &params);
    Ok(HoltFit {
        params,
        levels,
        trends,
        fitted,
        sse,
        n: series.len(),
        end_year: series.end_year(),
        evaluations: 0,
    })
}

/// Starting point of the search: `l0 = y₁`, `b0 = y₂ - y₁`, `α = 0.5`, `β* = 0.1`.
pub fn initial_params<T: Scalar>(series: &TimeSeries<T>, phi_mode: PhiMode) -> HoltParams<T> {
    let y = series.values();
    let phi = match phi_mode {
        PhiMode::Fixed(p) => lit(p),
        PhiMode::Estimated => lit((PHI_BOUNDS.0 + PHI_BOUNDS.1) / 2.0),
    };
    HoltParams::new(lit(0.5), lit(0.1), phi, y[0], y[1] - y[0])
}

/// Least-squares estimation of `(α, β*, l0, b0)` and optionally `φ`.
pub fn fit_holt<T: Scalar>(
    series: &TimeSeries<T>,
    phi_mode: PhiMode,
    options: &OptimizerOptions,
) -> Result<HoltFit<T>> {
    if series.len() < MIN_FIT_LEN {
        return Err(Error::InsufficientData {
            what: "Holt estimation",
            needed: MIN_FIT_LEN,
            got: series.len(),
        });
    }
    if let PhiMode::Fixed(p) = phi_mode {
        if !(p > 0.0 && p <= 1.0) {
            return Err(Error::Argument(format!(
                "damping must lie in (0, 1], got {p}"
            )));
        }
    }
    let y = series.values();
    let start = initial_params(series, phi_mode);
    let scale = {
        let sd = variance(y).sqrt();
        if sd > T::zero() {
            sd
        } else {
            y[0].abs().max(T::one())
        }
    };
    let (slo, shi) = (lit::<T>(SMOOTHING_BOUNDS.0), lit::<T>(SMOOTHING_BOUNDS.1));
    let (plo, phi_hi) = (lit::<T>(PHI_BOUNDS.0), lit::<T>(PHI_BOUNDS.1));
    let alpha0 = from_bounded(start.alpha, slo, shi);
    let beta0 = from_bounded(start.beta_star, slo, shi);

    let decode = |u: &[T]| -> HoltParams<T> {
        HoltParams {
            alpha: to_bounded(u[0] + alpha0, slo, shi),
            beta_star: to_bounded(u[1] + beta0, slo, shi),
            l0: start.l0 + u[2] * scale,
            b0: start.b0 + u[3] * scale,
            phi: match phi_mode {
                PhiMode::Fixed(_) => start.phi,
                PhiMode::Estimated => to_bounded(u[4], plo, phi_hi),
            },
        }
    };
    let dim = if matches!(phi_mode, PhiMode::Estimated) {
        5
    } else {
        4
    };
    let objective = |u: &[T]| run_filter(y, &decode(u)).3;
    let best = multistart(objective, &vec![T::zero(); dim], options);

    let start_sse = run_filter(y, &start).3;
    let params = if best.value.is_finite() && best.value <= start_sse {
        decode(&best.x)
    } else if start_sse.is_finite() {
        start
    } else {
        return Err(Error::Convergence {
            restarts: options.restarts,
            evaluations: best.evaluations,
            best_objective: crate::scalar::to_f64(best.value),
        });
    };
    let mut fit = holt_filter(series, params)?;
    fit.evaluations = best.evaluations;
    Ok(fit)
}

/// Point forecasts `l_n + b_n Σ_{i=1}^h φ^i` with state-space intervals.
pub fn forecast_holt<T: Scalar>(
    fit: &HoltFit<T>,
    horizon: usize,
    level: f64,
) -> Result<Forecast<T>> {
    check_horizon(horizon)?;
    let HoltParams {
        alpha,
        beta_star,
        phi,
        ..
    } = fit.params;
    let (l, b) = (fit.last_level(), fit.last_trend());
    let sigma2 = fit.sigma2();
    let mut point = Vec::with_capacity(horizon);
    let mut var = Vec::with_capacity(horizon);
    let mut phi_pow = T::one();
    let mut phi_sum = T::zero();
    let mut c2_sum = T::zero();
    for _ in 0..horizon {
        // var_h uses φ_j for j < h, so accumulate before advancing
        var.push(sigma2 * (T::one() + c2_sum));
        phi_pow = phi_pow * phi;
        phi_sum = phi_sum + phi_pow;
        point.push(l + phi_sum * b);
        let c = alpha * (T::one() + beta_star * phi_sum);
        c2_sum = c2_sum + c * c;
    }
    Forecast::from_variances(fit.end_year + 1, point, &var, level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: Vec<f64>) -> TimeSeries<f64> {
        TimeSeries::new(2000, v, "y").unwrap()
    }

    #[test]
    fn full_level_weight_tracks_data() {
        let y = ts(vec![3.0, 1.0, 4.0, 1.0, 5.0]);
        let fit = holt_filter(&y, HoltParams::new(1.0, 0.0, 0.9, 7.0, 0.0)).unwrap();
        assert_eq!(fit.levels, y.values());
        assert_eq!(&fit.fitted[1..], &y.values()[..4]);
        assert_eq!(fit.fitted[0], 7.0);
    }

    #[test]
    fn linear_trend_absorbed() {
        let y = ts((1..=10).map(|t| 2.0 * t as f64).collect());
        let fit = holt_filter(&y, HoltParams::new(1.0, 1.0, 1.0, 0.0, 2.0)).unwrap();
        assert!(fit.trends.iter().all(|&b| b == 2.0));
        assert_eq!(fit.sse, 0.0);
    }

    #[test]
    fn hand_stepped_recursion() {
        // independent recursion written out in a scratch script
        let y = ts(vec![10.0, 12.0, 11.5, 13.0, 14.2, 13.8, 15.1, 16.0]);
        let fit = holt_filter(&y, HoltParams::new(0.5, 0.3, 0.95, 10.0, 1.0)).unwrap();
        assert!(
            (fit.sse - 3.944_499_701_817_246_5).abs() < 1e-12,
            "{}",
            fit.sse
        );
    }

    #[test]
    fn short_series_rejected() {
        let y = ts(vec![1.0, 2.0, 3.0]);
        let err = holt_filter(&y, HoltParams::new(0.5, 0.1, 0.95, 1.0, 1.0));
        assert!(matches!(err, Err(Error::InsufficientData { .. })));
    }

    #[test]
    fn forecast_closed_form() {
        let y = ts(vec![1.0; 6]);
        let mut fit = holt_filter(&y, HoltParams::new(0.5, 0.1, 0.95, 1.0, 0.0)).unwrap();
        *fit.levels.last_mut().unwrap() = 10.0;
        *fit.trends.last_mut().unwrap() = 1.0;
        let fc = forecast_holt(&fit, 2000, 0.95).unwrap();
        assert!((fc.point[0] - 10.95).abs() < 1e-12);
        assert!((fc.point[1999] - 29.0).abs() < 1e-9);
        assert!(fc.point.iter().all(|&p| p < 29.0));
    }

    #[test]
    fn constant_series_fits_flat() {
        let y = ts(vec![4.2; 12]);
        let fit = fit_holt(&y, PhiMode::default_fixed(), &OptimizerOptions::default()).unwrap();
        assert!(fit.sse < 1e-12);
        assert_eq!(fit.params.phi, 0.95);
        let fc = forecast_holt(&fit, 5, 0.95).unwrap();
        assert!(fc.point.iter().all(|&p| (p - 4.2).abs() < 1e-6));
    }

    #[test]
    fn fit_never_worse_than_start() {
        let y = ts(vec![5.0, 7.0, 6.5, 8.0, 9.5, 9.0, 11.0, 10.2, 12.5, 13.0]);
        for mode in [PhiMode::default_fixed(), PhiMode::Estimated] {
            let start = holt_filter(&y, initial_params(&y, mode)).unwrap();
            let fit = fit_holt(&y, mode, &OptimizerOptions::default()).unwrap();
            assert!(fit.sse <= start.sse);
            let p = fit.params;
            assert!(p.alpha >= 1e-4 && p.alpha <= 1.0 - 1e-4);
            assert!(p.phi >= 0.8 && p.phi <= 0.98);
        }
    }
}
