use crate::error::Result;
use crate::forecast::{check_horizon, Forecast};
use crate::scalar::Scalar;
use crate::series::{difference_values, integrate_values, pivots};

use super::fit::ArimaFit;

/// MA(∞) weights `ψ_0..ψ_{horizon-1}` of an ARMA model with the crate's
/// sign convention: `ψ_0 = 1`, `ψ_k = Σ_{i<=min(k,p)} ar_i ψ_{k-i} + ma_k`.
pub fn psi_from_coeffs<T: Scalar>(ar: &[T], ma: &[T], horizon: usize) -> Vec<T> {
    let mut psi: Vec<T> = Vec::with_capacity(horizon);
    for k in 0..horizon {
        if k == 0 {
            psi.push(T::one());
            continue;
        }
        let mut v = if k <= ma.len() { ma[k - 1] } else { T::zero() };
        for (i, &a) in ar.iter().enumerate().take(k) {
            v = v + a * psi[k - 1 - i];
        }
        psi.push(v);
    }
    psi
}

/// Psi-weights of the ARMA part of a fit (differencing not included).
pub fn psi_weights<T: Scalar>(fit: &ArimaFit<T>, horizon: usize) -> Result<Vec<T>> {
    check_horizon(horizon)?;
    Ok(psi_from_coeffs(&fit.ar_coeffs, &fit.ma_coeffs, horizon))
}

/// AR coefficients of `(1 - Σ ar_i z^i)(1 - z)^d`, written as `1 - Σ c_i z^i`.
pub(crate) fn integrated_ar<T: Scalar>(ar: &[T], d: usize) -> Vec<T> {
    let mut poly: Vec<T> = std::iter::once(T::one())
        .chain(ar.iter().map(|&a| -a))
        .collect();
    for _ in 0..d {
        let mut next = vec![T::zero(); poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] = next[i] + c;
            next[i + 1] = next[i + 1] - c;
        }
        poly = next;
    }
    poly[1..].iter().map(|&c| -c).collect()
}

/// Psi-weights of the full ARIMA representation, differencing included.
pub fn integrated_psi_weights<T: Scalar>(fit: &ArimaFit<T>, horizon: usize) -> Vec<T> {
    psi_from_coeffs(
        &integrated_ar(&fit.ar_coeffs, fit.spec.d),
        &fit.ma_coeffs,
        horizon,
    )
}

/// Forecast variances `σ² Σ_{j<h} ψ̃_j²` for `h = 1..=horizon`.
pub fn forecast_variances<T: Scalar>(fit: &ArimaFit<T>, horizon: usize) -> Vec<T> {
    let psi = integrated_psi_weights(fit, horizon);
    let mut acc = T::zero();
    psi.iter()
        .map(|&w| {
            acc = acc + w * w;
            fit.sigma2 * acc
        })
        .collect()
}

/// Point forecasts of the level series, future innovations set to zero.
pub fn point_forecast<T: Scalar>(fit: &ArimaFit<T>, horizon: usize) -> Result<Vec<T>> {
    let spec = fit.spec;
    let w_hist = difference_values(&fit.train_tail, spec.d);
    let mut w: Vec<T> = w_hist[w_hist.len().saturating_sub(spec.p)..].to_vec();
    let base = w.len();
    let mut e: Vec<T> = fit.residuals[fit.residuals.len().saturating_sub(spec.q)..].to_vec();
    let e_base = e.len();
    for h in 0..horizon {
        let mut v = fit.intercept;
        for (i, &a) in fit.ar_coeffs.iter().enumerate() {
            v = v + a * w[base + h - 1 - i];
        }
        for (j, &m) in fit.ma_coeffs.iter().enumerate() {
            let idx = e_base + h;
            if idx > j {
                v = v + m * e[idx - 1 - j];
            }
        }
        w.push(v);
        e.push(T::zero());
    }
    let future = &w[base..];
    integrate_values(future, &pivots(&fit.train_tail, spec.d)?, spec.d)
}

/// `horizon`-step forecast with intervals at confidence `level`.
pub fn forecast_arima<T: Scalar>(
    fit: &ArimaFit<T>,
    horizon: usize,
    level: f64,
) -> Result<Forecast<T>> {
    check_horizon(horizon)?;
    let point = point_forecast(fit, horizon)?;
    let var = forecast_variances(fit, horizon);
    Forecast::from_variances(fit.end_year + 1, point, &var, level)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arima::{arima_from_params, ArimaSpec, ArmaParams};
    use crate::series::TimeSeries;

    #[test]
    fn psi_closed_forms() {
        assert_eq!(psi_from_coeffs(&[0.5], &[], 3), vec![1.0, 0.5, 0.25]);
        assert_eq!(
            psi_from_coeffs::<f64>(&[], &[0.7], 4),
            vec![1.0, 0.7, 0.0, 0.0]
        );
        let arma = psi_from_coeffs(&[0.5_f64], &[0.3], 4);
        for (a, b) in arma.iter().zip([1.0, 0.8, 0.4, 0.2]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn integrated_polynomial() {
        assert_eq!(integrated_ar::<f64>(&[], 1), vec![1.0]);
        assert_eq!(integrated_ar::<f64>(&[], 2), vec![2.0, -1.0]);
        // (1 - 0.5z)(1 - z) = 1 - 1.5z + 0.5z^2
        assert_eq!(integrated_ar(&[0.5], 1), vec![1.5, -0.5]);
    }

    fn ar1_fit() -> crate::arima::ArimaFit<f64> {
        let y = TimeSeries::new(2000, vec![0.3, -1.0, 0.4, 1.1, 2.0], "y").unwrap();
        let spec = ArimaSpec::new(1, 0, 0).unwrap();
        let mut fit = arima_from_params(&y, spec, ArmaParams::new(0.0, vec![0.5], vec![])).unwrap();
        fit.sigma2 = 1.0;
        fit
    }

    #[test]
    fn ar1_points_and_first_interval() {
        let fc = forecast_arima(&ar1_fit(), 3, 0.95).unwrap();
        assert_eq!(fc.point, vec![1.0, 0.5, 0.25]);
        assert_eq!(fc.start_year, 2005);
        assert!((fc.lower[0] - (1.0 - 1.959964)).abs() < 1e-6);
        assert!((fc.upper[0] - (1.0 + 1.959964)).abs() < 1e-6);
    }

    #[test]
    fn random_walk_is_flat_with_linear_variance() {
        let y = TimeSeries::new(2000, vec![3.0, 5.0, 4.0, 8.0, 10.0], "y").unwrap();
        let spec = ArimaSpec::new(0, 1, 0).unwrap();
        let mut fit = arima_from_params(&y, spec, ArmaParams::new(0.0, vec![], vec![])).unwrap();
        fit.sigma2 = 2.0;
        let fc = forecast_arima(&fit, 6, 0.95).unwrap();
        assert!(fc.point.iter().all(|&p| p == 10.0));
        let var = forecast_variances(&fit, 6);
        for (h, v) in var.iter().enumerate() {
            assert!((v - 2.0 * (h as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn ma_forecast_uses_last_residual() {
        let y = TimeSeries::<f64>::new(2000, vec![1.0, -0.5, 0.25, 2.0], "y").unwrap();
        let spec = ArimaSpec::with_constant(0, 0, 1, false).unwrap();
        let fit = arima_from_params(&y, spec, ArmaParams::new(0.0, vec![], vec![0.4])).unwrap();
        let fc = point_forecast(&fit, 3).unwrap();
        let last_e = *fit.residuals.last().unwrap();
        assert!((fc[0] - 0.4 * last_e).abs() < 1e-15);
        assert_eq!(&fc[1..], &[0.0, 0.0]);
    }
}
