//! ARIMA(p,d,q) estimation by conditional sum of squares, simulation, and
//! forecasting with psi-weight prediction intervals.

mod css;
mod fit;
mod forecast;
mod simulate;
mod spec;
pub mod transform;

pub(crate) use css::CssProblem;
pub use css::{css_loglik, css_residuals};
pub use fit::{arima_from_params, fit_arima, ArimaFit, SIGMA2_FLOOR_RATIO};
pub(crate) use fit::{assemble, sigma2_floor};
pub use forecast::{
    forecast_arima, forecast_variances, integrated_psi_weights, point_forecast, psi_from_coeffs,
    psi_weights,
};
pub use simulate::simulate_arima;
pub use spec::{ArimaSpec, ArmaParams, FitOptions, MAX_ARMA_ORDER, MAX_DIFFERENCE};

/// Small-sample corrected AIC. `k` counts every estimated parameter
/// including the innovation variance. Returns `+inf` when `n <= k + 1`, which
/// excludes the candidate from any ranking.
pub fn aicc(loglik: f64, k: usize, n: usize) -> f64 {
    if n <= k + 1 {
        return f64::INFINITY;
    }
    let kf = k as f64;
    let aic = -2.0 * loglik + 2.0 * kf;
    aic + 2.0 * kf * (kf + 1.0) / (n as f64 - kf - 1.0)
}
