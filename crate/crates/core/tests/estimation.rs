use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use seds_forecast_core::arima::{
    css_loglik, fit_arima, simulate_arima, ArimaSpec, ArmaParams, FitOptions,
};
use seds_forecast_core::holt::{fit_holt, PhiMode};
use seds_forecast_core::optim::OptimizerOptions;
use seds_forecast_core::{Error, TimeSeriesF64};

#[test]
fn ar1_recovery() {
    let spec = ArimaSpec::new(1, 0, 0).unwrap();
    let y = simulate_arima(
        &spec,
        &ArmaParams::new(0.0_f64, vec![0.6], vec![]),
        1.0,
        2000,
        7,
    )
    .unwrap();
    let fit = fit_arima(&y, spec, &FitOptions::default()).unwrap();
    assert!((fit.ar_coeffs[0] - 0.6).abs() < 0.05);
    assert_eq!(fit.residuals.len(), fit.n_effective);
}

#[test]
fn grid_never_beats_fit() {
    let spec = ArimaSpec::new(1, 0, 0).unwrap();
    let y = simulate_arima(
        &spec,
        &ArmaParams::new(0.3, vec![-0.4], vec![]),
        1.0,
        300,
        3,
    )
    .unwrap();
    let fit = fit_arima(&y, spec, &FitOptions::default()).unwrap();
    let v = y.values();
    let best_grid = (0..201)
        .map(|i| {
            let beta = -0.99 + 0.0099 * i as f64;
            // the intercept that minimizes the conditional sum of squares
            let alpha =
                (1..v.len()).map(|t| v[t] - beta * v[t - 1]).sum::<f64>() / (v.len() - 1) as f64;
            css_loglik(&y, &spec, &ArmaParams::new(alpha, vec![beta], vec![])).unwrap()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        fit.loglik >= best_grid - 1e-6,
        "{} < {}",
        fit.loglik,
        best_grid
    );
}

#[test]
fn integrated_fit_and_degenerate_input() {
    let spec = ArimaSpec::new(1, 1, 1).unwrap();
    let y = simulate_arima(
        &spec,
        &ArmaParams::new(0.0_f64, vec![0.5], vec![0.3]),
        1.0,
        400,
        17,
    )
    .unwrap();
    let fit = fit_arima(&y, spec, &FitOptions::default()).unwrap();
    assert!((fit.ar_coeffs[0] - 0.5).abs() < 0.2);
    assert_eq!(fit.train_tail.len(), 2);

    let flat = TimeSeriesF64::new(1970, vec![3.0; 30], "flat").unwrap();
    assert!(matches!(
        fit_arima(
            &flat,
            ArimaSpec::new(1, 1, 0).unwrap(),
            &FitOptions::default()
        ),
        Err(Error::Degenerate(_))
    ));
    let short = TimeSeriesF64::new(1970, vec![1.0, 2.0, 4.0, 3.0], "short").unwrap();
    assert!(matches!(
        fit_arima(
            &short,
            ArimaSpec::new(1, 0, 0).unwrap(),
            &FitOptions::default()
        ),
        Err(Error::InsufficientData { .. })
    ));
}

#[test]
fn fits_are_seed_deterministic() {
    let spec = ArimaSpec::new(2, 0, 1).unwrap();
    let y = simulate_arima(
        &spec,
        &ArmaParams::new(1.0, vec![0.5, -0.2], vec![0.4]),
        1.0,
        120,
        8,
    )
    .unwrap();
    let a = fit_arima(&y, spec, &FitOptions::default()).unwrap();
    let b = fit_arima(&y, spec, &FitOptions::default()).unwrap();
    assert_eq!(a, b);
}

/// Additive-error damped trend: the error-correction form of the smoothing
/// recursions driven by Gaussian noise.
fn simulate_damped(alpha: f64, beta_star: f64, phi: f64, n: usize, seed: u64) -> TimeSeriesF64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut l, mut b) = (100.0, 1.0);
    let values = (0..n)
        .map(|_| {
            let e: f64 = StandardNormal.sample(&mut rng);
            let y = l + phi * b + e;
            l = l + phi * b + alpha * e;
            b = phi * b + alpha * beta_star * e;
            y
        })
        .collect();
    TimeSeriesF64::new(1, values, "damped").unwrap()
}

#[test]
fn holt_alpha_recovery() {
    for (alpha, seed) in [(0.3, 1u64), (0.7, 2)] {
        let y = simulate_damped(alpha, 0.2, 0.95, 500, seed);
        let fit = fit_holt(&y, PhiMode::default_fixed(), &OptimizerOptions::default()).unwrap();
        assert!(
            (fit.params.alpha - alpha).abs() < 0.15,
            "{} vs {alpha}",
            fit.params.alpha
        );
        let est = fit_holt(&y, PhiMode::Estimated, &OptimizerOptions::default()).unwrap();
        assert!((est.params.alpha - alpha).abs() < 0.15);
        assert!(est.sse <= fit.sse + 1e-6 * fit.sse);
    }
}

#[test]
fn holt_needs_eight_points() {
    let y = TimeSeriesF64::new(2000, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0], "y").unwrap();
    assert!(matches!(
        fit_holt(&y, PhiMode::default_fixed(), &OptimizerOptions::default()),
        Err(Error::InsufficientData { .. })
    ));
}
