//! Forecasting engine for annual energy-consumption series: ARIMA,
//! regression with ARIMA errors, Holt's damped trend, order selection and
//! holdout backtesting, plus ingestion of SEDS-style wide CSV files.
//!
//! The numerical code is generic over the scalar type ([`Scalar`] for `f32`
//! and `f64`); the differencing algebra also accepts exact rationals. The
//! aliases at the crate root pin the common instantiations.

pub mod arima;
pub mod arimax;
pub mod error;
pub mod forecast;
pub mod holt;
pub mod ingest;
pub mod linalg;
pub mod optim;
pub mod scalar;
pub mod selection;
pub mod series;

pub use error::{Error, Result};
pub use scalar::{Scalar, SeriesValue};

pub type TimeSeriesF64 = series::TimeSeries<f64>;
pub type TimeSeriesF32 = series::TimeSeries<f32>;
/// Exact series for lossless differencing round trips.
pub type ExactSeries = series::TimeSeries<num_rational::Rational64>;
pub type ArimaFitF64 = arima::ArimaFit<f64>;
pub type ArimaFitF32 = arima::ArimaFit<f32>;
pub type ForecastF64 = forecast::Forecast<f64>;
pub type ArimaxFitF64 = arimax::ArimaxFit<f64>;
pub type ExogMatrixF64 = arimax::ExogMatrix<f64>;
pub type HoltFitF64 = holt::HoltFit<f64>;
