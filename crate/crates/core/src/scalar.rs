//! Numeric traits the library is generic over.
//!
//! [`SeriesValue`] is the minimal bound for the exact series algebra
//! (differencing, integration, alignment) and is implemented for the float
//! types as well as `Rational64`. [`Scalar`] adds everything estimation needs
//! and is implemented for `f32` and `f64`.

use std::fmt::{Debug, Display};

use num_rational::Rational64;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// A value that can live in a [`TimeSeries`](crate::series::TimeSeries).
pub trait SeriesValue: Num + Clone + Debug + Send + Sync + 'static {
    /// `false` for NaN and infinities; always `true` for exact types.
    fn is_finite_value(&self) -> bool;
}

impl SeriesValue for f64 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl SeriesValue for f32 {
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl SeriesValue for Rational64 {
    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Floating point scalar used by estimation, forecasting and testing.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + SeriesValue + Copy + Default + Display
{
    /// Machine epsilon as a plain `f64`, used to relax tolerances for `f32`.
    fn epsilon_f64() -> f64 {
        <Self as Float>::epsilon().to_f64().unwrap_or(f64::EPSILON)
    }
}

impl Scalar for f64 {}
impl Scalar for f32 {}

/// Converts an `f64` literal into the working scalar.
#[inline]
pub(crate) fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("f64 literal representable in scalar type")
}

/// Converts a count into the working scalar.
#[inline]
pub(crate) fn count<T: Scalar>(n: usize) -> T {
    T::from_usize(n).expect("count representable in scalar type")
}

#[inline]
pub(crate) fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

pub(crate) fn mean<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    values.iter().fold(T::zero(), |acc, &v| acc + v) / count(values.len())
}

/// Biased (divide by n) variance.
pub(crate) fn variance<T: Scalar>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    let m = mean(values);
    values
        .iter()
        .fold(T::zero(), |acc, &v| acc + (v - m) * (v - m))
        / count(values.len())
}
