//! Annual time series and the differencing algebra built on it.

use crate::error::{Error, Result};
use crate::scalar::{Scalar, SeriesValue};

/// Annual observations starting at `start_year`; observation `i` belongs to
/// year `start_year + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries<T: SeriesValue = f64> {
    start_year: i32,
    values: Vec<T>,
    label: String,
}

impl<T: SeriesValue> TimeSeries<T> {
    /// Builds a series, rejecting empty input and non-finite values.
    pub fn new(start_year: i32, values: Vec<T>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if values.is_empty() {
            return Err(Error::InsufficientData {
                what: "time series",
                needed: 1,
                got: 0,
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::Argument(format!(
                "series {label:?} has a non-finite value at year {}",
                start_year + i as i32
            )));
        }
        Ok(Self {
            start_year,
            values,
            label,
        })
    }

    pub fn start_year(&self) -> i32 {
        self.start_year
    }

    /// Year of the final observation.
    pub fn end_year(&self) -> i32 {
        self.start_year + self.values.len() as i32 - 1
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always `false`; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn year_of(&self, index: usize) -> i32 {
        self.start_year + index as i32
    }

    pub fn value_at_year(&self, year: i32) -> Option<&T> {
        if year < self.start_year {
            return None;
        }
        self.values.get((year - self.start_year) as usize)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Sub-series covering `first..=last`; both years must lie inside the series.
    pub fn slice_years(&self, first: i32, last: i32) -> Result<Self> {
        if first > last || first < self.start_year || last > self.end_year() {
            return Err(Error::Argument(format!(
                "years {first}..={last} outside {} range {}..={}",
                self.label,
                self.start_year,
                self.end_year()
            )));
        }
        let lo = (first - self.start_year) as usize;
        let hi = (last - self.start_year) as usize;
        Ok(Self {
            start_year: first,
            values: self.values[lo..=hi].to_vec(),
            label: self.label.clone(),
        })
    }

    /// Splits into the first `n` observations and the rest.
    pub fn split_at(&self, n: usize) -> Result<(Self, Self)> {
        if n == 0 || n >= self.len() {
            return Err(Error::Argument(format!(
                "split point {n} must lie strictly inside a series of length {}",
                self.len()
            )));
        }
        let head = Self {
            start_year: self.start_year,
            values: self.values[..n].to_vec(),
            label: self.label.clone(),
        };
        let tail = Self {
            start_year: self.start_year + n as i32,
            values: self.values[n..].to_vec(),
            label: self.label.clone(),
        };
        Ok((head, tail))
    }

    /// Element-wise map that keeps years and label.
    pub fn map<U: SeriesValue>(&self, f: impl Fn(&T) -> U) -> Result<TimeSeries<U>> {
        TimeSeries::new(
            self.start_year,
            self.values.iter().map(f).collect(),
            self.label.clone(),
        )
    }
}

/// First difference applied `d` times to a slice.
pub fn difference_values<T: SeriesValue>(values: &[T], d: usize) -> Vec<T> {
    let mut cur = values.to_vec();
    for _ in 0..d {
        cur = cur
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .collect();
    }
    cur
}

/// The `d`-th order forward difference; the result starts `d` years later.
pub fn difference<T: SeriesValue>(series: &TimeSeries<T>, d: usize) -> Result<TimeSeries<T>> {
    if series.len() <= d {
        return Err(Error::InsufficientData {
            what: "differencing",
            needed: d + 1,
            got: series.len(),
        });
    }
    Ok(TimeSeries {
        start_year: series.start_year + d as i32,
        values: difference_values(&series.values, d),
        label: series.label.clone(),
    })
}

/// Final value of each level of the difference cascade of `values`:
/// element `k` is the last entry of the `k`-th difference.
///
/// These are the pivots [`integrate`] needs to continue the series past its
/// end.
pub fn pivots<T: SeriesValue>(values: &[T], d: usize) -> Result<Vec<T>> {
    if values.len() < d {
        return Err(Error::InsufficientData {
            what: "difference pivots",
            needed: d,
            got: values.len(),
        });
    }
    let mut out = Vec::with_capacity(d);
    let mut level = values.to_vec();
    for _ in 0..d {
        out.push(level.last().cloned().expect("level non-empty"));
        level = difference_values(&level, 1);
    }
    Ok(out)
}

/// Undoes `d` rounds of differencing on a slice. `pivots[k]` is the value of
/// the `k`-th difference level immediately preceding the first element of
/// `differenced`.
pub fn integrate_values<T: SeriesValue>(
    differenced: &[T],
    pivots: &[T],
    d: usize,
) -> Result<Vec<T>> {
    if pivots.len() != d {
        return Err(Error::Argument(format!(
            "integration of order {d} needs {d} pivots, got {}",
            pivots.len()
        )));
    }
    let mut cur = differenced.to_vec();
    for pivot in pivots.iter().rev() {
        let mut acc = pivot.clone();
        for v in cur.iter_mut() {
            acc = acc + v.clone();
            *v = acc.clone();
        }
    }
    Ok(cur)
}

/// Inverse of [`difference`]: maps a continuation of the `d`-th differences
/// back to levels. The output covers the same years as `differenced`.
pub fn integrate<T: SeriesValue>(
    differenced: &TimeSeries<T>,
    pivots: &[T],
    d: usize,
) -> Result<TimeSeries<T>> {
    Ok(TimeSeries {
        start_year: differenced.start_year,
        values: integrate_values(&differenced.values, pivots, d)?,
        label: differenced.label.clone(),
    })
}

/// Biased sample autocorrelations for lags `1..=max_lag`.
pub fn sample_acf<T: Scalar>(series: &TimeSeries<T>, max_lag: usize) -> Result<Vec<T>> {
    if max_lag == 0 {
        return Err(Error::Argument("max_lag must be positive".into()));
    }
    let n = series.len();
    if n <= max_lag {
        return Err(Error::InsufficientData {
            what: "sample autocorrelation",
            needed: max_lag + 1,
            got: n,
        });
    }
    let x = series.values();
    let m = crate::scalar::mean(x);
    let dev: Vec<T> = x.iter().map(|&v| v - m).collect();
    let c0 = dev.iter().fold(T::zero(), |a, &v| a + v * v);
    if c0 <= T::zero() {
        return Err(Error::Degenerate(format!(
            "series {} is constant",
            series.label()
        )));
    }
    Ok((1..=max_lag)
        .map(|lag| {
            let ck = dev[lag..]
                .iter()
                .zip(&dev[..n - lag])
                .fold(T::zero(), |a, (&u, &v)| a + u * v);
            ck / c0
        })
        .collect())
}

/// Series trimmed to a common year range.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedSeries<T: SeriesValue = f64> {
    series: Vec<TimeSeries<T>>,
}

impl<T: SeriesValue> AlignedSeries<T> {
    pub fn series(&self) -> &[TimeSeries<T>] {
        &self.series
    }

    pub fn into_series(self) -> Vec<TimeSeries<T>> {
        self.series
    }

    pub fn start_year(&self) -> i32 {
        self.series[0].start_year
    }

    pub fn end_year(&self) -> i32 {
        self.series[0].end_year()
    }

    pub fn len(&self) -> usize {
        self.series[0].len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Trims every series to the intersection of their year ranges.
pub fn align_panel<T: SeriesValue>(series_list: &[TimeSeries<T>]) -> Result<AlignedSeries<T>> {
    if series_list.is_empty() {
        return Err(Error::Argument(
            "cannot align an empty list of series".into(),
        ));
    }
    let first = series_list
        .iter()
        .map(TimeSeries::start_year)
        .max()
        .unwrap();
    let last = series_list.iter().map(TimeSeries::end_year).min().unwrap();
    if first > last {
        return Err(Error::NoOverlap);
    }
    let series = series_list
        .iter()
        .map(|s| s.slice_years(first, last))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlignedSeries { series })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn ts(values: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(2000, values.to_vec(), "x").unwrap()
    }

    #[test]
    fn difference_examples() {
        let x = ts(&[1.0, 3.0, 6.0, 10.0]);
        let d1 = difference(&x, 1).unwrap();
        assert_eq!(d1.values(), &[2.0, 3.0, 4.0]);
        assert_eq!(d1.start_year(), 2001);
        let d2 = difference(&x, 2).unwrap();
        assert_eq!(d2.values(), &[1.0, 1.0]);
        assert_eq!(d2.start_year(), 2002);
        assert_eq!(difference(&x, 0).unwrap(), x);
    }

    #[test]
    fn difference_too_short() {
        let err = difference(&ts(&[5.0]), 1).unwrap_err();
        assert!(matches!(err, Error::InsufficientData { .. }));
    }

    #[test]
    fn integrate_first_order() {
        let diffs = TimeSeries::new(2001, vec![2.0, 3.0, 4.0], "x").unwrap();
        let back = integrate(&diffs, &[1.0], 1).unwrap();
        assert_eq!(back.values(), &[3.0, 6.0, 10.0]);
    }

    #[test]
    fn integrate_second_order_checked_by_differencing() {
        // [1, 3, 6, 10]: level 0 ends at 3 and level 1 at 2 before the
        // second differences [1, 1] begin.
        let x = [1.0, 3.0, 6.0, 10.0];
        let pv = pivots(&x[..2], 2).unwrap();
        assert_eq!(pv, vec![3.0, 2.0]);
        let diffs = TimeSeries::new(2002, vec![1.0, 1.0], "x").unwrap();
        let back = integrate(&diffs, &pv, 2).unwrap();
        assert_eq!(back.values(), &[6.0, 10.0]);
        let mut full = x[..2].to_vec();
        full.extend_from_slice(back.values());
        assert_eq!(difference_values(&full, 2), vec![1.0, 1.0]);
    }

    #[test]
    fn integrate_identity_and_bad_pivots() {
        let x = ts(&[4.0, -1.0, 2.5]);
        assert_eq!(integrate(&x, &[], 0).unwrap(), x);
        assert!(matches!(integrate(&x, &[1.0], 2), Err(Error::Argument(_))));
    }

    #[test]
    fn rational_round_trip_is_exact() {
        let vals: Vec<Rational64> = [(1, 3), (2, 7), (-5, 11), (9, 2), (1, 9)]
            .iter()
            .map(|&(a, b)| Rational64::new(a, b))
            .collect();
        let x = TimeSeries::new(1990, vals.clone(), "r").unwrap();
        for d in 0..=2 {
            let diffs = difference(&x, d).unwrap();
            let back = integrate(&diffs, &pivots(&vals[..d], d).unwrap(), d).unwrap();
            assert_eq!(back.values(), &vals[d..]);
        }
    }

    #[test]
    fn acf_linear_ramp() {
        let acf = sample_acf(&ts(&[1.0, 2.0, 3.0, 4.0, 5.0]), 1).unwrap();
        assert!((acf[0] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn acf_alternating() {
        // deviations are +-1 around a zero mean: c0 = 6, c1 = -5.
        let acf = sample_acf(&ts(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0]), 1).unwrap();
        assert!((acf[0] - (-5.0 / 6.0)).abs() < 1e-15);
    }

    #[test]
    fn acf_constant_is_degenerate() {
        assert!(matches!(
            sample_acf(&ts(&[2.0; 4]), 1),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn align_trims_to_overlap() {
        let a = TimeSeries::new(1960, vec![1.0; 62], "a").unwrap();
        let b = TimeSeries::new(1970, vec![2.0; 52], "b").unwrap();
        let p = align_panel(&[a, b]).unwrap();
        assert_eq!(p.start_year(), 1970);
        assert_eq!(p.end_year(), 2021);
        assert!(p.series().iter().all(|s| s.len() == 52));
    }

    #[test]
    fn align_single_and_disjoint() {
        let a = TimeSeries::new(1960, vec![1.0; 11], "a").unwrap();
        let p = align_panel(std::slice::from_ref(&a)).unwrap();
        assert_eq!(p.series()[0], a);
        let b = TimeSeries::new(1980, vec![1.0; 11], "b").unwrap();
        assert!(matches!(align_panel(&[a, b]), Err(Error::NoOverlap)));
        assert!(matches!(align_panel::<f64>(&[]), Err(Error::Argument(_))));
    }

    #[test]
    fn rejects_non_finite() {
        assert!(TimeSeries::new(2000, vec![1.0, f64::NAN], "x").is_err());
        assert!(TimeSeries::<f64>::new(2000, vec![], "x").is_err());
    }
}
