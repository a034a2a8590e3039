use num_rational::Rational64;
use proptest::prelude::*;
use seds_forecast_core::arima::transform::{
    ar_to_unconstrained, ma_to_unconstrained, unconstrained_to_ar, unconstrained_to_ma,
};
use seds_forecast_core::arima::{arima_from_params, forecast_arima, ArimaSpec, ArmaParams};
use seds_forecast_core::holt::{forecast_holt, holt_filter, HoltParams};
use seds_forecast_core::ingest::{
    build_panel, exclude_years, parse_seds_csv, write_seds_csv, MsnTable, PanelSources, SedsRecord,
    SeriesRef,
};
use seds_forecast_core::series::{
    align_panel, difference, integrate, pivots, sample_acf, TimeSeries,
};
use seds_forecast_core::{ExactSeries, TimeSeriesF64};

/// Coefficients of `Π (1 - λ_i z) = 1 - Σ β_i z^i`.
fn ar_from_inverse_roots(roots: &[f64]) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &l in roots {
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= l * c;
        }
        poly = next;
    }
    poly[1..].iter().map(|c| -c).collect()
}

fn series_strategy(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3..1e3f64, min..=max)
}

proptest! {
    #[test]
    fn exact_round_trip(values in prop::collection::vec(-10_000i64..10_000, 15..=80), d in 0usize..=2) {
        let x = ExactSeries::new(1960, values.iter().map(|&v| Rational64::from_integer(v)).collect(), "x").unwrap();
        let diff = difference(&x, d).unwrap();
        let back = integrate(&diff, &pivots(&x.values()[..d], d).unwrap(), d).unwrap();
        prop_assert_eq!(back.values(), &x.values()[d..]);
        prop_assert_eq!(back.start_year(), x.start_year() + d as i32);
    }

    #[test]
    fn integer_valued_f64_round_trip(values in prop::collection::vec(-100_000i32..100_000, 15..=80), d in 0usize..=2) {
        let x = TimeSeriesF64::new(1960, values.iter().map(|&v| f64::from(v)).collect(), "x").unwrap();
        let diff = difference(&x, d).unwrap();
        let back = integrate(&diff, &pivots(&x.values()[..d], d).unwrap(), d).unwrap();
        prop_assert_eq!(back.values(), &x.values()[d..]);
    }

    #[test]
    fn difference_is_linear(pair in (15usize..60).prop_flat_map(|n| (series_strategy(n, n), series_strategy(n, n))),
                            a in -5.0..5.0f64, b in -5.0..5.0f64, d in 0usize..=2) {
        let (x, y) = pair;
        let combo: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + b * q).collect();
        let lhs = difference(&TimeSeriesF64::new(0, combo, "c").unwrap(), d).unwrap();
        let dx = difference(&TimeSeriesF64::new(0, x, "x").unwrap(), d).unwrap();
        let dy = difference(&TimeSeriesF64::new(0, y, "y").unwrap(), d).unwrap();
        for ((l, p), q) in lhs.values().iter().zip(dx.values()).zip(dy.values()) {
            let r = a * p + b * q;
            prop_assert!((l - r).abs() <= 1e-12 * (1.0 + r.abs()) * 1e3, "{} vs {}", l, r);
        }
    }

    #[test]
    fn acf_is_bounded(values in series_strategy(5, 80), lag in 1usize..4) {
        prop_assume!(values.iter().any(|&v| v != values[0]));
        let x = TimeSeriesF64::new(0, values, "x").unwrap();
        for r in sample_acf(&x, lag).unwrap() {
            prop_assert!(r.abs() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn alignment_is_idempotent(spans in prop::collection::vec((1950i32..1990, 5usize..40), 1..5)) {
        let list: Vec<TimeSeriesF64> = spans.iter().enumerate()
            .map(|(i, &(s, n))| TimeSeriesF64::new(s, (0..n).map(|k| (k + i) as f64).collect(), format!("s{i}")).unwrap())
            .collect();
        if let Ok(once) = align_panel(&list) {
            let lens: Vec<usize> = once.series().iter().map(|s| s.len()).collect();
            prop_assert!(lens.iter().all(|&l| l == lens[0]));
            prop_assert!(once.series().iter().all(|s| s.start_year() == once.start_year()));
            let twice = align_panel(once.series()).unwrap();
            prop_assert_eq!(twice.series(), once.series());
        }
    }

    #[test]
    fn transform_round_trip(u in prop::collection::vec(-1.5..1.5f64, 1..=8)) {
        let ar = unconstrained_to_ar(&u).unwrap();
        let back = ar_to_unconstrained(&ar).unwrap();
        for (a, b) in u.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10, "{} vs {}", a, b);
        }
        let ma = unconstrained_to_ma(&u).unwrap();
        let back = ma_to_unconstrained(&ma).unwrap();
        for (a, b) in u.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn arima_intervals_widen(
        values in series_strategy(40, 60),
        ar_u in prop::collection::vec(-2.0..2.0f64, 0..=3),
        ma_u in prop::collection::vec(-2.0..2.0f64, 0..=2),
        d in 0usize..=2,
    ) {
        let spec = ArimaSpec::new(ar_u.len(), d, ma_u.len()).unwrap();
        let params = ArmaParams::new(0.0, unconstrained_to_ar(&ar_u).unwrap(), unconstrained_to_ma(&ma_u).unwrap());
        let y = TimeSeriesF64::new(1970, values, "y").unwrap();
        let fit = arima_from_params(&y, spec, params).unwrap();
        let fc = forecast_arima(&fit, 20, 0.95).unwrap();
        let w = fc.half_widths();
        for h in 1..w.len() {
            prop_assert!(w[h] >= w[h - 1]);
        }
        for i in 0..fc.horizon() {
            prop_assert!(fc.lower[i] <= fc.point[i] && fc.point[i] <= fc.upper[i]);
        }
    }

    #[test]
    fn stationary_forecast_converges_to_mean(
        values in series_strategy(30, 50),
        inverse_roots in prop::collection::vec(-0.8..0.8f64, 1..=3),
        intercept in 1.0..5.0f64,
    ) {
        let spec = ArimaSpec::new(inverse_roots.len(), 0, 0).unwrap();
        let ar = ar_from_inverse_roots(&inverse_roots);
        let mean = intercept / (1.0 - ar.iter().sum::<f64>());
        let y = TimeSeriesF64::new(1970, values, "y").unwrap();
        let fit = arima_from_params(&y, spec, ArmaParams::new(intercept, ar, vec![])).unwrap();
        let fc = forecast_arima(&fit, 200, 0.95).unwrap();
        let last = fc.point[199];
        prop_assert!((last - mean).abs() <= 1e-6 * mean.abs().max(1.0), "{} vs {}", last, mean);
    }

    #[test]
    fn holt_closed_form(
        values in series_strategy(6, 20),
        alpha in 0.01..0.99f64,
        beta in 0.01..0.99f64,
        phi in 0.8..0.98f64,
        b0 in -5.0..5.0f64,
    ) {
        let y = TimeSeriesF64::new(2000, values.clone(), "y").unwrap();
        let fit = holt_filter(&y, HoltParams::new(alpha, beta, phi, values[0], b0)).unwrap();
        let fc = forecast_holt(&fit, 30, 0.95).unwrap();
        let (l, b) = (fit.last_level(), fit.last_trend());
        let bound = l + b * phi / (1.0 - phi);
        let p = &fc.point;
        for h in 2..p.len() {
            let inc0 = p[h - 1] - p[h - 2];
            let inc1 = p[h] - p[h - 1];
            prop_assert!((inc1 - phi * inc0).abs() <= 1e-10 * (1.0 + l.abs() + b.abs()));
        }
        for &v in p {
            if b > 0.0 { prop_assert!(v <= bound + 1e-9 * (1.0 + bound.abs())); }
            if b < 0.0 { prop_assert!(v >= bound - 1e-9 * (1.0 + bound.abs())); }
        }
        for h in 1..p.len() {
            if b > 0.0 { prop_assert!(p[h] >= p[h - 1]); }
            if b < 0.0 { prop_assert!(p[h] <= p[h - 1]); }
        }
        let w = fc.half_widths();
        for h in 1..w.len() {
            prop_assert!(w[h] >= w[h - 1]);
        }
    }
}

fn record(msn: &str, start: i32, values: Vec<f64>) -> SedsRecord {
    SedsRecord {
        data_status: "2023F".into(),
        state: "CA".into(),
        msn: msn.into(),
        series: TimeSeries::new(start, values, msn).unwrap(),
    }
}

fn sig12_values(min: usize, max: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec((-999_999_999i64..999_999_999, 0u32..6), min..=max).prop_map(|v| {
        v.into_iter()
            .map(|(m, e)| m as f64 / 10f64.powi(e as i32))
            .collect()
    })
}

proptest! {
    #[test]
    fn seds_text_round_trip(
        a in sig12_values(12, 30),
        b in sig12_values(12, 30),
    ) {
        // records end together; only leading blanks are legal
        let b = b[..a.len().min(b.len())].to_vec();
        let lead = a.len() - b.len();
        let recs = vec![record("TETCB", 1960, a), record("SOTCB", 1960 + lead as i32, b)];
        let mut text = Vec::new();
        write_seds_csv(&recs, &mut text).unwrap();
        let parsed = parse_seds_csv(text.as_slice()).unwrap();
        prop_assert_eq!(&parsed, &recs);
        let mut again = Vec::new();
        write_seds_csv(&parsed, &mut again).unwrap();
        prop_assert_eq!(text, again);
    }

    #[test]
    fn unit_conversion_preserves_sums(raw in prop::collection::vec(0.0..1e7f64, 10..40)) {
        let recs = vec![record("TETCB", 1970, raw.clone())];
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let panel = build_panel(&src, &SeriesRef::parse("TETCB").unwrap(), &[]).unwrap();
        let panel_sum: f64 = panel.response.values().iter().sum();
        let raw_sum: f64 = raw.iter().sum();
        prop_assert!((panel_sum * 1000.0 - raw_sum).abs() <= 1e-9 * raw_sum.abs().max(1.0));
    }

    #[test]
    fn exclusions_compose(len in 20usize..50, c1 in 0i32..50, c2 in 0i32..50) {
        let recs = vec![
            record("TETCB", 1970, (0..len).map(|i| 4000.0 + i as f64).collect()),
            record("TEPRB", 1970, (0..len).map(|i| 2000.0 - i as f64 * 3.0).collect()),
        ];
        let src = PanelSources::new(&recs, MsnTable::bundled());
        let panel = build_panel(&src, &SeriesRef::parse("TETCB").unwrap(), &[SeriesRef::parse("TEPRB").unwrap()]).unwrap();
        let (y1, y2) = (1970 + c1.min(c2), 1970 + c1.max(c2));
        let nested = exclude_years(&exclude_years(&panel, y2).unwrap(), y1).unwrap();
        prop_assert_eq!(nested, exclude_years(&panel, y1).unwrap());
    }
}
