//! Forecast chart: observed history, forecast line and a shaded interval.
//!
//! Hand-written SVG with coordinates printed to two decimals, so identical
//! inputs give identical bytes. The document holds exactly two polylines
//! (observed, forecast) and one polygon (interval); axes, ticks and legend
//! use `line`, `rect` and `text` only.

use std::fmt::Write as _;

use seds_forecast_core::forecast::Forecast;
use seds_forecast_core::{Error, TimeSeriesF64};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgStyle {
    pub width: u32,
    pub height: u32,
    pub title: String,
    pub y_label: String,
    pub observed_color: String,
    pub forecast_color: String,
    pub band_color: String,
}

impl Default for SvgStyle {
    fn default() -> Self {
        Self {
            width: 800,
            height: 450,
            title: String::new(),
            y_label: "trillion Btu".into(),
            observed_color: "#000000".into(),
            forecast_color: "#d62728".into(),
            band_color: "#9e9e9e".into(),
        }
    }
}

const MARGIN_LEFT: f64 = 80.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// 1, 2 or 5 times a power of ten, at least `raw`.
fn nice_step(raw: f64) -> f64 {
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * mag)
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn label(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

struct Frame {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    left: f64,
    right: f64,
    top: f64,
    bottom: f64,
}

impl Frame {
    fn x(&self, year: f64) -> f64 {
        self.left + (year - self.x0) / (self.x1 - self.x0) * (self.right - self.left)
    }

    fn y(&self, v: f64) -> f64 {
        self.bottom - (v - self.y0) / (self.y1 - self.y0) * (self.bottom - self.top)
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        pts.iter()
            .map(|&(t, v)| format!("{:.2},{:.2}", self.x(t), self.y(v)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub fn render_forecast_svg(
    history: &TimeSeriesF64,
    forecast: &Forecast<f64>,
    style: &SvgStyle,
) -> Result<String, Error> {
    if forecast.horizon() == 0 || history.is_empty() {
        return Err(Error::Argument(
            "chart needs history and at least one forecast year".into(),
        ));
    }
    if forecast.lower.len() != forecast.horizon() || forecast.upper.len() != forecast.horizon() {
        return Err(Error::Argument(
            "forecast bounds and points differ in length".into(),
        ));
    }
    if style.width < 200 || style.height < 150 {
        return Err(Error::Argument("chart must be at least 200 by 150".into()));
    }
    let all = history
        .values()
        .iter()
        .chain(&forecast.point)
        .chain(&forecast.lower)
        .chain(&forecast.upper);
    if all.clone().any(|v| !v.is_finite()) {
        return Err(Error::Argument("chart values must be finite".into()));
    }
    let (lo, hi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
        (a.min(v), b.max(v))
    });
    let pad = if hi > lo {
        0.05 * (hi - lo)
    } else {
        lo.abs().max(1.0) * 0.1
    };
    let y_step = nice_step((hi - lo + 2.0 * pad) / 5.0);
    let (y0, y1) = (
        ((lo - pad) / y_step).floor() * y_step,
        ((hi + pad) / y_step).ceil() * y_step,
    );
    let first_year = history.start_year();
    let last_year = forecast.start_year + forecast.horizon() as i32 - 1;
    let (w, h) = (f64::from(style.width), f64::from(style.height));
    let frame = Frame {
        x0: f64::from(first_year),
        x1: f64::from(last_year.max(first_year + 1)),
        y0,
        y1,
        left: MARGIN_LEFT,
        right: w - MARGIN_RIGHT,
        top: MARGIN_TOP,
        bottom: h - MARGIN_BOTTOM,
    };

    let mut s = String::new();
    let mut out = |line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    out(format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">",
        style.width, style.height, style.width, style.height
    ));
    out(format!(
        "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"#ffffff\"/>",
        style.width, style.height
    ));
    if !style.title.is_empty() {
        out(format!(
            "<text x=\"{:.2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{}</text>",
            w / 2.0,
            escape(&style.title)
        ));
    }

    out("<g stroke=\"#333333\" stroke-width=\"1\">".into());
    out(format!(
        "<line x1=\"{l:.2}\" y1=\"{b:.2}\" x2=\"{r:.2}\" y2=\"{b:.2}\"/>",
        l = frame.left,
        r = frame.right,
        b = frame.bottom
    ));
    out(format!(
        "<line x1=\"{l:.2}\" y1=\"{t:.2}\" x2=\"{l:.2}\" y2=\"{b:.2}\"/>",
        l = frame.left,
        t = frame.top,
        b = frame.bottom
    ));
    out("</g>".into());

    let mut ticks = String::new();
    let span = (last_year - first_year).max(1);
    let year_step = (nice_step(f64::from(span) / 8.0).max(1.0)) as i32;
    let mut year = (first_year + year_step - 1).div_euclid(year_step) * year_step;
    while year <= last_year {
        let x = frame.x(f64::from(year));
        writeln!(
            ticks,
            "<line x1=\"{x:.2}\" y1=\"{b:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" stroke=\"#333333\"/>\n<text x=\"{x:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{year}</text>",
            frame.bottom + 5.0,
            frame.bottom + 20.0,
            b = frame.bottom
        )
        .expect("string write");
        year += year_step;
    }
    let n_y = ((y1 - y0) / y_step).round() as i64;
    for k in 0..=n_y {
        let v = y0 + k as f64 * y_step;
        let y = frame.y(v);
        writeln!(
            ticks,
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{l:.2}\" y2=\"{y:.2}\" stroke=\"#333333\"/>\n<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{}</text>",
            frame.left - 5.0,
            frame.left - 8.0,
            y + 4.0,
            label(v),
            l = frame.left
        )
        .expect("string write");
    }
    s.push_str(&ticks);

    let mut out = |line: String| {
        s.push_str(&line);
        s.push('\n');
    };
    out(format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">Year</text>",
        (frame.left + frame.right) / 2.0,
        h - 15.0
    ));
    out(format!(
        "<text x=\"18\" y=\"{c:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {c:.2})\">{}</text>",
        escape(&style.y_label),
        c = (frame.top + frame.bottom) / 2.0
    ));

    let years: Vec<f64> = forecast.years().map(f64::from).collect();
    let band: Vec<(f64, f64)> = years
        .iter()
        .zip(&forecast.upper)
        .map(|(&t, &v)| (t, v))
        .chain(
            years
                .iter()
                .zip(&forecast.lower)
                .rev()
                .map(|(&t, &v)| (t, v)),
        )
        .collect();
    out(format!(
        "<polygon points=\"{}\" fill=\"{}\" fill-opacity=\"0.35\" stroke=\"none\"/>",
        frame.points(&band),
        style.band_color
    ));
    let observed: Vec<(f64, f64)> = (0..history.len())
        .map(|i| (f64::from(history.year_of(i)), history.values()[i]))
        .collect();
    out(format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\"/>",
        frame.points(&observed),
        style.observed_color
    ));
    // the forecast line starts from the last observation
    let joined: Vec<(f64, f64)> = observed[observed.len() - 1..]
        .iter()
        .copied()
        .chain(years.iter().zip(&forecast.point).map(|(&t, &v)| (t, v)))
        .collect();
    out(format!(
        "<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>",
        frame.points(&joined),
        style.forecast_color
    ));

    let (lx, ly) = (frame.left + 15.0, frame.top + 10.0);
    let pct = label(forecast.level * 100.0);
    out("<g font-size=\"11\">".into());
    out(format!(
        "<line x1=\"{lx:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" stroke=\"{}\" stroke-width=\"1.5\"/>",
        lx + 20.0,
        style.observed_color
    ));
    out(format!(
        "<text x=\"{:.2}\" y=\"{:.2}\">observed</text>",
        lx + 26.0,
        ly + 4.0
    ));
    out(format!(
        "<line x1=\"{lx:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{}\" stroke-width=\"2\"/>",
        ly + 16.0,
        lx + 20.0,
        ly + 16.0,
        style.forecast_color
    ));
    out(format!(
        "<text x=\"{:.2}\" y=\"{:.2}\">forecast</text>",
        lx + 26.0,
        ly + 20.0
    ));
    out(format!(
        "<rect x=\"{lx:.2}\" y=\"{:.2}\" width=\"20\" height=\"10\" fill=\"{}\" fill-opacity=\"0.35\"/>",
        ly + 27.0,
        style.band_color
    ));
    out(format!(
        "<text x=\"{:.2}\" y=\"{:.2}\">{pct}% interval</text>",
        lx + 26.0,
        ly + 36.0
    ));
    out("</g>".into());
    out("</svg>".into());
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_are_nice() {
        assert_eq!(nice_step(0.7), 1.0);
        assert_eq!(nice_step(1.3), 2.0);
        assert_eq!(nice_step(420.0), 500.0);
        assert_eq!(nice_step(6.0), 10.0);
    }

    #[test]
    fn labels_trim() {
        assert_eq!(label(2000.0), "2000");
        assert_eq!(label(0.25), "0.25");
        assert_eq!(label(-0.001), "0");
        assert_eq!(escape("A&B <x>"), "A&amp;B &lt;x&gt;");
    }
}
