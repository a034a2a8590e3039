//! Forecast container and the normal quantiles behind its intervals.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Point forecasts with symmetric prediction intervals. Row `h` (0-based)
/// is the forecast for year `start_year + h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast<T: Scalar = f64> {
    pub start_year: i32,
    pub point: Vec<T>,
    pub lower: Vec<T>,
    pub upper: Vec<T>,
    /// Interval half-widths as computed, before adding to the points.
    pub half_width: Vec<T>,
    pub level: f64,
}

impl<T: Scalar> Forecast<T> {
    /// Builds the interval `point ± z(level)·sqrt(variance)` row by row.
    pub fn from_variances(
        start_year: i32,
        point: Vec<T>,
        variances: &[T],
        level: f64,
    ) -> Result<Self> {
        let z: T = lit(z_for_level(level)?);
        let half_width = variances
            .iter()
            .map(|&v| z * v.max(T::zero()).sqrt())
            .collect();
        Self::from_half_widths(start_year, point, half_width, level)
    }

    /// Builds the interval `point ± half_width` row by row.
    pub fn from_half_widths(
        start_year: i32,
        point: Vec<T>,
        half_width: Vec<T>,
        level: f64,
    ) -> Result<Self> {
        if half_width.len() != point.len() {
            return Err(Error::Argument(format!(
                "{} half-widths for {} forecast steps",
                half_width.len(),
                point.len()
            )));
        }
        let (lower, upper) = point
            .iter()
            .zip(&half_width)
            .map(|(&p, &hw)| (p - hw, p + hw))
            .unzip();
        Ok(Self {
            start_year,
            point,
            lower,
            upper,
            half_width,
            level,
        })
    }

    /// Rebuilds a forecast from stored bounds, e.g. a saved report.
    pub fn from_bounds(
        start_year: i32,
        point: Vec<T>,
        lower: Vec<T>,
        upper: Vec<T>,
        level: f64,
    ) -> Result<Self> {
        if lower.len() != point.len() || upper.len() != point.len() {
            return Err(Error::Argument(
                "forecast bounds and points differ in length".into(),
            ));
        }
        let half_width = upper
            .iter()
            .zip(&lower)
            .map(|(&u, &l)| (u - l) / lit(2.0))
            .collect();
        Ok(Self {
            start_year,
            point,
            lower,
            upper,
            half_width,
            level,
        })
    }

    pub fn horizon(&self) -> usize {
        self.point.len()
    }

    pub fn years(&self) -> impl Iterator<Item = i32> + '_ {
        (0..self.point.len()).map(move |h| self.start_year + h as i32)
    }

    /// Interval half-widths, one per step.
    pub fn half_widths(&self) -> Vec<T> {
        self.half_width.clone()
    }
}

pub(crate) fn check_horizon(horizon: usize) -> Result<()> {
    if horizon == 0 {
        return Err(Error::Argument(
            "forecast horizon must be at least 1".into(),
        ));
    }
    Ok(())
}

const LEVEL_TABLE: [(f64, f64); 4] = [
    (0.80, 1.281_551_565_544_600_5),
    (0.90, 1.644_853_626_951_472_2),
    (0.95, 1.959_963_984_540_054),
    (0.99, 2.575_829_303_548_900_4),
];

/// Two-sided normal quantile for a central interval of probability `level`.
pub fn z_for_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Argument(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    if let Some(&(_, z)) = LEVEL_TABLE.iter().find(|(l, _)| (l - level).abs() < 1e-12) {
        return Ok(z);
    }
    Ok(normal_quantile(0.5 + level / 2.0))
}

/// Inverse standard normal CDF (Wichura's AS 241, about 1e-16 relative
/// accuracy). Returns ±inf at 0 and 1 and NaN outside `[0, 1]`.
pub fn normal_quantile(p: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2509.0809287301227 * r + 33430.57558358813) * r
            + 67265.7709270087)
            * r
            + 45921.95393154987)
            * r
            + 13731.693765509461)
            * r
            + 1971.5909503065514)
            * r
            + 133.14166789178438)
            * r
            + 3.3871328727963665;
        let den = ((((((5226.495278852545 * r + 28729.085735721943) * r
            + 39307.89580009271)
            * r
            + 21213.794301586596)
            * r
            + 5394.196021424751)
            * r
            + 687.1870074920579)
            * r
            + 42.31333070160091)
            * r
            + 1.0;
        return q * num / den;
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.745450142783414e-4 * r + 0.022723844989269184) * r
            + 0.2417807251774506)
            * r
            + 1.2704582524523684)
            * r
            + 3.6478483247632045)
            * r
            + 5.769497221460691)
            * r
            + 4.630337846156545)
            * r
            + 1.4234371107496835;
        let den = ((((((1.0507500716444168e-9 * r + 5.475938084995345e-4) * r
            + 0.015198666563616457)
            * r
            + 0.14810397642748008)
            * r
            + 0.6897673349851)
            * r
            + 1.6763848301838038)
            * r
            + 2.053191626637759)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.0103343992922881e-7 * r + 2.7115555687434876e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 0.014_875_361_290_850_615)
            * r
            + 0.136_929_880_922_735_8)
            * r
            + 0.599_832_206_555_888)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_levels() {
        assert!((z_for_level(0.95).unwrap() - 1.959964).abs() < 1e-6);
        assert!((z_for_level(0.80).unwrap() - 1.281552).abs() < 1e-6);
        assert!(z_for_level(1.0).is_err());
        assert!(z_for_level(0.0).is_err());
    }

    #[test]
    fn quantile_matches_table_and_reference_values() {
        for (level, z) in LEVEL_TABLE {
            assert!((normal_quantile(0.5 + level / 2.0) - z).abs() < 1e-12);
        }
        // scipy.stats.norm.ppf reference values
        let refs = [
            (0.5, 0.0),
            (0.975, 1.959_963_984_540_054),
            (0.001, -3.090_232_306_167_813_5),
            (1e-10, -6.361_340_902_404_056),
            (0.7, 0.524_400_512_708_041),
        ];
        for (p, z) in refs {
            assert!((normal_quantile(p) - z).abs() < 1e-9, "p={p}");
        }
    }

    #[test]
    fn quantile_is_antisymmetric() {
        for &p in &[0.01, 0.2, 0.4, 0.49] {
            assert!((normal_quantile(p) + normal_quantile(1.0 - p)).abs() < 1e-12);
        }
    }
}
