//! Conditional-sum-of-squares objective.
//!
//! For a differenced series `w` the residuals are
//! `e_t = w_t - α - Σ β_i w_{t-i} - Σ φ_j e_{t-j}` for `t >= p` (0-based),
//! with presample residuals fixed at zero. For fixed `(β, φ)` they are
//! linear in the intercept and in any regression coefficients, which lets
//! the estimator solve those exactly by least squares and search only over
//! the ARMA block.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::optim::{multistart, OptimizerOptions};
use crate::scalar::{count, lit, Scalar};
use crate::series::TimeSeries;

use super::spec::{ArimaSpec, ArmaParams};
use super::transform::{
    check_invertible, check_stationary, unconstrained_to_ar, unconstrained_to_ma,
};

/// ARMA residual filter. With `apply_ar = false` only the MA feedback is
/// applied, which is how a constant enters the recursion.
pub(crate) fn arma_filter<T: Scalar>(w: &[T], ar: &[T], ma: &[T], apply_ar: bool) -> Vec<T> {
    let p = ar.len();
    let n = w.len();
    if n <= p {
        return Vec::new();
    }
    let mut e: Vec<T> = Vec::with_capacity(n - p);
    for t in p..n {
        let mut v = w[t];
        if apply_ar {
            for (i, &b) in ar.iter().enumerate() {
                v = v - b * w[t - 1 - i];
            }
        }
        let k = t - p;
        for (j, &m) in ma.iter().enumerate() {
            if k > j {
                v = v - m * e[k - 1 - j];
            }
        }
        e.push(v);
    }
    e
}

/// Residuals for explicit parameters on an already differenced series.
pub fn css_residuals<T: Scalar>(w: &[T], params: &ArmaParams<T>) -> Vec<T> {
    // The intercept is not AR-filtered, so w and the constant go through
    // the recursion separately.
    let ew = arma_filter(w, &params.ar, &params.ma, true);
    let ec = arma_filter(&vec![T::one(); w.len()], &params.ar, &params.ma, false);
    ew.iter()
        .zip(&ec)
        .map(|(&a, &c)| a - params.intercept * c)
        .collect()
}

/// Gaussian log-likelihood given a residual sum of squares over `n`
/// residuals, with the variance estimate floored at `sigma2_floor`.
pub(crate) fn gaussian_loglik<T: Scalar>(sse: T, n: usize, sigma2_floor: T) -> (T, T) {
    let nn: T = count(n);
    let sigma2 = (sse / nn).max(sigma2_floor);
    let two_pi: T = lit(2.0 * PI);
    let loglik = -(nn / lit(2.0)) * (two_pi.ln() + sigma2.ln()) - sse / (lit::<T>(2.0) * sigma2);
    (loglik, sigma2)
}

/// Conditional log-likelihood of an ARMA model (with `spec.p`, `spec.q`
/// and constant flag) on a series the caller has already differenced
/// `spec.d` times: `-(n/2)(ln 2π + ln σ̂² + 1)` with `σ̂² = SSE / n`.
pub fn css_loglik<T: Scalar>(
    series: &TimeSeries<T>,
    spec: &ArimaSpec,
    params: &ArmaParams<T>,
) -> Result<T> {
    check_params(spec, params)?;
    let w = series.values();
    if w.len() <= spec.p {
        return Err(Error::InsufficientData {
            what: "conditional likelihood",
            needed: spec.p + 1,
            got: w.len(),
        });
    }
    let e = css_residuals(w, params);
    let sse = e.iter().fold(T::zero(), |s, &v| s + v * v);
    Ok(gaussian_loglik(sse, e.len(), T::zero()).0)
}

pub(crate) fn check_params<T: Scalar>(spec: &ArimaSpec, params: &ArmaParams<T>) -> Result<()> {
    if params.ar.len() != spec.p || params.ma.len() != spec.q {
        return Err(Error::Argument(format!(
            "spec {spec} expects {} AR and {} MA coefficients, got {} and {}",
            spec.p,
            spec.q,
            params.ar.len(),
            params.ma.len()
        )));
    }
    if !spec.include_constant && params.intercept != T::zero() {
        return Err(Error::Argument(format!(
            "spec {spec} has no constant but intercept is {:?}",
            params.intercept
        )));
    }
    check_stationary(&params.ar)?;
    check_invertible(&params.ma)
}

/// Differenced response plus differenced regressors, ready for estimation.
pub(crate) struct CssProblem<T: Scalar> {
    pub w: Vec<T>,
    pub exog: Vec<Vec<T>>,
    pub p: usize,
    pub q: usize,
    pub constant: bool,
    pub sigma2_floor: T,
}

/// Result of a profiled solve at one ARMA parameter point.
pub(crate) struct CssSolution<T> {
    pub ar: Vec<T>,
    pub ma: Vec<T>,
    pub intercept: T,
    pub gamma: Vec<T>,
    pub evaluations: usize,
}

impl<T: Scalar> CssProblem<T> {
    /// Least-squares solve of intercept and regression coefficients at fixed
    /// `(ar, ma)`. Returns `(intercept, gamma, sse)`.
    pub fn profile(&self, ar: &[T], ma: &[T]) -> Option<(T, Vec<T>, T)> {
        let target = arma_filter(&self.w, ar, ma, true);
        let mut cols: Vec<Vec<T>> = Vec::with_capacity(self.exog.len() + 1);
        if self.constant {
            cols.push(arma_filter(&vec![T::one(); self.w.len()], ar, ma, false));
        }
        for x in &self.exog {
            cols.push(arma_filter(x, ar, ma, true));
        }
        let theta = least_squares(&cols, &target, lit(1e-10))?;
        let mut sse = T::zero();
        for t in 0..target.len() {
            let mut r = target[t];
            for (c, &th) in cols.iter().zip(&theta) {
                r = r - th * c[t];
            }
            sse = sse + r * r;
        }
        if !sse.is_finite() {
            return None;
        }
        let (intercept, gamma) = if self.constant {
            (theta[0], theta[1..].to_vec())
        } else {
            (T::zero(), theta)
        };
        Some((intercept, gamma, sse))
    }

    pub fn n_eff(&self) -> usize {
        self.w.len().saturating_sub(self.p)
    }

    /// Maximizes the conditional likelihood over the ARMA block with the
    /// linear coefficients profiled out.
    pub fn solve(&self, options: &OptimizerOptions) -> Result<CssSolution<T>> {
        let n_eff = self.n_eff();
        let nn: T = count(n_eff);
        let half_n = nn / lit(2.0);
        let (p, q) = (self.p, self.q);
        let split = |u: &[T]| -> Option<(Vec<T>, Vec<T>)> {
            Some((unconstrained_to_ar(&u[..p])?, unconstrained_to_ma(&u[p..])?))
        };
        let objective = |u: &[T]| -> T {
            match split(u).and_then(|(ar, ma)| self.profile(&ar, &ma)) {
                Some((_, _, sse)) => half_n * (sse / nn).max(self.sigma2_floor).ln(),
                None => T::infinity(),
            }
        };
        let m = multistart(objective, &vec![T::zero(); p + q], options);
        let best = split(&m.x).and_then(|(ar, ma)| {
            self.profile(&ar, &ma)
                .map(|(intercept, gamma, _)| (ar, ma, intercept, gamma))
        });
        match best {
            Some((ar, ma, intercept, gamma)) if m.value.is_finite() => Ok(CssSolution {
                ar,
                ma,
                intercept,
                gamma,
                evaluations: m.evaluations,
            }),
            _ => Err(Error::Convergence {
                restarts: options.restarts,
                evaluations: m.evaluations,
                best_objective: crate::scalar::to_f64(m.value),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ts(v: &[f64]) -> TimeSeries<f64> {
        TimeSeries::new(2000, v.to_vec(), "y").unwrap()
    }

    #[test]
    fn white_noise_optimum_is_mean() {
        let y = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
        let spec = ArimaSpec::new(0, 0, 0).unwrap();
        let mean = y.iter().sum::<f64>() / 8.0;
        let at_mean = css_loglik(&ts(&y), &spec, &ArmaParams::new(mean, vec![], vec![])).unwrap();
        for delta in [-0.1, 0.01, 0.5] {
            let off = css_loglik(
                &ts(&y),
                &spec,
                &ArmaParams::new(mean + delta, vec![], vec![]),
            )
            .unwrap();
            assert!(off < at_mean);
        }
    }

    #[test]
    fn ar1_with_zero_coefficient_sums_squares_from_second_point() {
        let y = [1.0, -2.0, 0.5, 3.0, -1.5];
        let spec = ArimaSpec::with_constant(1, 0, 0, false).unwrap();
        let params = ArmaParams::new(0.0, vec![0.0], vec![]);
        let e = css_residuals(&y, &params);
        let sse: f64 = e.iter().map(|v| v * v).sum();
        assert_eq!(sse, y[1..].iter().map(|v| v * v).sum::<f64>());
        let ll = css_loglik(&ts(&y), &spec, &params).unwrap();
        let n = 4.0;
        let expected = -(n / 2.0) * ((2.0 * PI).ln() + (sse / n).ln() + 1.0);
        assert!((ll - expected).abs() < 1e-12);
    }

    #[test]
    fn arma11_against_hand_recursion() {
        // Independent oracle: the recursion written out with explicit state.
        let y: [f64; 10] = [0.3, -1.2, 0.8, 1.9, 0.4, -0.7, -1.1, 0.2, 1.5, 0.9];
        let (alpha, beta, phi) = (0.1, 0.5, 0.3);
        let mut prev_e = 0.0;
        let mut sse: f64 = 0.0;
        for t in 1..y.len() {
            let e = y[t] - alpha - beta * y[t - 1] - phi * prev_e;
            sse += e * e;
            prev_e = e;
        }
        let n: f64 = 9.0;
        let oracle = -(n / 2.0) * ((2.0 * PI).ln() + (sse / n).ln() + 1.0);
        let spec = ArimaSpec::new(1, 0, 1).unwrap();
        let ll = css_loglik(
            &ts(&y),
            &spec,
            &ArmaParams::new(alpha, vec![beta], vec![phi]),
        )
        .unwrap();
        assert!((ll - oracle).abs() < 1e-12, "{ll} vs {oracle}");
        // frozen value from the scratch computation above
        assert!((ll - -13.023_892_659_912_384).abs() < 1e-9, "{ll}");
    }

    #[test]
    fn nonstationary_params_rejected() {
        let spec = ArimaSpec::new(1, 0, 0).unwrap();
        let err = css_loglik(
            &ts(&[1.0, 2.0, 3.0]),
            &spec,
            &ArmaParams::new(0.0, vec![1.0], vec![]),
        );
        assert!(matches!(err, Err(Error::Constraint(_))));
    }
}
