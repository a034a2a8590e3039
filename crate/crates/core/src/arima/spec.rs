use std::fmt;

use crate::error::{Error, Result};
use crate::optim::OptimizerOptions;

pub const MAX_ARMA_ORDER: usize = 8;
pub const MAX_DIFFERENCE: usize = 2;

/// Order triple `(p, d, q)` plus the intercept switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArimaSpec {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub include_constant: bool,
}

impl ArimaSpec {
    /// Order with the default intercept convention: constant only when `d == 0`.
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        Self::with_constant(p, d, q, d == 0)
    }

    pub fn with_constant(p: usize, d: usize, q: usize, include_constant: bool) -> Result<Self> {
        if p > MAX_ARMA_ORDER || q > MAX_ARMA_ORDER || d > MAX_DIFFERENCE {
            return Err(Error::Argument(format!(
                "order ({p},{d},{q}) outside the supported range p,q <= {MAX_ARMA_ORDER}, d <= {MAX_DIFFERENCE}"
            )));
        }
        Ok(Self {
            p,
            d,
            q,
            include_constant,
        })
    }

    /// AR + MA + constant + one for the innovation variance.
    pub fn n_params(&self) -> usize {
        self.p + self.q + usize::from(self.include_constant) + 1
    }

    pub fn order(&self) -> (usize, usize, usize) {
        (self.p, self.d, self.q)
    }
}

impl fmt::Display for ArimaSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

/// Coefficients of `w_t = intercept + Σ ar_i w_{t-i} + e_t + Σ ma_j e_{t-j}`
/// where `w` is the differenced series.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaParams<T> {
    pub intercept: T,
    pub ar: Vec<T>,
    pub ma: Vec<T>,
}

impl<T: num_traits::Zero + Clone> ArmaParams<T> {
    pub fn new(intercept: T, ar: Vec<T>, ma: Vec<T>) -> Self {
        Self { intercept, ar, ma }
    }

    pub fn zeros(spec: &ArimaSpec) -> Self {
        Self {
            intercept: T::zero(),
            ar: vec![T::zero(); spec.p],
            ma: vec![T::zero(); spec.q],
        }
    }
}

/// Estimation settings for ARIMA and ARIMAX fits.
#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub optimizer: OptimizerOptions,
    /// Observations required beyond `p + q + d`.
    pub min_sample_margin: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            optimizer: OptimizerOptions::default(),
            min_sample_margin: 10,
        }
    }
}

impl FitOptions {
    pub fn with_seed(seed: u64) -> Self {
        let mut o = Self::default();
        o.optimizer.seed = seed;
        o
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_constant_follows_differencing() {
        assert!(ArimaSpec::new(1, 0, 1).unwrap().include_constant);
        assert!(!ArimaSpec::new(1, 1, 1).unwrap().include_constant);
        assert_eq!(ArimaSpec::new(2, 0, 1).unwrap().n_params(), 5);
        assert_eq!(ArimaSpec::new(2, 1, 1).unwrap().n_params(), 4);
    }

    #[test]
    fn bounds_enforced() {
        assert!(ArimaSpec::new(9, 0, 0).is_err());
        assert!(ArimaSpec::new(0, 3, 0).is_err());
        assert!(ArimaSpec::new(8, 2, 8).is_ok());
        assert_eq!(ArimaSpec::new(2, 1, 0).unwrap().to_string(), "(2,1,0)");
    }
}
