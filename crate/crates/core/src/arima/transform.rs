//! Partial-autocorrelation reparametrization of AR and MA polynomials.
//!
//! A vector of partial autocorrelations with magnitudes below one maps
//! one-to-one onto the coefficients of a polynomial `1 - Σ c_i z^i` with all
//! roots outside the unit circle (Durbin–Levinson). MA blocks use the sign
//! convention `1 + Σ m_j z^j`, so `m = -c`.

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Largest admissible partial-autocorrelation magnitude.
pub const PACF_MARGIN: f64 = 1e-6;

/// Durbin–Levinson: partial autocorrelations to AR coefficients.
pub fn pacf_to_coeffs<T: Scalar>(pacf: &[T]) -> Vec<T> {
    let mut a: Vec<T> = Vec::with_capacity(pacf.len());
    for (k, &r) in pacf.iter().enumerate() {
        let prev = a.clone();
        for j in 0..k {
            a[j] = prev[j] - r * prev[k - 1 - j];
        }
        a.push(r);
    }
    a
}

/// Inverse Durbin–Levinson. `None` when a partial autocorrelation reaches
/// magnitude one (non-stationary polynomial).
pub fn coeffs_to_pacf<T: Scalar>(coeffs: &[T]) -> Option<Vec<T>> {
    let mut a = coeffs.to_vec();
    let mut pacf = vec![T::zero(); a.len()];
    for k in (0..a.len()).rev() {
        let r = a[k];
        if !(r.abs() < T::one()) {
            return None;
        }
        pacf[k] = r;
        let denom = T::one() - r * r;
        let prev = a.clone();
        for j in 0..k {
            a[j] = (prev[j] + r * prev[k - 1 - j]) / denom;
        }
        a.truncate(k);
    }
    Some(pacf)
}

/// Unconstrained values to AR coefficients; `None` past the margin.
pub fn unconstrained_to_ar<T: Scalar>(u: &[T]) -> Option<Vec<T>> {
    let limit = T::one() - lit(PACF_MARGIN);
    let pacf: Vec<T> = u.iter().map(|&x| x.tanh()).collect();
    if pacf.iter().any(|r| r.abs() > limit) {
        return None;
    }
    Some(pacf_to_coeffs(&pacf))
}

pub fn unconstrained_to_ma<T: Scalar>(u: &[T]) -> Option<Vec<T>> {
    unconstrained_to_ar(u).map(|c| c.into_iter().map(|x| -x).collect())
}

pub fn ar_to_unconstrained<T: Scalar>(ar: &[T]) -> Option<Vec<T>> {
    coeffs_to_pacf(ar).map(|p| p.into_iter().map(|r| r.atanh()).collect())
}

pub fn ma_to_unconstrained<T: Scalar>(ma: &[T]) -> Option<Vec<T>> {
    let neg: Vec<T> = ma.iter().map(|&x| -x).collect();
    ar_to_unconstrained(&neg)
}

fn check_block<T: Scalar>(coeffs: &[T], what: &str) -> Result<()> {
    let limit = T::one() - lit(PACF_MARGIN);
    match coeffs_to_pacf(coeffs) {
        Some(p) if p.iter().all(|r| r.abs() <= limit) => Ok(()),
        _ => Err(Error::Constraint(format!(
            "{what} coefficients {coeffs:?} violate the unit-root margin"
        ))),
    }
}

/// Fails unless the AR polynomial is stationary with margin.
pub fn check_stationary<T: Scalar>(ar: &[T]) -> Result<()> {
    check_block(ar, "AR")
}

/// Fails unless the MA polynomial is invertible with margin.
pub fn check_invertible<T: Scalar>(ma: &[T]) -> Result<()> {
    let neg: Vec<T> = ma.iter().map(|&x| -x).collect();
    check_block(&neg, "MA")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_order_is_identity() {
        assert_eq!(pacf_to_coeffs(&[0.6]), vec![0.6]);
        assert_eq!(coeffs_to_pacf(&[0.6]).unwrap(), vec![0.6]);
    }

    #[test]
    fn second_order_known_values() {
        // AR(2) with phi = (0.5, 0.3): pacf_2 = 0.3, pacf_1 = 0.5 / (1 - 0.3)
        let pacf = coeffs_to_pacf(&[0.5_f64, 0.3]).unwrap();
        assert!((pacf[1] - 0.3).abs() < 1e-15);
        assert!((pacf[0] - 0.5 / 0.7).abs() < 1e-15);
        let back = pacf_to_coeffs(&pacf);
        assert!((back[0] - 0.5).abs() < 1e-15 && (back[1] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn unit_root_rejected() {
        assert!(coeffs_to_pacf(&[1.0]).is_none());
        assert!(check_stationary(&[0.5, 0.5]).is_err());
        assert!(check_stationary(&[0.5, 0.3]).is_ok());
        assert!(check_invertible(&[-1.0]).is_err());
        assert!(check_invertible(&[0.7]).is_ok());
    }

    #[test]
    fn ma_sign_convention() {
        let ma = unconstrained_to_ma(&[0.5_f64]).unwrap();
        assert!((ma[0] + 0.5_f64.tanh()).abs() < 1e-15);
        let u = ma_to_unconstrained(&ma).unwrap();
        assert!((u[0] - 0.5).abs() < 1e-12);
    }
}
