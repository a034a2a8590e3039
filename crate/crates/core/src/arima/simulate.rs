use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};
use crate::series::TimeSeries;

use super::css::check_params;
use super::spec::{ArimaSpec, ArmaParams};

/// Draws `n` observations of an ARIMA process with Gaussian innovations of
/// variance `sigma2`. The ARMA recursion starts from zeros and discards
/// `200 + 10·max(p, q)` burn-in values; the kept values are then summed
/// `d` times. Output is a deterministic function of `seed`.
pub fn simulate_arima<T: Scalar>(
    spec: &ArimaSpec,
    params: &ArmaParams<T>,
    sigma2: T,
    n: usize,
    seed: u64,
) -> Result<TimeSeries<T>> {
    check_params(spec, params)?;
    if n == 0 {
        return Err(Error::Argument("simulation length must be positive".into()));
    }
    if !(sigma2 >= T::zero()) {
        return Err(Error::Argument(
            "innovation variance must be non-negative".into(),
        ));
    }
    let sd = sigma2.sqrt();
    let burn = 200 + 10 * spec.p.max(spec.q);
    let total = burn + n;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eps: Vec<T> = (0..total)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * lit::<T>(z)
        })
        .collect();
    let mut w: Vec<T> = Vec::with_capacity(total);
    for t in 0..total {
        let mut v = params.intercept + eps[t];
        for (i, &a) in params.ar.iter().enumerate() {
            if t > i {
                v = v + a * w[t - 1 - i];
            }
        }
        for (j, &m) in params.ma.iter().enumerate() {
            if t > j {
                v = v + m * eps[t - 1 - j];
            }
        }
        w.push(v);
    }
    let mut values = w.split_off(burn);
    for _ in 0..spec.d {
        let mut acc = T::zero();
        for v in values.iter_mut() {
            acc = acc + *v;
            *v = acc;
        }
    }
    TimeSeries::new(1, values, "simulated")
}
