//! Derivative-free minimization used by every estimator in the crate.
//!
//! Estimators reparametrize their constrained parameters onto the real line
//! and minimize with [`multistart`]: a Nelder–Mead run from the supplied
//! centre plus seeded perturbations of it, keeping the best end point.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::scalar::{lit, Scalar};

/// Settings shared by the ARIMA, ARIMAX and Holt estimators.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerOptions {
    /// Total starts, the first one at the centre point.
    pub restarts: usize,
    pub seed: u64,
    /// Stop once the simplex objective spread drops below this.
    pub tolerance: f64,
    /// Evaluation budget per free parameter for each start.
    pub evals_per_param: usize,
    /// Standard deviation of the start perturbations in unconstrained space.
    pub perturbation: f64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        Self {
            restarts: 5,
            seed: 20_240_101,
            tolerance: 1e-10,
            evals_per_param: 500,
            perturbation: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum<T> {
    pub x: Vec<T>,
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Nelder–Mead with standard coefficients (1, 2, 0.5, 0.5). Non-finite
/// objective values are treated as `+inf`.
pub fn nelder_mead<T: Scalar, F: FnMut(&[T]) -> T>(
    f: &mut F,
    x0: &[T],
    step: T,
    tolerance: T,
    max_evals: usize,
) -> Minimum<T> {
    let n = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &[T], evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            T::infinity()
        }
    };
    if n == 0 {
        let value = eval(x0, &mut evals);
        return Minimum {
            x: Vec::new(),
            value,
            evaluations: evals,
            converged: true,
        };
    }

    let mut simplex: Vec<Vec<T>> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] = v[i] + step;
        simplex.push(v);
    }
    let mut values: Vec<T> = simplex.iter().map(|x| eval(x, &mut evals)).collect();

    let half = lit::<T>(0.5);
    let two = lit::<T>(2.0);
    let mut converged = false;
    while evals < max_evals {
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let best = values[0];
        let worst = values[n];
        if best.is_finite() && (worst - best).abs() <= tolerance {
            converged = true;
            break;
        }

        let mut centroid = vec![T::zero(); n];
        for v in &simplex[..n] {
            for (c, &x) in centroid.iter_mut().zip(v) {
                *c = *c + x;
            }
        }
        let nn = T::from_usize(n).unwrap();
        centroid.iter_mut().for_each(|c| *c = *c / nn);

        let along = |t: T| -> Vec<T> {
            centroid
                .iter()
                .zip(&simplex[n])
                .map(|(&c, &w)| c + t * (c - w))
                .collect()
        };

        let xr = along(T::one());
        let fr = eval(&xr, &mut evals);
        if fr < values[0] {
            let xe = along(two);
            let fe = eval(&xe, &mut evals);
            if fe < fr {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if fr < values[n - 1] {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            let (xc, fc) = if fr < values[n] {
                let xc = along(half);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            } else {
                let xc = along(-half);
                let fc = eval(&xc, &mut evals);
                (xc, fc)
            };
            if fc < values[n].min(fr) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<T> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(&b, &x)| b + half * (x - b))
                        .collect();
                    values[i] = eval(&shrunk, &mut evals);
                    simplex[i] = shrunk;
                }
            }
        }
    }

    let (ib, _) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap();
    Minimum {
        x: simplex[ib].clone(),
        value: values[ib],
        evaluations: evals,
        converged,
    }
}

/// Runs Nelder–Mead from `center` and from `restarts - 1` seeded
/// perturbations of it. Each start is polished by one fresh-simplex restart
/// at its end point. Returns the best minimum and the total evaluation count.
pub fn multistart<T: Scalar, F: FnMut(&[T]) -> T>(
    mut f: F,
    center: &[T],
    options: &OptimizerOptions,
) -> Minimum<T> {
    let dim = center.len();
    let budget = options.evals_per_param * dim.max(1);
    let tol = lit::<T>(options.tolerance.max(T::epsilon_f64() * 16.0));
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);

    let mut starts = vec![center.to_vec()];
    for _ in 1..options.restarts.max(1) {
        starts.push(
            center
                .iter()
                .map(|&c| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    c + lit::<T>(z * options.perturbation)
                })
                .collect(),
        );
    }

    let mut best: Option<Minimum<T>> = None;
    let mut total = 0usize;
    for start in &starts {
        let mut m = nelder_mead(&mut f, start, lit(0.5), tol, budget);
        total += m.evaluations;
        if m.value.is_finite() {
            let polish = nelder_mead(&mut f, &m.x, lit(0.1), tol, budget);
            total += polish.evaluations;
            if polish.value <= m.value {
                m = Minimum {
                    converged: m.converged || polish.converged,
                    ..polish
                };
            }
        }
        let better = match &best {
            None => true,
            Some(b) => m.value < b.value,
        };
        if better {
            best = Some(m);
        }
    }
    let mut best = best.expect("at least one start");
    best.evaluations = total;
    best
}

/// Maps the real line onto `(lo, hi)`.
pub fn to_bounded<T: Scalar>(u: T, lo: T, hi: T) -> T {
    lo + (hi - lo) / (T::one() + (-u).exp())
}

/// Inverse of [`to_bounded`]; `x` must lie strictly inside `(lo, hi)`.
pub fn from_bounded<T: Scalar>(x: T, lo: T, hi: T) -> T {
    let s = (x - lo) / (hi - lo);
    (s / (T::one() - s)).ln()
}
