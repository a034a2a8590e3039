//! Small dense least-squares helpers. Problems here have at most a handful
//! of columns, so everything is column-major `Vec<Vec<T>>`.

use crate::scalar::{lit, Scalar};

/// Solves `min ||A x - b||` by Householder QR. `columns[j]` is column `j`
/// of `A`. Returns `None` when a column is numerically dependent on the
/// preceding ones (relative tolerance `rank_tol`).
pub fn least_squares<T: Scalar>(columns: &[Vec<T>], b: &[T], rank_tol: T) -> Option<Vec<T>> {
    let k = columns.len();
    if k == 0 {
        return Some(Vec::new());
    }
    let m = b.len();
    if columns.iter().any(|c| c.len() != m) || m < k {
        return None;
    }
    let mut a: Vec<Vec<T>> = columns.to_vec();
    let mut rhs = b.to_vec();
    let col_norms: Vec<T> = a.iter().map(|c| norm(c)).collect();

    for j in 0..k {
        let alpha_norm = norm(&a[j][j..]);
        if alpha_norm <= rank_tol * col_norms[j].max(T::min_positive_value()) {
            return None;
        }
        let alpha = if a[j][j] > T::zero() {
            -alpha_norm
        } else {
            alpha_norm
        };
        let mut v: Vec<T> = a[j][j..].to_vec();
        v[0] = v[0] - alpha;
        let vnorm2 = v.iter().fold(T::zero(), |s, &x| s + x * x);
        if vnorm2 > T::zero() {
            let two = lit::<T>(2.0);
            for col in a.iter_mut().skip(j) {
                let dot = v
                    .iter()
                    .zip(&col[j..])
                    .fold(T::zero(), |s, (&x, &y)| s + x * y);
                let s = two * dot / vnorm2;
                for (c, &vi) in col[j..].iter_mut().zip(&v) {
                    *c = *c - s * vi;
                }
            }
            let dot = v
                .iter()
                .zip(&rhs[j..])
                .fold(T::zero(), |s, (&x, &y)| s + x * y);
            let s = two * dot / vnorm2;
            for (c, &vi) in rhs[j..].iter_mut().zip(&v) {
                *c = *c - s * vi;
            }
        }
    }

    let mut x = vec![T::zero(); k];
    for j in (0..k).rev() {
        let mut acc = rhs[j];
        for (i, xi) in x.iter().enumerate().skip(j + 1) {
            acc = acc - a[i][j] * *xi;
        }
        x[j] = acc / a[j][j];
    }
    Some(x)
}

fn norm<T: Scalar>(v: &[T]) -> T {
    let scale = v.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    if scale == T::zero() {
        return T::zero();
    }
    v.iter()
        .fold(T::zero(), |s, &x| {
            let y = x / scale;
            s + y * y
        })
        .sqrt()
        * scale
}

/// Smallest pivot of an unpivoted Cholesky factorization of the correlation
/// matrix of `columns`, or `None` if a column has zero variance. A pivot
/// below ~1e-8 means the columns are collinear.
pub fn min_correlation_pivot<T: Scalar>(columns: &[Vec<T>]) -> Option<T> {
    let standardized: Vec<Vec<T>> = columns
        .iter()
        .map(|c| {
            let m = crate::scalar::mean(c);
            let dev: Vec<T> = c.iter().map(|&x| x - m).collect();
            let sd = norm(&dev);
            if sd <= T::zero() {
                None
            } else {
                Some(dev.into_iter().map(|x| x / sd).collect())
            }
        })
        .collect::<Option<_>>()?;
    let k = standardized.len();
    let mut g = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in 0..=i {
            let v = standardized[i]
                .iter()
                .zip(&standardized[j])
                .fold(T::zero(), |s, (&a, &b)| s + a * b);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    let mut min_pivot = T::one();
    let mut l = vec![vec![T::zero(); k]; k];
    for j in 0..k {
        let mut d = g[j][j];
        for p in 0..j {
            d = d - l[j][p] * l[j][p];
        }
        min_pivot = min_pivot.min(d);
        if d <= T::zero() {
            return Some(d.max(T::zero()));
        }
        let dj = d.sqrt();
        l[j][j] = dj;
        for i in j + 1..k {
            let mut s = g[i][j];
            for p in 0..j {
                s = s - l[i][p] * l[j][p];
            }
            l[i][j] = s / dj;
        }
    }
    Some(min_pivot)
}
