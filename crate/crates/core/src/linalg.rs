//! Small dense solvers shared by the minimax exchange and the scale regressions.

use crate::error::{Error, Result};
use crate::real::Real;

/// Solves `a x = b` in place by Gaussian elimination with partial pivoting.
/// `a` is row-major `n x n`.
pub(crate) fn solve_dense<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> Result<Vec<T>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| {
                a[r * n + col]
                    .abs()
                    .partial_cmp(&a[s * n + col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[pivot * n + col] == T::zero() || !a[pivot * n + col].is_finite() {
            return Err(Error::Numeric(format!("singular system at column {col}")));
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor == T::zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k];
                a[row * n + k] -= factor * v;
            }
            let v = b[col];
            b[row] -= factor * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

#[derive(Debug, Clone)]
pub(crate) struct LeastSquares<T> {
    pub coeffs: Vec<T>,
    pub residuals: Vec<T>,
    /// Ratio of largest to smallest diagonal entry of R after column scaling.
    pub condition: T,
}

impl<T: Real> LeastSquares<T> {
    pub fn rms(&self) -> T {
        if self.residuals.is_empty() {
            return T::zero();
        }
        let ss: T = self.residuals.iter().map(|&r| r * r).sum();
        (ss / T::from_usize_lossy(self.residuals.len())).sqrt()
    }
}

/// Least squares `y ~ X c` via modified Gram-Schmidt on the columns of `X`.
/// `columns[k][i]` is regressor `k` at observation `i`.
pub(crate) fn least_squares<T: Real>(columns: &[Vec<T>], y: &[T]) -> Result<LeastSquares<T>> {
    let p = columns.len();
    let m = y.len();
    if m < p {
        return Err(Error::InsufficientData(format!(
            "{m} observations for {p} regressors"
        )));
    }
    let mut q: Vec<Vec<T>> = columns.to_vec();
    let mut r = vec![T::zero(); p * p];
    for k in 0..p {
        for i in 0..k {
            let dot: T = q[i].iter().zip(&q[k]).map(|(&a, &b)| a * b).sum();
            r[i * p + k] = dot;
            let (head, tail) = q.split_at_mut(k);
            for (v, &u) in tail[0].iter_mut().zip(&head[i]) {
                *v -= dot * u;
            }
        }
        let norm = q[k].iter().map(|&v| v * v).sum::<T>().sqrt();
        if norm == T::zero() {
            return Err(Error::Numeric(format!("regressor {k} is collinear")));
        }
        r[k * p + k] = norm;
        for v in q[k].iter_mut() {
            *v /= norm;
        }
    }
    let qty: Vec<T> = q
        .iter()
        .map(|col| col.iter().zip(y).map(|(&a, &b)| a * b).sum())
        .collect();
    let mut coeffs = vec![T::zero(); p];
    for row in (0..p).rev() {
        let mut acc = qty[row];
        for k in row + 1..p {
            acc -= r[row * p + k] * coeffs[k];
        }
        coeffs[row] = acc / r[row * p + row];
    }
    let residuals = (0..m)
        .map(|i| y[i] - (0..p).map(|k| columns[k][i] * coeffs[k]).sum::<T>())
        .collect();
    let col_norms: Vec<T> = columns
        .iter()
        .map(|c| c.iter().map(|&v| v * v).sum::<T>().sqrt())
        .collect();
    let diag: Vec<T> = (0..p).map(|k| r[k * p + k] / col_norms[k]).collect();
    let hi = diag.iter().cloned().fold(T::zero(), T::max);
    let lo = diag.iter().cloned().fold(T::infinity(), T::min);
    Ok(LeastSquares {
        coeffs,
        residuals,
        condition: hi / lo,
    })
}

/// Slope of the least-squares line through `(x_i, y_i)`.
pub(crate) fn slope<T: Real>(x: &[T], y: &[T]) -> Result<T> {
    if x.len() < 2 {
        return Err(Error::InsufficientData("slope needs two points".into()));
    }
    let n = T::from_usize_lossy(x.len());
    let mx = x.iter().cloned().sum::<T>() / n;
    let my = y.iter().cloned().sum::<T>() / n;
    let mut sxy = T::zero();
    let mut sxx = T::zero();
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
    }
    if sxx == T::zero() {
        return Err(Error::InsufficientData("abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        let mut a = vec![2.0f64, 1.0, 1.0, 3.0];
        let mut b = vec![3.0, 5.0];
        let x = solve_dense(&mut a, &mut b, 2).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-14 && (x[1] - 1.4).abs() < 1e-14);
    }

    #[test]
    fn singular_is_reported() {
        let mut a = vec![1.0, 2.0, 2.0, 4.0];
        let mut b = vec![1.0, 2.0];
        assert!(solve_dense(&mut a, &mut b, 2).is_err());
    }

    #[test]
    fn least_squares_exact_line() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 1.5 - 0.25 * v).collect();
        let fit = least_squares(&[vec![1.0; 6], x.clone()], &y).unwrap();
        assert!((fit.coeffs[0] - 1.5).abs() < 1e-13);
        assert!((fit.coeffs[1] + 0.25).abs() < 1e-13);
        assert!(fit.rms() < 1e-13);
        assert!((slope(&x, &y).unwrap() + 0.25).abs() < 1e-14);
    }
}
