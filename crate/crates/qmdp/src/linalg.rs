//! Small dense real linear-algebra helpers shared across the crate.

use crate::{Error, Result};

/// LU factorization with partial pivoting of a dense row-major square matrix.
pub(crate) struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(n: usize, a: &[f64]) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut lu = a.to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut piv = k;
            let mut max = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > max {
                    max = v;
                    piv = i;
                }
            }
            if max < 1e-300 {
                return Err(Error::LinearSolve(format!("singular pivot at column {k}")));
            }
            if piv != k {
                for j in 0..n {
                    lu.swap(k * n + j, piv * n + j);
                }
                perm.swap(k, piv);
            }
            let pivot = lu[k * n + k];
            for i in (k + 1)..n {
                let f = lu[i * n + k] / pivot;
                lu[i * n + k] = f;
                for j in (k + 1)..n {
                    lu[i * n + j] -= f * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in (i + 1)..n {
                s -= self.lu[i * n + j] * x[j];
            }
            x[i] = s / self.lu[i * n + i];
        }
        x
    }
}

/// Solve `a·x = b` for dense row-major `a`.
pub(crate) fn solve_dense(n: usize, a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    Ok(Lu::factor(n, a)?.solve(b))
}

/// 1-norm condition estimate `‖A‖₁ · ‖A⁻¹‖₁` by explicit column solves;
/// fine at the dimensions used here.
pub(crate) fn condition_estimate(n: usize, a: &[f64]) -> f64 {
    let norm1 = |m: &dyn Fn(usize, usize) -> f64| -> f64 {
        (0..n)
            .map(|j| (0..n).map(|i| m(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let a_norm = norm1(&|i, j| a[i * n + j]);
    let lu = match Lu::factor(n, a) {
        Ok(lu) => lu,
        Err(_) => return f64::INFINITY,
    };
    let mut inv_cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        inv_cols.push(lu.solve(&e));
    }
    let inv_norm = norm1(&|i, j| inv_cols[j][i]);
    a_norm * inv_norm
}

/// Cholesky factorization `a = L·Lᵀ` of a symmetric positive-definite
/// row-major matrix; returns the lower factor.
pub(crate) fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[i * n + i] = s.sqrt();
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Forward substitution `L·x = b` with lower-triangular `l`.
pub(crate) fn solve_lower(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..n {
        let mut s = x[i];
        for j in 0..i {
            s -= l[i * n + j] * x[j];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

/// Back substitution `Lᵀ·x = b` with lower-triangular `l`.
pub(crate) fn solve_lower_t(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let mut s = x[i];
        for j in (i + 1)..n {
            s -= l[j * n + i] * x[j];
        }
        x[i] = s / l[i * n + i];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0];
        let b = [1.0, 2.0, 3.0];
        let x = solve_dense(3, &a, &b).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((r - b[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_round_trip() {
        let a = [4.0, 1.0, 2.0, 1.0, 3.0, 0.5, 2.0, 0.5, 5.0];
        let l = cholesky(3, &a).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let v: f64 = (0..3).map(|k| l[i * 3 + k] * l[j * 3 + k]).sum();
                assert!((v - a[i * 3 + j]).abs() < 1e-12);
            }
        }
        let x = solve_lower_t(3, &l, &solve_lower(3, &l, &[1.0, 0.0, 0.0]));
        let r: f64 = (0..3).map(|j| a[j] * x[j]).sum();
        assert!((r - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_matrix_reports_error() {
        let a = [1.0, 2.0, 2.0, 4.0];
        assert!(Lu::factor(2, &a).is_err());
    }
}
