//! Hermitian eigendecomposition.
//!
//! Householder tridiagonalization followed by implicit-shift QL, run on the
//! real symmetric 2n×2n embedding `[[Re, −Im], [Im, Re]]` of the Hermitian
//! input. The embedding doubles every eigenvalue; one complex eigenvector
//! per pair is recovered by Gram-Schmidt over the complexified real
//! eigenvectors. Dimensions here are small, so robustness wins over speed.

use super::{ComplexMatrix, HermitianOperator};
use crate::{Error, Result};
use num_complex::Complex64;

/// Eigendecomposition `h = V·diag(λ)·V†` with `λ` ascending and unitary `V`
/// (columns are eigenvectors).
#[derive(Clone, Debug)]
pub struct EigH {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigH {
    /// `V·diag(f(λ))·V†`.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> HermitianOperator {
        let n = self.values.len();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| {
            let mut s = Complex64::ZERO;
            for k in 0..n {
                s += self.vectors.get(i, k) * f(self.values[k]) * self.vectors.get(j, k).conj();
            }
            s
        });
        HermitianOperator::herm_part(&mat)
    }
}

/// Symmetric Householder reduction to tridiagonal form (tred2).
///
/// On exit `a` holds the accumulated orthogonal transform Q (row-major),
/// `d` the diagonal and `e` the subdiagonal (e[0] unused).
fn tred2(n: usize, a: &mut [f64], d: &mut [f64], e: &mut [f64]) {
    for i in (1..n).rev() {
        let l = i;
        let mut h = 0.0;
        let mut scale = 0.0;
        if l > 1 {
            for k in 0..l {
                scale += a[i * n + k].abs();
            }
            if scale == 0.0 {
                e[i] = a[i * n + l - 1];
            } else {
                for k in 0..l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l - 1];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l - 1] = f - g;
                f = 0.0;
                for j in 0..l {
                    a[j * n + i] = a[i * n + j] / h;
                    let mut g = 0.0;
                    for k in 0..=j {
                        g += a[j * n + k] * a[i * n + k];
                    }
                    for k in (j + 1)..l {
                        g += a[k * n + j] * a[i * n + k];
                    }
                    e[j] = g / h;
                    f += e[j] * a[i * n + j];
                }
                let hh = f / (h + h);
                for j in 0..l {
                    let f = a[i * n + j];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[j * n + k] -= f * e[k] + g * a[i * n + k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l - 1];
        }
        d[i] = h;
    }
    d[0] = 0.0;
    e[0] = 0.0;
    for i in 0..n {
        let l = i;
        if d[i] != 0.0 {
            for j in 0..l {
                let mut g = 0.0;
                for k in 0..l {
                    g += a[i * n + k] * a[k * n + j];
                }
                for k in 0..l {
                    a[k * n + j] -= g * a[k * n + i];
                }
            }
        }
        d[i] = a[i * n + i];
        a[i * n + i] = 1.0;
        for j in 0..l {
            a[j * n + i] = 0.0;
            a[i * n + j] = 0.0;
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix (tql2), accumulating
/// the transform into `z`. Fails after 50 iterations on one eigenvalue.
fn tql2(n: usize, d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::EigenConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = z[k * n + i + 1];
                    z[k * n + i + 1] = s * z[k * n + i] + c * f;
                    z[k * n + i] = c * z[k * n + i] - s * f;
                }
            }
            if r == 0.0 && m > l {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigendecomposition of a dense real symmetric matrix (row-major).
/// Returns ascending eigenvalues and the matrix of eigenvectors as columns.
pub(crate) fn eig_real_symmetric(n: usize, mat: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    assert_eq!(mat.len(), n * n);
    if n == 1 {
        return Ok((vec![mat[0]], vec![1.0]));
    }
    let mut a = mat.to_vec();
    // Exact symmetrization so tred2 sees a symmetric input.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(n, &mut a, &mut d, &mut e);
    tql2(n, &mut d, &mut e, &mut a)?;
    // Sort ascending, carrying eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut vectors = vec![0.0; n * n];
    for (new_col, &old_col) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + new_col] = a[row * n + old_col];
        }
    }
    Ok((values, vectors))
}

pub(crate) fn eig_hermitian(h: &HermitianOperator) -> Result<EigH> {
    let n = h.dim();
    let m = 2 * n;
    // Real embedding [[Re, -Im], [Im, Re]].
    let mut emb = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            emb[i * m + j] = z.re;
            emb[i * m + (n + j)] = -z.im;
            emb[(n + i) * m + j] = z.im;
            emb[(n + i) * m + (n + j)] = z.re;
        }
    }
    let (vals, vecs) = eig_real_symmetric(m, &emb)?;

    // Each complex eigendirection appears twice in the real spectrum; the
    // complexification (u; v) ↦ u + iv of the 2n real eigenvectors spans
    // C^n. Accept one representative per pair via complex Gram-Schmidt,
    // processing in ascending eigenvalue order.
    let mut values = Vec::with_capacity(n);
    let mut accepted: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for k in 0..m {
        if accepted.len() == n {
            break;
        }
        let mut cand: Vec<Complex64> = (0..n)
            .map(|i| Complex64::new(vecs[i * m + k], vecs[(n + i) * m + k]))
            .collect();
        for acc in &accepted {
            let overlap: Complex64 = acc.iter().zip(&cand).map(|(a, c)| a.conj() * c).sum();
            for (ci, ai) in cand.iter_mut().zip(acc) {
                *ci -= overlap * ai;
            }
        }
        let norm: f64 = cand.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            for z in cand.iter_mut() {
                *z /= norm;
            }
            accepted.push(cand);
            values.push(vals[k]);
        }
    }
    if accepted.len() != n {
        return Err(Error::EigenConvergence);
    }
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| accepted[k][i]);
    Ok(EigH { values, vectors })
}
