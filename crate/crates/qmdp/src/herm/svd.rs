//! One-sided Jacobi SVD for small dense real matrices.

/// Thin SVD `t = U·diag(σ)·Vᵀ` with σ descending.
///
/// `u` is rows×rank_cols, `v` is cols×rank_cols, both row-major with
/// `rank_cols = min(rows, cols)` columns; trailing singular values may be
/// zero.
pub(crate) struct JacobiSvd {
    pub singular_values: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub rank_cols: usize,
}

/// One-sided Jacobi: rotate column pairs of a working copy of `t` until all
/// pairs are orthogonal, accumulating rotations into V.
pub(crate) fn jacobi_svd(t: &[f64], rows: usize, cols: usize) -> JacobiSvd {
    assert_eq!(t.len(), rows * cols);
    let mut b = t.to_vec(); // becomes U·diag(σ)
    let mut v = vec![0.0f64; cols * cols];
    for j in 0..cols {
        v[j * cols + j] = 1.0;
    }
    let tol = 1e-14;
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..rows {
                    let bp = b[i * cols + p];
                    let bq = b[i * cols + q];
                    app += bp * bp;
                    aqq += bq * bq;
                    apq += bp * bq;
                }
                if apq.abs() <= tol * (app * aqq).sqrt() || apq == 0.0 {
                    continue;
                }
                off = off.max(apq.abs() / (app * aqq).sqrt().max(f64::MIN_POSITIVE));
                let theta = (aqq - app) / (2.0 * apq);
                let tan = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let cos = 1.0 / (1.0 + tan * tan).sqrt();
                let sin = cos * tan;
                for i in 0..rows {
                    let bp = b[i * cols + p];
                    let bq = b[i * cols + q];
                    b[i * cols + p] = cos * bp - sin * bq;
                    b[i * cols + q] = sin * bp + cos * bq;
                }
                for i in 0..cols {
                    let vp = v[i * cols + p];
                    let vq = v[i * cols + q];
                    v[i * cols + p] = cos * vp - sin * vq;
                    v[i * cols + q] = sin * vp + cos * vq;
                }
            }
        }
        if off == 0.0 {
            break;
        }
    }
    // Column norms are the singular values; sort descending.
    let mut norms: Vec<(f64, usize)> = (0..cols)
        .map(|j| {
            let s: f64 = (0..rows).map(|i| b[i * cols + j] * b[i * cols + j]).sum();
            (s.sqrt(), j)
        })
        .collect();
    norms.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let rank_cols = rows.min(cols);
    let mut singular_values = Vec::with_capacity(rank_cols);
    let mut u = vec![0.0f64; rows * rank_cols];
    let mut vv = vec![0.0f64; cols * rank_cols];
    for (k, &(s, j)) in norms.iter().take(rank_cols).enumerate() {
        singular_values.push(s);
        if s > 0.0 {
            for i in 0..rows {
                u[i * rank_cols + k] = b[i * cols + j] / s;
            }
        }
        for i in 0..cols {
            vv[i * rank_cols + k] = v[i * cols + j];
        }
    }
    JacobiSvd { singular_values, u, v: vv, rank_cols }
}
