//! Homogeneous self-dual interior-point core over the real symmetric cone.
//!
//! Works on `min ⟨C,X⟩ s.t. A(X) = b, X ⪰ 0` via the embedding variables
//! `(X, y, Z, τ, κ)` satisfying, at a solution of the embedding,
//!
//! ```text
//!   A(X) − b·τ                = 0
//!   −A†(y) − Z + C·τ          = 0
//!   ⟨C,X⟩ − b·y + κ           = 0
//!   X, Z ⪰ 0,  τ, κ ≥ 0
//! ```
//!
//! τ > 0 at convergence recovers the optimum `(X, y, Z)/τ`; κ > 0 yields an
//! infeasibility or unboundedness certificate. Search directions use
//! Nesterov-Todd scaling with a Mehrotra second-order corrector. Near the
//! numerical floor the Newton system degenerates; direction solves fail
//! soft and the best iterate is returned as `MaxIter`.

use super::SdpStatus;
use crate::herm::{eig_real_symmetric, jacobi_svd};
use crate::linalg::{cholesky, solve_lower, solve_lower_t};
use crate::{Error, Result};

pub(super) struct RealSolution {
    pub status: SdpStatus,
    pub x: Vec<f64>,
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub iterations: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn mat_mul(n: usize, a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            let row = &b[k * n..(k + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (o, &bv) in orow.iter_mut().zip(row) {
                *o += aik * bv;
            }
        }
    }
    out
}

fn transpose(n: usize, a: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0f64; n * n];
    for i in 0..n {
        for j in 0..n {
            out[j * n + i] = a[i * n + j];
        }
    }
    out
}

fn symmetrize(n: usize, a: &mut [f64]) {
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = v;
            a[j * n + i] = v;
        }
    }
}

/// Projection onto the embedded subspace `J M Jᵀ = M` with
/// `J = [[0, −I], [I, 0]]`; a no-op for matrices already of the
/// `[[P, −Q], [Q, P]]` form produced by the Hermitian embedding.
fn project_embedded(nn: usize, half: usize, m: &mut [f64]) {
    let n = half;
    for i in 0..n {
        for j in 0..n {
            let p = 0.5 * (m[i * nn + j] + m[(n + i) * nn + (n + j)]);
            m[i * nn + j] = p;
            m[(n + i) * nn + (n + j)] = p;
            let q = 0.5 * (m[(n + i) * nn + j] - m[i * nn + (n + j)]);
            m[(n + i) * nn + j] = q;
            m[i * nn + (n + j)] = -q;
        }
    }
}

/// Cholesky with a short escalating-jitter retry; inputs are kept strictly
/// interior by the line search, so the jitter path is a rare safety net.
fn chol_robust(n: usize, a: &[f64]) -> Result<Vec<f64>> {
    if let Some(l) = cholesky(n, a) {
        return Ok(l);
    }
    let tr: f64 = (0..n).map(|i| a[i * n + i]).sum::<f64>().abs() / n as f64;
    let mut jitter = (tr + 1e-300) * 1e-14;
    for _ in 0..5 {
        let mut aj = a.to_vec();
        for i in 0..n {
            aj[i * n + i] += jitter;
        }
        if let Some(l) = cholesky(n, &aj) {
            return Ok(l);
        }
        jitter *= 100.0;
    }
    Err(Error::Solver("cone iterate lost positive definiteness".into()))
}

/// Largest step `α` with `X + α·ΔX ⪰ 0`, given the Cholesky factor of `X`.
fn max_cone_step(n: usize, lx: &[f64], dx: &[f64]) -> Result<f64> {
    // X + αΔX = Lx (I + α Lx⁻¹ ΔX Lx⁻ᵀ) Lxᵀ.
    let mut cols = vec![0.0f64; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| dx[i * n + j]).collect();
        let s = solve_lower(n, lx, &col);
        for i in 0..n {
            cols[i * n + j] = s[i];
        }
    }
    let t = transpose(n, &cols);
    let mut d = vec![0.0f64; n * n];
    for j in 0..n {
        let col: Vec<f64> = (0..n).map(|i| t[i * n + j]).collect();
        let s = solve_lower(n, lx, &col);
        for i in 0..n {
            d[i * n + j] = s[i];
        }
    }
    symmetrize(n, &mut d);
    let (vals, _) = eig_real_symmetric(n, &d)?;
    let lam_min = vals[0];
    if lam_min >= -1e-13 {
        Ok(f64::INFINITY)
    } else {
        Ok(-1.0 / lam_min)
    }
}

struct Scaling {
    r: Vec<f64>,
    r_inv: Vec<f64>,
    lambda: Vec<f64>,
}

/// Nesterov-Todd scaling point of the pair (X, Z): R with
/// `R⁻¹ X R⁻ᵀ = Rᵀ Z R = diag(λ)`.
fn nt_scaling(n: usize, lx: &[f64], lz: &[f64]) -> Scaling {
    let m0 = mat_mul(n, &transpose(n, lz), lx);
    let svd = jacobi_svd(&m0, n, n);
    debug_assert_eq!(svd.rank_cols, n);
    // R = Lx · V · Σ^{-1/2}, R⁻¹ = Σ^{-1/2} · Uᵀ · Lzᵀ.
    let lxv = mat_mul(n, lx, &svd.v);
    let mut r = vec![0.0f64; n * n];
    let mut r_inv = vec![0.0f64; n * n];
    let utlz = mat_mul(n, &transpose(n, &svd.u), &transpose(n, lz));
    for i in 0..n {
        for j in 0..n {
            r[i * n + j] = lxv[i * n + j] / svd.singular_values[j].max(1e-150).sqrt();
            r_inv[i * n + j] = utlz[i * n + j] / svd.singular_values[i].max(1e-150).sqrt();
        }
    }
    Scaling { r, r_inv, lambda: svd.singular_values }
}

struct Direction {
    dx: Vec<f64>,
    dy: Vec<f64>,
    dz: Vec<f64>,
    dtau: f64,
    dkappa: f64,
}

pub(super) fn solve_real(
    n: usize,
    c: &[f64],
    a: &[Vec<f64>],
    b: &[f64],
    symmetry_half: Option<usize>,
    opts: &super::SolveOptions,
) -> Result<RealSolution> {
    let m = a.len();
    let apply_a = |x: &[f64]| -> Vec<f64> { a.iter().map(|ai| dot(ai, x)).collect() };
    let apply_at = |y: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0f64; n * n];
        for (ai, &yi) in a.iter().zip(y) {
            if yi != 0.0 {
                for (o, &v) in out.iter_mut().zip(ai) {
                    *o += yi * v;
                }
            }
        }
        out
    };
    let project = |mat: &mut Vec<f64>| {
        symmetrize(n, mat);
        if let Some(h) = symmetry_half {
            project_embedded(n, h, mat);
        }
    };

    let b_inf = b.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let t0 = b_inf.max(1.0);
    let mut x = vec![0.0f64; n * n];
    let mut z = vec![0.0f64; n * n];
    for i in 0..n {
        x[i * n + i] = t0;
        z[i * n + i] = t0;
    }
    let mut y = vec![0.0f64; m];
    let mut tau = 1.0f64;
    let mut kappa = 1.0f64;

    let b_norm = norm2(b);
    let c_norm = norm2(c);
    let mu0 = (dot(&x, &z) + tau * kappa) / (n as f64 + 1.0);
    let mut best: Option<RealSolution> = None;
    let mut best_score = f64::INFINITY;

    for iter in 0..opts.max_iter {
        // Unscaled candidate and termination tests.
        let xs: Vec<f64> = x.iter().map(|v| v / tau).collect();
        let ys: Vec<f64> = y.iter().map(|v| v / tau).collect();
        let zs: Vec<f64> = z.iter().map(|v| v / tau).collect();
        let ax = apply_a(&xs);
        let pres_vec: Vec<f64> = ax.iter().zip(b).map(|(axi, bi)| axi - bi).collect();
        let pres = norm2(&pres_vec) / (1.0 + b_norm);
        let aty = apply_at(&ys);
        let mut dres_sq = 0.0f64;
        for i in 0..n * n {
            let r = aty[i] + zs[i] - c[i];
            dres_sq += r * r;
        }
        let dres = dres_sq.sqrt() / (1.0 + c_norm);
        let cx = dot(c, &xs);
        let by = dot(b, &ys);
        let gap = (cx - by).abs() / (1.0 + cx.abs());
        let mu = (dot(&x, &z) + tau * kappa) / (n as f64 + 1.0);
        if opts.verbose {
            eprintln!(
                "ipm iter {iter:3}  pres {pres:9.2e}  dres {dres:9.2e}  gap {gap:9.2e}  tau {tau:8.2e}  kappa {kappa:8.2e}  mu {mu:8.2e}"
            );
        }
        if pres <= opts.tol && dres <= opts.tol && gap <= opts.tol {
            return Ok(RealSolution { status: SdpStatus::Optimal, x: xs, z: zs, y: ys, iterations: iter });
        }

        // Farkas-type certificates from the raw homogeneous variables.
        let by_raw = dot(b, &y);
        if by_raw > 1e-10 {
            let aty_raw = apply_at(&y);
            let mut res = 0.0f64;
            for i in 0..n * n {
                let r = aty_raw[i] + z[i];
                res += r * r;
            }
            if res.sqrt() <= opts.tol * by_raw {
                return Ok(RealSolution {
                    status: SdpStatus::Infeasible,
                    x: xs,
                    z: z.clone(),
                    y: y.clone(),
                    iterations: iter,
                });
            }
        }
        let cx_raw = dot(c, &x);
        if cx_raw < -1e-10 {
            let ax_raw = apply_a(&x);
            if norm2(&ax_raw) <= opts.tol * (-cx_raw) {
                return Ok(RealSolution {
                    status: SdpStatus::Unbounded,
                    x: x.clone(),
                    z: zs,
                    y: ys,
                    iterations: iter,
                });
            }
        }

        let score = pres.max(dres).max(gap);
        if score < best_score {
            best_score = score;
            best = Some(RealSolution {
                status: SdpStatus::MaxIter,
                x: xs,
                z: zs,
                y: ys,
                iterations: iter,
            });
        }
        // Numerical floor: the Newton system below is about to degenerate
        // and no better iterate will be produced.
        if mu < 1e-15 * mu0.max(1.0) {
            break;
        }

        // HSDE residuals.
        let rp: Vec<f64> = apply_a(&x).iter().zip(b).map(|(axi, bi)| axi - bi * tau).collect();
        let aty = apply_at(&y);
        let mut rd = vec![0.0f64; n * n];
        for i in 0..n * n {
            rd[i] = -aty[i] - z[i] + c[i] * tau;
        }
        let rg = dot(c, &x) - dot(b, &y) + kappa;

        // NT scaling.
        let lx = chol_robust(n, &x)?;
        let lz = chol_robust(n, &z)?;
        let nt = nt_scaling(n, &lx, &lz);
        let scale_out = |mat: &[f64]| mat_mul(n, &mat_mul(n, &nt.r, mat), &transpose(n, &nt.r));
        let scale_dual = |mat: &[f64]| mat_mul(n, &mat_mul(n, &transpose(n, &nt.r), mat), &nt.r);
        let scale_in =
            |mat: &[f64]| mat_mul(n, &mat_mul(n, &nt.r_inv, mat), &transpose(n, &nt.r_inv));

        let wcw = scale_out(&scale_dual(c));
        let awcw = apply_a(&wcw);
        let h: Vec<f64> = awcw.iter().zip(b).map(|(v, bi)| v + bi).collect();
        let g = dot(&wcw, c) + kappa / tau;

        // Schur complement S_ij = ⟨Rᵀ A_i R, Rᵀ A_j R⟩, with one step of
        // iterative refinement on each solve.
        let a_tilde: Vec<Vec<f64>> = a.iter().map(|ai| scale_dual(ai)).collect();
        let mut s = vec![0.0f64; m * m];
        for i in 0..m {
            for j in 0..=i {
                let v = dot(&a_tilde[i], &a_tilde[j]);
                s[i * m + j] = v;
                s[j * m + i] = v;
            }
        }
        let ls = if m > 0 { chol_schur(m, &s)? } else { Vec::new() };
        let solve_s = |rhs: &[f64]| -> Vec<f64> {
            if m == 0 {
                return Vec::new();
            }
            let mut u = solve_lower_t(m, &ls, &solve_lower(m, &ls, rhs));
            let resid: Vec<f64> =
                (0..m).map(|i| rhs[i] - dot(&s[i * m..(i + 1) * m], &u)).collect();
            let corr = solve_lower_t(m, &ls, &solve_lower(m, &ls, &resid));
            for i in 0..m {
                u[i] += corr[i];
            }
            u
        };
        let u1 = solve_s(&h);
        let hm2b: Vec<f64> = h.iter().zip(b).map(|(hi, bi)| hi - 2.0 * bi).collect();

        // One Newton solve for a given right-hand side; shared by the
        // predictor and the combined corrector step. Returns None when the
        // system has degenerated numerically.
        let solve_dir = |rhs_p: &[f64],
                         rhs_d: &[f64],
                         rhs_g: f64,
                         dcomp_mat: &[f64],
                         dcomp_s: f64|
         -> Option<Direction> {
            // Complementarity: ΔX̂ + ΔẐ = E with L_λ(E) = Dcomp.
            let mut e = vec![0.0f64; n * n];
            for i in 0..n {
                for j in 0..n {
                    e[i * n + j] = 2.0 * dcomp_mat[i * n + j]
                        / (nt.lambda[i] + nt.lambda[j]).max(1e-150);
                }
            }
            let rer = scale_out(&e);
            let wrdw = scale_out(&scale_dual(rhs_d));
            let a_rer = apply_a(&rer);
            let a_wrdw = apply_a(&wrdw);
            let r1: Vec<f64> = (0..m).map(|i| rhs_p[i] - a_rer[i] - a_wrdw[i]).collect();
            let r2 = rhs_g - dot(c, &rer) - dot(&wcw, rhs_d) - dcomp_s / tau;
            let u2 = solve_s(&r1);
            let denom = dot(&hm2b, &u1) - g;
            if denom == 0.0 || !denom.is_finite() {
                return None;
            }
            let dtau = (r2 - dot(&hm2b, &u2)) / denom;
            let dy: Vec<f64> = (0..m).map(|i| u2[i] + dtau * u1[i]).collect();
            let atdy = apply_at(&dy);
            let mut dz = vec![0.0f64; n * n];
            for i in 0..n * n {
                dz[i] = -atdy[i] + c[i] * dtau - rhs_d[i];
            }
            let wdzw = scale_out(&scale_dual(&dz));
            let mut dx = vec![0.0f64; n * n];
            for i in 0..n * n {
                dx[i] = rer[i] - wdzw[i];
            }
            let dkappa = (dcomp_s - kappa * dtau) / tau;
            let finite = dx.iter().chain(dz.iter()).all(|v| v.is_finite())
                && dy.iter().all(|v| v.is_finite())
                && dtau.is_finite()
                && dkappa.is_finite();
            if !finite {
                return None;
            }
            Some(Direction { dx, dy, dz, dtau, dkappa })
        };

        // Predictor (affine scaling) direction.
        let mut dcomp_aff = vec![0.0f64; n * n];
        for i in 0..n {
            dcomp_aff[i * n + i] = -nt.lambda[i] * nt.lambda[i];
        }
        let neg_rp: Vec<f64> = rp.iter().map(|v| -v).collect();
        let neg_rd: Vec<f64> = rd.iter().map(|v| -v).collect();
        let Some(mut aff) = solve_dir(&neg_rp, &neg_rd, -rg, &dcomp_aff, -tau * kappa) else {
            break;
        };
        project(&mut aff.dx);
        project(&mut aff.dz);

        let alpha_aff = step_to_boundary(
            n, &lx, &lz, &aff.dx, &aff.dz, tau, aff.dtau, kappa, aff.dkappa,
        )?
        .min(1.0);
        let mut xa = x.clone();
        let mut za = z.clone();
        for i in 0..n * n {
            xa[i] += alpha_aff * aff.dx[i];
            za[i] += alpha_aff * aff.dz[i];
        }
        let mu_aff = (dot(&xa, &za)
            + (tau + alpha_aff * aff.dtau) * (kappa + alpha_aff * aff.dkappa))
            / (n as f64 + 1.0);
        let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3).max(1e-12);

        // Combined corrector step.
        let dx_hat = scale_in(&aff.dx);
        let dz_hat = scale_dual(&aff.dz);
        let prod = mat_mul(n, &dx_hat, &dz_hat);
        let mut dcomp = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                let hc = 0.5 * (prod[i * n + j] + prod[j * n + i]);
                dcomp[i * n + j] = -hc;
            }
            dcomp[i * n + i] += sigma * mu - nt.lambda[i] * nt.lambda[i];
        }
        let f = 1.0 - sigma;
        let rhs_p: Vec<f64> = rp.iter().map(|v| -f * v).collect();
        let rhs_d: Vec<f64> = rd.iter().map(|v| -f * v).collect();
        let dcomp_s = sigma * mu - tau * kappa - aff.dtau * aff.dkappa;
        let Some(mut dir) = solve_dir(&rhs_p, &rhs_d, -f * rg, &dcomp, dcomp_s) else {
            break;
        };
        project(&mut dir.dx);
        project(&mut dir.dz);

        #[cfg(debug_assertions)]
        {
            // The three linear equations of the Newton system must hold.
            let adx = apply_a(&dir.dx);
            for i in 0..m {
                debug_assert!(
                    (adx[i] - b[i] * dir.dtau - rhs_p[i]).abs() < 1e-5 * (1.0 + b_norm + rp[i].abs()),
                    "primal Newton equation violated"
                );
            }
            let rgap = dot(c, &dir.dx) - dot(b, &dir.dy) + dir.dkappa + f * rg;
            debug_assert!(
                rgap.abs() < 1e-4 * (1.0 + rg.abs() + cx_raw.abs()),
                "gap Newton equation violated: {rgap:.3e}"
            );
        }

        let alpha = (0.99
            * step_to_boundary(n, &lx, &lz, &dir.dx, &dir.dz, tau, dir.dtau, kappa, dir.dkappa)?)
        .min(1.0);
        if alpha < 1e-9 {
            break;
        }
        for i in 0..n * n {
            x[i] += alpha * dir.dx[i];
            z[i] += alpha * dir.dz[i];
        }
        project(&mut x);
        project(&mut z);
        for i in 0..m {
            y[i] += alpha * dir.dy[i];
        }
        tau += alpha * dir.dtau;
        kappa += alpha * dir.dkappa;
    }

    Ok(best.ok_or_else(|| Error::Solver("no iterate produced".into()))?)
}

#[allow(clippy::too_many_arguments)]
fn step_to_boundary(
    n: usize,
    lx: &[f64],
    lz: &[f64],
    dx: &[f64],
    dz: &[f64],
    tau: f64,
    dtau: f64,
    kappa: f64,
    dkappa: f64,
) -> Result<f64> {
    let mut alpha = max_cone_step(n, lx, dx)?;
    alpha = alpha.min(max_cone_step(n, lz, dz)?);
    if dtau < 0.0 {
        alpha = alpha.min(-tau / dtau);
    }
    if dkappa < 0.0 {
        alpha = alpha.min(-kappa / dkappa);
    }
    Ok(alpha)
}

/// Cholesky of the Schur complement with escalating regularization; the
/// Schur matrix grows ill-conditioned near convergence by design.
fn chol_schur(m: usize, s: &[f64]) -> Result<Vec<f64>> {
    if let Some(l) = cholesky(m, s) {
        return Ok(l);
    }
    let tr: f64 = (0..m).map(|i| s[i * m + i]).sum::<f64>() / m as f64;
    let mut reg = (tr + 1e-300) * 1e-13;
    for _ in 0..8 {
        let mut sj = s.to_vec();
        for i in 0..m {
            sj[i * m + i] += reg;
        }
        if let Some(l) = cholesky(m, &sj) {
            return Ok(l);
        }
        reg *= 100.0;
    }
    Err(Error::Solver("Schur complement not positive definite".into()))
}
