//! Dense semidefinite programming over Hermitian variables.
//!
//! Solves `min ⟨C, X⟩  s.t.  ⟨A_i, X⟩ = b_i,  X ⪰ 0` with dual certificates
//! `max b·y  s.t.  C − Σ y_i A_i ⪰ 0`. Hermitian data always passes through
//! the real symmetric embedding `[[Re, −Im], [Im, Re]]`; the factor-2 inner
//! product of the embedding is compensated internally, so callers see
//! Hermitian-space objective values and multipliers.
//!
//! The core is a primal-dual path-following interior-point method with
//! Nesterov-Todd scaling and a Mehrotra predictor-corrector step, run on a
//! homogeneous self-dual embedding so that infeasible or unbounded problems
//! are reported cleanly instead of stalling. Dependent constraint rows are
//! pruned up front with a pivoted orthogonalization (threshold 1e-10);
//! inconsistent dependent rows short-circuit to `Infeasible`.
//!
//! Everything is deterministic: fixed initialization, no randomized
//! pivoting, so identical inputs give bitwise-identical iterates.

mod ipm;

use crate::herm::{ComplexMatrix, HermitianOperator, hs_inner, hvec};
use crate::{Error, Result};
use num_complex::Complex64;

/// Standard-form conic problem over a Hermitian variable.
#[derive(Clone, Debug)]
pub struct SdpProblem {
    pub dim: usize,
    pub objective: HermitianOperator,
    pub constraints: Vec<(HermitianOperator, f64)>,
}

impl SdpProblem {
    pub fn new(
        dim: usize,
        objective: HermitianOperator,
        constraints: Vec<(HermitianOperator, f64)>,
    ) -> Result<Self> {
        if objective.dim() != dim {
            return Err(Error::DimensionMismatch("objective dim".into()));
        }
        for (a, b) in &constraints {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch("constraint dim".into()));
            }
            if !b.is_finite() {
                return Err(Error::DimensionMismatch("non-finite rhs".into()));
            }
        }
        Ok(Self { dim, objective, constraints })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct SdpSolution {
    pub status: SdpStatus,
    pub x: HermitianOperator,
    pub y: Vec<f64>,
    pub primal_obj: f64,
    pub dual_obj: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, verbose: false }
    }
}

/// Real symmetric embedding of a Hermitian operator, row-major `2n×2n`.
///
/// PSD iff the input is PSD; `⟨embed(A), embed(B)⟩ = 2⟨A, B⟩`.
pub fn herm_to_real(h: &HermitianOperator) -> Vec<f64> {
    let n = h.dim();
    let m = 2 * n;
    let mut out = vec![0.0f64; m * m];
    for i in 0..n {
        for j in 0..n {
            let z = h.get(i, j);
            out[i * m + j] = z.re;
            out[i * m + (n + j)] = -z.im;
            out[(n + i) * m + j] = z.im;
            out[(n + i) * m + (n + j)] = z.re;
        }
    }
    out
}

/// Inverse of [`herm_to_real`] composed with the projection onto the
/// embedded subspace (averages over the block symmetry, then hermitizes).
fn real_to_herm(m: &[f64], n: usize) -> HermitianOperator {
    let w = 2 * n;
    let mat = ComplexMatrix::from_fn(n, n, |i, j| {
        let re = 0.5 * (m[i * w + j] + m[(n + i) * w + (n + j)]);
        let im = 0.5 * (m[(n + i) * w + j] - m[i * w + (n + j)]);
        Complex64::new(re, im)
    });
    HermitianOperator::herm_part(&mat)
}

struct Pruned {
    kept: Vec<usize>,
    inconsistent: bool,
}

/// Gram-Schmidt pass over the constraint rows marking dependent rows; the
/// rhs rides along through the same transformation, so a dependent row
/// whose rhs disagrees with the span of the kept rows flags the system as
/// inconsistent.
fn prune_constraints(rows: &[Vec<f64>], rhs: &[f64]) -> Pruned {
    let mut basis: Vec<(Vec<f64>, f64)> = Vec::new();
    let mut kept = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let mut rv: Vec<f64> = row.clone();
        let mut rb = rhs[i];
        for (q, bq) in &basis {
            let d: f64 = q.iter().zip(&rv).map(|(a, b)| a * b).sum();
            for (vi, qi) in rv.iter_mut().zip(q) {
                *vi -= d * qi;
            }
            rb -= d * bq;
        }
        let rv_norm: f64 = rv.iter().map(|v| v * v).sum::<f64>().sqrt();
        if rv_norm > 1e-10 {
            let q: Vec<f64> = rv.iter().map(|v| v / rv_norm).collect();
            basis.push((q, rb / rv_norm));
            kept.push(i);
        } else if rb.abs() > 1e-8 * (1.0 + rhs[i].abs()) {
            return Pruned { kept, inconsistent: true };
        }
    }
    Pruned { kept, inconsistent: false }
}

/// Solve a Hermitian SDP; see the module docs for the algorithm.
pub fn solve(p: &SdpProblem, opts: &SolveOptions) -> Result<SdpSolution> {
    let n = p.dim;
    let m_all = p.constraints.len();

    // Normalize constraints to unit Frobenius norm; a zero row must have a
    // (near-)zero rhs or the problem is trivially infeasible.
    let mut norm_ops: Vec<HermitianOperator> = Vec::with_capacity(m_all);
    let mut norm_rhs: Vec<f64> = Vec::with_capacity(m_all);
    let mut scales: Vec<f64> = Vec::with_capacity(m_all);
    let mut zero_rows: Vec<usize> = Vec::new();
    for (i, (a, b)) in p.constraints.iter().enumerate() {
        let s = a.hs_norm();
        if s < 1e-14 {
            if b.abs() > 1e-10 {
                return Ok(infeasible_solution(p, m_all));
            }
            zero_rows.push(i);
            continue;
        }
        norm_ops.push(a.scale(1.0 / s));
        norm_rhs.push(b / s);
        scales.push(s);
    }
    let live: Vec<usize> =
        (0..m_all).filter(|i| !zero_rows.contains(i)).collect();

    let rows: Vec<Vec<f64>> = norm_ops.iter().map(hvec).collect();
    let pruned = prune_constraints(&rows, &norm_rhs);
    if pruned.inconsistent {
        return Ok(infeasible_solution(p, m_all));
    }

    let kept_ops: Vec<&HermitianOperator> = pruned.kept.iter().map(|&i| &norm_ops[i]).collect();
    let kept_rhs: Vec<f64> = pruned.kept.iter().map(|&i| norm_rhs[i]).collect();

    // Real symmetric embedding with the factor-2 compensation on the rhs.
    let nn = 2 * n;
    let c_r = herm_to_real(&p.objective);
    let a_r: Vec<Vec<f64>> = kept_ops.iter().map(|a| herm_to_real(a)).collect();
    let b_r: Vec<f64> = kept_rhs.iter().map(|b| 2.0 * b).collect();

    let out = ipm::solve_real(nn, &c_r, &a_r, &b_r, Some(n), opts)?;

    // Map back to Hermitian space.
    let x_h = real_to_herm(&out.x, n);
    let mut y = vec![0.0f64; m_all];
    for (k, &ki) in pruned.kept.iter().enumerate() {
        let orig = live[ki];
        y[orig] = out.y[k] / scales[ki];
    }

    let primal_obj = hs_inner(&p.objective, &x_h)?;
    let dual_obj: f64 = p.constraints.iter().zip(&y).map(|((_, b), yi)| b * yi).sum();

    let mut pres: f64 = 0.0;
    let mut b_norm: f64 = 0.0;
    for ((a, b), _) in p.constraints.iter().zip(&y) {
        pres += (hs_inner(a, &x_h)? - b).powi(2);
        b_norm += b * b;
    }
    let primal_residual = pres.sqrt() / (1.0 + b_norm.sqrt());

    let mut slack = p.objective.clone();
    for ((a, _), yi) in p.constraints.iter().zip(&y) {
        slack = slack.sub(&a.scale(*yi));
    }
    let z_h = real_to_herm(&out.z, n);
    let dual_residual = slack.sub(&z_h).hs_norm() / (1.0 + p.objective.hs_norm());
    let gap = (primal_obj - dual_obj).abs() / (1.0 + primal_obj.abs());

    Ok(SdpSolution {
        status: out.status,
        x: x_h,
        y,
        primal_obj,
        dual_obj,
        primal_residual,
        dual_residual,
        gap,
        iterations: out.iterations,
    })
}

fn infeasible_solution(p: &SdpProblem, m: usize) -> SdpSolution {
    SdpSolution {
        status: SdpStatus::Infeasible,
        x: HermitianOperator::zeros(p.dim),
        y: vec![0.0; m],
        primal_obj: f64::INFINITY,
        dual_obj: f64::INFINITY,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        gap: f64::INFINITY,
        iterations: 0,
    }
}

#[cfg(test)]
mod tests;
