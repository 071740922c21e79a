//! Occupation-operator SDPs for the two policy classes.
//!
//! Open loop: `min ⟨c,σ⟩ s.t. T(σ) = (1−β)ρ0, σ ⪰ 0`, whose dual is
//! `max ⟨ξ,(1−β)ρ0⟩ s.t. c − T†(ξ) ⪰ 0` over Hermitian `ξ` on `H_X`.
//! Closed loop replaces `T` by `T_w` and `ρ0` by its dephasing; the range
//! of `T_w` is diagonal, so only `dim_x` real constraints remain.
//!
//! Dual variables are reassembled from the equality multipliers and then
//! shifted along `−Id` (which moves the slack by `+(1−β)·Id`) so the
//! returned `ξ` is feasible for the dual exactly, not just within solver
//! tolerance.

use super::{AssumptionStatus, QmdpInstance};
use crate::conic::{self, SdpProblem, SdpSolution, SdpStatus, SolveOptions};
use crate::herm::{DensityOperator, HermitianOperator, hermitian_basis, hs_inner};
use crate::{Error, Result};

/// Options for the q-MDP-level SDP solves.
#[derive(Clone, Debug)]
pub struct QSdpOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub verbose: bool,
}

impl Default for QSdpOptions {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, verbose: false }
    }
}

impl QSdpOptions {
    fn conic(&self) -> SolveOptions {
        SolveOptions { tol: self.tol, max_iter: self.max_iter, verbose: self.verbose }
    }
}

/// Result of one occupation-SDP solve: primal occupation operator, exact
/// dual-feasible certificate, and both objective values.
#[derive(Clone, Debug)]
pub struct SdpReport {
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal − dual| / (1 + |primal|)`.
    pub gap: f64,
    pub sigma: HermitianOperator,
    pub xi: HermitianOperator,
    pub status: SdpStatus,
    pub iterations: usize,
}

/// The open-loop occupation SDP in standard conic form: one real-linear
/// functional `⟨T†(E_k), σ⟩ = (1−β)·⟨E_k, ρ0⟩` per Hermitian basis element
/// `E_k` of `H_X`.
pub fn build_sdp_open(q: &QmdpInstance) -> Result<SdpProblem> {
    let basis = hermitian_basis(q.dim_x());
    let mut constraints = Vec::with_capacity(basis.len());
    for e in &basis {
        let a = q.op_t_adj(e)?;
        let b = (1.0 - q.beta()) * hs_inner(e, q.rho0().op())?;
        constraints.push((a, b));
    }
    SdpProblem::new(q.joint_dim(), q.cost().clone(), constraints)
}

/// The closed-loop occupation SDP: the range of `T_w` is diagonal, so the
/// constraint block is one functional per classical basis state.
pub fn build_sdp_closed(q: &QmdpInstance) -> Result<SdpProblem> {
    let mut constraints = Vec::with_capacity(q.dim_x());
    for x in 0..q.dim_x() {
        let e = HermitianOperator::basis_projector(q.dim_x(), x);
        let a = q.op_tw_adj(&e)?;
        let b = (1.0 - q.beta()) * q.rho0().op().get(x, x).re;
        constraints.push((a, b));
    }
    SdpProblem::new(q.joint_dim(), q.cost().clone(), constraints)
}

fn assemble(
    q: &QmdpInstance,
    sol: &SdpSolution,
    basis: &[HermitianOperator],
    closed: bool,
) -> Result<SdpReport> {
    let mut xi = HermitianOperator::zeros(q.dim_x());
    for (e, &yk) in basis.iter().zip(&sol.y) {
        xi = xi.add(&e.scale(yk));
    }
    let mut dual_value = sol.dual_obj;
    // Exact dual feasibility: T†(ξ − δ·Id) = T†(ξ) − δ(1−β)·Id (the adjoint
    // channel is unital), so shifting ξ down restores c − T†(ξ) ⪰ 0.
    let slack = if closed { q.op_tw_adj(&xi)? } else { q.op_t_adj(&xi)? };
    let margin = q.cost().sub(&slack).min_eigenvalue()?;
    if margin < 0.0 {
        let delta = -margin / (1.0 - q.beta());
        xi = xi.sub(&HermitianOperator::identity(q.dim_x()).scale(delta));
        dual_value -= delta * (1.0 - q.beta());
    }
    let primal_value = sol.primal_obj;
    let gap = (primal_value - dual_value).abs() / (1.0 + primal_value.abs());
    Ok(SdpReport {
        primal_value,
        dual_value,
        gap,
        sigma: sol.x.clone(),
        xi,
        status: sol.status,
        iterations: sol.iterations,
    })
}

/// Solve the open-loop occupation SDP and its dual.
///
/// Valid instances are never infeasible — the occupation operator of any
/// open-loop policy is a feasible point — so an `Infeasible` status is
/// reported as an instance bug.
pub fn solve_sdp_open(q: &QmdpInstance, opts: &QSdpOptions) -> Result<SdpReport> {
    let problem = build_sdp_open(q)?;
    let sol = conic::solve(&problem, &opts.conic())?;
    if sol.status == SdpStatus::Infeasible || sol.status == SdpStatus::Unbounded {
        return Err(Error::Solver(format!(
            "occupation SDP reported {:?}; the instance violates its contract",
            sol.status
        )));
    }
    assemble(q, &sol, &hermitian_basis(q.dim_x()), false)
}

/// Solve the closed-loop occupation SDP and its dual. The dual variable is
/// diagonal (only its dephasing enters `T_w†`).
pub fn solve_sdp_closed(q: &QmdpInstance, opts: &QSdpOptions) -> Result<SdpReport> {
    let problem = build_sdp_closed(q)?;
    let sol = conic::solve(&problem, &opts.conic())?;
    if sol.status == SdpStatus::Infeasible || sol.status == SdpStatus::Unbounded {
        return Err(Error::Solver(format!(
            "occupation SDP reported {:?}; the instance violates its contract",
            sol.status
        )));
    }
    let basis: Vec<HermitianOperator> = (0..q.dim_x())
        .map(|x| HermitianOperator::basis_projector(q.dim_x(), x))
        .collect();
    assemble(q, &sol, &basis, true)
}

impl SdpReport {
    /// Spec-shaped summary with an assumption verdict attached.
    pub fn into_report(self, assumption_status: AssumptionStatus) -> super::SolveReport {
        super::SolveReport {
            primal_value: self.primal_value,
            dual_value: self.dual_value,
            gap: self.gap,
            extracted_policy: None,
            rollout_value: None,
            assumption_status,
            solver_status: self.status,
        }
    }
}

/// Minimize `⟨g, 𝔠̃⟩` over the classical-state-preserving Choi face: Gram
/// matrices on `C^(nx·na)`, PSD, with each per-state diagonal block of unit
/// trace. Returns the optimal value and minimizer.
pub fn csp_face_minimize(
    g: &HermitianOperator,
    nx: usize,
    na: usize,
    opts: &QSdpOptions,
) -> Result<(f64, HermitianOperator)> {
    if g.dim() != nx * na {
        return Err(Error::DimensionMismatch(format!(
            "face objective dim {} != {}·{}",
            g.dim(),
            nx,
            na
        )));
    }
    let mut constraints = Vec::with_capacity(nx);
    for x in 0..nx {
        let mut d = vec![0.0; nx * na];
        for a in 0..na {
            d[x * na + a] = 1.0;
        }
        constraints.push((HermitianOperator::from_diag(&d), 1.0));
    }
    let problem = SdpProblem::new(nx * na, g.clone(), constraints)?;
    let sol = conic::solve(&problem, &opts.conic())?;
    if sol.status == SdpStatus::Infeasible || sol.status == SdpStatus::Unbounded {
        return Err(Error::Solver(format!(
            "CSP face subproblem reported {:?}",
            sol.status
        )));
    }
    Ok((sol.primal_obj, sol.x))
}

/// Restriction of the pairing `⟨m, Λ(𝔠, ρ)⟩` to the CSP Choi face: the
/// face matrix `G̃[(x,a),(y,b)] = ρ[y,x]·m[(x,a),(y,b)]` (hermitized)
/// satisfies `⟨m, Λ(𝔠, ρ)⟩ = ⟨G̃, 𝔠̃⟩` for every face point `𝔠̃`.
pub(crate) fn face_objective(
    m: &HermitianOperator,
    rho: &HermitianOperator,
    nx: usize,
    na: usize,
) -> HermitianOperator {
    debug_assert_eq!(m.dim(), nx * na);
    debug_assert_eq!(rho.dim(), nx);
    let mat = crate::herm::ComplexMatrix::from_fn(nx * na, nx * na, |r, c| {
        let (x, y) = (r / na, c / na);
        rho.get(y, x) * m.get(r, c)
    });
    HermitianOperator::herm_part(&mat)
}

/// Project a face iterate back onto the spectrahedron exactly: clamp
/// eigenvalues at zero, then rescale each per-state diagonal block to unit
/// trace by a symmetric congruence (which preserves positivity).
pub(crate) fn normalize_face(
    face: &HermitianOperator,
    nx: usize,
    na: usize,
) -> Result<HermitianOperator> {
    let eig = face.eig()?;
    let psd = eig.apply_spectral(|v| v.max(0.0));
    let mut scale = vec![0.0f64; nx];
    for x in 0..nx {
        let t: f64 = (0..na).map(|a| psd.get(x * na + a, x * na + a).re).sum();
        if t <= 1e-14 {
            return Err(Error::InvalidChoi(format!("face block {x} has zero trace")));
        }
        scale[x] = 1.0 / t.sqrt();
    }
    let mat = crate::herm::ComplexMatrix::from_fn(nx * na, nx * na, |r, c| {
        psd.get(r, c) * scale[r / na] * scale[c / na]
    });
    Ok(HermitianOperator::herm_part(&mat))
}

/// Density operator from a near-density Hermitian operator: clamp the
/// spectrum at zero and renormalize the trace.
pub(crate) fn project_to_density(h: &HermitianOperator) -> Result<DensityOperator> {
    let eig = h.eig()?;
    let psd = eig.apply_spectral(|v| v.max(0.0));
    let tr = psd.trace();
    if tr <= 1e-14 {
        return Err(Error::NotDensity("zero trace after clamping".into()));
    }
    DensityOperator::new(psd.scale(1.0 / tr))
}
