//! Stationary-policy searches over the bilinear programs.
//!
//! The product-form constraint that turns the occupation SDPs into policy
//! problems is bilinear, so the programs are nonconvex; they are solved
//! locally by eliminating the occupation through the stationary fixed
//! point and running Frank-Wolfe on the remaining policy variable, with
//! multi-restart and an SDP lower-bound certificate. Optimality is claimed
//! only when the certificate gap closes below the requested tolerance.
//!
//! Open loop: `J(π) = ⟨c, ρ(π) ⊗ π⟩` over the density-operator
//! spectrahedron; the linear-minimization oracle is a bottom
//! eigenprojector. Closed loop: `J(𝔠̃) = ⟨c, σ(𝔠̃)⟩` over the CSP Choi
//! face; the oracle is a small SDP. Gradients come from the adjoint
//! fixed-point equation in both cases.

use super::rollout::{fixed_point_sigma, fixed_point_state, rollout};
use super::sdp::{
    QSdpOptions, csp_face_minimize, face_objective, normalize_face, project_to_density,
    solve_sdp_closed, solve_sdp_open,
};
use super::{
    ExtractedPolicy, OpenLoopPolicy, PolicyRef, QmdpInstance, bottom_eigenprojector, contract_a,
    contract_x, golden_min,
};
use crate::channel::{CspPolicyChannel, classical_policy_channel, csp_choi_from_face, csp_face_from_choi};
use crate::classical::{OccupancyMeasure, StationaryKernel, disintegrate};
use crate::herm::{
    DensityOperator, HermitianOperator, hermitian_basis, hs_inner, hvec, hunvec,
};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BilOptions {
    /// Frank-Wolfe iteration cap per restart.
    pub max_outer: usize,
    /// Certificate tolerance: optimality is claimed when
    /// `J − lower_bound ≤ tol`.
    pub tol: f64,
    /// Number of starting points (deterministic inits are used first,
    /// seeded random ones after).
    pub restarts: usize,
    pub seed: u64,
    pub sdp: QSdpOptions,
}

impl Default for BilOptions {
    fn default() -> Self {
        Self {
            max_outer: 60,
            tol: 1e-6,
            restarts: 8,
            seed: 42,
            sdp: QSdpOptions::default(),
        }
    }
}

/// Result of a bilinear-program solve.
#[derive(Clone, Debug)]
pub struct BilReport {
    /// `J` at the best policy found (normalized by `1−β`, i.e. directly
    /// comparable to the occupation-SDP values).
    pub objective: f64,
    /// Certified lower bound: the dual value of the occupation SDP.
    pub lower_bound: f64,
    /// `J − lower_bound ≥ 0` up to solver noise.
    pub certificate_gap: f64,
    /// Whether the certificate gap closed below the tolerance.
    pub optimal_within_tol: bool,
    /// Final Frank-Wolfe gap at the best iterate.
    pub fw_gap: f64,
    pub policy: ExtractedPolicy,
    /// Independent rollout of the extracted policy, normalized by `1−β`.
    pub rollout_value: f64,
    pub rollout_tail_bound: f64,
    pub outer_iterations: usize,
    pub restarts_used: usize,
}

/// `J(π) = ⟨c, ρ(π) ⊗ π⟩` where `ρ(π)` solves the stationary fixed point.
fn open_objective(q: &QmdpInstance, pi: &DensityOperator) -> Result<f64> {
    let fp = fixed_point_state(q, pi)?;
    hs_inner(q.cost(), &crate::herm::tensor(fp.state.op(), pi.op()))
}

/// Gradient of the open-loop objective via the adjoint fixed point: with
/// `ĉ_π = Tr_A(c·(Id⊗π))` and `ξ̂` solving `ξ̂ = ĉ_π + β·Tr_A(N†(ξ̂)(Id⊗π))`,
/// the gradient is `Tr_X((c + β·N†(ξ̂))(ρ(π) ⊗ Id))`.
pub fn open_loop_gradient(q: &QmdpInstance, pi: &DensityOperator) -> Result<HermitianOperator> {
    let (nx, na) = (q.dim_x(), q.dim_a());
    let fp = fixed_point_state(q, pi)?;
    let c_pi = contract_a(q.cost(), pi.op(), nx, na);
    // Solve (I − β·M†_π) ξ̂ = ĉ_π over the Hermitian parameterization.
    let n = nx * nx;
    let basis = hermitian_basis(nx);
    let mut a = vec![0.0f64; n * n];
    for (k, e) in basis.iter().enumerate() {
        let back = contract_a(&q.channel().adjoint_apply(e)?, pi.op(), nx, na);
        let image = e.sub(&back.scale(q.beta()));
        for (i, v) in hvec(&image).iter().enumerate() {
            a[i * n + k] = *v;
        }
    }
    let xi_hat = hunvec(&crate::linalg::solve_dense(n, &a, &hvec(&c_pi))?, nx);
    let w = q.cost().add(&q.channel().adjoint_apply(&xi_hat)?.scale(q.beta()));
    Ok(contract_x(&w, fp.state.op(), nx, na))
}

fn mix_density(a: &DensityOperator, b: &DensityOperator, alpha: f64) -> DensityOperator {
    DensityOperator::new_unchecked(a.op().scale(1.0 - alpha).add(&b.op().scale(alpha)))
}

/// Frank-Wolfe descent from one starting point; returns the final iterate,
/// objective, Frank-Wolfe gap, and iterations used.
fn fw_open(
    q: &QmdpInstance,
    start: DensityOperator,
    lower: f64,
    opts: &BilOptions,
) -> Result<(DensityOperator, f64, f64, usize)> {
    let mut pi = start;
    let mut value = open_objective(q, &pi)?;
    let mut fw_gap = f64::INFINITY;
    let mut iters = 0usize;
    for it in 0..opts.max_outer {
        iters = it + 1;
        let g = open_loop_gradient(q, &pi)?;
        let (_, vertex) = bottom_eigenprojector(&g, 1e-9)?;
        fw_gap = hs_inner(&g, pi.op())? - hs_inner(&g, vertex.op())?;
        if fw_gap <= 1e-11 || value - lower <= opts.tol * 0.1 {
            break;
        }
        let seg =
            |alpha: f64| open_objective(q, &mix_density(&pi, &vertex, alpha)).unwrap_or(f64::INFINITY);
        let (alpha, seg_val) = golden_min(&seg, 0.0, 1.0, 48);
        if seg_val >= value - 1e-13 {
            break;
        }
        pi = mix_density(&pi, &vertex, alpha);
        value = seg_val;
    }
    Ok((pi, value, fw_gap, iters))
}

/// Stationary open-loop policy search.
///
/// Starting points: the A-marginal of the occupation-SDP optimizer, the
/// maximally mixed state, then seeded random densities. The SDP dual value
/// is a certified lower bound on `(1−β)·V*`, so `J − lower ≤ tol` certifies
/// global optimality of the extracted stationary policy.
pub fn solve_bil_open(q: &QmdpInstance, opts: &BilOptions) -> Result<BilReport> {
    let sdp = solve_sdp_open(q, &opts.sdp)?;
    let lower = sdp.dual_value;
    let mut starts: Vec<DensityOperator> = Vec::new();
    if let Ok(marg) = crate::herm::partial_trace_x(&sdp.sigma, q.dim_x(), q.dim_a())
        .and_then(|m| project_to_density(&m))
    {
        starts.push(marg);
    }
    starts.push(DensityOperator::maximally_mixed(q.dim_a()));
    let mut rng = crate::sample::rng(opts.seed);
    while starts.len() < opts.restarts.max(1) {
        starts.push(crate::sample::random_density(&mut rng, q.dim_a()));
    }

    let mut best: Option<(DensityOperator, f64, f64, usize)> = None;
    for start in starts.iter().take(opts.restarts.max(1)) {
        let run = fw_open(q, start.clone(), lower, opts)?;
        let better = match &best {
            Some((_, v, _, _)) => run.1 < *v,
            None => true,
        };
        if better {
            best = Some(run);
        }
        if let Some((_, v, _, _)) = &best {
            if v - lower <= opts.tol * 0.1 {
                break;
            }
        }
    }
    let (pi, objective, fw_gap, outer_iterations) = best.expect("at least one start");

    let policy = OpenLoopPolicy::stationary(pi);
    let horizon = super::rollout::default_horizon(q);
    let ro = rollout(q, PolicyRef::OpenLoop(&policy), horizon)?;
    Ok(BilReport {
        objective,
        lower_bound: lower,
        certificate_gap: objective - lower,
        optimal_within_tol: objective - lower <= opts.tol,
        fw_gap,
        policy: ExtractedPolicy::OpenLoop(policy),
        rollout_value: (1.0 - q.beta()) * ro.discounted_cost,
        rollout_tail_bound: (1.0 - q.beta()) * ro.cost_tail_bound,
        outer_iterations,
        restarts_used: opts.restarts.max(1),
    })
}

/// `J(𝔠̃) = ⟨c, σ(𝔠̃)⟩` via the stationary occupation fixed point.
fn closed_objective(q: &QmdpInstance, face: &HermitianOperator) -> Result<f64> {
    let gamma = csp_choi_from_face(&normalize_face(face, q.dim_x(), q.dim_a())?, q.dim_x(), q.dim_a())?;
    let fp = fixed_point_sigma(q, &gamma)?;
    hs_inner(q.cost(), &fp.sigma)
}

/// Adjoint of the Choi application in its state slot:
/// `⟨y, Λ(𝔠, ρ)⟩ = ⟨Λ†_𝔠(y), ρ⟩`.
fn choi_state_adjoint(
    gamma: &CspPolicyChannel,
    y: &HermitianOperator,
) -> Result<HermitianOperator> {
    let nx = gamma.nx();
    let dout = nx * gamma.na();
    if y.dim() != dout {
        return Err(Error::DimensionMismatch("adjoint argument dim".into()));
    }
    let c = gamma.choi().matrix();
    let mat = crate::herm::ComplexMatrix::from_fn(nx, nx, |i, j| {
        let mut s = num_complex::Complex64::ZERO;
        for o in 0..dout {
            for op in 0..dout {
                s += c.get(j * dout + o, i * dout + op) * y.get(op, o);
            }
        }
        s
    });
    Ok(HermitianOperator::herm_part(&mat))
}

/// Gradient of the closed-loop objective on the face: with
/// `ŵ = c + β·N†(Λ†_𝔠(ŵ))` and `ρ̂ = (1−β)ρ0 + β·N(σ(𝔠))`, the gradient
/// is the face restriction of `(ρ̂, ŵ)`.
fn closed_gradient(q: &QmdpInstance, face: &HermitianOperator) -> Result<HermitianOperator> {
    let (nx, na) = (q.dim_x(), q.dim_a());
    let gamma = csp_choi_from_face(&normalize_face(face, nx, na)?, nx, na)?;
    let fp = fixed_point_sigma(q, &gamma)?;
    let rho_hat = q
        .rho0()
        .op()
        .scale(1.0 - q.beta())
        .add(&q.channel().apply(&fp.sigma)?.scale(q.beta()));
    // Solve ŵ = c + β·N†(Λ†_𝔠(ŵ)) over Hermitian operators on H_X⊗H_A.
    let d = q.joint_dim();
    let n = d * d;
    let basis = hermitian_basis(d);
    let mut a = vec![0.0f64; n * n];
    for (k, e) in basis.iter().enumerate() {
        let image = e.sub(&q.channel().adjoint_apply(&choi_state_adjoint(&gamma, e)?)?.scale(q.beta()));
        for (i, v) in hvec(&image).iter().enumerate() {
            a[i * n + k] = *v;
        }
    }
    let w_hat = hunvec(&crate::linalg::solve_dense(n, &a, &hvec(q.cost()))?, d);
    Ok(face_objective(&w_hat, &rho_hat, nx, na))
}

fn fw_closed(
    q: &QmdpInstance,
    start: HermitianOperator,
    lower: f64,
    opts: &BilOptions,
) -> Result<(HermitianOperator, f64, f64, usize)> {
    let (nx, na) = (q.dim_x(), q.dim_a());
    let mut face = normalize_face(&start, nx, na)?;
    let mut value = closed_objective(q, &face)?;
    let mut fw_gap = f64::INFINITY;
    let mut iters = 0usize;
    for it in 0..opts.max_outer {
        iters = it + 1;
        let g = closed_gradient(q, &face)?;
        let (_, vertex) = csp_face_minimize(&g, nx, na, &opts.sdp)?;
        fw_gap = hs_inner(&g, &face)? - hs_inner(&g, &vertex)?;
        if fw_gap <= 1e-10 || value - lower <= opts.tol * 0.1 {
            break;
        }
        let seg = |alpha: f64| {
            let mixed = face.scale(1.0 - alpha).add(&vertex.scale(alpha));
            closed_objective(q, &mixed).unwrap_or(f64::INFINITY)
        };
        let (alpha, seg_val) = golden_min(&seg, 0.0, 1.0, 48);
        if seg_val >= value - 1e-13 {
            break;
        }
        face = normalize_face(&face.scale(1.0 - alpha).add(&vertex.scale(alpha)), nx, na)?;
        value = seg_val;
    }
    Ok((face, value, fw_gap, iters))
}

/// Stationary classical-state-preserving policy search over the Choi face.
///
/// Starting points: the classical policy disintegrated from the diagonal
/// of the occupation-SDP optimizer, the uniform classical kernel, then
/// seeded random CSP channels.
pub fn solve_bil_closed(q: &QmdpInstance, opts: &BilOptions) -> Result<BilReport> {
    let (nx, na) = (q.dim_x(), q.dim_a());
    let sdp = solve_sdp_closed(q, &opts.sdp)?;
    let lower = sdp.dual_value;

    let mut starts: Vec<HermitianOperator> = Vec::new();
    if let Some(kernel) = kernel_from_sigma(&sdp.sigma, nx, na) {
        if let Ok(gamma) = classical_policy_channel(&kernel) {
            starts.push(csp_face_from_choi(gamma.choi()));
        }
    }
    if let Ok(gamma) = classical_policy_channel(&StationaryKernel::uniform(nx, na)) {
        starts.push(csp_face_from_choi(gamma.choi()));
    }
    let mut rng = crate::sample::rng(opts.seed);
    while starts.len() < opts.restarts.max(1) {
        let gamma = crate::sample::random_csp_policy(&mut rng, nx, na);
        starts.push(csp_face_from_choi(gamma.choi()));
    }

    let mut best: Option<(HermitianOperator, f64, f64, usize)> = None;
    for start in starts.iter().take(opts.restarts.max(1)) {
        let run = fw_closed(q, start.clone(), lower, opts)?;
        let better = match &best {
            Some((_, v, _, _)) => run.1 < *v,
            None => true,
        };
        if better {
            best = Some(run);
        }
        if let Some((_, v, _, _)) = &best {
            if v - lower <= opts.tol * 0.1 {
                break;
            }
        }
    }
    let (face, objective, fw_gap, outer_iterations) = best.expect("at least one start");

    let gamma = csp_choi_from_face(&normalize_face(&face, nx, na)?, nx, na)?;
    let horizon = super::rollout::default_horizon(q);
    let ro = rollout(q, PolicyRef::Csp(&gamma), horizon)?;
    Ok(BilReport {
        objective,
        lower_bound: lower,
        certificate_gap: objective - lower,
        optimal_within_tol: objective - lower <= opts.tol,
        fw_gap,
        policy: ExtractedPolicy::Csp(gamma),
        rollout_value: (1.0 - q.beta()) * ro.discounted_cost,
        rollout_tail_bound: (1.0 - q.beta()) * ro.cost_tail_bound,
        outer_iterations,
        restarts_used: opts.restarts.max(1),
    })
}

/// Classical kernel from the diagonal of a near-feasible occupation
/// operator, when that diagonal is close enough to a distribution.
fn kernel_from_sigma(sigma: &HermitianOperator, nx: usize, na: usize) -> Option<StationaryKernel> {
    let mut nu: Vec<f64> = (0..nx * na).map(|i| sigma.get(i, i).re.max(0.0)).collect();
    let s: f64 = nu.iter().sum();
    if s <= 1e-9 {
        return None;
    }
    nu.iter_mut().for_each(|v| *v /= s);
    OccupancyMeasure::new(nx, na, nu).ok().map(|m| disintegrate(&m))
}
