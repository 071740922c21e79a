//! Trajectory rollout and the stationary-policy fixed points.
//!
//! A rollout iterates `σ_t = γ(ρ_t)`, `ρ_{t+1} = N(σ_t)` and accumulates
//! the discounted cost `Σ_{t<T} β^t ⟨c, σ_t⟩` together with the truncated
//! occupation operator `(1−β) Σ_{t<T} β^t σ_t`. Tail bounds are returned
//! alongside: `β^T·‖c‖_spec/(1−β)` for the cost and `2β^T` (trace norm)
//! for the occupation.

use super::{PolicyRef, QmdpInstance, cost_spectral_norm};
use crate::channel::{CspPolicyChannel, appending_channel};
use crate::herm::{
    DensityOperator, HermitianOperator, hermitian_basis, hs_inner, hvec, hunvec, tensor,
};
use crate::linalg;
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct RolloutResult {
    /// `Σ_{t<T} β^t ⟨c, σ_t⟩`.
    pub discounted_cost: f64,
    /// Visited states `ρ_0 … ρ_T`.
    pub states: Vec<DensityOperator>,
    /// Truncated occupation `(1−β) Σ_{t<T} β^t σ_t`.
    pub occupation: HermitianOperator,
    /// `β^T·‖c‖_spec/(1−β)`: the discounted cost of the discarded tail is
    /// at most this.
    pub cost_tail_bound: f64,
    /// `2·β^T`: trace-norm bound on the discarded occupation tail.
    pub occupation_tail_bound: f64,
}

/// Default truncation horizon: the smallest `T` with
/// `β^T·‖c‖_HS/(1−β) < 1e-9`.
pub fn default_horizon(q: &QmdpInstance) -> usize {
    let beta = q.beta();
    let scale = q.cost().hs_norm().max(1e-12) / (1.0 - beta);
    let t = ((1e-9 / scale).ln() / beta.ln()).ceil();
    (t.max(1.0) as usize).min(200_000)
}

/// Roll a policy out for `horizon` steps.
pub fn rollout(q: &QmdpInstance, policy: PolicyRef<'_>, horizon: usize) -> Result<RolloutResult> {
    if horizon == 0 {
        return Err(Error::InvalidInstance("rollout horizon must be >= 1".into()));
    }
    let beta = q.beta();
    let mut rho = q.rho0().clone();
    let mut states = vec![rho.clone()];
    let mut discounted_cost = 0.0f64;
    let mut occupation = HermitianOperator::zeros(q.joint_dim());
    let mut weight = 1.0f64;
    for t in 0..horizon {
        let sigma = match policy {
            PolicyRef::OpenLoop(p) => tensor(rho.op(), p.pi_at(t).op()),
            PolicyRef::Csp(c) => c.apply(rho.op())?,
        };
        discounted_cost += weight * hs_inner(q.cost(), &sigma)?;
        occupation = occupation.add(&sigma.scale((1.0 - beta) * weight));
        let next = q.channel().apply(&sigma)?;
        rho = DensityOperator::new_unchecked(next);
        states.push(rho.clone());
        weight *= beta;
    }
    let tail = weight; // β^T
    Ok(RolloutResult {
        discounted_cost,
        states,
        occupation,
        cost_tail_bound: tail * cost_spectral_norm(q) / (1.0 - beta),
        occupation_tail_bound: 2.0 * tail,
    })
}

/// Solution of the affine fixed point `ρ = (1−β)ρ0 + β·N(ρ ⊗ π)` reached
/// by the state-occupation operator of a stationary open-loop policy.
#[derive(Clone, Debug)]
pub struct FixedPointState {
    pub state: DensityOperator,
    pub residual: f64,
    /// 1-norm condition estimate of the solved linear system.
    pub condition: f64,
}

/// Direct linear solve of the stationary state-occupation equation over
/// the real parameterization of Hermitian operators. The map is a
/// β-contraction, so the system is never singular; conditioning is
/// reported so near-degenerate channels stay diagnosable.
pub fn fixed_point_state(q: &QmdpInstance, pi: &DensityOperator) -> Result<FixedPointState> {
    if pi.dim() != q.dim_a() {
        return Err(Error::DimensionMismatch(format!(
            "appended state dim {} != {}",
            pi.dim(),
            q.dim_a()
        )));
    }
    let nx = q.dim_x();
    let n = nx * nx;
    let basis = hermitian_basis(nx);
    let mut a = vec![0.0f64; n * n];
    for (k, e) in basis.iter().enumerate() {
        let image = e.sub(&q.channel().apply(&tensor(e, pi.op()))?.scale(q.beta()));
        let col = hvec(&image);
        for (i, v) in col.iter().enumerate() {
            a[i * n + k] = *v;
        }
    }
    let rhs = hvec(&q.rho0().op().scale(1.0 - q.beta()));
    let sol = linalg::solve_dense(n, &a, &rhs)?;
    let condition = linalg::condition_estimate(n, &a);
    let rho = hunvec(&sol, nx);
    let residual = rho
        .sub(&q.rho0().op().scale(1.0 - q.beta()))
        .sub(&q.channel().apply(&tensor(&rho, pi.op()))?.scale(q.beta()))
        .hs_norm();
    if residual > 1e-10 {
        return Err(Error::LinearSolve(format!(
            "stationary-state residual {residual:.3e}"
        )));
    }
    let state = super::sdp::project_to_density(&rho)?;
    Ok(FixedPointState { state, residual, condition })
}

/// Solution of `σ = γ((1−β)ρ0 + β·N(σ))` for a classical-state-preserving
/// channel `γ` given by its Choi matrix: the occupation operator of the
/// stationary policy.
#[derive(Clone, Debug)]
pub struct FixedPointSigma {
    pub sigma: HermitianOperator,
    pub residual: f64,
    pub condition: f64,
}

pub fn fixed_point_sigma(q: &QmdpInstance, gamma: &CspPolicyChannel) -> Result<FixedPointSigma> {
    if gamma.nx() != q.dim_x() || gamma.na() != q.dim_a() {
        return Err(Error::DimensionMismatch("policy channel dims".into()));
    }
    let d = q.joint_dim();
    let n = d * d;
    let basis = hermitian_basis(d);
    let mut a = vec![0.0f64; n * n];
    for (k, e) in basis.iter().enumerate() {
        let image = e.sub(&gamma.apply(&q.channel().apply(e)?)?.scale(q.beta()));
        let col = hvec(&image);
        for (i, v) in col.iter().enumerate() {
            a[i * n + k] = *v;
        }
    }
    let rhs = hvec(&gamma.apply(&q.rho0().op().scale(1.0 - q.beta()))?);
    let sol = linalg::solve_dense(n, &a, &rhs)?;
    let condition = linalg::condition_estimate(n, &a);
    let sigma = hunvec(&sol, d);
    let driven = q
        .rho0()
        .op()
        .scale(1.0 - q.beta())
        .add(&q.channel().apply(&sigma)?.scale(q.beta()));
    let residual = sigma.sub(&gamma.apply(&driven)?).hs_norm();
    if residual > 1e-10 {
        return Err(Error::LinearSolve(format!(
            "stationary-occupation residual {residual:.3e}"
        )));
    }
    Ok(FixedPointSigma { sigma, residual, condition })
}

/// Appending-channel view of a stationary open-loop policy.
pub fn open_loop_channel(q: &QmdpInstance, pi: &DensityOperator) -> crate::channel::KrausChannel {
    appending_channel(pi, q.dim_x())
}
