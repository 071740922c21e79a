//! q-MDP solution machinery.
//!
//! Instances carry a channel `N : H_X ⊗ H_A → H_X`, a Hermitian cost `c`
//! on `H_X ⊗ H_A`, a discount `β ∈ (0,1)` and an initial state `ρ0`. The
//! central objects are the Hermiticity-preserving super-operators
//!
//! ```text
//!   T(σ)   = Tr_A(σ) − β·N(σ)            T†(ξ)   = ξ⊗Id − β·N†(ξ)
//!   T_w(σ) = N_qc(Tr_A(σ) − β·N(σ))      T_w†(ξ) = N_qc(ξ)⊗Id − β·N†(N_qc(ξ))
//! ```
//!
//! whose kernels cut out the occupation operators of open-loop and
//! classical-state-preserving closed-loop policies respectively. On top of
//! them: the primal/dual occupation SDPs ([`solve_sdp_open`],
//! [`solve_sdp_closed`]), value-function algorithms ([`value_net_open`],
//! [`value_closed`]), rollout and fixed-point evaluation, stationary-policy
//! searches over the bilinear programs ([`solve_bil_open`],
//! [`solve_bil_closed`]), and the duality-assumption checkers.

mod assumptions;
mod bil;
mod net;
mod rollout;
mod sdp;

pub use assumptions::{
    AssumptionReport, AssumptionStatus, check_assumption1, check_assumption2, default_probes,
};
pub use bil::{BilOptions, BilReport, open_loop_gradient, solve_bil_closed, solve_bil_open};
pub use net::{
    ClosedValue, ValueNet, ValueNetOptions, ValueNetPoint, bellman_step_closed, bellman_step_open,
    value_closed, value_net_open,
};
pub use rollout::{
    FixedPointSigma, FixedPointState, RolloutResult, default_horizon, fixed_point_sigma,
    fixed_point_state, open_loop_channel, rollout,
};
pub use sdp::{
    QSdpOptions, SdpReport, build_sdp_closed, build_sdp_open, csp_face_minimize, solve_sdp_closed,
    solve_sdp_open,
};

use crate::channel::{CspPolicyChannel, KrausChannel, nqc};
use crate::herm::{
    DensityOperator, HermitianOperator, hs_inner, partial_trace_a, tensor,
};
use crate::{Error, Result};
use num_complex::Complex64;

/// A discounted q-MDP instance.
#[derive(Clone, Debug)]
pub struct QmdpInstance {
    dim_x: usize,
    dim_a: usize,
    channel: KrausChannel,
    cost: HermitianOperator,
    beta: f64,
    rho0: DensityOperator,
}

impl QmdpInstance {
    pub fn new(
        dim_x: usize,
        dim_a: usize,
        channel: KrausChannel,
        cost: HermitianOperator,
        beta: f64,
        rho0: DensityOperator,
    ) -> Result<Self> {
        if channel.in_dim() != dim_x * dim_a || channel.out_dim() != dim_x {
            return Err(Error::InvalidInstance(format!(
                "channel is {}→{}, expected {}→{}",
                channel.in_dim(),
                channel.out_dim(),
                dim_x * dim_a,
                dim_x
            )));
        }
        if cost.dim() != dim_x * dim_a {
            return Err(Error::InvalidInstance(format!(
                "cost dim {} != {}",
                cost.dim(),
                dim_x * dim_a
            )));
        }
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::InvalidInstance(format!("beta {beta} outside (0,1)")));
        }
        if rho0.dim() != dim_x {
            return Err(Error::InvalidInstance(format!(
                "rho0 dim {} != {}",
                rho0.dim(),
                dim_x
            )));
        }
        Ok(Self { dim_x, dim_a, channel, cost, beta, rho0 })
    }

    pub fn dim_x(&self) -> usize {
        self.dim_x
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn joint_dim(&self) -> usize {
        self.dim_x * self.dim_a
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }

    pub fn cost(&self) -> &HermitianOperator {
        &self.cost
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn rho0(&self) -> &DensityOperator {
        &self.rho0
    }

    /// Same model, different initial state.
    pub fn with_rho0(&self, rho0: DensityOperator) -> Result<Self> {
        Self::new(
            self.dim_x,
            self.dim_a,
            self.channel.clone(),
            self.cost.clone(),
            self.beta,
            rho0,
        )
    }

    /// `T(σ) = Tr_A(σ) − β·N(σ)`.
    pub fn op_t(&self, sigma: &HermitianOperator) -> Result<HermitianOperator> {
        let marg = partial_trace_a(sigma, self.dim_x, self.dim_a)?;
        let step = self.channel.apply(sigma)?;
        Ok(marg.sub(&step.scale(self.beta)))
    }

    /// Adjoint `T†(ξ) = ξ⊗Id − β·N†(ξ)`.
    pub fn op_t_adj(&self, xi: &HermitianOperator) -> Result<HermitianOperator> {
        if xi.dim() != self.dim_x {
            return Err(Error::DimensionMismatch(format!(
                "T† input dim {} != {}",
                xi.dim(),
                self.dim_x
            )));
        }
        let lifted = tensor(xi, &HermitianOperator::identity(self.dim_a));
        let back = self.channel.adjoint_apply(xi)?;
        Ok(lifted.sub(&back.scale(self.beta)))
    }

    /// `T_w(σ) = N_qc(Tr_A(σ)) − β·N_qc(N(σ))`; always diagonal.
    pub fn op_tw(&self, sigma: &HermitianOperator) -> Result<HermitianOperator> {
        let marg = partial_trace_a(sigma, self.dim_x, self.dim_a)?;
        let step = self.channel.apply(sigma)?;
        Ok(nqc(&marg).sub(&nqc(&step).scale(self.beta)))
    }

    /// Adjoint `T_w†(ξ) = N_qc(ξ)⊗Id − β·N†(N_qc(ξ))`, using that the
    /// quantum-to-classical channel is self-adjoint.
    pub fn op_tw_adj(&self, xi: &HermitianOperator) -> Result<HermitianOperator> {
        if xi.dim() != self.dim_x {
            return Err(Error::DimensionMismatch(format!(
                "T_w† input dim {} != {}",
                xi.dim(),
                self.dim_x
            )));
        }
        let dxi = nqc(xi);
        let lifted = tensor(&dxi, &HermitianOperator::identity(self.dim_a));
        let back = self.channel.adjoint_apply(&dxi)?;
        Ok(lifted.sub(&back.scale(self.beta)))
    }
}

/// A policy of appending channels `ρ ↦ ρ ⊗ π_t`, identified by the
/// appended density operators; the last entry is the stationary tail.
#[derive(Clone, Debug)]
pub struct OpenLoopPolicy {
    plan: Vec<DensityOperator>,
}

impl OpenLoopPolicy {
    pub fn stationary(pi: DensityOperator) -> Self {
        Self { plan: vec![pi] }
    }

    pub fn from_plan(plan: Vec<DensityOperator>) -> Result<Self> {
        if plan.is_empty() {
            return Err(Error::InvalidInstance("empty open-loop plan".into()));
        }
        let dim = plan[0].dim();
        if plan.iter().any(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch("mixed dims in open-loop plan".into()));
        }
        Ok(Self { plan })
    }

    pub fn pi_at(&self, t: usize) -> &DensityOperator {
        &self.plan[t.min(self.plan.len() - 1)]
    }

    pub fn is_stationary(&self) -> bool {
        self.plan.len() == 1
    }

    pub fn tail(&self) -> &DensityOperator {
        self.plan.last().expect("plan is nonempty")
    }

    pub fn plan(&self) -> &[DensityOperator] {
        &self.plan
    }
}

/// Borrowed policy for rollout and evaluation.
#[derive(Clone, Copy)]
pub enum PolicyRef<'a> {
    OpenLoop(&'a OpenLoopPolicy),
    Csp(&'a CspPolicyChannel),
}

/// Owned policy extracted by a solver.
#[derive(Clone, Debug)]
pub enum ExtractedPolicy {
    OpenLoop(OpenLoopPolicy),
    Csp(CspPolicyChannel),
}

impl ExtractedPolicy {
    pub fn as_ref(&self) -> PolicyRef<'_> {
        match self {
            ExtractedPolicy::OpenLoop(p) => PolicyRef::OpenLoop(p),
            ExtractedPolicy::Csp(c) => PolicyRef::Csp(c),
        }
    }
}

/// Partial contraction `Tr_X(m·(ρ ⊗ Id))` of an operator on `H_X ⊗ H_A`
/// against a state on `H_X`; Hermitian whenever both arguments are.
pub(crate) fn contract_x(
    m: &HermitianOperator,
    rho: &HermitianOperator,
    dim_x: usize,
    dim_a: usize,
) -> HermitianOperator {
    debug_assert_eq!(m.dim(), dim_x * dim_a);
    debug_assert_eq!(rho.dim(), dim_x);
    let mat = crate::herm::ComplexMatrix::from_fn(dim_a, dim_a, |a, b| {
        let mut s = Complex64::ZERO;
        for x in 0..dim_x {
            for xp in 0..dim_x {
                s += m.get(x * dim_a + a, xp * dim_a + b) * rho.get(xp, x);
            }
        }
        s
    });
    HermitianOperator::herm_part(&mat)
}

/// Partial contraction `Tr_A(m·(Id ⊗ π))`.
pub(crate) fn contract_a(
    m: &HermitianOperator,
    pi: &HermitianOperator,
    dim_x: usize,
    dim_a: usize,
) -> HermitianOperator {
    debug_assert_eq!(m.dim(), dim_x * dim_a);
    debug_assert_eq!(pi.dim(), dim_a);
    let mat = crate::herm::ComplexMatrix::from_fn(dim_x, dim_x, |x, y| {
        let mut s = Complex64::ZERO;
        for a in 0..dim_a {
            for ap in 0..dim_a {
                s += m.get(x * dim_a + a, y * dim_a + ap) * pi.get(ap, a);
            }
        }
        s
    });
    HermitianOperator::herm_part(&mat)
}

/// Minimum of `⟨g, π⟩` over density operators: the bottom eigenvalue of
/// `g`, attained at the normalized projector onto the bottom eigenspace
/// (uniform mixture across degeneracies within `cluster_tol`).
pub(crate) fn bottom_eigenprojector(
    g: &HermitianOperator,
    cluster_tol: f64,
) -> Result<(f64, DensityOperator)> {
    let eig = g.eig()?;
    let lam_min = eig.values[0];
    let dim = g.dim();
    let mut proj = HermitianOperator::zeros(dim);
    let mut count = 0usize;
    for (k, &lam) in eig.values.iter().enumerate() {
        if lam <= lam_min + cluster_tol {
            let col: Vec<Complex64> = (0..dim).map(|i| eig.vectors.get(i, k)).collect();
            proj = proj.add(&HermitianOperator::projector_from_vector(&col));
            count += 1;
        }
    }
    let pi = DensityOperator::new(proj.scale(1.0 / count as f64))?;
    Ok((lam_min, pi))
}

/// One-step greedy value `min_π ⟨c + β·N†(ξ), ρ ⊗ π⟩` with its minimizer.
///
/// The minimum over density operators of a linear functional is the bottom
/// eigenvalue of the contraction `G = Tr_X((c + β·N†(ξ))(ρ ⊗ Id))`, and the
/// argmin is the normalized bottom eigenprojector.
pub fn min_over_actions(
    q: &QmdpInstance,
    rho: &DensityOperator,
    xi: &HermitianOperator,
) -> Result<(f64, DensityOperator)> {
    if rho.dim() != q.dim_x || xi.dim() != q.dim_x {
        return Err(Error::DimensionMismatch("min_over_actions input dims".into()));
    }
    let w = q.cost.add(&q.channel.adjoint_apply(xi)?.scale(q.beta));
    let g = contract_x(&w, rho.op(), q.dim_x, q.dim_a);
    bottom_eigenprojector(&g, 1e-9)
}

/// Solver-facing summary of one occupation-SDP solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    pub primal_value: f64,
    pub dual_value: f64,
    /// `|primal − dual| / (1 + |primal|)`.
    pub gap: f64,
    pub extracted_policy: Option<ExtractedPolicy>,
    pub rollout_value: Option<f64>,
    pub assumption_status: AssumptionStatus,
    pub solver_status: crate::conic::SdpStatus,
}

/// Spectral-norm bound `|⟨c, σ⟩| ≤ ‖c‖` used in tail estimates.
pub(crate) fn cost_spectral_norm(q: &QmdpInstance) -> f64 {
    q.cost.spectral_norm().unwrap_or_else(|_| q.cost.hs_norm())
}

/// Golden-section search for a minimum of `f` on `[lo, hi]`; endpoints are
/// always candidates, so the result never exceeds `min(f(lo), f(hi))`.
pub(crate) fn golden_min(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mut best = (lo, f(lo));
    for cand in [(hi, f(hi)), (c, fc), (d, fd)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    best
}

pub(crate) fn xi_inner(xi: &HermitianOperator, rho: &DensityOperator) -> f64 {
    hs_inner(xi, rho.op()).expect("matching dims")
}
