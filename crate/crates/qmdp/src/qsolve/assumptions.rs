//! Three-valued checkers for the duality assumptions behind the linear
//! value functions and stationary optimal policies.
//!
//! Each assumption posits a dual-feasible `ξ` whose one-step greedy value
//! equals `⟨ξ, ρ⟩` at every state. Refutation is sound: a dual-infeasible
//! `ξ`, or one probe state where the greedy identity fails, disproves the
//! candidate. Certification uses a sound-but-incomplete sufficient
//! condition: the operator Schmidt factors of the slack `M = c − T†(ξ)`
//! on the action side must share a common kernel vector, which forces the
//! greedy minimum to zero for every state at once. Everything else is
//! reported as unknown, with the worst residuals attached.

use super::sdp::{QSdpOptions, csp_face_minimize, face_objective};
use super::{QmdpInstance, min_over_actions, xi_inner};
use crate::channel::nqc;
use crate::herm::{DensityOperator, HermitianOperator, hs_inner, operator_schmidt};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AssumptionStatus {
    Certified,
    Refuted,
    Unknown,
}

impl std::fmt::Display for AssumptionStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            AssumptionStatus::Certified => "certified",
            AssumptionStatus::Refuted => "refuted",
            AssumptionStatus::Unknown => "unknown",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct AssumptionReport {
    pub status: AssumptionStatus,
    /// Minimum eigenvalue of the dual slack `c − T†(ξ)`; negative beyond
    /// tolerance means `ξ` is not even dual feasible.
    pub feasibility_margin: f64,
    /// Worst `|greedy minimum − ⟨ξ, ρ⟩|` across the probe states.
    pub worst_probe_residual: f64,
    /// Smallest singular value of the stacked action-side Schmidt factors;
    /// at or below the kernel threshold the sufficient condition holds.
    pub kernel_gap: f64,
}

const KERNEL_THRESHOLD: f64 = 1e-8;

/// Smallest singular value of the stacked family `{E_A^k}`: the square
/// root of the bottom eigenvalue of `Σ_k (E_A^k)²`. Zero iff the factors
/// share a kernel vector.
fn stacked_kernel_gap(factors: &[HermitianOperator], dim_a: usize) -> Result<f64> {
    if factors.is_empty() {
        return Ok(0.0);
    }
    let mut gram = HermitianOperator::zeros(dim_a);
    for e in factors {
        let sq = e.matrix().matmul(e.matrix());
        gram = gram.add(&HermitianOperator::herm_part(&sq));
    }
    Ok(gram.min_eigenvalue()?.max(0.0).sqrt())
}

fn verdict(
    feasibility_margin: f64,
    worst_probe_residual: f64,
    kernel_gap: f64,
    tol: f64,
) -> AssumptionStatus {
    if feasibility_margin < -tol || worst_probe_residual > tol {
        AssumptionStatus::Refuted
    } else if kernel_gap <= KERNEL_THRESHOLD {
        AssumptionStatus::Certified
    } else {
        AssumptionStatus::Unknown
    }
}

/// Check the open-loop duality assumption for a candidate `ξ`.
///
/// (a) dual feasibility `c − T†(ξ) ⪰ −tol`; (b) at every probe state the
/// greedy minimum `min_π ⟨c + βN†(ξ), ρ⊗π⟩` equals `⟨ξ, ρ⟩` within `tol`;
/// certification via the common-kernel test on the slack's action factors.
pub fn check_assumption1(
    q: &QmdpInstance,
    xi: &HermitianOperator,
    probes: &[DensityOperator],
    tol: f64,
) -> Result<AssumptionReport> {
    let slack = q.cost().sub(&q.op_t_adj(xi)?);
    let feasibility_margin = slack.min_eigenvalue()?;
    let mut worst = 0.0f64;
    for rho in probes {
        let (greedy, _) = min_over_actions(q, rho, xi)?;
        worst = worst.max((greedy - xi_inner(xi, rho)).abs());
    }
    let schmidt = operator_schmidt(&slack, q.dim_x(), q.dim_a())?;
    let kernel_gap = stacked_kernel_gap(&schmidt.right, q.dim_a())?;
    Ok(AssumptionReport {
        status: verdict(feasibility_margin, worst, kernel_gap, tol),
        feasibility_margin,
        worst_probe_residual: worst,
        kernel_gap,
    })
}

/// Check the closed-loop duality assumption for a candidate `ξ`.
///
/// (a) dual feasibility `c − T_w†(ξ) ⪰ −tol`; (b) at every probe the
/// minimum of `⟨c + βN†(N_qc ξ), γ(ρ)⟩` over classical-state-preserving
/// channels (an SDP over the Choi face) equals `⟨N_qc(ξ), ρ⟩` within
/// `tol`. The open-loop sufficient condition certifies here too, since the
/// appending channels sit inside the classical-state-preserving class.
pub fn check_assumption2(
    q: &QmdpInstance,
    xi: &HermitianOperator,
    probes: &[DensityOperator],
    tol: f64,
) -> Result<AssumptionReport> {
    let slack = q.cost().sub(&q.op_tw_adj(xi)?);
    let feasibility_margin = slack.min_eigenvalue()?;
    let dxi = nqc(xi);
    let m = q.cost().add(&q.channel().adjoint_apply(&dxi)?.scale(q.beta()));
    let sdp_opts = QSdpOptions::default();
    let mut worst = 0.0f64;
    for rho in probes {
        let g = face_objective(&m, rho.op(), q.dim_x(), q.dim_a());
        let (greedy, _) = csp_face_minimize(&g, q.dim_x(), q.dim_a(), &sdp_opts)?;
        let target = hs_inner(&dxi, rho.op())?;
        worst = worst.max((greedy - target).abs());
    }
    let schmidt = operator_schmidt(&slack, q.dim_x(), q.dim_a())?;
    let kernel_gap = stacked_kernel_gap(&schmidt.right, q.dim_a())?;
    Ok(AssumptionReport {
        status: verdict(feasibility_margin, worst, kernel_gap, tol),
        feasibility_margin,
        worst_probe_residual: worst,
        kernel_gap,
    })
}

/// Default probe set: the classical basis states plus seeded random mixed
/// states.
pub fn default_probes(dim_x: usize, extra: usize, seed: u64) -> Vec<DensityOperator> {
    let mut probes: Vec<DensityOperator> =
        (0..dim_x).map(|x| DensityOperator::pure_basis(dim_x, x)).collect();
    let mut rng = crate::sample::rng(seed);
    probes.extend((0..extra).map(|_| crate::sample::random_density(&mut rng, dim_x)));
    probes
}
