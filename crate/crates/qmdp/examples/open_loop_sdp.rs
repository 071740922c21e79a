//! The open-loop occupation SDP and its dual.
//!
//! Occupation operators of open-loop policies satisfy the affine flow
//! equation `T(σ) = (1−β)ρ0`, so minimizing `⟨c, σ⟩` over that slice of
//! the PSD cone lower-bounds `(1−β)·V*`. The dual certificate `ξ` prices
//! initial states and obeys `⟨ξ, (1−β)ρ⟩ ≤ (1−β)·V(γ, ρ)` for every
//! policy.
//!
//! ```bash
//! cargo run --example open_loop_sdp
//! ```

use qmdp::herm::hs_inner;
use qmdp::qsolve::{
    OpenLoopPolicy, PolicyRef, QSdpOptions, default_horizon, rollout, solve_sdp_open,
};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(23);
    let q = sample::random_qmdp_instance(&mut rng, 2, 3, 0.85);

    let rep = solve_sdp_open(&q, &QSdpOptions::default())?;
    println!("status        {:?} after {} iterations", rep.status, rep.iterations);
    println!("primal value  {:.9}   (= (1−β)·lower bound on V*)", rep.primal_value);
    println!("dual value    {:.9}", rep.dual_value);
    println!("gap           {:.3e}", rep.gap);

    // The primal optimizer is a feasible occupation operator.
    let flow = q.op_t(&rep.sigma)?.sub(&q.rho0().op().scale(1.0 - q.beta()));
    println!("flow residual {:.3e}, trace {:.9}", flow.hs_norm(), rep.sigma.trace());

    // The shifted dual is exactly feasible.
    let slack = q.cost().sub(&q.op_t_adj(&rep.xi)?);
    println!("dual slack λ_min {:+.3e}", slack.min_eigenvalue()?);

    // Every open-loop rollout sits above the bound.
    let horizon = default_horizon(&q);
    println!("\nrollouts at horizon {horizon}:");
    for trial in 0..5 {
        let pi = sample::random_density(&mut rng, 3);
        let policy = OpenLoopPolicy::stationary(pi);
        let ro = rollout(&q, PolicyRef::OpenLoop(&policy), horizon)?;
        let normalized = (1.0 - q.beta()) * ro.discounted_cost;
        println!(
            "  policy {trial}: (1−β)·cost = {normalized:.9}  ≥ primal − ε: {}",
            normalized >= rep.primal_value - 1e-6
        );
    }

    // Weak duality against the dual certificate at other initial states.
    let rho = sample::random_density(&mut rng, 2);
    let priced = hs_inner(&rep.xi, rho.op())? * (1.0 - q.beta());
    let there = solve_sdp_open(&q.with_rho0(rho)?, &QSdpOptions::default())?;
    println!(
        "\ndual prices other states from below: ⟨ξ,(1−β)ρ⟩ = {priced:.9} ≤ {:.9}",
        there.primal_value
    );
    Ok(())
}
