//! Rollouts, occupation operators, tail bounds, and the stationary fixed
//! points that replace infinite rollouts for stationary policies.
//!
//! ```bash
//! cargo run --example rollout_and_fixed_points
//! ```

use qmdp::herm::{hs_distance, tensor};
use qmdp::qsolve::{
    OpenLoopPolicy, PolicyRef, default_horizon, fixed_point_sigma, fixed_point_state, rollout,
};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(43);
    let q = sample::random_qmdp_instance(&mut rng, 2, 2, 0.9);
    let horizon = default_horizon(&q);
    println!("tail rule horizon: {horizon} (β = {})", q.beta());

    // Open-loop rollout and its truncation bookkeeping.
    let pi = sample::random_density(&mut rng, 2);
    let policy = OpenLoopPolicy::stationary(pi.clone());
    let ro = rollout(&q, PolicyRef::OpenLoop(&policy), horizon)?;
    println!("discounted cost  {:.9} (tail ≤ {:.2e})", ro.discounted_cost, ro.cost_tail_bound);
    let flow = q.op_t(&ro.occupation)?.sub(&q.rho0().op().scale(1.0 - q.beta()));
    println!(
        "occupation: trace {:.9}, flow residual {:.2e} (bound {:.2e})",
        ro.occupation.trace(),
        flow.hs_norm(),
        ro.occupation_tail_bound
    );

    // The stationary fixed point reproduces the infinite-horizon state
    // occupation without a rollout, and the occupation factorizes.
    let fp = fixed_point_state(&q, &pi)?;
    println!(
        "fixed point: residual {:.2e}, condition {:.1e}",
        fp.residual, fp.condition
    );
    let product = tensor(fp.state.op(), pi.op());
    println!(
        "product form: |σ_T − ρ*⊗π| = {:.2e} (within occupation tail)",
        hs_distance(&ro.occupation, &product)
    );

    // Same story for a classical-state-preserving policy.
    let gamma = sample::random_csp_policy(&mut rng, 2, 2);
    let ro = rollout(&q, PolicyRef::Csp(&gamma), horizon)?;
    let fps = fixed_point_sigma(&q, &gamma)?;
    println!(
        "csp policy: rollout occupation vs fixed point {:.2e}, cost {:.9}",
        hs_distance(&ro.occupation, &fps.sigma),
        ro.discounted_cost
    );
    Ok(())
}
