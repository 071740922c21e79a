//! The classical-state-preserving closed-loop occupation SDP.
//!
//! The dephased flow equation `T_w(σ) = (1−β)·N_qc(ρ0)` keeps only the
//! diagonal of the open-loop constraint, one equation per classical basis
//! state, so the closed-loop program relaxes the open-loop one whenever
//! `ρ0` is classical. On embedded classical MDPs it collapses to the
//! classical occupancy LP and reproduces value iteration exactly.
//!
//! ```bash
//! cargo run --example closed_loop_sdp
//! ```

use qmdp::classical::{embed_to_qmdp, value_iteration};
use qmdp::herm::DensityOperator;
use qmdp::qsolve::{PolicyRef, QSdpOptions, default_horizon, rollout, solve_sdp_closed, solve_sdp_open};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(29);

    // Random quantum instance with a classical initial state: the closed
    // program is a relaxation of the open one.
    let base = sample::random_qmdp_instance(&mut rng, 2, 2, 0.7);
    let mu0 = sample::random_distribution(&mut rng, 2);
    let q = base.with_rho0(DensityOperator::from_distribution(&mu0)?)?;
    let open = solve_sdp_open(&q, &QSdpOptions::default())?;
    let closed = solve_sdp_closed(&q, &QSdpOptions::default())?;
    println!("open value   {:.9}", open.primal_value);
    println!("closed value {:.9}  (≤ open: {})", closed.primal_value, closed.primal_value <= open.primal_value + 1e-7);
    println!("closed gap   {:.3e}", closed.gap);

    // Closed-loop rollouts stay above the closed bound.
    let horizon = default_horizon(&q);
    for trial in 0..4 {
        let gamma = sample::random_csp_policy(&mut rng, 2, 2);
        let ro = rollout(&q, PolicyRef::Csp(&gamma), horizon)?;
        let normalized = (1.0 - q.beta()) * ro.discounted_cost;
        println!(
            "  csp policy {trial}: (1−β)·cost = {normalized:.9}  ≥ closed − ε: {}",
            normalized >= closed.primal_value - 1e-6
        );
    }

    // On embedded classical data the closed SDP is the classical LP.
    let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.9);
    let (v, _) = value_iteration(&mdp, 1e-9);
    println!("\nembedded classical MDP, per-state values:");
    for x in 0..3 {
        let mut mu = vec![0.0; 3];
        mu[x] = 1.0;
        let inst = embed_to_qmdp(&mdp, &mu)?;
        let rep = solve_sdp_closed(&inst, &QSdpOptions::default())?;
        println!(
            "  state {x}: SDP/(1−β) = {:.7}  v*_VI = {:.7}  (diff {:.2e})",
            rep.primal_value / (1.0 - mdp.beta()),
            v[x],
            (rep.primal_value / (1.0 - mdp.beta()) - v[x]).abs()
        );
    }
    Ok(())
}
