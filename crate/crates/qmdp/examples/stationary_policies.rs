//! Stationary optimal policies via the bilinear programs.
//!
//! The occupation is eliminated through its stationary fixed point and
//! Frank-Wolfe runs on the policy variable alone: over appended density
//! operators for the open-loop class, over the classical-state-preserving
//! Choi face for the closed-loop class. The occupation-SDP dual supplies a
//! certified lower bound, so a closed certificate gap proves global
//! optimality despite the nonconvexity.
//!
//! ```bash
//! cargo run --example stationary_policies
//! ```

use qmdp::classical::{embed_to_qmdp, value_iteration};
use qmdp::qsolve::{BilOptions, ExtractedPolicy, solve_bil_closed, solve_bil_open};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(41);
    let opts = BilOptions { restarts: 4, ..Default::default() };

    // Open-loop search on a genuinely quantum instance.
    let q = sample::random_qmdp_instance(&mut rng, 2, 2, 0.7);
    let rep = solve_bil_open(&q, &opts)?;
    println!("open-loop bilinear search:");
    println!("  J(π*)            {:.9}", rep.objective);
    println!("  SDP lower bound  {:.9}", rep.lower_bound);
    println!("  certificate gap  {:.3e} (optimal within tol: {})", rep.certificate_gap, rep.optimal_within_tol);
    println!("  rollout check    {:.9} ± {:.1e}", rep.rollout_value, rep.rollout_tail_bound);
    if let ExtractedPolicy::OpenLoop(p) = &rep.policy {
        println!("  appended state eigenvalues {:?}", p.tail().op().eig()?.values);
    }

    // Closed-loop search on an embedded classical MDP: the sandwich
    // classical-feasibility ≥ J ≥ SDP-w pins J to (1−β)·v*.
    let mdp = sample::random_classical_mdp(&mut rng, 2, 2, 0.9);
    let mu0 = sample::random_distribution(&mut rng, 2);
    let inst = embed_to_qmdp(&mdp, &mu0)?;
    let rep = solve_bil_closed(&inst, &opts)?;
    let (v, _) = value_iteration(&mdp, 1e-9);
    let target: f64 = v.iter().zip(&mu0).map(|(a, b)| a * b * (1.0 - mdp.beta())).sum();
    println!("\nclosed-loop bilinear search on classical data:");
    println!("  J(γ*)            {:.9}", rep.objective);
    println!("  (1−β)·v*(μ0)     {target:.9}");
    println!("  certificate gap  {:.3e}", rep.certificate_gap);
    println!("  rollout check    {:.9} ± {:.1e}", rep.rollout_value, rep.rollout_tail_bound);
    Ok(())
}
