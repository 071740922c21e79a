//! The classical side: value iteration, the occupancy-measure LP and its
//! dual, policy extraction by disintegration, and the embedding of a
//! classical MDP into q-MDP form.
//!
//! ```bash
//! cargo run --example classical_oracle
//! ```

use qmdp::classical::{
    disintegrate, embed_to_qmdp, lp_dual, occupancy_lp, policy_value, value_iteration,
};
use qmdp::herm::HermitianOperator;
use qmdp::herm::hs_distance;
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(11);
    let mdp = sample::random_classical_mdp(&mut rng, 3, 2, 0.9);
    let mu0 = sample::random_distribution(&mut rng, 3);

    let (v, greedy) = value_iteration(&mdp, 1e-9);
    println!("value iteration: v* = {v:.6?}, greedy actions = {greedy:?}");

    let (nu, primal) = occupancy_lp(&mdp, &mu0)?;
    let (xi, dual) = lp_dual(&mdp, &mu0)?;
    println!("occupancy LP:    (1−β)·V* = {primal:.9}");
    println!("dual LP:         value    = {dual:.9}  (gap {:.2e})", (primal - dual).abs());
    println!("dual variable    ξ = {xi:.6?}");

    let expected: f64 = v.iter().zip(&mu0).map(|(a, b)| a * b).sum();
    println!(
        "cross-check:     LP/(1−β) = {:.9} vs ⟨v*, μ0⟩ = {expected:.9}",
        primal / (1.0 - mdp.beta())
    );

    // The optimal occupancy disintegrates into an optimal stationary kernel.
    let kernel = disintegrate(&nu);
    let pv = policy_value(&mdp, &kernel)?;
    let rolled: f64 = pv.iter().zip(&mu0).map(|(a, b)| a * b).sum();
    println!("disintegrated policy value = {rolled:.9}");

    // Embed into q-MDP form: the channel commutes with the classical step.
    let q = embed_to_qmdp(&mdp, &mu0)?;
    let joint = sample::random_distribution(&mut rng, 6);
    let quantum = q.channel().apply(&HermitianOperator::from_diag(&joint))?;
    let classical = HermitianOperator::from_diag(&mdp.dmdp_step(&joint));
    println!(
        "embedding commutation |N(diag ν) − diag(Pν)| = {:.3e}",
        hs_distance(&quantum, &classical)
    );
    Ok(())
}
