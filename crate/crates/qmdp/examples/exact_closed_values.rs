//! Exact value function for the classical-state-preserving class.
//!
//! The closed-loop optimal value function is linear with a diagonal
//! operator, so one dual solve per classical basis state recovers it
//! exactly; no net, no covering radius.
//!
//! ```bash
//! cargo run --example exact_closed_values
//! ```

use qmdp::classical::{embed_to_qmdp, value_iteration};
use qmdp::herm::DensityOperator;
use qmdp::qsolve::{QSdpOptions, bellman_step_closed, value_closed};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(37);

    // Quantum instance: recover the diagonal value operator.
    let q = sample::random_qmdp_instance(&mut rng, 3, 2, 0.75);
    let cv = value_closed(&q, &QSdpOptions::default())?;
    println!("closed-loop value operator diag = {:.6?}", cv.diag());
    let rho = sample::random_density(&mut rng, 3);
    println!("V_w(ρ) at a random state = {:.9}", cv.evaluate(&rho));

    // The evaluator is a fixed point of the closed-loop Bellman operator
    // at classical states.
    for x in 0..3 {
        let basis = DensityOperator::pure_basis(3, x);
        let lv = bellman_step_closed(&q, &cv, &basis)?;
        println!(
            "  |L_w V_w − V_w| at basis state {x}: {:.3e}",
            (lv - cv.evaluate(&basis)).abs()
        );
    }

    // On an embedded classical MDP the diagonal equals value iteration.
    let mdp = sample::random_classical_mdp(&mut rng, 2, 3, 0.5);
    let inst = embed_to_qmdp(&mdp, &[0.5, 0.5])?;
    let cv = value_closed(&inst, &QSdpOptions::default())?;
    let (v, _) = value_iteration(&mdp, 1e-9);
    println!("\nembedded classical MDP:");
    println!("  algorithm  {:.7?}", cv.diag());
    println!("  iteration  {v:.7?}");
    Ok(())
}
