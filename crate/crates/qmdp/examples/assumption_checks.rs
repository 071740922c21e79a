//! The duality assumptions behind linear value functions, checked three
//! ways: refuted by a failing probe, certified by the common-kernel test
//! on the dual slack's action factors, or left unknown.
//!
//! ```bash
//! cargo run --example assumption_checks
//! ```

use qmdp::classical::{embed_to_qmdp, value_iteration};
use qmdp::herm::{DensityOperator, HermitianOperator, tensor};
use qmdp::qsolve::{
    QSdpOptions, QmdpInstance, check_assumption1, check_assumption2, default_probes,
    solve_sdp_closed, solve_sdp_open,
};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(47);

    // Constructed certifiable instance: cost c = M0 + T†(ξ0) where the
    // slack M0 = Y ⊗ R has PSD factors and R annihilates a vector. Then
    // ξ0 is dual feasible with slack M0, the greedy identity holds at
    // every state, and the kernel test certifies it.
    let y = {
        let g = sample::complex_gaussian_matrix(&mut rng, 2, 2);
        HermitianOperator::herm_part(&g.matmul(&g.adjoint()))
    };
    let r_singular = {
        let e = sample::random_pure(&mut rng, 2);
        HermitianOperator::identity(2).sub(e.op()) // PSD with a kernel vector
    };
    let m0 = tensor(&y, &r_singular);
    let xi0 = sample::random_hermitian(&mut rng, 2, 0.2);
    let channel = sample::random_kraus_channel(&mut rng, 4, 2, 3);
    let beta = 0.6;
    let rho0 = sample::random_density(&mut rng, 2);
    let shell = QmdpInstance::new(2, 2, channel.clone(), m0.clone(), beta, rho0.clone())?;
    let cost = m0.add(&shell.op_t_adj(&xi0)?);
    let q = QmdpInstance::new(2, 2, channel, cost, beta, rho0)?;

    let probes = default_probes(2, 10, 7);
    let rep = check_assumption1(&q, &xi0, &probes, 1e-7)?;
    println!("constructed instance, candidate ξ0:");
    println!("  status {:?}", rep.status);
    println!("  slack λ_min {:+.3e}", rep.feasibility_margin);
    println!("  worst probe residual {:.3e}", rep.worst_probe_residual);
    println!("  stacked kernel gap {:.3e}", rep.kernel_gap);

    // The same instance with its solver-returned dual certificate.
    let sdp = solve_sdp_open(&q, &QSdpOptions::default())?;
    let rep = check_assumption1(&q, &sdp.xi, &probes, 1e-6)?;
    println!("  with the solver dual: {:?} (probe residual {:.2e})", rep.status, rep.worst_probe_residual);

    // Classical MDPs usually refute the open-loop assumption (a fixed
    // appended action cannot match state-dependent optima) while the
    // closed-loop value matches at classical probes.
    let mdp = sample::random_classical_mdp(&mut rng, 2, 2, 0.8);
    let inst = embed_to_qmdp(&mdp, &[0.5, 0.5])?;
    let (v, _) = value_iteration(&mdp, 1e-10);
    let xi = HermitianOperator::from_diag(&v);
    let classical_probes: Vec<DensityOperator> =
        (0..2).map(|x| DensityOperator::pure_basis(2, x)).collect();
    let rep1 = check_assumption1(&inst, &xi, &classical_probes, 1e-5)?;
    let rep2 = check_assumption2(&inst, &xi, &classical_probes, 1e-5)?;
    println!("\nembedded classical MDP with ξ = diag(v*):");
    println!("  open-loop:   {:?} (worst probe {:.2e})", rep1.status, rep1.worst_probe_residual);
    println!("  closed-loop: {:?} (worst probe {:.2e})", rep2.status, rep2.worst_probe_residual);

    // A strictly positive cost with ξ = 0 is refuted outright.
    let qpos = QmdpInstance::new(
        2,
        2,
        inst.channel().clone(),
        HermitianOperator::identity(4),
        0.8,
        inst.rho0().clone(),
    )?;
    let rep = check_assumption2(&qpos, &HermitianOperator::zeros(2), &classical_probes, 1e-6)?;
    println!("\nξ = 0 against a strictly positive cost: {:?}", rep.status);

    let _ = solve_sdp_closed(&qpos, &QSdpOptions::default())?;
    Ok(())
}
