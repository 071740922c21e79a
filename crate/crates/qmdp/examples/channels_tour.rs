//! Tour of the channel toolbox: Kraus/Choi representations, CPTP
//! verification, adjoints, and the special channels used by the q-MDP
//! machinery.
//!
//! ```bash
//! cargo run --example channels_tour
//! ```

use qmdp::channel::{
    appending_channel, classical_channel_embed, classical_policy_channel, csp_membership, nqc,
};
use qmdp::classical::StationaryKernel;
use qmdp::herm::{DensityOperator, HermitianOperator, hs_distance, partial_trace_a, tensor};
use qmdp::sample;

fn main() -> qmdp::Result<()> {
    let mut rng = sample::rng(7);

    // A random CPTP channel, round-tripped through both representations.
    let channel = sample::random_kraus_channel(&mut rng, 4, 2, 3);
    let rho = sample::random_density(&mut rng, 4);
    let direct = channel.apply(rho.op())?;
    let choi = channel.to_choi();
    let via_choi = choi.apply(rho.op())?;
    let via_kraus = choi.to_kraus()?.apply(rho.op())?;
    println!("kraus → choi → kraus action drift:");
    println!("  |N(ρ) − Λ(𝔠,ρ)|      = {:.3e}", hs_distance(&direct, &via_choi));
    println!("  |N(ρ) − N'(ρ)|       = {:.3e}", hs_distance(&direct, &via_kraus));

    let report = channel.verify(1e-9);
    println!(
        "verification: tp residual {:.3e}, choi λ_min {:+.3e}, passes: {}",
        report.tp_residual,
        report.psd_margin,
        report.passes()
    );

    // Perturbed Kraus sets fail loudly.
    let scaled: Vec<_> = channel.kraus_operators().iter().map(|k| k.scale_re(1.01)).collect();
    let bad = qmdp::channel::KrausChannel::new_unchecked(4, 2, scaled)?;
    println!("scaled by 1.01: tp residual {:.3e} (fails)", bad.verify(1e-9).tp_residual);

    // Adjoint identity ⟨ξ, N(σ)⟩ = ⟨N†(ξ), σ⟩.
    let xi = sample::random_hermitian(&mut rng, 2, 1.0);
    let sigma = sample::random_hermitian(&mut rng, 4, 1.0);
    let lhs = qmdp::herm::hs_inner(&xi, &channel.apply(&sigma)?)?;
    let rhs = qmdp::herm::hs_inner(&channel.adjoint_apply(&xi)?, &sigma)?;
    println!("adjoint identity residual: {:.3e}", (lhs - rhs).abs());

    // Classical kernel embedded as a quantum channel.
    let w = vec![vec![0.7, 0.4], vec![0.3, 0.6]];
    let embedded = classical_channel_embed(&w)?;
    let mu = [0.25, 0.75];
    let out = embedded.apply(&HermitianOperator::from_diag(&mu))?;
    println!(
        "classical embedding on diag(μ): diag(Wμ) = [{:.4}, {:.4}]",
        out.get(0, 0).re,
        out.get(1, 1).re
    );

    // Appending channel ρ ↦ ρ ⊗ π and its reversibility.
    let pi = sample::random_density(&mut rng, 2);
    let append = appending_channel(&pi, 2);
    let rho_x = sample::random_density(&mut rng, 2);
    let appended = append.apply(rho_x.op())?;
    println!(
        "appending channel: |γ(ρ) − ρ⊗π| = {:.3e}, |Tr_A(γ(ρ)) − ρ| = {:.3e}",
        hs_distance(&appended, &tensor(rho_x.op(), pi.op())),
        hs_distance(&partial_trace_a(&appended, 2, 2)?, rho_x.op())
    );

    // Quantum-to-classical dephasing.
    let mixed = sample::random_density(&mut rng, 3);
    let dephased = nqc(mixed.op());
    println!(
        "dephasing keeps the diagonal: off-diagonal mass {:.3e} → {:.3e}",
        mixed.op().hs_norm() - nqc(mixed.op()).hs_norm(),
        dephased.sub(&nqc(&dephased)).hs_norm()
    );

    // Classical policies are classical-state-preserving channels; so are
    // appending channels. A prepare-fixed-state channel is not.
    let kernel = StationaryKernel::uniform(2, 3);
    let gamma = classical_policy_channel(&kernel)?;
    println!(
        "csp residuals: classical policy {:.3e}, appending {:.3e}",
        csp_membership(gamma.choi(), 1e-8)?.max_residual,
        csp_membership(&appending_channel(&pi, 2).to_choi(), 1e-8)?.max_residual
    );
    let gamma_q = sample::random_csp_policy(&mut rng, 2, 2);
    let any = sample::random_density(&mut rng, 2);
    let marg = partial_trace_a(&gamma_q.apply(any.op())?, 2, 2)?;
    println!(
        "state-preservation extends to diagonals of arbitrary states: {:.3e}",
        hs_distance(&nqc(&marg), &nqc(any.op()))
    );
    let projector = DensityOperator::pure_basis(2, 0);
    let _ = projector;
    Ok(())
}
