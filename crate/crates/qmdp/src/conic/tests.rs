use super::*;
use crate::herm::{HermitianOperator, hs_distance};
use crate::sample;

fn solve_default(p: &SdpProblem) -> SdpSolution {
    solve(p, &SolveOptions::default()).unwrap()
}

#[test]
fn scalar_problem() {
    let p = SdpProblem::new(
        1,
        HermitianOperator::from_diag(&[1.0]),
        vec![(HermitianOperator::from_diag(&[1.0]), 1.0)],
    )
    .unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.primal_obj - 1.0).abs() < 1e-7);
    assert!((s.x.get(0, 0).re - 1.0).abs() < 1e-7);
}

#[test]
fn contradictory_equalities_are_infeasible() {
    let id = HermitianOperator::identity(2);
    let p = SdpProblem::new(
        2,
        HermitianOperator::identity(2),
        vec![(id.clone(), 1.0), (id, 2.0)],
    )
    .unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Infeasible);
}

#[test]
fn cone_infeasible_detected() {
    // ⟨Id, X⟩ = −1 has no PSD solution.
    let p = SdpProblem::new(
        2,
        HermitianOperator::identity(2),
        vec![(HermitianOperator::identity(2), -1.0)],
    )
    .unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Infeasible);
}

#[test]
fn unbounded_detected() {
    // min −X00 with only X11 pinned.
    let p = SdpProblem::new(
        2,
        HermitianOperator::from_diag(&[-1.0, 0.0]),
        vec![(HermitianOperator::from_diag(&[0.0, 1.0]), 1.0)],
    )
    .unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Unbounded);
}

#[test]
fn embedding_examples() {
    let e = herm_to_real(&HermitianOperator::from_diag(&[1.0, 2.0]));
    let expect = [
        1.0, 0.0, 0.0, 0.0, //
        0.0, 2.0, 0.0, 0.0, //
        0.0, 0.0, 1.0, 0.0, //
        0.0, 0.0, 0.0, 2.0,
    ];
    assert_eq!(e, expect);

    // Pauli Y = [[0, −i], [i, 0]] embeds with eigenvalues {−1, −1, 1, 1}.
    let y = HermitianOperator::new(crate::herm::ComplexMatrix::from_rows(&[
        vec![num_complex::Complex64::ZERO, num_complex::Complex64::new(0.0, -1.0)],
        vec![num_complex::Complex64::new(0.0, 1.0), num_complex::Complex64::ZERO],
    ])
    .unwrap())
    .unwrap();
    let e = herm_to_real(&y);
    let (vals, _) = crate::herm::eig_real_symmetric(4, &e).unwrap();
    for (got, want) in vals.iter().zip(&[-1.0, -1.0, 1.0, 1.0]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn embedding_preserves_min_eigenvalue_and_doubles_inner_product() {
    let mut rng = sample::rng(21);
    for _ in 0..5 {
        let h = sample::random_hermitian(&mut rng, 3, 1.0);
        let e = herm_to_real(&h);
        let (vals, _) = crate::herm::eig_real_symmetric(6, &e).unwrap();
        assert!((vals[0] - h.min_eigenvalue().unwrap()).abs() < 1e-10);

        let g = sample::random_hermitian(&mut rng, 3, 1.0);
        let eg = herm_to_real(&g);
        let dot: f64 = e.iter().zip(&eg).map(|(a, b)| a * b).sum();
        assert!((dot - 2.0 * crate::herm::hs_inner(&h, &g).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn minimum_eigenvalue_via_sdp() {
    // min ⟨C, X⟩ s.t. Tr X = 1, X ⪰ 0 equals λ_min(C).
    let mut rng = sample::rng(22);
    for dim in [2usize, 3, 4] {
        let c = sample::random_hermitian(&mut rng, dim, 1.0);
        let p = SdpProblem::new(
            dim,
            c.clone(),
            vec![(HermitianOperator::identity(dim), 1.0)],
        )
        .unwrap();
        let s = solve_default(&p);
        assert_eq!(s.status, SdpStatus::Optimal);
        let lam_min = c.min_eigenvalue().unwrap();
        assert!(
            (s.primal_obj - lam_min).abs() < 1e-6,
            "dim {dim}: {} vs {}",
            s.primal_obj,
            lam_min
        );
        assert!((s.primal_obj - s.dual_obj).abs() < 1e-6);
    }
}

#[test]
fn off_diagonal_constraint_known_answer() {
    // min Tr X s.t. 2·Re X01 = 2, X ⪰ 0 has optimum 2 at X = ones/…
    let mut a = HermitianOperator::zeros(2);
    a = a.add(&HermitianOperator::new(crate::herm::ComplexMatrix::from_rows(&[
        vec![num_complex::Complex64::ZERO, num_complex::Complex64::ONE],
        vec![num_complex::Complex64::ONE, num_complex::Complex64::ZERO],
    ])
    .unwrap())
    .unwrap());
    let p = SdpProblem::new(2, HermitianOperator::identity(2), vec![(a, 2.0)]).unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Optimal);
    assert!((s.primal_obj - 2.0).abs() < 1e-6);
}

// Bounded instances: the unit-trace row plus random rows through a common
// interior point. Without the trace row a random SDP is usually unbounded
// below (the null space of a few random rows meets the cone).
fn random_feasible_problem(
    rng: &mut rand_chacha::ChaCha8Rng,
    dim: usize,
    m: usize,
) -> SdpProblem {
    let x0 = sample::random_density(rng, dim);
    let mut constraints: Vec<(HermitianOperator, f64)> =
        vec![(HermitianOperator::identity(dim), 1.0)];
    constraints.extend((0..m).map(|_| {
        let a = sample::random_hermitian(rng, dim, 1.0);
        let b = crate::herm::hs_inner(&a, x0.op()).unwrap();
        (a, b)
    }));
    let c = sample::random_hermitian(rng, dim, 1.0);
    SdpProblem::new(dim, c, constraints).unwrap()
}

#[test]
fn random_feasible_suite() {
    let mut rng = sample::rng(23);
    let opts = SolveOptions::default();
    for trial in 0..12 {
        let dim = 2 + (trial % 3);
        let m = 1 + (trial % (dim * dim - 1));
        let p = random_feasible_problem(&mut rng, dim, m);
        let s = solve(&p, &opts).unwrap();
        assert_eq!(s.status, SdpStatus::Optimal, "trial {trial}");
        assert!(s.primal_residual <= opts.tol && s.dual_residual <= opts.tol && s.gap <= opts.tol);
        // Weak duality and cone membership up to 10·tol.
        assert!(s.dual_obj <= s.primal_obj + 10.0 * opts.tol);
        assert!(s.x.min_eigenvalue().unwrap() >= -10.0 * opts.tol);
        let mut slack = p.objective.clone();
        for ((a, _), yi) in p.constraints.iter().zip(&s.y) {
            slack = slack.sub(&a.scale(*yi));
        }
        assert!(slack.min_eigenvalue().unwrap() >= -10.0 * opts.tol);
    }
}

#[test]
fn dependent_rows_are_pruned() {
    // Second row is the sum of the first two; consistent rhs.
    let mut rng = sample::rng(24);
    let x0 = sample::random_density(&mut rng, 3);
    let a1 = sample::random_hermitian(&mut rng, 3, 1.0);
    let a2 = sample::random_hermitian(&mut rng, 3, 1.0);
    let a3 = a1.add(&a2);
    let b1 = crate::herm::hs_inner(&a1, x0.op()).unwrap();
    let b2 = crate::herm::hs_inner(&a2, x0.op()).unwrap();
    let p = SdpProblem::new(
        3,
        sample::random_hermitian(&mut rng, 3, 1.0),
        vec![
            (HermitianOperator::identity(3), 1.0),
            (a1, b1),
            (a3, b1 + b2),
            (a2, b2),
        ],
    )
    .unwrap();
    let s = solve_default(&p);
    assert_eq!(s.status, SdpStatus::Optimal);
    assert_eq!(s.y.len(), 4);
    // Dual feasibility holds with the dependent row's multiplier at zero.
    let mut slack = p.objective.clone();
    for ((a, _), yi) in p.constraints.iter().zip(&s.y) {
        slack = slack.sub(&a.scale(*yi));
    }
    assert!(slack.min_eigenvalue().unwrap() >= -1e-7);
}

#[test]
fn objective_scaling_covariance() {
    let mut rng = sample::rng(25);
    let p = random_feasible_problem(&mut rng, 3, 3);
    let opts = SolveOptions::default();
    let s1 = solve(&p, &opts).unwrap();
    let mut p2 = p.clone();
    p2.objective = p.objective.scale(2.0);
    let s2 = solve(&p2, &opts).unwrap();
    assert!((s2.primal_obj - 2.0 * s1.primal_obj).abs() <= 10.0 * opts.tol * (1.0 + s1.primal_obj.abs()));
    assert!(hs_distance(&s1.x, &s2.x) < 1e-5);
}

#[test]
fn determinism_bitwise() {
    let mut rng = sample::rng(26);
    let p = random_feasible_problem(&mut rng, 3, 4);
    let opts = SolveOptions::default();
    let s1 = solve(&p, &opts).unwrap();
    let s2 = solve(&p, &opts).unwrap();
    assert_eq!(s1.iterations, s2.iterations);
    assert_eq!(s1.y, s2.y);
    assert!(s1
        .x
        .matrix()
        .data()
        .iter()
        .zip(s2.x.matrix().data())
        .all(|(a, b)| a == b));
}
