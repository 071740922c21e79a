use super::*;
use crate::sample;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn tensor_basis_bookkeeping() {
    let a = HermitianOperator::from_diag(&[1.0, 0.0]);
    let b = HermitianOperator::from_diag(&[0.0, 1.0]);
    let t = tensor(&a, &b);
    assert_eq!(t, HermitianOperator::from_diag(&[0.0, 1.0, 0.0, 0.0]));
}

#[test]
fn tensor_identity() {
    let id2 = HermitianOperator::identity(2);
    assert_eq!(tensor(&id2, &id2), HermitianOperator::identity(4));
}

#[test]
fn tensor_trace_multiplies() {
    // Oracle: direct summation of the Kronecker diagonal.
    let mut rng = sample::rng(11);
    for _ in 0..20 {
        let a = sample::random_hermitian(&mut rng, 2, 1.0);
        let b = sample::random_hermitian(&mut rng, 2, 1.0);
        let t = tensor(&a, &b);
        let direct: f64 = (0..4).map(|i| t.get(i, i).re).sum();
        assert!((direct - a.trace() * b.trace()).abs() < 1e-12);
        assert!((t.trace() - a.trace() * b.trace()).abs() < 1e-12);
    }
}

#[test]
fn partial_trace_of_product_state() {
    let rho = HermitianOperator::from_diag(&[0.3, 0.7]);
    let xi = HermitianOperator::from_diag(&[0.5, 0.5]);
    let m = tensor(&rho, &xi);
    let back = partial_trace_a(&m, 2, 2).unwrap();
    assert!(hs_distance(&back, &rho) < 1e-14);
}

#[test]
fn partial_trace_of_bell_state() {
    let inv = std::f64::consts::FRAC_1_SQRT_2;
    let psi = [c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(inv, 0.0)];
    let bell = HermitianOperator::projector_from_vector(&psi);
    let marginal = partial_trace_a(&bell, 2, 2).unwrap();
    let expected = HermitianOperator::identity(2).scale(0.5);
    assert!(hs_distance(&marginal, &expected) < 1e-14);
}

#[test]
fn partial_trace_matches_index_summation_oracle() {
    let mut rng = sample::rng(12);
    let sigma = sample::random_density(&mut rng, 4);
    let m = sigma.op();
    let got = partial_trace_a(m, 2, 2).unwrap();
    // Independent double-loop summation.
    for x in 0..2 {
        for y in 0..2 {
            let mut s = Complex64::ZERO;
            for a in 0..2 {
                s += m.get(2 * x + a, 2 * y + a);
            }
            assert!((got.get(x, y) - s).norm() < 1e-14);
        }
    }
    assert!((got.trace() - m.trace()).abs() < 1e-12);
}

#[test]
fn partial_trace_rejects_bad_dims() {
    let m = HermitianOperator::identity(6);
    assert!(partial_trace_a(&m, 2, 2).is_err());
    assert!(partial_trace_a(&m, 2, 3).is_ok());
}

#[test]
fn hs_inner_examples() {
    let mut rng = sample::rng(13);
    let rho = sample::random_density(&mut rng, 3);
    assert!((hs_inner(&HermitianOperator::identity(3), rho.op()).unwrap() - 1.0).abs() < 1e-12);

    let x = sample::random_hermitian(&mut rng, 3, 1.0);
    let sq = hs_inner(&x, &x).unwrap();
    assert!(sq >= 0.0);
    assert!((sq.sqrt() - x.hs_norm()).abs() < 1e-10);

    let a = HermitianOperator::from_diag(&[1.0, 2.0]);
    let b = HermitianOperator::from_diag(&[3.0, 4.0]);
    assert_eq!(hs_inner(&a, &b).unwrap(), 11.0);

    assert!(hs_inner(&a, &HermitianOperator::identity(3)).is_err());
}

#[test]
fn eig_known_spectra() {
    let e = HermitianOperator::from_diag(&[2.0, 1.0]).eig().unwrap();
    assert!((e.values[0] - 1.0).abs() < 1e-12 && (e.values[1] - 2.0).abs() < 1e-12);

    let flip = HermitianOperator::new(
        ComplexMatrix::from_rows(&[vec![c(0., 0.), c(1., 0.)], vec![c(1., 0.), c(0., 0.)]]).unwrap(),
    )
    .unwrap();
    let e = flip.eig().unwrap();
    assert!((e.values[0] + 1.0).abs() < 1e-12 && (e.values[1] - 1.0).abs() < 1e-12);
}

fn reconstruction_residual(h: &HermitianOperator) -> f64 {
    let e = h.eig().unwrap();
    let rebuilt = e.apply_spectral(|x| x);
    hs_distance(&rebuilt, h)
}

#[test]
fn eig_reconstructs_random_hermitian() {
    let mut rng = sample::rng(14);
    for dim in [2usize, 3, 5, 8] {
        for _ in 0..5 {
            let h = sample::random_hermitian(&mut rng, dim, 1.0);
            assert!(reconstruction_residual(&h) < 1e-9, "dim {dim}");
            // Unitarity of the eigenvector matrix.
            let v = h.eig().unwrap().vectors;
            let vv = v.adjoint().matmul(&v);
            assert!(vv.sub(&ComplexMatrix::identity(dim)).max_abs() < 1e-9);
        }
    }
}

#[test]
fn eig_handles_degenerate_spectra() {
    // Id ⊗ h has every eigenvalue doubled.
    let mut rng = sample::rng(15);
    let h = sample::random_hermitian(&mut rng, 2, 1.0);
    let m = tensor(&HermitianOperator::identity(2), &h);
    assert!(reconstruction_residual(&m) < 1e-9);
    assert!(reconstruction_residual(&HermitianOperator::identity(4)) < 1e-12);
}

#[test]
fn schmidt_rank_one_product() {
    let mut rng = sample::rng(16);
    let a = sample::random_hermitian(&mut rng, 2, 1.0);
    let b = sample::random_hermitian(&mut rng, 2, 1.0);
    let m = tensor(&a, &b);
    let s = operator_schmidt(&m, 2, 2).unwrap();
    assert_eq!(s.rank(), 1);
    assert!((s.weights[0] - a.hs_norm() * b.hs_norm()).abs() < 1e-9);
}

#[test]
fn schmidt_of_identity() {
    let s = operator_schmidt(&HermitianOperator::identity(4), 2, 2).unwrap();
    assert_eq!(s.rank(), 1);
    assert!((s.weights[0] - 2.0).abs() < 1e-12);
}

#[test]
fn schmidt_reconstruction_and_orthonormality() {
    let mut rng = sample::rng(17);
    for (dx, da) in [(2usize, 2usize), (2, 3), (3, 2)] {
        let m = sample::random_hermitian(&mut rng, dx * da, 1.0);
        let s = operator_schmidt(&m, dx, da).unwrap();
        assert!(s.rank() <= (dx * dx).min(da * da));
        assert!(hs_distance(&s.reconstruct(dx, da), &m) < 1e-8);
        for j in 0..s.rank() {
            for k in 0..s.rank() {
                let delta = if j == k { 1.0 } else { 0.0 };
                assert!((hs_inner(&s.left[j], &s.left[k]).unwrap() - delta).abs() < 1e-9);
                assert!((hs_inner(&s.right[j], &s.right[k]).unwrap() - delta).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn density_eigenvalues_lie_in_unit_interval() {
    let mut rng = sample::rng(18);
    for _ in 0..10 {
        let rho = sample::random_density(&mut rng, 4);
        let e = rho.op().eig().unwrap();
        assert!(e.values.iter().all(|&v| v >= -TOL_PSD && v <= 1.0 + TOL_PSD));
        assert!((e.values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn hermitization_rejects_large_corrections() {
    let m = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.5, 0.0)],
        vec![c(0.4, 0.0), c(1.0, 0.0)],
    ])
    .unwrap();
    assert!(matches!(HermitianOperator::new(m), Err(crate::Error::NotHermitian(_))));

    let m = ComplexMatrix::from_rows(&[
        vec![c(1.0, 0.0), c(0.5, 0.0)],
        vec![c(0.5 - 1e-10, 0.0), c(1.0, 0.0)],
    ])
    .unwrap();
    let h = HermitianOperator::new(m).unwrap();
    assert!(h.matrix().herm_deviation() < 1e-15);
}

#[test]
fn hvec_coordinates_match_hermitian_basis() {
    // The fixed-point and gradient solvers rely on hvec(E_k) = e_k.
    for dim in [2usize, 3, 4] {
        for (k, e) in hermitian_basis(dim).iter().enumerate() {
            let v = hvec(e);
            for (i, &vi) in v.iter().enumerate() {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((vi - want).abs() < 1e-14, "dim {dim}, basis {k}, coord {i}");
            }
        }
    }
}

#[test]
fn hvec_is_isometric() {
    let mut rng = sample::rng(19);
    let a = sample::random_hermitian(&mut rng, 3, 1.0);
    let b = sample::random_hermitian(&mut rng, 3, 1.0);
    let (va, vb) = (hvec(&a), hvec(&b));
    let dot: f64 = va.iter().zip(&vb).map(|(x, y)| x * y).sum();
    assert!((dot - hs_inner(&a, &b).unwrap()).abs() < 1e-10);
    assert!(hs_distance(&hunvec(&va, 3), &a) < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn prop_hs_inner_symmetric(seed in 0u64..1000) {
        let mut rng = sample::rng(seed);
        let a = sample::random_hermitian(&mut rng, 3, 1.0);
        let b = sample::random_hermitian(&mut rng, 3, 1.0);
        prop_assert!((hs_inner(&a, &b).unwrap() - hs_inner(&b, &a).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn prop_partial_trace_preserves_trace(seed in 0u64..1000) {
        let mut rng = sample::rng(seed);
        let m = sample::random_hermitian(&mut rng, 6, 1.0);
        let pt = partial_trace_a(&m, 2, 3).unwrap();
        prop_assert!((pt.trace() - m.trace()).abs() < 1e-10);
    }

    #[test]
    fn prop_partial_trace_of_tensor(seed in 0u64..1000) {
        let mut rng = sample::rng(seed);
        let rho = sample::random_hermitian(&mut rng, 2, 1.0);
        let xi = sample::random_hermitian(&mut rng, 3, 1.0);
        let lhs = partial_trace_a(&tensor(&rho, &xi), 2, 3).unwrap();
        prop_assert!(hs_distance(&lhs, &rho.scale(xi.trace())) < 1e-10);
    }
}
