//! Seeded random generators for states, channels, and model instances.
//!
//! Everything is driven by an explicit `ChaCha8Rng` so tests, examples, and
//! the CLI stay reproducible.

use crate::channel::{CspPolicyChannel, KrausChannel, csp_choi_from_face};
use crate::classical::ClassicalMdp;
use crate::herm::{ComplexMatrix, DensityOperator, HermitianOperator};
use crate::qsolve::QmdpInstance;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per call keeps the stream simple.
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(gaussian(rng), gaussian(rng))
}

pub fn complex_gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

/// Random Hermitian operator `(G + G†)/2 · scale`.
pub fn random_hermitian(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> HermitianOperator {
    let g = complex_gaussian_matrix(rng, dim, dim);
    HermitianOperator::herm_part(&g).scale(scale)
}

/// Random full-rank density operator `G·G† / Tr(G·G†)`.
pub fn random_density(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let g = complex_gaussian_matrix(rng, dim, dim);
    let p = g.matmul(&g.adjoint());
    let h = HermitianOperator::herm_part(&p);
    let tr = h.trace();
    DensityOperator::new(h.scale(1.0 / tr)).expect("G·G†/Tr is a density operator")
}

/// Random pure state `|ψ⟩⟨ψ|`.
pub fn random_pure(rng: &mut ChaCha8Rng, dim: usize) -> DensityOperator {
    let psi: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    DensityOperator::pure_from_vector(&psi)
}

/// Columns of a Gaussian matrix, orthonormalized (Haar-like unitary for
/// square shapes, isometry columns otherwise). `rows >= cols` required.
fn orthonormal_columns(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    assert!(rows >= cols);
    let mut cols_v: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while cols_v.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| complex_gaussian(rng)).collect();
        for u in &cols_v {
            let ov: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= ov * ui;
            }
        }
        let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-8 {
            for z in v.iter_mut() {
                *z /= n;
            }
            cols_v.push(v);
        }
    }
    ComplexMatrix::from_fn(rows, cols, |i, j| cols_v[j][i])
}

pub fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> ComplexMatrix {
    orthonormal_columns(rng, dim, dim)
}

/// Random CPTP channel with `n_kraus` Kraus operators, built from a random
/// isometry `C^in → C^(n_kraus·out)` so that `Σ K†K = Id` holds exactly.
pub fn random_kraus_channel(
    rng: &mut ChaCha8Rng,
    in_dim: usize,
    out_dim: usize,
    n_kraus: usize,
) -> KrausChannel {
    assert!(n_kraus * out_dim >= in_dim, "isometry needs n_kraus·out >= in");
    let v = orthonormal_columns(rng, n_kraus * out_dim, in_dim);
    let kraus: Vec<ComplexMatrix> = (0..n_kraus)
        .map(|l| ComplexMatrix::from_fn(out_dim, in_dim, |o, i| v.get(l * out_dim + o, i)))
        .collect();
    KrausChannel::new(in_dim, out_dim, kraus).expect("isometry blocks are trace preserving")
}

pub fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() + 1e-3).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

/// Random stochastic kernel as rows `pi[x][a] = π(a|x)`.
pub fn random_kernel_rows(rng: &mut ChaCha8Rng, nx: usize, na: usize) -> Vec<Vec<f64>> {
    (0..nx).map(|_| random_distribution(rng, na)).collect()
}

pub fn random_classical_mdp(rng: &mut ChaCha8Rng, nx: usize, na: usize, beta: f64) -> ClassicalMdp {
    let mut p = vec![0.0; nx * nx * na];
    for x in 0..nx {
        for a in 0..na {
            let col = random_distribution(rng, nx);
            for (y, &py) in col.iter().enumerate() {
                p[(y * nx + x) * na + a] = py;
            }
        }
    }
    let c: Vec<f64> = (0..nx * na).map(|_| rng.random::<f64>()).collect();
    ClassicalMdp::new(nx, na, p, c, beta).expect("columns normalized by construction")
}

/// Random classical-state-preserving policy channel: a Gram matrix of
/// per-state normalized vector families, placed on the CSP support.
pub fn random_csp_policy(rng: &mut ChaCha8Rng, nx: usize, na: usize) -> CspPolicyChannel {
    let dl = nx * na;
    let mut phi: Vec<Vec<Complex64>> = (0..nx * na)
        .map(|_| (0..dl).map(|_| complex_gaussian(rng)).collect())
        .collect();
    for x in 0..nx {
        let s: f64 = (0..na)
            .map(|a| phi[x * na + a].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum();
        let scale = 1.0 / s.sqrt();
        for a in 0..na {
            for z in phi[x * na + a].iter_mut() {
                *z *= scale;
            }
        }
    }
    let face = HermitianOperator::new(ComplexMatrix::from_fn(nx * na, nx * na, |r, c| {
        phi[r].iter().zip(&phi[c]).map(|(a, b)| a.conj() * b).sum()
    }))
    .expect("Gram matrices are Hermitian");
    csp_choi_from_face(&face, nx, na).expect("unit block traces by construction")
}

/// Random q-MDP instance: CPTP channel `H_X ⊗ H_A → H_X`, Hermitian cost
/// with entries of order one, full-rank `ρ0`.
pub fn random_qmdp_instance(
    rng: &mut ChaCha8Rng,
    dim_x: usize,
    dim_a: usize,
    beta: f64,
) -> QmdpInstance {
    let channel = random_kraus_channel(rng, dim_x * dim_a, dim_x, dim_a + 1);
    let cost = random_hermitian(rng, dim_x * dim_a, 0.5);
    let rho0 = random_density(rng, dim_x);
    QmdpInstance::new(dim_x, dim_a, channel, cost, beta, rho0).expect("dims consistent")
}
