//! Quantum channels: Kraus and Choi representations, CPTP verification,
//! adjoints, and the special channels the q-MDP machinery is built from
//! (classical-channel embedding, appending channels, the quantum-to-classical
//! dephasing map, and classical-state-preserving policy channels).
//!
//! Channels are validated eagerly at construction; invalid representations
//! are constructible only through the `new_unchecked` paths, which exist so
//! tests can exercise the verifiers on deliberate violations.
//!
//! Choi ordering is `in ⊗ out`: `𝔠 = Σ_ij |e_i⟩⟨e_j| ⊗ N(|e_i⟩⟨e_j|)`.

use crate::classical::StationaryKernel;
use crate::herm::{
    ComplexMatrix, DensityOperator, HermitianOperator, TOL_PSD, hs_distance, partial_trace_a,
};
use crate::{Error, Result};
use num_complex::Complex64;

/// Absolute tolerance on `Σ K†K = Id` at construction.
pub const TOL_TP: f64 = 1e-9;
/// Absolute tolerance on `Tr_out(𝔠) = Id` at construction.
pub const TOL_CHOI_TP: f64 = 1e-8;
/// Absolute tolerance on the classical-state-preserving condition.
pub const TOL_CSP: f64 = 1e-8;

/// Completely positive trace-preserving map in operator-sum form
/// `ρ ↦ Σ_l K_l ρ K_l†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    in_dim: usize,
    out_dim: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(in_dim: usize, out_dim: usize, kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let ch = Self::new_unchecked(in_dim, out_dim, kraus)?;
        let report = ch.verify(TOL_TP);
        if report.tp_residual > TOL_TP {
            return Err(Error::NotStochastic(format!(
                "Kraus completeness residual {:.3e}",
                report.tp_residual
            )));
        }
        Ok(ch)
    }

    /// Skips the trace-preservation check (shapes are still enforced).
    pub fn new_unchecked(
        in_dim: usize,
        out_dim: usize,
        kraus: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::DimensionMismatch("empty Kraus set".into()));
        }
        for k in &kraus {
            if k.rows() != out_dim || k.cols() != in_dim {
                return Err(Error::DimensionMismatch(format!(
                    "Kraus operator is {}x{}, expected {}x{}",
                    k.rows(),
                    k.cols(),
                    out_dim,
                    in_dim
                )));
            }
        }
        Ok(Self { in_dim, out_dim, kraus })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn kraus_operators(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// `N(ρ) = Σ_l K_l ρ K_l†`.
    pub fn apply(&self, rho: &HermitianOperator) -> Result<HermitianOperator> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "channel input dim {} != {}",
                rho.dim(),
                self.in_dim
            )));
        }
        let mut acc = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            acc = acc.add(&k.matmul(rho.matrix()).matmul(&k.adjoint()));
        }
        Ok(HermitianOperator::herm_part(&acc))
    }

    /// Adjoint action `N†(ξ) = Σ_l K_l† ξ K_l`, the unital map satisfying
    /// `⟨ξ, N(σ)⟩ = ⟨N†(ξ), σ⟩`.
    pub fn adjoint_apply(&self, xi: &HermitianOperator) -> Result<HermitianOperator> {
        if xi.dim() != self.out_dim {
            return Err(Error::DimensionMismatch(format!(
                "adjoint input dim {} != {}",
                xi.dim(),
                self.out_dim
            )));
        }
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            acc = acc.add(&k.adjoint().matmul(xi.matrix()).matmul(k));
        }
        Ok(HermitianOperator::herm_part(&acc))
    }

    /// Choi matrix `Σ_ij |e_i⟩⟨e_j| ⊗ N(|e_i⟩⟨e_j|)`.
    pub fn to_choi(&self) -> ChoiMatrix {
        let (din, dout) = (self.in_dim, self.out_dim);
        let dim = din * dout;
        let mut mat = ComplexMatrix::zeros(dim, dim);
        // 𝔠[(i,o),(j,o')] = Σ_l K_l[o,i]·conj(K_l[o',j])
        for k in &self.kraus {
            for i in 0..din {
                for o in 0..dout {
                    let koi = k.get(o, i);
                    if koi == Complex64::ZERO {
                        continue;
                    }
                    for j in 0..din {
                        for op in 0..dout {
                            let v = mat.get(i * dout + o, j * dout + op)
                                + koi * k.get(op, j).conj();
                            mat.set(i * dout + o, j * dout + op, v);
                        }
                    }
                }
            }
        }
        ChoiMatrix {
            in_dim: din,
            out_dim: dout,
            matrix: HermitianOperator::herm_part(&mat),
        }
    }

    /// Trace-preservation residual and complete-positivity margin.
    pub fn verify(&self, tol: f64) -> CptpReport {
        let mut acc = ComplexMatrix::zeros(self.in_dim, self.in_dim);
        for k in &self.kraus {
            acc = acc.add(&k.adjoint().matmul(k));
        }
        let sum = HermitianOperator::herm_part(&acc);
        let tp_residual = hs_distance(&sum, &HermitianOperator::identity(self.in_dim));
        // Operator-sum forms are completely positive by construction; the
        // Choi margin is still reported so perturbed Choi matrices round-
        // tripped through Kraus form stay diagnosable.
        let psd_margin = self
            .to_choi()
            .matrix
            .min_eigenvalue()
            .unwrap_or(f64::NEG_INFINITY);
        CptpReport { psd_margin, tp_residual, tol }
    }
}

/// Choi-matrix representation of a channel, ordering `in ⊗ out`.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    in_dim: usize,
    out_dim: usize,
    matrix: HermitianOperator,
}

impl ChoiMatrix {
    pub fn new(in_dim: usize, out_dim: usize, matrix: HermitianOperator) -> Result<Self> {
        let c = Self::new_unchecked(in_dim, out_dim, matrix)?;
        let report = c.verify(TOL_CHOI_TP);
        if report.psd_margin < -TOL_PSD {
            return Err(Error::InvalidChoi(format!(
                "minimum eigenvalue {:.3e}",
                report.psd_margin
            )));
        }
        if report.tp_residual > TOL_CHOI_TP {
            return Err(Error::InvalidChoi(format!(
                "input-marginal residual {:.3e}",
                report.tp_residual
            )));
        }
        Ok(c)
    }

    pub fn new_unchecked(
        in_dim: usize,
        out_dim: usize,
        matrix: HermitianOperator,
    ) -> Result<Self> {
        if matrix.dim() != in_dim * out_dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi dim {} != {}·{}",
                matrix.dim(),
                in_dim,
                out_dim
            )));
        }
        Ok(Self { in_dim, out_dim, matrix })
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn matrix(&self) -> &HermitianOperator {
        &self.matrix
    }

    /// Channel action `Λ(𝔠, ρ)[o,o'] = Σ_ij ρ[i,j]·𝔠[(i,o),(j,o')]`,
    /// bilinear in `(𝔠, ρ)`.
    pub fn apply(&self, rho: &HermitianOperator) -> Result<HermitianOperator> {
        if rho.dim() != self.in_dim {
            return Err(Error::DimensionMismatch(format!(
                "Choi application input dim {} != {}",
                rho.dim(),
                self.in_dim
            )));
        }
        let dout = self.out_dim;
        let mut out = ComplexMatrix::zeros(dout, dout);
        for i in 0..self.in_dim {
            for j in 0..self.in_dim {
                let rij = rho.get(i, j);
                if rij == Complex64::ZERO {
                    continue;
                }
                for o in 0..dout {
                    for op in 0..dout {
                        let v = out.get(o, op)
                            + rij * self.matrix.get(i * dout + o, j * dout + op);
                        out.set(o, op, v);
                    }
                }
            }
        }
        Ok(HermitianOperator::herm_part(&out))
    }

    /// Kraus operators from the scaled eigenvectors of the Choi matrix;
    /// eigenvalues below `1e-10·λ_max` are dropped.
    pub fn to_kraus(&self) -> Result<KrausChannel> {
        let eig = self.matrix.eig()?;
        let lam_max = eig.values.iter().fold(0.0f64, |a, &v| a.max(v));
        if eig.values[0] < -TOL_PSD {
            return Err(Error::InvalidChoi(format!(
                "minimum eigenvalue {:.3e}",
                eig.values[0]
            )));
        }
        let cutoff = 1e-10 * lam_max;
        let dout = self.out_dim;
        let mut kraus = Vec::new();
        for (k, &lam) in eig.values.iter().enumerate() {
            if lam <= cutoff {
                continue;
            }
            let s = lam.sqrt();
            kraus.push(ComplexMatrix::from_fn(dout, self.in_dim, |o, i| {
                eig.vectors.get(i * dout + o, k) * s
            }));
        }
        if kraus.is_empty() {
            return Err(Error::InvalidChoi("zero Choi matrix".into()));
        }
        KrausChannel::new_unchecked(self.in_dim, dout, kraus)
    }

    pub fn verify(&self, tol: f64) -> CptpReport {
        let psd_margin = self.matrix.min_eigenvalue().unwrap_or(f64::NEG_INFINITY);
        let tp_residual = match partial_trace_a(&self.matrix, self.in_dim, self.out_dim) {
            Ok(marg) => hs_distance(&marg, &HermitianOperator::identity(self.in_dim)),
            Err(_) => f64::INFINITY,
        };
        CptpReport { psd_margin, tp_residual, tol }
    }
}

/// Verification record for complete positivity and trace preservation.
#[derive(Clone, Copy, Debug)]
pub struct CptpReport {
    /// Minimum eigenvalue of the Choi matrix.
    pub psd_margin: f64,
    /// `‖Σ K†K − Id‖_HS` or `‖Tr_out(𝔠) − Id‖_HS`.
    pub tp_residual: f64,
    pub tol: f64,
}

impl CptpReport {
    pub fn passes(&self) -> bool {
        self.psd_margin >= -self.tol && self.tp_residual <= self.tol
    }
}

/// Quantum-to-classical channel: keeps the diagonal of `ρ` in the fixed
/// computational basis. Self-adjoint and idempotent.
pub fn nqc(rho: &HermitianOperator) -> HermitianOperator {
    let diag: Vec<f64> = (0..rho.dim()).map(|i| rho.get(i, i).re).collect();
    HermitianOperator::from_diag(&diag)
}

/// Embed a classical channel `W(j|i)` (columns are distributions) as the
/// quantum channel with Kraus set `{√W(j|i) |j⟩⟨i|}`. On classical states
/// it reproduces the classical action: `diag(μ) ↦ diag(Wμ)`.
pub fn classical_channel_embed(w: &[Vec<f64>]) -> Result<KrausChannel> {
    let m = w.len();
    if m == 0 || w[0].is_empty() {
        return Err(Error::NotStochastic("empty kernel".into()));
    }
    let n = w[0].len();
    if w.iter().any(|row| row.len() != n) {
        return Err(Error::NotStochastic("ragged kernel".into()));
    }
    for i in 0..n {
        let col: f64 = (0..m).map(|j| w[j][i]).sum();
        if (col - 1.0).abs() > 1e-12 {
            return Err(Error::NotStochastic(format!("column {i} sums to {col}")));
        }
        if (0..m).any(|j| w[j][i] < 0.0) {
            return Err(Error::NotStochastic(format!("negative entry in column {i}")));
        }
    }
    let mut kraus = Vec::new();
    for j in 0..m {
        for i in 0..n {
            if w[j][i] > 0.0 {
                let mut k = ComplexMatrix::zeros(m, n);
                k.set(j, i, Complex64::new(w[j][i].sqrt(), 0.0));
                kraus.push(k);
            }
        }
    }
    KrausChannel::new(n, m, kraus)
}

/// Appending channel `ρ ↦ ρ ⊗ π` from `H_X` to `H_X ⊗ H_A`, with Kraus set
/// `{√p_j (Id_X ⊗ |ψ_j⟩)}` from the eigendecomposition of `π`.
pub fn appending_channel(pi: &DensityOperator, dim_x: usize) -> KrausChannel {
    let da = pi.dim();
    let eig = pi.op().eig().expect("density operator eigendecomposition");
    let mut kraus = Vec::new();
    for (j, &p) in eig.values.iter().enumerate() {
        if p <= 1e-12 {
            continue;
        }
        let s = p.sqrt();
        let mut k = ComplexMatrix::zeros(dim_x * da, dim_x);
        for x in 0..dim_x {
            for a in 0..da {
                k.set(x * da + a, x, eig.vectors.get(a, j) * s);
            }
        }
        kraus.push(k);
    }
    KrausChannel::new(dim_x, dim_x * da, kraus).expect("appending channels are isometric sums")
}

/// Channel of a classical stochastic kernel `π(a|x)` acting as
/// `γ(ρ) = Σ_{x,a} π(a|x) |x,a⟩⟨x| ρ |x⟩⟨x,a|`, returned in Choi form.
pub fn classical_policy_channel(kernel: &StationaryKernel) -> Result<CspPolicyChannel> {
    let (nx, na) = (kernel.nx(), kernel.na());
    let mut kraus = Vec::new();
    for x in 0..nx {
        for a in 0..na {
            let p = kernel.prob(x, a);
            if p > 0.0 {
                let mut k = ComplexMatrix::zeros(nx * na, nx);
                k.set(x * na + a, x, Complex64::new(p.sqrt(), 0.0));
                kraus.push(k);
            }
        }
    }
    let choi = KrausChannel::new(nx, nx * na, kraus)?.to_choi();
    CspPolicyChannel::new(choi)
}

/// Classical-state-preserving policy channel `H_X → H_X ⊗ H_A`: a channel
/// whose X-marginal fixes every classical basis state.
#[derive(Clone, Debug)]
pub struct CspPolicyChannel {
    choi: ChoiMatrix,
}

impl CspPolicyChannel {
    pub fn new(choi: ChoiMatrix) -> Result<Self> {
        let report = csp_membership(&choi, TOL_CSP)?;
        if !report.passes() {
            return Err(Error::InvalidChoi(format!(
                "classical-state-preservation residual {:.3e} on basis state {}",
                report.max_residual, report.worst_state
            )));
        }
        Ok(Self { choi })
    }

    pub fn new_unchecked(choi: ChoiMatrix) -> Self {
        Self { choi }
    }

    pub fn nx(&self) -> usize {
        self.choi.in_dim()
    }

    pub fn na(&self) -> usize {
        self.choi.out_dim() / self.choi.in_dim()
    }

    pub fn choi(&self) -> &ChoiMatrix {
        &self.choi
    }

    pub fn apply(&self, rho: &HermitianOperator) -> Result<HermitianOperator> {
        self.choi.apply(rho)
    }
}

/// Report of the classical-state-preservation test
/// `max_x ‖Tr_A(Λ(𝔠, |x⟩⟨x|)) − |x⟩⟨x|‖_HS ≤ tol`, evaluated on the
/// classical basis states only (exactly what membership requires).
#[derive(Clone, Copy, Debug)]
pub struct CspReport {
    pub max_residual: f64,
    pub worst_state: usize,
    pub tol: f64,
}

impl CspReport {
    pub fn passes(&self) -> bool {
        self.max_residual <= self.tol
    }
}

pub fn csp_membership(choi: &ChoiMatrix, tol: f64) -> Result<CspReport> {
    let nx = choi.in_dim();
    if choi.out_dim() % nx != 0 {
        return Err(Error::DimensionMismatch(format!(
            "output dim {} is not a multiple of input dim {nx}",
            choi.out_dim()
        )));
    }
    let na = choi.out_dim() / nx;
    let mut max_residual = 0.0f64;
    let mut worst_state = 0usize;
    for x in 0..nx {
        let out = choi.apply(&HermitianOperator::basis_projector(nx, x))?;
        let marg = partial_trace_a(&out, nx, na)?;
        let r = hs_distance(&marg, &HermitianOperator::basis_projector(nx, x));
        if r > max_residual {
            max_residual = r;
            worst_state = x;
        }
    }
    Ok(CspReport { max_residual, worst_state, tol })
}

// The classical-state-preservation constraints force a CSP Choi matrix onto
// the subspace spanned by |x⟩_in ⊗ |x,a⟩_out: the in-block (x,x) must have
// X-marginal |x⟩⟨x|, which pins its support, and positive semidefiniteness
// then zeroes every row outside that support. The restriction is an
// (nx·na)-dimensional Gram matrix indexed by (x,a), PSD with unit
// per-x diagonal-block traces. The helpers below move between the full
// Choi picture and this face; the solvers work on the face.

pub(crate) fn csp_face_from_choi(choi: &ChoiMatrix) -> HermitianOperator {
    let nx = choi.in_dim();
    let na = choi.out_dim() / nx;
    let dout = choi.out_dim();
    HermitianOperator::herm_part(&ComplexMatrix::from_fn(nx * na, nx * na, |r, c| {
        let (x, a) = (r / na, r % na);
        let (y, b) = (c / na, c % na);
        choi.matrix().get(x * dout + (x * na + a), y * dout + (y * na + b))
    }))
}

pub(crate) fn csp_choi_from_face(
    face: &HermitianOperator,
    nx: usize,
    na: usize,
) -> Result<CspPolicyChannel> {
    if face.dim() != nx * na {
        return Err(Error::DimensionMismatch(format!(
            "face dim {} != {}·{}",
            face.dim(),
            nx,
            na
        )));
    }
    let dout = nx * na;
    let dim = nx * dout;
    let mut mat = ComplexMatrix::zeros(dim, dim);
    for x in 0..nx {
        for a in 0..na {
            for y in 0..nx {
                for b in 0..na {
                    mat.set(
                        x * dout + (x * na + a),
                        y * dout + (y * na + b),
                        face.get(x * na + a, y * na + b),
                    );
                }
            }
        }
    }
    let choi = ChoiMatrix::new(nx, dout, HermitianOperator::herm_part(&mat))?;
    CspPolicyChannel::new(choi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::StationaryKernel;
    use crate::herm::{hs_inner, tensor};
    use crate::sample;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_channel_fixes_states() {
        let id = KrausChannel::new(2, 2, vec![ComplexMatrix::identity(2)]).unwrap();
        let mut rng = sample::rng(31);
        let rho = sample::random_density(&mut rng, 2);
        assert!(hs_distance(&id.apply(rho.op()).unwrap(), rho.op()) < 1e-14);
    }

    #[test]
    fn bit_flip_unitary() {
        let u = ComplexMatrix::from_rows(&[
            vec![c(0., 0.), c(1., 0.)],
            vec![c(1., 0.), c(0., 0.)],
        ])
        .unwrap();
        let flip = KrausChannel::new(2, 2, vec![u]).unwrap();
        let out = flip.apply(&HermitianOperator::basis_projector(2, 0)).unwrap();
        assert!(hs_distance(&out, &HermitianOperator::basis_projector(2, 1)) < 1e-14);
    }

    #[test]
    fn random_channel_preserves_trace() {
        let mut rng = sample::rng(32);
        for _ in 0..5 {
            let ch = sample::random_kraus_channel(&mut rng, 4, 3, 3);
            let rho = sample::random_density(&mut rng, 4);
            let out = ch.apply(rho.op()).unwrap();
            assert!((out.trace() - rho.op().trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn choi_of_identity_is_entangled_projector() {
        let id = KrausChannel::new(2, 2, vec![ComplexMatrix::identity(2)]).unwrap();
        let choi = id.to_choi();
        // |ψ_ent⟩⟨ψ_ent| with ψ_ent = |00⟩ + |11⟩: ones at (i,i),(j,j).
        for i in 0..2 {
            for j in 0..2 {
                let v = choi.matrix().get(i * 2 + i, j * 2 + j);
                assert!((v - c(1.0, 0.0)).norm() < 1e-14);
            }
        }
        assert!((choi.matrix().trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn choi_of_trace_out_and_prepare() {
        // ρ ↦ Tr(ρ)·ξ has Choi Id_in ⊗ ξ.
        let mut rng = sample::rng(33);
        let xi = sample::random_density(&mut rng, 2);
        let eig = xi.op().eig().unwrap();
        // Kraus set {√λ_k |v_k⟩⟨i|}: one per (eigenvector, input index).
        let mut kraus = Vec::new();
        for k in 0..2 {
            let s = eig.values[k].max(0.0).sqrt();
            for i in 0..2 {
                let m = ComplexMatrix::from_fn(2, 2, |o, ii| {
                    if ii == i { eig.vectors.get(o, k) * s } else { Complex64::ZERO }
                });
                kraus.push(m);
            }
        }
        let ch = KrausChannel::new(2, 2, kraus).unwrap();
        let expected = tensor(&HermitianOperator::identity(2), xi.op());
        assert!(hs_distance(ch.to_choi().matrix(), &expected) < 1e-9);
    }

    #[test]
    fn choi_apply_reads_basis_blocks() {
        let mut rng = sample::rng(34);
        let ch = sample::random_kraus_channel(&mut rng, 3, 2, 2);
        let choi = ch.to_choi();
        for i in 0..3 {
            let out = choi.apply(&HermitianOperator::basis_projector(3, i)).unwrap();
            for o in 0..2 {
                for op in 0..2 {
                    let blk = choi.matrix().get(i * 2 + o, i * 2 + op);
                    assert!((out.get(o, op) - blk).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn kraus_choi_round_trips_preserve_action() {
        let mut rng = sample::rng(35);
        for (din, dout) in [(2usize, 2usize), (4, 2), (2, 4)] {
            let ch = sample::random_kraus_channel(&mut rng, din, dout, 3);
            let choi = ch.to_choi();
            assert!(choi.verify(1e-9).passes());
            let back = choi.to_kraus().unwrap();
            let rho = sample::random_density(&mut rng, din);
            let direct = ch.apply(rho.op()).unwrap();
            let via_choi = choi.apply(rho.op()).unwrap();
            let via_kraus = back.apply(rho.op()).unwrap();
            assert!(hs_distance(&direct, &via_choi) < 1e-10);
            assert!(hs_distance(&direct, &via_kraus) < 1e-8);
        }
    }

    #[test]
    fn choi_to_kraus_of_identity_is_single_operator() {
        let id = KrausChannel::new(3, 3, vec![ComplexMatrix::identity(3)]).unwrap();
        let back = id.to_choi().to_kraus().unwrap();
        assert_eq!(back.kraus_operators().len(), 1);
    }

    #[test]
    fn verifier_accepts_unitary_and_rejects_violations() {
        let mut rng = sample::rng(36);
        let u = sample::random_unitary(&mut rng, 3);
        let ch = KrausChannel::new(3, 3, vec![u.clone()]).unwrap();
        let rep = ch.verify(1e-9);
        assert!(rep.passes() && rep.tp_residual < 1e-12);

        // Scaling the Kraus set by 1.01 breaks trace preservation with
        // residual ‖1.0201·Id − Id‖ = 0.0201·√dim.
        let bad = KrausChannel::new_unchecked(3, 3, vec![u.scale_re(1.01)]).unwrap();
        let rep = bad.verify(1e-6);
        assert!(!rep.passes());
        assert!((rep.tp_residual - 0.0201 * 3.0f64.sqrt()).abs() < 1e-10);

        // Injected negative eigenvalue fails the PSD side.
        let choi = ch.to_choi();
        let eig = choi.matrix().eig().unwrap();
        let bottom: Vec<Complex64> = (0..9).map(|i| eig.vectors.get(i, 0)).collect();
        let dent = HermitianOperator::projector_from_vector(&bottom).scale(1e-3);
        let bad_choi =
            ChoiMatrix::new_unchecked(3, 3, choi.matrix().sub(&dent)).unwrap();
        let rep = bad_choi.verify(1e-6);
        assert!(!rep.passes());
        assert!(rep.psd_margin < -1e-4);
    }

    #[test]
    fn adjoint_identity_and_unitality() {
        let mut rng = sample::rng(37);
        let ch = sample::random_kraus_channel(&mut rng, 4, 3, 2);
        // N†(Id) = Id for trace-preserving N.
        let unital = ch.adjoint_apply(&HermitianOperator::identity(3)).unwrap();
        assert!(hs_distance(&unital, &HermitianOperator::identity(4)) < 1e-10);
        for _ in 0..5 {
            let xi = sample::random_hermitian(&mut rng, 3, 1.0);
            let sigma = sample::random_hermitian(&mut rng, 4, 1.0);
            let lhs = hs_inner(&xi, &ch.apply(&sigma).unwrap()).unwrap();
            let rhs = hs_inner(&ch.adjoint_apply(&xi).unwrap(), &sigma).unwrap();
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn nqc_dephases() {
        let mut rng = sample::rng(38);
        let rho = sample::random_density(&mut rng, 3);
        let d = nqc(rho.op());
        for i in 0..3 {
            assert!((d.get(i, i) - rho.op().get(i, i)).norm() < 1e-14);
            for j in 0..3 {
                if i != j {
                    assert_eq!(d.get(i, j), Complex64::ZERO);
                }
            }
        }
        // Idempotent, and classical states are fixed points.
        assert!(hs_distance(&nqc(&d), &d) < 1e-15);
        let plus = DensityOperator::pure_from_vector(&[c(1.0, 0.0), c(1.0, 0.0)]);
        let half = HermitianOperator::identity(2).scale(0.5);
        assert!(hs_distance(&nqc(plus.op()), &half) < 1e-14);
    }

    #[test]
    fn classical_embedding_reproduces_kernel() {
        // The Kraus set {√W(j|i)|j⟩⟨i|} agrees with the classical kernel on
        // classical states; the identity kernel fixes them all.
        let id = classical_channel_embed(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let mut rng = sample::rng(39);
        let mu = sample::random_distribution(&mut rng, 2);
        let rho = HermitianOperator::from_diag(&mu);
        assert!(hs_distance(&id.apply(&rho).unwrap(), &rho) < 1e-12);

        // Permutation kernel acts as the bit-flip on classical states.
        let swap = classical_channel_embed(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let out = swap.apply(&HermitianOperator::basis_projector(2, 0)).unwrap();
        assert!(hs_distance(&out, &HermitianOperator::basis_projector(2, 1)) < 1e-14);

        // Random kernel: apply(diag μ) = diag(Wμ), matrix-vector oracle.
        for _ in 0..5 {
            let w: Vec<Vec<f64>> = {
                let cols: Vec<Vec<f64>> =
                    (0..3).map(|_| sample::random_distribution(&mut rng, 4)).collect();
                (0..4).map(|j| (0..3).map(|i| cols[i][j]).collect()).collect()
            };
            let ch = classical_channel_embed(&w).unwrap();
            let mu = sample::random_distribution(&mut rng, 3);
            let out = ch.apply(&HermitianOperator::from_diag(&mu)).unwrap();
            let wmu: Vec<f64> =
                (0..4).map(|j| (0..3).map(|i| w[j][i] * mu[i]).sum()).collect();
            assert!(hs_distance(&out, &HermitianOperator::from_diag(&wmu)) < 1e-12);
        }

        assert!(classical_channel_embed(&[vec![0.6, 0.0], vec![0.3, 1.0]]).is_err());
    }

    #[test]
    fn appending_channel_appends() {
        let mut rng = sample::rng(40);
        let pi = sample::random_density(&mut rng, 3);
        let ch = appending_channel(&pi, 2);
        for _ in 0..3 {
            let rho = sample::random_density(&mut rng, 2);
            let out = ch.apply(rho.op()).unwrap();
            assert!(hs_distance(&out, &tensor(rho.op(), pi.op())) < 1e-10);
            // Reversibility: Tr_A ∘ γ = id.
            let back = partial_trace_a(&out, 2, 3).unwrap();
            assert!(hs_distance(&back, rho.op()) < 1e-10);
        }
        // Pure π yields a single-Kraus isometry.
        let pure = DensityOperator::pure_basis(2, 0);
        assert_eq!(appending_channel(&pure, 2).kraus_operators().len(), 1);
    }

    #[test]
    fn reversibility_implies_appending_structure() {
        // Any channel with Tr_A ∘ γ = id on a spanning set of densities
        // acts as ρ ↦ ρ ⊗ ξ with ξ = Tr_X(γ(Id/|X|)).
        let mut rng = sample::rng(41);
        let pi = sample::random_density(&mut rng, 2);
        let ch = appending_channel(&pi, 2);
        let mixed = DensityOperator::maximally_mixed(2);
        let xi = crate::herm::partial_trace_x(&ch.apply(mixed.op()).unwrap(), 2, 2).unwrap();
        for _ in 0..4 {
            let rho = sample::random_density(&mut rng, 2);
            let out = ch.apply(rho.op()).unwrap();
            assert!(hs_distance(&out, &tensor(rho.op(), &xi)) < 1e-9);
        }
    }

    #[test]
    fn classical_policy_channel_matches_joint_distribution() {
        let mut rng = sample::rng(42);
        let kernel = StationaryKernel::new(2, 3, sample::random_kernel_rows(&mut rng, 2, 3).concat())
            .unwrap();
        let gamma = classical_policy_channel(&kernel).unwrap();
        let mu = sample::random_distribution(&mut rng, 2);
        let out = gamma.apply(&HermitianOperator::from_diag(&mu)).unwrap();
        // Oracle: classical joint μ(x)·π(a|x).
        let mut joint = vec![0.0f64; 6];
        for x in 0..2 {
            for a in 0..3 {
                joint[x * 3 + a] = mu[x] * kernel.prob(x, a);
            }
        }
        assert!(hs_distance(&out, &HermitianOperator::from_diag(&joint)) < 1e-12);

        // Deterministic kernel concentrates on (x, a(x)).
        let det = StationaryKernel::new(2, 2, vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let gamma = classical_policy_channel(&det).unwrap();
        let out = gamma.apply(&HermitianOperator::basis_projector(2, 0)).unwrap();
        assert!((out.get(1, 1).re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn csp_membership_examples() {
        let mut rng = sample::rng(43);
        // Every classical policy channel is classical-state-preserving.
        let kernel =
            StationaryKernel::new(3, 2, sample::random_kernel_rows(&mut rng, 3, 2).concat())
                .unwrap();
        let gamma = classical_policy_channel(&kernel).unwrap();
        assert!(csp_membership(gamma.choi(), TOL_CSP).unwrap().passes());

        // Appending channels are classical-state-preserving too.
        let pi = sample::random_density(&mut rng, 2);
        let app = appending_channel(&pi, 3).to_choi();
        assert!(csp_membership(&app, TOL_CSP).unwrap().passes());

        // Trace-out-and-prepare a fixed σ on X⊗A is not, unless the
        // prepared X-marginal happens to match every basis state.
        let sigma = sample::random_density(&mut rng, 4);
        let eig = sigma.op().eig().unwrap();
        let mut kraus = Vec::new();
        for k in 0..4 {
            let s = eig.values[k].max(0.0).sqrt();
            for i in 0..2 {
                kraus.push(ComplexMatrix::from_fn(4, 2, |o, ii| {
                    if ii == i { eig.vectors.get(o, k) * s } else { Complex64::ZERO }
                }));
            }
        }
        let prep = KrausChannel::new(2, 4, kraus).unwrap().to_choi();
        let rep = csp_membership(&prep, TOL_CSP).unwrap();
        assert!(!rep.passes());
        // Residual oracle: ‖Tr_A(σ) − |x⟩⟨x|‖ maximized over x.
        let marg = partial_trace_a(sigma.op(), 2, 2).unwrap();
        let expect = (0..2)
            .map(|x| hs_distance(&marg, &HermitianOperator::basis_projector(2, x)))
            .fold(0.0f64, f64::max);
        assert!((rep.max_residual - expect).abs() < 1e-9);
    }

    #[test]
    fn csp_identity_propagates_to_all_states() {
        // For γ classical-state-preserving and any density ρ:
        // nqc(Tr_A(γ(ρ))) = nqc(ρ).
        let mut rng = sample::rng(44);
        for _ in 0..4 {
            let gamma = sample::random_csp_policy(&mut rng, 2, 2);
            let rho = sample::random_density(&mut rng, 2);
            let out = gamma.apply(rho.op()).unwrap();
            let lhs = nqc(&partial_trace_a(&out, 2, 2).unwrap());
            assert!(hs_distance(&lhs, &nqc(rho.op())) < 1e-8);
        }
    }

    #[test]
    fn csp_face_round_trip() {
        let mut rng = sample::rng(45);
        let gamma = sample::random_csp_policy(&mut rng, 2, 3);
        let face = csp_face_from_choi(gamma.choi());
        let back = csp_choi_from_face(&face, 2, 3).unwrap();
        assert!(hs_distance(back.choi().matrix(), gamma.choi().matrix()) < 1e-10);
        let rho = sample::random_density(&mut rng, 2);
        assert!(
            hs_distance(&back.apply(rho.op()).unwrap(), &gamma.apply(rho.op()).unwrap()) < 1e-10
        );
    }

    #[test]
    fn nqc_idempotent_property() {
        let mut rng = sample::rng(46);
        for _ in 0..8 {
            let h = sample::random_hermitian(&mut rng, 4, 1.0);
            assert!(hs_distance(&nqc(&nqc(&h)), &nqc(&h)) < 1e-15);
        }
    }
}
