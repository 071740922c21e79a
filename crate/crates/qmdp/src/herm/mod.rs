//! Dense complex-matrix and Hermitian-operator algebra.
//!
//! Everything downstream (channels, the conic solver, the q-MDP operators)
//! is built on the types here. Matrices are dense, row-major `Complex64`,
//! sized for dimensions up to a few hundred; values are immutable after
//! construction and safe to share across threads.
//!
//! Index convention for bipartite systems: the composite index of
//! `H_X ⊗ H_A` is `(x, a) ↦ x·dim(A) + a` — the left (X) factor is the
//! slow index. This is the single source of truth for tensor ordering.

mod eig;
mod svd;

pub use eig::EigH;
pub(crate) use eig::eig_real_symmetric;
pub(crate) use svd::jacobi_svd;

use crate::{Error, Result};
use num_complex::Complex64;

/// Absolute tolerance for Hermiticity checks.
pub const TOL_HERM: f64 = 1e-12;
/// Hermitization at construction rejects corrections larger than this.
pub const TOL_HERM_CONSTRUCT: f64 = 1e-8;
/// Absolute tolerance on the minimum eigenvalue of a density operator.
pub const TOL_PSD: f64 = 1e-9;
/// Absolute tolerance on the unit trace of a density operator.
pub const TOL_TRACE: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self.get(i, j);
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self { rows, cols, data: vec![Complex64::ZERO; rows * cols] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(Error::DimensionMismatch("empty matrix".into()));
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data: Vec<Complex64> = rows.iter().flatten().copied().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::DimensionMismatch("non-finite entry".into()));
        }
        Ok(Self { rows: rows.len(), cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self.get(i, k);
                if aik == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + aik * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn trace(&self) -> Complex64 {
        assert_eq!(self.rows, self.cols);
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; composite index `(i, k) ↦ i·other.rows + k`.
    pub fn kron(&self, other: &Self) -> Self {
        let mut out = Self::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entry-wise deviation from Hermiticity `max |m[i][j] - conj(m[j][i])| / 2`.
    pub fn herm_deviation(&self) -> f64 {
        assert_eq!(self.rows, self.cols);
        let mut d = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max(0.5 * (self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        d
    }
}

/// Hermitian operator; construction symmetrizes `(H + H†)/2` and rejects
/// inputs whose anti-Hermitian part exceeds [`TOL_HERM_CONSTRUCT`].
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.rows != mat.cols {
            return Err(Error::DimensionMismatch(format!(
                "Hermitian operator must be square, got {}x{}",
                mat.rows, mat.cols
            )));
        }
        if !mat.is_finite() {
            return Err(Error::DimensionMismatch("non-finite entry".into()));
        }
        let dev = mat.herm_deviation();
        if dev > TOL_HERM_CONSTRUCT {
            return Err(Error::NotHermitian(dev));
        }
        Ok(Self::symmetrize(mat))
    }

    /// Skips the Hermiticity check; for building deliberate violations in tests.
    pub fn new_unchecked(mat: ComplexMatrix) -> Self {
        assert_eq!(mat.rows, mat.cols);
        Self { mat }
    }

    fn symmetrize(mat: ComplexMatrix) -> Self {
        let h = ComplexMatrix::from_fn(mat.rows, mat.cols, |i, j| {
            (mat.get(i, j) + mat.get(j, i).conj()).scale(0.5)
        });
        Self { mat: h }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { mat: ComplexMatrix::zeros(dim, dim) }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: ComplexMatrix::identity(dim) }
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = ComplexMatrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        Self { mat: m }
    }

    /// Basis projector `|x⟩⟨x|`.
    pub fn basis_projector(dim: usize, x: usize) -> Self {
        assert!(x < dim);
        let mut m = ComplexMatrix::zeros(dim, dim);
        m.set(x, x, Complex64::ONE);
        Self { mat: m }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` from an arbitrary nonzero vector.
    pub fn projector_from_vector(psi: &[Complex64]) -> Self {
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let mat = ComplexMatrix::from_fn(psi.len(), psi.len(), |i, j| {
            psi[i] * psi[j].conj() / norm_sqr
        });
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.mat.get(i, j)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { mat: self.mat.add(&other.mat) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self { mat: self.mat.sub(&other.mat) }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { mat: self.mat.scale_re(s) }
    }

    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    pub fn hs_norm(&self) -> f64 {
        self.mat.frobenius_norm()
    }

    /// Hermitian part of an arbitrary square matrix.
    pub fn herm_part(mat: &ComplexMatrix) -> Self {
        Self::symmetrize(mat.clone())
    }
}

/// Tensor product `a ⊗ b`; index convention `(x, a) ↦ x·dim(b) + a`.
pub fn tensor(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator { mat: a.mat.kron(&b.mat) }
}

/// Partial trace over the right (A) factor: `(Tr_A m)[x][y] = Σ_a m[(x,a)][(y,a)]`.
pub fn partial_trace_a(
    m: &HermitianOperator,
    dim_x: usize,
    dim_a: usize,
) -> Result<HermitianOperator> {
    if m.dim() != dim_x * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "partial trace: operator dim {} != {}·{}",
            m.dim(),
            dim_x,
            dim_a
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_x, dim_x);
    for x in 0..dim_x {
        for y in 0..dim_x {
            let mut s = Complex64::ZERO;
            for a in 0..dim_a {
                s += m.get(x * dim_a + a, y * dim_a + a);
            }
            out.set(x, y, s);
        }
    }
    Ok(HermitianOperator { mat: out })
}

/// Partial trace over the left (X) factor: `(Tr_X m)[a][b] = Σ_x m[(x,a)][(x,b)]`.
pub fn partial_trace_x(
    m: &HermitianOperator,
    dim_x: usize,
    dim_a: usize,
) -> Result<HermitianOperator> {
    if m.dim() != dim_x * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "partial trace: operator dim {} != {}·{}",
            m.dim(),
            dim_x,
            dim_a
        )));
    }
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for a in 0..dim_a {
        for b in 0..dim_a {
            let mut s = Complex64::ZERO;
            for x in 0..dim_x {
                s += m.get(x * dim_a + a, x * dim_a + b);
            }
            out.set(a, b, s);
        }
    }
    Ok(HermitianOperator { mat: out })
}

/// Hilbert-Schmidt inner product `Tr(a·b)`, real for Hermitian arguments.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(format!(
            "hs_inner: {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    // Tr(a·b) = Σ_ij a[i][j]·b[j][i]; for Hermitian b, b[j][i] = conj(b[i][j]).
    let mut s = Complex64::ZERO;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            s += a.get(i, j) * b.get(j, i);
        }
    }
    debug_assert!(s.im.abs() < 1e-10, "hs_inner imaginary part {:.3e}", s.im);
    Ok(s.re)
}

/// Hilbert-Schmidt distance `‖a − b‖_HS`.
pub fn hs_distance(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.sub(b).hs_norm()
}

impl HermitianOperator {
    /// Full eigendecomposition, eigenvalues ascending.
    pub fn eig(&self) -> Result<EigH> {
        eig::eig_hermitian(self)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.values[0])
    }

    /// Spectral norm (largest absolute eigenvalue).
    pub fn spectral_norm(&self) -> Result<f64> {
        let e = self.eig()?;
        Ok(e.values.iter().map(|v| v.abs()).fold(0.0, f64::max))
    }
}

/// Positive semi-definite, unit-trace Hermitian operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    op: HermitianOperator,
}

impl DensityOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let min_eig = op.min_eigenvalue()?;
        if min_eig < -TOL_PSD {
            return Err(Error::NotDensity(format!("minimum eigenvalue {min_eig:.3e}")));
        }
        let tr = op.trace();
        if (tr - 1.0).abs() > TOL_TRACE {
            return Err(Error::NotDensity(format!("trace {tr:.12} != 1")));
        }
        Ok(Self { op })
    }

    pub fn new_unchecked(op: HermitianOperator) -> Self {
        Self { op }
    }

    /// Classical pure state `|x⟩⟨x|`.
    pub fn pure_basis(dim: usize, x: usize) -> Self {
        Self { op: HermitianOperator::basis_projector(dim, x) }
    }

    pub fn pure_from_vector(psi: &[Complex64]) -> Self {
        Self { op: HermitianOperator::projector_from_vector(psi) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { op: HermitianOperator::identity(dim).scale(1.0 / dim as f64) }
    }

    /// Classical state `diag(μ)` of a probability distribution.
    pub fn from_distribution(mu: &[f64]) -> Result<Self> {
        let s: f64 = mu.iter().sum();
        if mu.iter().any(|&p| p < -1e-12) || (s - 1.0).abs() > 1e-9 {
            return Err(Error::NotDensity(format!("distribution sums to {s}")));
        }
        Self::new(HermitianOperator::from_diag(mu))
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn op(&self) -> &HermitianOperator {
        &self.op
    }

    pub fn into_op(self) -> HermitianOperator {
        self.op
    }
}

/// Operator Schmidt decomposition `m = Σ_k λ_k E_X^k ⊗ E_A^k` with
/// orthonormal Hermitian factor families.
#[derive(Clone, Debug)]
pub struct OperatorSchmidt {
    pub weights: Vec<f64>,
    pub left: Vec<HermitianOperator>,
    pub right: Vec<HermitianOperator>,
}

impl OperatorSchmidt {
    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn reconstruct(&self, dim_x: usize, dim_a: usize) -> HermitianOperator {
        let mut acc = HermitianOperator::zeros(dim_x * dim_a);
        for k in 0..self.rank() {
            acc = acc.add(&tensor(&self.left[k], &self.right[k]).scale(self.weights[k]));
        }
        acc
    }
}

/// Orthonormal basis of the real vector space of Hermitian operators:
/// diagonal units, then for each i<j the pair `(e_ij + e_ji)/√2` and
/// `i(e_ji − e_ij)/√2`, in lexicographic order. Dimension `dim²`; the
/// coordinates of [`hvec`] are exactly the coefficients in this basis.
pub fn hermitian_basis(dim: usize) -> Vec<HermitianOperator> {
    let mut basis = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        basis.push(HermitianOperator::basis_projector(dim, k));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let mut re = ComplexMatrix::zeros(dim, dim);
            re.set(i, j, Complex64::new(inv_sqrt2, 0.0));
            re.set(j, i, Complex64::new(inv_sqrt2, 0.0));
            basis.push(HermitianOperator { mat: re });
            let mut im = ComplexMatrix::zeros(dim, dim);
            im.set(i, j, Complex64::new(0.0, -inv_sqrt2));
            im.set(j, i, Complex64::new(0.0, inv_sqrt2));
            basis.push(HermitianOperator { mat: im });
        }
    }
    basis
}

/// Coordinates of `h` in [`hermitian_basis`]; an isometry onto R^{dim²}.
pub fn hvec(h: &HermitianOperator) -> Vec<f64> {
    let dim = h.dim();
    let mut v = Vec::with_capacity(dim * dim);
    for k in 0..dim {
        v.push(h.get(k, k).re);
    }
    let sqrt2 = std::f64::consts::SQRT_2;
    for i in 0..dim {
        for j in (i + 1)..dim {
            v.push(h.get(i, j).re * sqrt2);
            v.push(-h.get(i, j).im * sqrt2);
        }
    }
    v
}

/// Inverse of [`hvec`].
pub fn hunvec(v: &[f64], dim: usize) -> HermitianOperator {
    assert_eq!(v.len(), dim * dim);
    let mut m = ComplexMatrix::zeros(dim, dim);
    for k in 0..dim {
        m.set(k, k, Complex64::new(v[k], 0.0));
    }
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut idx = dim;
    for i in 0..dim {
        for j in (i + 1)..dim {
            let re = v[idx] * inv_sqrt2;
            let im = -v[idx + 1] * inv_sqrt2;
            idx += 2;
            m.set(i, j, Complex64::new(re, im));
            m.set(j, i, Complex64::new(re, -im));
        }
    }
    HermitianOperator { mat: m }
}

/// Operator Schmidt decomposition of a Hermitian `m` on `H_X ⊗ H_A`.
///
/// Expands `m` in the product Hermitian basis, where the coefficient matrix
/// is real, and takes its SVD; singular values below `1e-10·(largest)` are
/// dropped. The factor families are Hermitian and orthonormal by
/// construction, degenerate singular values included.
pub fn operator_schmidt(
    m: &HermitianOperator,
    dim_x: usize,
    dim_a: usize,
) -> Result<OperatorSchmidt> {
    if m.dim() != dim_x * dim_a {
        return Err(Error::DimensionMismatch(format!(
            "operator_schmidt: dim {} != {}·{}",
            m.dim(),
            dim_x,
            dim_a
        )));
    }
    let bx = hermitian_basis(dim_x);
    let ba = hermitian_basis(dim_a);
    let (px, pa) = (bx.len(), ba.len());
    // T[p][q] = ⟨F_p ⊗ G_q, m⟩, real because both arguments are Hermitian.
    let mut t = vec![0.0f64; px * pa];
    for (p, fx) in bx.iter().enumerate() {
        for (q, ga) in ba.iter().enumerate() {
            t[p * pa + q] = hs_inner(&tensor(fx, ga), m)?;
        }
    }
    let svd = jacobi_svd(&t, px, pa);
    let cutoff = 1e-10 * svd.singular_values.first().copied().unwrap_or(0.0);
    let mut weights = Vec::new();
    let mut left = Vec::new();
    let mut right = Vec::new();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s <= cutoff || s == 0.0 {
            break;
        }
        weights.push(s);
        let mut ex = HermitianOperator::zeros(dim_x);
        for p in 0..px {
            ex = ex.add(&bx[p].scale(svd.u[p * svd.rank_cols + k]));
        }
        left.push(ex);
        let mut ea = HermitianOperator::zeros(dim_a);
        for q in 0..pa {
            ea = ea.add(&ba[q].scale(svd.v[q * svd.rank_cols + k]));
        }
        right.push(ea);
    }
    Ok(OperatorSchmidt { weights, left, right })
}

#[cfg(test)]
mod tests;
