//! Dense complex matrix kernel.
//!
//! Storage is row-major. Composite tensor indices put the leftmost factor in
//! the most significant position, so `(a⊗b)[i·rb + k, j·cb + l] = a[i,j]·b[k,l]`.
//! Eigen- and singular-value problems are delegated to `nalgebra`.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::{PureState, SchmidtDecomposition};

/// Default cap on the side length produced by [`kron`].
pub const MAX_TOTAL_DIM: usize = 4096;

/// Max |m − m†| accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::shape("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::shape(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    /// Column vector `|v⟩`.
    pub fn column(v: &[C64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one projector `|v⟩⟨v|`.
    pub fn outer(v: &[C64]) -> Self {
        Self::from_fn(v.len(), v.len(), |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::shape(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let out_row = &mut out.data[r * other.cols..(r + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == ZERO {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn matvec(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols != v.len() {
            return Err(Error::shape(format!(
                "cannot apply {}x{} to a vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                self.data[r * self.cols..(r + 1) * self.cols]
                    .iter()
                    .zip(v)
                    .map(|(&a, &b)| a * b)
                    .sum()
            })
            .collect())
    }

    /// `⟨v|M|v⟩`.
    pub fn expectation(&self, v: &[C64]) -> Result<C64> {
        let mv = self.matvec(v)?;
        Ok(v.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        if self.cols != other.rows || self.rows != other.cols {
            return Err(Error::shape("trace_product needs compatible shapes"));
        }
        let mut acc = ZERO;
        for r in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(r, k)] * other[(k, r)];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Max entrywise |self − other|; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        match self.sub(other) {
            Ok(d) => d.max_abs(),
            Err(_) => f64::INFINITY,
        }
    }

    /// Max entrywise |m − m†|.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |r, c| (self[(r, c)] + self[(c, r)].conj()) * 0.5)
    }

    /// Max entrywise |U†U − I|.
    pub fn unitarity_deviation(&self) -> f64 {
        match self.adjoint().matmul(self) {
            Ok(p) => p.max_abs_diff(&Self::identity(self.cols)),
            Err(_) => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a shape mismatch; use [`ComplexMatrix::matmul`] for a `Result`.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

/// Factor dimensions of a bipartite space `A⊗B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct BipartiteDims {
    dim_a: usize,
    dim_b: usize,
}

impl BipartiteDims {
    pub fn new(dim_a: usize, dim_b: usize) -> Result<Self> {
        if dim_a < 2 || dim_b < 2 {
            return Err(Error::contract(format!(
                "bipartite factor dimensions must be >= 2, got {dim_a}x{dim_b}"
            )));
        }
        Ok(Self { dim_a, dim_b })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn total(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn min_dim(&self) -> usize {
        self.dim_a.min(self.dim_b)
    }

    pub fn factor(&self, which: Subsystem) -> usize {
        match which {
            Subsystem::A => self.dim_a,
            Subsystem::B => self.dim_b,
        }
    }
}

impl fmt::Display for BipartiteDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.dim_a, self.dim_b)
    }
}

impl TryFrom<[usize; 2]> for BipartiteDims {
    type Error = Error;

    fn try_from([a, b]: [usize; 2]) -> Result<Self> {
        Self::new(a, b)
    }
}

impl From<BipartiteDims> for [usize; 2] {
    fn from(d: BipartiteDims) -> Self {
        [d.dim_a, d.dim_b]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

impl Subsystem {
    pub fn other(self) -> Self {
        match self {
            Subsystem::A => Subsystem::B,
            Subsystem::B => Subsystem::A,
        }
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_with_limit(a, b, MAX_TOTAL_DIM)
}

pub fn kron_with_limit(a: &ComplexMatrix, b: &ComplexMatrix, limit: usize) -> Result<ComplexMatrix> {
    let rows = a.rows * b.rows;
    let cols = a.cols * b.cols;
    if rows.max(cols) > limit {
        return Err(Error::Size {
            requested: rows.max(cols),
            limit,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == ZERO {
                continue;
            }
            for k in 0..b.rows {
                for l in 0..b.cols {
                    out[(i * b.rows + k, j * b.cols + l)] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Reduced matrix on the `keep` factor of a bipartite operator.
pub fn partial_trace(m: &ComplexMatrix, dims: BipartiteDims, keep: Subsystem) -> Result<ComplexMatrix> {
    let n = dims.total();
    if m.rows != n || m.cols != n {
        return Err(Error::shape(format!(
            "partial trace over {dims} needs a {n}x{n} matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let (da, db) = (dims.dim_a, dims.dim_b);
    Ok(match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| (0..db).map(|k| m[(i * db + k, j * db + k)]).sum()),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| (0..da).map(|i| m[(i * db + k, i * db + l)]).sum()),
    })
}

/// Reduced density matrix `M M†` (keep A) or `Mᵀ M*` (keep B) of a vector
/// reshaped to `dim_a × dim_b`. The vector need not be normalized.
pub fn reduced_from_vector(v: &[C64], dims: BipartiteDims, keep: Subsystem) -> ComplexMatrix {
    let (da, db) = (dims.dim_a, dims.dim_b);
    debug_assert_eq!(v.len(), da * db);
    match keep {
        Subsystem::A => ComplexMatrix::from_fn(da, da, |i, j| {
            (0..db).map(|k| v[i * db + k] * v[j * db + k].conj()).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(db, db, |k, l| {
            (0..da).map(|i| v[i * db + k] * v[i * db + l].conj()).sum()
        }),
    }
}

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.values.iter().map(|&x| C64::new(x, 0.0)).collect();
        let ud = &self.vectors * &ComplexMatrix::diag(&d);
        &ud * &self.vectors.adjoint()
    }
}

pub fn eig_hermitian(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::shape(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows, m.cols
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITIAN_TOL {
        return Err(Error::contract(format!(
            "matrix is not Hermitian (max |m - m†| = {dev:.3e})"
        )));
    }
    let sym = m.hermitian_part().to_nalgebra();
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..m.rows).collect();
    // stable sort keeps decomposition order among ties
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = ComplexMatrix::from_fn(m.rows, m.rows, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Thin SVD `m = U diag(σ) V†` with σ descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v_adjoint: ComplexMatrix,
}

pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    let dec = nalgebra::SVD::try_new(m.to_nalgebra(), true, true, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numerical("SVD failed to converge".into()))?;
    let u = dec.u.as_ref().expect("requested U");
    let vt = dec.v_t.as_ref().expect("requested V†");
    let k = dec.singular_values.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));
    Ok(Svd {
        u: ComplexMatrix::from_fn(u.nrows(), k, |r, c| u[(r, order[c])]),
        singular_values: order.iter().map(|&i| dec.singular_values[i]).collect(),
        v_adjoint: ComplexMatrix::from_fn(k, vt.ncols(), |r, c| vt[(order[r], c)]),
    })
}

/// QR of a square matrix with the diagonal of R made real and non-negative.
pub fn qr_positive(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !m.is_square() {
        return Err(Error::shape("qr_positive needs a square matrix"));
    }
    let qr = m.to_nalgebra().qr();
    let mut q = ComplexMatrix::from_nalgebra(&qr.q());
    let mut r = ComplexMatrix::from_nalgebra(&qr.r());
    let n = m.rows;
    for i in 0..n {
        let d = r[(i, i)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for row in 0..n {
            q[(row, i)] *= phase;
        }
        for col in 0..n {
            r[(i, col)] *= phase.conj();
        }
    }
    Ok((q, r))
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::contract(format!(
            "permutation of length {} for {n} factors",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::contract(format!("{perm:?} is not a permutation")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a permutation given in the same convention as [`permute_factors`].
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Conjugates `m` by the unitary that reorders tensor factors.
///
/// Position `k` of the result holds input factor `perm[k]`; the output factor
/// dimensions are `factor_dims[perm[k]]`.
pub fn permute_factors(m: &ComplexMatrix, factor_dims: &[usize], perm: &[usize]) -> Result<ComplexMatrix> {
    let n = factor_dims.len();
    check_permutation(perm, n)?;
    if factor_dims.contains(&0) {
        return Err(Error::contract("factor dimensions must be positive"));
    }
    let side: usize = factor_dims.iter().product();
    if m.rows != side || m.cols != side {
        return Err(Error::shape(format!(
            "factor dimensions {factor_dims:?} give side {side}, matrix is {}x{}",
            m.rows, m.cols
        )));
    }
    let map = permuted_index_map(factor_dims, perm);
    Ok(ComplexMatrix::from_fn(side, side, |r, c| m[(map[r], map[c])]))
}

/// For each composite index of the permuted space, the matching index of the
/// original space.
fn permuted_index_map(factor_dims: &[usize], perm: &[usize]) -> Vec<usize> {
    let n = factor_dims.len();
    let new_dims: Vec<usize> = perm.iter().map(|&p| factor_dims[p]).collect();
    let mut old_strides = vec![1usize; n];
    for k in (0..n.saturating_sub(1)).rev() {
        old_strides[k] = old_strides[k + 1] * factor_dims[k + 1];
    }
    let side: usize = factor_dims.iter().product();
    let mut map = Vec::with_capacity(side);
    let mut digits = vec![0usize; n];
    for _ in 0..side {
        map.push(digits.iter().enumerate().map(|(k, &d)| d * old_strides[perm[k]]).sum());
        for k in (0..n).rev() {
            digits[k] += 1;
            if digits[k] < new_dims[k] {
                break;
            }
            digits[k] = 0;
        }
    }
    map
}

/// Extends orthonormal columns to a full orthonormal basis of `C^dim` by
/// Gram–Schmidt against the standard basis.
pub fn complete_basis(cols: &ComplexMatrix) -> ComplexMatrix {
    let dim = cols.rows;
    let mut basis: Vec<Vec<C64>> = (0..cols.cols).map(|c| cols.col(c)).collect();
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = vec![ZERO; dim];
        v[e] = ONE;
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi -= overlap * bi;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-6 {
            basis.push(v.into_iter().map(|z| z / norm).collect());
        }
    }
    ComplexMatrix::from_fn(dim, basis.len(), |r, c| basis[c][r])
}

/// Schmidt decomposition from the SVD of the `dim_a × dim_b` amplitude matrix.
pub fn schmidt_decompose(psi: &PureState) -> Result<SchmidtDecomposition> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::contract(format!(
            "Schmidt decomposition needs a normalized state, norm = {norm}"
        )));
    }
    let dims = psi.dims();
    let m = ComplexMatrix::from_vec(dims.dim_a(), dims.dim_b(), psi.amplitudes().to_vec())?;
    let dec = svd(&m)?;
    let coefficients: Vec<f64> = dec.singular_values.iter().map(|s| s * s).collect();
    // M = Σ σ_i u_i v_i†, so the B-side Schmidt vectors are conj(v_i)
    let basis_b = dec.v_adjoint.transpose();
    SchmidtDecomposition::new(coefficients, dec.u, basis_b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_matrix(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| {
            C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
        })
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()
    }

    #[test]
    fn kron_identities_and_scalars() {
        let i4 = kron(&ComplexMatrix::identity(2), &ComplexMatrix::identity(2)).unwrap();
        assert_eq!(i4, ComplexMatrix::identity(4));

        let two = ComplexMatrix::from_real(1, 1, &[2.0]).unwrap();
        let three = ComplexMatrix::from_real(1, 1, &[3.0]).unwrap();
        assert_eq!(kron(&two, &three).unwrap()[(0, 0)], C64::new(6.0, 0.0));
    }

    #[test]
    fn kron_xx_flips_both_bits() {
        let xx = kron(&pauli_x(), &pauli_x()).unwrap();
        let ket00 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(xx.matvec(&ket00).unwrap(), vec![ZERO, ZERO, ZERO, ONE]);
    }

    #[test]
    fn kron_respects_size_limit() {
        let big = ComplexMatrix::identity(65);
        assert!(matches!(kron(&big, &big), Err(Error::Size { .. })));
        assert!(kron_with_limit(&big, &big, 65 * 65).is_ok());
    }

    #[test]
    fn kron_index_convention() {
        let mut rng = crate::rng::stream(3);
        let a = random_matrix(2, 3, &mut rng);
        let b = random_matrix(3, 2, &mut rng);
        let k = kron(&a, &b).unwrap();
        for i in 0..2 {
            for j in 0..3 {
                for p in 0..3 {
                    for q in 0..2 {
                        assert_eq!(k[(i * 3 + p, j * 2 + q)], a[(i, j)] * b[(p, q)]);
                    }
                }
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)];
        let rho = ComplexMatrix::outer(&phi);
        let dims = BipartiteDims::new(2, 2).unwrap();
        for keep in [Subsystem::A, Subsystem::B] {
            let red = partial_trace(&rho, dims, keep).unwrap();
            assert!(red.max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
        }
    }

    #[test]
    fn partial_trace_of_product_recovers_factor() {
        let mut rng = crate::rng::stream(11);
        let ga = random_matrix(3, 3, &mut rng);
        let gb = random_matrix(2, 2, &mut rng);
        let ra = &ga * &ga.adjoint();
        let ra = ra.scale_real(1.0 / ra.trace().re);
        let rb = &gb * &gb.adjoint();
        let rb = rb.scale_real(1.0 / rb.trace().re);
        let dims = BipartiteDims::new(3, 2).unwrap();
        let prod = kron(&ra, &rb).unwrap();
        assert!(partial_trace(&prod, dims, Subsystem::A).unwrap().max_abs_diff(&ra) < 1e-14);
        assert!(partial_trace(&prod, dims, Subsystem::B).unwrap().max_abs_diff(&rb) < 1e-14);
    }

    #[test]
    fn partial_trace_rejects_wrong_shape() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let err = partial_trace(&ComplexMatrix::identity(5), dims, Subsystem::A).unwrap_err();
        assert!(matches!(err, Error::Shape(_)));
    }

    #[test]
    fn partial_trace_preserves_trace_against_direct_sum() {
        let mut rng = crate::rng::stream(5);
        let g = random_matrix(9, 9, &mut rng);
        let rho = &g * &g.adjoint();
        let rho = rho.scale_real(1.0 / rho.trace().re);
        let dims = BipartiteDims::new(3, 3).unwrap();
        // oracle: direct summation of the diagonal
        let direct: f64 = (0..9).map(|i| rho[(i, i)].re).sum();
        for keep in [Subsystem::A, Subsystem::B] {
            let t = partial_trace(&rho, dims, keep).unwrap().trace();
            assert!((t.re - direct).abs() < 1e-12);
            assert!((t.re - 1.0).abs() < 1e-12);
            assert!(t.im.abs() < 1e-12);
        }
    }

    #[test]
    fn eig_of_diagonal_and_pauli_x() {
        let d = ComplexMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let e = eig_hermitian(&d).unwrap();
        assert_eq!(e.values.len(), 3);
        for (v, want) in e.values.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - want).abs() < 1e-14);
        }
        for c in 0..3 {
            // each eigenvector is a unit vector along a standard axis, up to phase
            assert!((e.vectors[(c, c)].norm() - 1.0).abs() < 1e-12);
        }

        let x = eig_hermitian(&pauli_x()).unwrap();
        assert!((x.values[0] + 1.0).abs() < 1e-14);
        assert!((x.values[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eig_reconstructs_random_hermitian() {
        let mut rng = crate::rng::stream(17);
        let g = random_matrix(6, 6, &mut rng);
        let h = g.add(&g.adjoint()).unwrap().scale_real(0.5);
        let e = eig_hermitian(&h).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        assert!(e.reconstruct().sub(&h).unwrap().frobenius_norm() < 1e-8);
        assert!(e.vectors.unitarity_deviation() < 1e-8);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap();
        assert!(matches!(eig_hermitian(&m), Err(Error::Contract(_))));
    }

    #[test]
    fn permute_identity_and_inverse() {
        let mut rng = crate::rng::stream(23);
        let dims = [2, 3, 2];
        let m = random_matrix(12, 12, &mut rng);
        assert_eq!(permute_factors(&m, &dims, &[0, 1, 2]).unwrap(), m);

        let perm = [2, 0, 1];
        let p = permute_factors(&m, &dims, &perm).unwrap();
        let new_dims: Vec<usize> = perm.iter().map(|&i| dims[i]).collect();
        let back = permute_factors(&p, &new_dims, &inverse_permutation(&perm)).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-12);
    }

    #[test]
    fn permute_swaps_kron_order() {
        let mut rng = crate::rng::stream(29);
        let a = random_matrix(2, 2, &mut rng);
        let b = random_matrix(2, 2, &mut rng);
        let ab = kron(&a, &b).unwrap();
        let ba = kron(&b, &a).unwrap();
        let swapped = permute_factors(&ab, &[2, 2], &[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&ba) < 1e-15);

        let a3 = random_matrix(3, 3, &mut rng);
        let swapped = permute_factors(&kron(&a3, &a).unwrap(), &[3, 2], &[1, 0]).unwrap();
        assert!(swapped.max_abs_diff(&kron(&a, &a3).unwrap()) < 1e-15);
    }

    #[test]
    fn permute_rejects_bad_permutation() {
        let m = ComplexMatrix::identity(4);
        assert!(matches!(permute_factors(&m, &[2, 2], &[0, 0]), Err(Error::Contract(_))));
        assert!(matches!(
            permute_factors(&m, &[2, 2], &[0, 1, 2]),
            Err(Error::Contract(_))
        ));
        assert!(matches!(permute_factors(&m, &[2, 3], &[1, 0]), Err(Error::Shape(_))));
    }

    #[test]
    fn qr_positive_gives_unitary_with_positive_diagonal() {
        let mut rng = crate::rng::stream(31);
        let g = random_matrix(5, 5, &mut rng);
        let (q, r) = qr_positive(&g).unwrap();
        assert!(q.unitarity_deviation() < 1e-12);
        for i in 0..5 {
            assert!(r[(i, i)].im.abs() < 1e-12 && r[(i, i)].re >= 0.0);
        }
        assert!((&q * &r).max_abs_diff(&g) < 1e-12);
    }

    #[test]
    fn complete_basis_extends_to_unitary() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexMatrix::from_vec(3, 1, vec![C64::new(s, 0.0), C64::new(0.0, s), ZERO]).unwrap();
        let full = complete_basis(&v);
        assert_eq!(full.cols(), 3);
        assert!(full.unitarity_deviation() < 1e-12);
        assert_eq!(full.col(0), v.col(0));
    }

    #[test]
    fn schmidt_of_product_and_bell() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let ket00 = PureState::from_amplitudes(dims, vec![ONE, ZERO, ZERO, ZERO]).unwrap();
        let s = schmidt_decompose(&ket00).unwrap();
        assert!((s.coefficients()[0] - 1.0).abs() < 1e-12);
        assert!(s.coefficients()[1].abs() < 1e-12);
        assert_eq!(s.rank(1e-12), 1);

        let bell = PureState::from_amplitudes(dims, vec![ONE, ZERO, ZERO, ONE]).unwrap();
        let s = schmidt_decompose(&bell).unwrap();
        for &l in s.coefficients() {
            assert!((l - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn schmidt_rejects_unnormalized() {
        let dims = BipartiteDims::new(2, 2).unwrap();
        let v = PureState::unchecked(dims, vec![ONE, ONE, ZERO, ZERO]);
        assert!(matches!(schmidt_decompose(&v), Err(Error::Contract(_))));
    }
}
