//! Pure states, density matrices, named families and random samplers.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    self, eig_hermitian, kron_vec, partial_trace, qr_positive, BipartiteDims, ComplexMatrix, Subsystem, C64, ONE, ZERO,
};
use crate::rng::indexed_stream;

/// Tolerance on ‖ψ‖ = 1, on Hermiticity, on unit trace and on the smallest
/// eigenvalue of a density matrix.
pub const STATE_TOL: f64 = 1e-9;

/// Candidate states drawn without an acceptance before the ensemble sampler
/// gives up.
pub const MAX_REJECTIONS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    dims: BipartiteDims,
    amplitudes: Vec<C64>,
}

impl PureState {
    /// Normalizes `raw`; fails on a zero vector.
    pub fn from_amplitudes(dims: BipartiteDims, raw: Vec<C64>) -> Result<Self> {
        check_len(dims, raw.len())?;
        let norm = vec_norm(&raw);
        if !norm.is_finite() {
            return Err(Error::Numerical("non-finite amplitude".into()));
        }
        if norm == 0.0 {
            return Err(Error::Degenerate("cannot normalize the zero vector".into()));
        }
        Ok(Self {
            dims,
            amplitudes: raw.into_iter().map(|z| z / norm).collect(),
        })
    }

    /// Accepts amplitudes that are already normalized within [`STATE_TOL`].
    pub fn new(dims: BipartiteDims, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dims, amplitudes.len())?;
        let norm = vec_norm(&amplitudes);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::contract(format!(
                "pure state invariant 'unit norm' violated: norm = {norm}"
            )));
        }
        Ok(Self { dims, amplitudes })
    }

    #[cfg(test)]
    pub(crate) fn unchecked(dims: BipartiteDims, amplitudes: Vec<C64>) -> Self {
        Self { dims, amplitudes }
    }

    pub fn basis(dims: BipartiteDims, a: usize, b: usize) -> Result<Self> {
        if a >= dims.dim_a() || b >= dims.dim_b() {
            return Err(Error::contract(format!("basis state |{a}{b}⟩ outside {dims}")));
        }
        let mut v = vec![ZERO; dims.total()];
        v[a * dims.dim_b() + b] = ONE;
        Ok(Self { dims, amplitudes: v })
    }

    /// `|a⟩⊗|b⟩` from (not necessarily normalized) local vectors.
    pub fn product(a: &[C64], b: &[C64]) -> Result<Self> {
        let dims = BipartiteDims::new(a.len(), b.len())?;
        Self::from_amplitudes(dims, kron_vec(a, b))
    }

    /// `Σ_i |ii⟩ / √d` on `d×d`.
    pub fn maximally_entangled(d: usize) -> Result<Self> {
        let dims = BipartiteDims::new(d, d)?;
        let mut v = vec![ZERO; d * d];
        for i in 0..d {
            v[i * d + i] = ONE;
        }
        Self::from_amplitudes(dims, v)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        vec_norm(&self.amplitudes)
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            dims: self.dims,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        linalg::reduced_from_vector(&self.amplitudes, self.dims, keep)
    }

    /// `Tr ρ_r²` of either marginal (equal for pure states).
    pub fn marginal_purity(&self) -> f64 {
        let r = self.reduced(Subsystem::A);
        r.trace_product(&r).map(|z| z.re).unwrap_or(f64::NAN)
    }

    /// `|ψ⟩⊗|ψ⟩` in the (A₁,B₁,A₂,B₂) ordering.
    pub fn two_copy(&self) -> Vec<C64> {
        kron_vec(&self.amplitudes, &self.amplitudes)
    }

    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = linalg::kron(ua, ub)?;
        Self::from_amplitudes(self.dims, u.matvec(&self.amplitudes)?)
    }
}

/// An unnormalized ensemble member `|φ⟩` whose weight is `‖φ‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct SubnormalizedState {
    dims: BipartiteDims,
    amplitudes: Vec<C64>,
}

impl SubnormalizedState {
    pub fn new(dims: BipartiteDims, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(dims, amplitudes.len())?;
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Numerical("non-finite amplitude".into()));
        }
        Ok(Self { dims, amplitudes })
    }

    pub fn weighted(psi: &PureState, weight: f64) -> Self {
        let s = weight.max(0.0).sqrt();
        Self {
            dims: psi.dims,
            amplitudes: psi.amplitudes.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn weight(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Normalized direction, or `None` for a zero-weight member.
    pub fn direction(&self) -> Option<PureState> {
        PureState::from_amplitudes(self.dims, self.amplitudes.clone()).ok()
    }

    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amplitudes)
    }
}

/// Hermitian, unit-trace, positive-semidefinite operator on `A⊗B`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    dims: BipartiteDims,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant, naming the first one that fails.
    pub fn new(dims: BipartiteDims, matrix: ComplexMatrix) -> Result<Self> {
        let n = dims.total();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::shape(format!(
                "density matrix for {dims} must be {n}x{n}, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        if !matrix.is_finite() {
            return Err(Error::contract("density matrix invariant 'finite entries' violated"));
        }
        let herm = matrix.hermiticity_deviation();
        if herm > STATE_TOL {
            return Err(Error::contract(format!(
                "density matrix invariant 'hermitian' violated: max |ρ - ρ†| = {herm:.3e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::contract(format!(
                "density matrix invariant 'unit trace' violated: Tr ρ = {}{:+}i",
                tr.re, tr.im
            )));
        }
        let min_eig = eig_hermitian(&matrix)?.values[0];
        if min_eig < -STATE_TOL {
            return Err(Error::contract(format!(
                "density matrix invariant 'positive semidefinite' violated: min eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self { dims, matrix })
    }

    pub(crate) fn unchecked(dims: BipartiteDims, matrix: ComplexMatrix) -> Self {
        Self { dims, matrix }
    }

    pub fn maximally_mixed(dims: BipartiteDims) -> Self {
        let n = dims.total();
        Self {
            dims,
            matrix: ComplexMatrix::identity(n).scale_real(1.0 / n as f64),
        }
    }

    /// `Σ_k |φ_k⟩⟨φ_k|`, validated.
    pub fn from_mixture(members: &[SubnormalizedState]) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Degenerate("empty mixture".into()))?;
        let dims = first.dims;
        let n = dims.total();
        let mut m = ComplexMatrix::zeros(n, n);
        for member in members {
            if member.dims != dims {
                return Err(Error::shape("mixture members have different dimensions"));
            }
            m = m.add(&member.projector())?;
        }
        Self::new(dims, m)
    }

    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn reduced(&self, keep: Subsystem) -> ComplexMatrix {
        partial_trace(&self.matrix, self.dims, keep).expect("dims validated at construction")
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        hermitian_purity(&self.matrix)
    }

    pub fn marginal_purity(&self, which: Subsystem) -> f64 {
        hermitian_purity(&self.reduced(which))
    }

    /// `√(1 − Tr ρ²)`.
    pub fn mixedness(&self) -> f64 {
        (1.0 - self.purity()).max(0.0).sqrt()
    }

    pub fn eigen(&self) -> linalg::HermitianEigen {
        eig_hermitian(&self.matrix).expect("density matrix is Hermitian")
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().values.iter().filter(|&&v| v > tol).count()
    }

    /// `(U_A⊗U_B) ρ (U_A⊗U_B)†`.
    pub fn apply_local(&self, ua: &ComplexMatrix, ub: &ComplexMatrix) -> Result<Self> {
        let u = linalg::kron(ua, ub)?;
        let m = &(&u * &self.matrix) * &u.adjoint();
        Ok(Self {
            dims: self.dims,
            matrix: m.hermitian_part(),
        })
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}

fn hermitian_purity(m: &ComplexMatrix) -> f64 {
    m.as_slice().iter().map(|z| z.norm_sqr()).sum()
}

/// `|φ⟩ = Σ_i √λ_i |a_i⟩⊗|b_i⟩`.
#[derive(Clone, Debug)]
pub struct SchmidtDecomposition {
    coefficients: Vec<f64>,
    basis_a: ComplexMatrix,
    basis_b: ComplexMatrix,
}

impl SchmidtDecomposition {
    pub fn new(coefficients: Vec<f64>, basis_a: ComplexMatrix, basis_b: ComplexMatrix) -> Result<Self> {
        if coefficients.iter().any(|&l| l < 0.0) {
            return Err(Error::contract("Schmidt coefficients must be non-negative"));
        }
        if coefficients.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::contract("Schmidt coefficients must be descending"));
        }
        let sum: f64 = coefficients.iter().sum();
        if (sum - 1.0).abs() > STATE_TOL {
            return Err(Error::contract(format!("Schmidt coefficients sum to {sum}")));
        }
        if basis_a.cols() != coefficients.len() || basis_b.cols() != coefficients.len() {
            return Err(Error::shape("one Schmidt vector per coefficient on each side"));
        }
        Ok(Self {
            coefficients,
            basis_a,
            basis_b,
        })
    }

    /// λ_i, descending.
    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn basis_a(&self) -> &ComplexMatrix {
        &self.basis_a
    }

    pub fn basis_b(&self) -> &ComplexMatrix {
        &self.basis_b
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&l| l > tol).count()
    }

    pub fn reconstruct(&self) -> Vec<C64> {
        let (da, db) = (self.basis_a.rows(), self.basis_b.rows());
        let mut v = vec![ZERO; da * db];
        for (i, &l) in self.coefficients.iter().enumerate() {
            let s = l.sqrt();
            for a in 0..da {
                for b in 0..db {
                    v[a * db + b] += self.basis_a[(a, i)] * self.basis_b[(b, i)] * s;
                }
            }
        }
        v
    }
}

/// Configuration of the random mixed-state ensemble: a product state on
/// `A⊗B⊗E` evolves under a random Hamiltonian and the environment `E` is
/// traced out; states are kept when `√(1 − Tr ρ²)` falls in `band`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomEnsembleConfig {
    pub dims: BipartiteDims,
    pub env_dim: usize,
    pub time_grid: Vec<f64>,
    pub band: [f64; 2],
    pub seed: u64,
    pub count: usize,
}

impl RandomEnsembleConfig {
    /// Defaults: `env_dim = dim_a·dim_b` and [`default_time_grid`].
    pub fn new(dims: BipartiteDims, band: [f64; 2], seed: u64, count: usize) -> Self {
        Self {
            dims,
            env_dim: dims.total(),
            time_grid: default_time_grid(),
            band,
            seed,
            count,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let [low, high] = self.band;
        let max = (1.0 - 1.0 / self.dims.total() as f64).sqrt();
        if !(0.0 <= low && low < high && high <= max) {
            return Err(Error::contract(format!(
                "mixedness band [{low}, {high}] must satisfy 0 <= low < high <= {max:.6}"
            )));
        }
        if self.env_dim == 0 {
            return Err(Error::contract("env_dim must be positive"));
        }
        if self.time_grid.is_empty() || self.time_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::contract("time grid must be non-empty, finite and non-negative"));
        }
        Ok(())
    }
}

/// 16 log-spaced times in `[0.05, 5]`.
pub fn default_time_grid() -> Vec<f64> {
    let (lo, hi) = (0.05f64.ln(), 5.0f64.ln());
    (0..16).map(|k| (lo + (hi - lo) * k as f64 / 15.0).exp()).collect()
}

/// `p|Ψ⁻⟩⟨Ψ⁻| + (1 − p) I/4` on two qubits.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("Werner parameter {p} outside [0, 1]")));
    }
    let dims = BipartiteDims::new(2, 2)?;
    let singlet = PureState::from_amplitudes(dims, vec![ZERO, ONE, -ONE, ZERO])?;
    let m = ComplexMatrix::outer(singlet.amplitudes())
        .scale_real(p)
        .add(&ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0))?;
    Ok(DensityMatrix::unchecked(dims, m))
}

/// `p|Φ_d⟩⟨Φ_d| + (1 − p) I/d²` with `|Φ_d⟩` maximally entangled.
pub fn isotropic_state(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::contract(format!("isotropic parameter {p} outside [0, 1]")));
    }
    let phi = PureState::maximally_entangled(d)?;
    let n = d * d;
    let m = ComplexMatrix::outer(phi.amplitudes())
        .scale_real(p)
        .add(&ComplexMatrix::identity(n).scale_real((1.0 - p) / n as f64))?;
    Ok(DensityMatrix::unchecked(phi.dims(), m))
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn gaussian_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len).map(|_| gaussian_c64(rng)).collect()
}

/// Square Ginibre matrix with `E|g_ij|² = 1`.
pub fn ginibre<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng) * s)
}

/// Haar-distributed unitary from the QR factorization of a Ginibre draw.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    assert!(dim >= 1, "unitary dimension must be positive");
    let (q, _) = qr_positive(&ginibre(dim, rng)).expect("square input");
    q
}

/// Unitarily invariant random pure state.
pub fn random_pure<R: Rng + ?Sized>(dims: BipartiteDims, rng: &mut R) -> PureState {
    loop {
        if let Ok(psi) = PureState::from_amplitudes(dims, gaussian_vector(dims.total(), rng)) {
            return psi;
        }
    }
}

/// Random density matrix `G G† / Tr(G G†)` with `G` a `d × rank` Ginibre block
/// (the induced measure; rank `d` gives Hilbert–Schmidt).
pub fn random_density<R: Rng + ?Sized>(dims: BipartiteDims, rank: usize, rng: &mut R) -> DensityMatrix {
    let n = dims.total();
    let rank = rank.clamp(1, n);
    let g = ComplexMatrix::from_fn(n, rank, |_, _| gaussian_c64(rng));
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    DensityMatrix::unchecked(dims, rho.scale_real(1.0 / tr).hermitian_part())
}

/// Convex mixture of random product pure states with flat-Dirichlet weights.
pub fn random_separable<R: Rng + ?Sized>(dims: BipartiteDims, num_terms: usize, rng: &mut R) -> Result<DensityMatrix> {
    if num_terms == 0 {
        return Err(Error::contract("random_separable needs at least one term"));
    }
    let raw: Vec<f64> = (0..num_terms).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
    let total: f64 = raw.iter().sum();
    let n = dims.total();
    let mut m = ComplexMatrix::zeros(n, n);
    for w in raw {
        let a = gaussian_vector(dims.dim_a(), rng);
        let b = gaussian_vector(dims.dim_b(), rng);
        let prod = PureState::product(&a, &b)?;
        m = m.add(&ComplexMatrix::outer(prod.amplitudes()).scale_real(w / total))?;
    }
    Ok(DensityMatrix::unchecked(dims, m.hermitian_part()))
}

/// Draws `cfg.count` states; state `i` uses its own stream derived from
/// `(cfg.seed, i)`, so the output is independent of evaluation order.
pub fn random_mixed_ensemble(cfg: &RandomEnsembleConfig) -> Result<Vec<DensityMatrix>> {
    cfg.validate()?;
    (0..cfg.count)
        .into_par_iter()
        .map(|i| sample_ensemble_member(cfg, i as u64))
        .collect()
}

/// One ensemble member drawn from the stream `(cfg.seed, index)`.
pub fn sample_ensemble_member(cfg: &RandomEnsembleConfig, index: u64) -> Result<DensityMatrix> {
    let mut rng = indexed_stream(cfg.seed, index);
    let [low, high] = cfg.band;
    let sys = cfg.dims.total();
    let n = sys * cfg.env_dim;
    let mut attempts = 0usize;
    loop {
        let system = random_pure(cfg.dims, &mut rng);
        let h = random_hamiltonian(n, &mut rng);
        let mut psi0 = vec![ZERO; n];
        for (ab, &z) in system.amplitudes().iter().enumerate() {
            psi0[ab * cfg.env_dim] = z;
        }
        for psi in evolve(&h, &psi0, &cfg.time_grid) {
            attempts += 1;
            let rho = trace_environment(&psi, sys, cfg.env_dim);
            let purity = hermitian_purity(&rho);
            let mixedness = (1.0 - purity).max(0.0).sqrt();
            if (low..=high).contains(&mixedness) {
                if let Ok(state) = DensityMatrix::new(cfg.dims, rho.hermitian_part()) {
                    return Ok(state);
                }
            }
            if attempts >= MAX_REJECTIONS {
                return Err(Error::Yield { attempts, low, high });
            }
        }
    }
}

/// `(G + G†)/2` from a Ginibre draw, scaled by `1/√n` so the spectrum stays
/// O(1) independent of dimension.
pub fn random_hamiltonian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let s = 0.5 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |r, c| (g[(r, c)] + g[(c, r)].conj()) * s)
}

fn trace_environment(psi: &[C64], sys: usize, env: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(sys, sys, |i, j| {
        (0..env).map(|e| psi[i * env + e] * psi[j * env + e].conj()).sum()
    })
}

/// Largest Krylov space used by [`evolve`].
const KRYLOV_MAX: usize = 48;

/// Target for the Lanczos a-posteriori error estimate.
const KRYLOV_TOL: f64 = 1e-13;

/// `exp(−iHt)|ψ₀⟩` for each `t`, by Lanczos projection onto the Krylov space
/// of `(H, ψ₀)` with full reorthogonalization. The space grows until the
/// residual estimate `β_k |[exp(−iT_k t) e₁]_k|` is below `KRYLOV_TOL` at
/// every requested time.
pub fn evolve(h: &ComplexMatrix, psi0: &[C64], times: &[f64]) -> Vec<Vec<C64>> {
    let n = psi0.len();
    let norm0 = vec_norm(psi0);
    let mut basis: Vec<Vec<C64>> = vec![psi0.iter().map(|z| z / norm0).collect()];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let kmax = KRYLOV_MAX.min(n);
    let mut coeffs;
    loop {
        let q = basis.last().expect("non-empty basis");
        let mut w = h.matvec(q).expect("square Hamiltonian");
        let a: f64 = q.iter().zip(&w).map(|(x, y)| (x.conj() * y).re).sum();
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let overlap: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= overlap * bi;
                }
            }
        }
        let bnorm = vec_norm(&w);
        let k = alpha.len();
        if k == kmax || bnorm < 1e-12 {
            coeffs = krylov_coefficients(&alpha, &beta, times);
            break;
        }
        if k >= 8 && k.is_multiple_of(4) {
            coeffs = krylov_coefficients(&alpha, &beta, times);
            if coeffs.iter().all(|c| bnorm * c[k - 1].norm() < KRYLOV_TOL) {
                break;
            }
        }
        beta.push(bnorm);
        basis.push(w.into_iter().map(|z| z / bnorm).collect());
    }
    coeffs
        .iter()
        .map(|c| {
            let mut psi = vec![ZERO; n];
            for (&ck, b) in c.iter().zip(&basis) {
                let ck = ck * norm0;
                for (p, x) in psi.iter_mut().zip(b) {
                    *p += ck * x;
                }
            }
            psi
        })
        .collect()
}

/// `exp(−iTt) e₁` for the tridiagonal `T` built from `alpha`, `beta`.
fn krylov_coefficients(alpha: &[f64], beta: &[f64], times: &[f64]) -> Vec<Vec<C64>> {
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |r, c| {
        if r == c {
            alpha[r]
        } else if r + 1 == c {
            beta[r]
        } else if c + 1 == r {
            beta[c]
        } else {
            0.0
        }
    });
    let eig = nalgebra::SymmetricEigen::new(t);
    times
        .iter()
        .map(|&time| {
            let weights: Vec<C64> = (0..k)
                .map(|j| C64::from_polar(eig.eigenvectors[(0, j)], -eig.eigenvalues[j] * time))
                .collect();
            (0..k)
                .map(|r| (0..k).map(|j| weights[j] * eig.eigenvectors[(r, j)]).sum())
                .collect()
        })
        .collect()
}

fn check_len(dims: BipartiteDims, len: usize) -> Result<()> {
    if len != dims.total() {
        return Err(Error::shape(format!(
            "{len} amplitudes supplied for a {dims} system ({} expected)",
            dims.total()
        )));
    }
    Ok(())
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
