//! Operators on the two-fold copy space.
//!
//! `ρ⊗ρ` is stored as the plain Kronecker square, so the copy space is
//! ordered (A₁, B₁, A₂, B₂). Observables are assembled as `X⊗Y` on
//! (A₁, A₂, B₁, B₂), with `X` acting on the two A-copies and `Y` on the two
//! B-copies, and then permuted into that ordering.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::Result;
use crate::linalg::{kron, kron_vec, permute_factors, BipartiteDims, ComplexMatrix, C64, ONE, ZERO};
use crate::states::{DensityMatrix, PureState};

/// Exchange parity of the two copies of one subsystem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Minus,
    Plus,
}

impl Parity {
    pub const BOTH: [Parity; 2] = [Parity::Minus, Parity::Plus];

    fn symbol(self) -> char {
        match self {
            Parity::Minus => '-',
            Parity::Plus => '+',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObservableLabel {
    /// `4 P₋⊗P₋`, whose two-copy expectation is the squared pure-state concurrence.
    A,
    /// `4 (P₋ − P₊)⊗P₋`.
    V1,
    /// `4 P₋⊗(P₋ − P₊)`.
    V2,
    /// `P_{s₁}⊗P_{s₂}` (A-copies parity, B-copies parity).
    Parity(Parity, Parity),
}

impl ObservableLabel {
    pub fn parity_outcomes() -> [ObservableLabel; 4] {
        use Parity::*;
        [
            ObservableLabel::Parity(Minus, Minus),
            ObservableLabel::Parity(Minus, Plus),
            ObservableLabel::Parity(Plus, Minus),
            ObservableLabel::Parity(Plus, Plus),
        ]
    }

    pub fn is_projector(self) -> bool {
        matches!(self, ObservableLabel::Parity(..))
    }
}

impl fmt::Display for ObservableLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObservableLabel::A => write!(f, "A"),
            ObservableLabel::V1 => write!(f, "V1"),
            ObservableLabel::V2 => write!(f, "V2"),
            ObservableLabel::Parity(a, b) => write!(f, "P({},{})", a.symbol(), b.symbol()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct TwoCopyObservable {
    dims: BipartiteDims,
    label: ObservableLabel,
    matrix: ComplexMatrix,
}

impl TwoCopyObservable {
    pub fn dims(&self) -> BipartiteDims {
        self.dims
    }

    pub fn label(&self) -> ObservableLabel {
        self.label
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `Tr((ρ⊗ρ)·O)`, without forming `ρ⊗ρ`.
    pub fn expectation(&self, rho: &DensityMatrix) -> C64 {
        let r = rho.matrix();
        let n = r.rows();
        let o = &self.matrix;
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                let rij = r[(i, j)];
                if rij == ZERO {
                    continue;
                }
                for k in 0..n {
                    let row = i * n + k;
                    let mut inner = ZERO;
                    for l in 0..n {
                        // (ρ⊗ρ)[ik, jl] · O[jl, ik]
                        inner += r[(k, l)] * o[(j * n + l, row)];
                    }
                    acc += rij * inner;
                }
            }
        }
        acc
    }

    /// `⟨ψ⊗φ|O|ψ⊗φ⟩` for vectors of any norm.
    pub fn expectation_pair(&self, psi: &[C64], phi: &[C64]) -> C64 {
        let v = kron_vec(psi, phi);
        self.matrix.expectation(&v).expect("vector length matches copy space")
    }

    pub fn expectation_pure(&self, psi: &PureState) -> C64 {
        self.expectation_pair(psi.amplitudes(), psi.amplitudes())
    }
}

/// Swap `S|i⟩|j⟩ = |j⟩|i⟩` on `C^d ⊗ C^d`.
pub fn swap_operator(d: usize) -> ComplexMatrix {
    assert!(d >= 1, "swap dimension must be positive");
    let mut s = ComplexMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            s[(j * d + i, i * d + j)] = ONE;
        }
    }
    s
}

/// `(P₋, P₊) = ((I − S)/2, (I + S)/2)`.
pub fn parity_projectors(d: usize) -> (ComplexMatrix, ComplexMatrix) {
    let s = swap_operator(d);
    let id = ComplexMatrix::identity(d * d);
    let minus = id.sub(&s).expect("same shape").scale_real(0.5);
    let plus = id.add(&s).expect("same shape").scale_real(0.5);
    (minus, plus)
}

type Cache = RwLock<HashMap<(BipartiteDims, ObservableLabel), Arc<TwoCopyObservable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// Cached two-copy observable in the (A₁, B₁, A₂, B₂) ordering.
///
/// Fails with a size error when `(dim_a·dim_b)²` exceeds the kernel limit.
pub fn copy_observable(dims: BipartiteDims, label: ObservableLabel) -> Result<Arc<TwoCopyObservable>> {
    if let Some(obs) = cache().read().expect("cache lock").get(&(dims, label)) {
        return Ok(Arc::clone(obs));
    }
    // concurrent builders may race here; every build yields the same matrix
    let built = Arc::new(build_observable(dims, label)?);
    cache()
        .write()
        .expect("cache lock")
        .insert((dims, label), Arc::clone(&built));
    Ok(built)
}

fn build_observable(dims: BipartiteDims, label: ObservableLabel) -> Result<TwoCopyObservable> {
    let (da, db) = (dims.dim_a(), dims.dim_b());
    let (am, ap) = parity_projectors(da);
    let (bm, bp) = parity_projectors(db);
    let pick = |p: Parity, minus: &ComplexMatrix, plus: &ComplexMatrix| match p {
        Parity::Minus => minus.clone(),
        Parity::Plus => plus.clone(),
    };
    let (x, y, scale) = match label {
        ObservableLabel::A => (am, bm, 4.0),
        ObservableLabel::V1 => (am.sub(&ap)?, bm, 4.0),
        ObservableLabel::V2 => (am, bm.sub(&bp)?, 4.0),
        ObservableLabel::Parity(sa, sb) => (pick(sa, &am, &ap), pick(sb, &bm, &bp), 1.0),
    };
    let grouped = kron(&x, &y)?.scale_real(scale);
    let matrix = permute_factors(&grouped, &[da, da, db, db], &[0, 2, 1, 3])?;
    Ok(TwoCopyObservable { dims, label, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;
    use crate::rng::stream;
    use crate::states::{random_density, random_pure};

    fn d(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    fn rank(p: &ComplexMatrix) -> usize {
        // projector rank equals its trace
        p.trace().re.round() as usize
    }

    #[test]
    fn swap_small_cases() {
        assert_eq!(swap_operator(1), ComplexMatrix::identity(1));
        let s = swap_operator(2);
        let expected =
            ComplexMatrix::from_real(4, 4, &[1., 0., 0., 0., 0., 0., 1., 0., 0., 1., 0., 0., 0., 0., 0., 1.]).unwrap();
        assert_eq!(s, expected);
    }

    #[test]
    fn swap_is_hermitian_unitary_involution() {
        for dim in 1..=5 {
            let s = swap_operator(dim);
            assert_eq!(s.hermiticity_deviation(), 0.0);
            assert!((&s * &s).max_abs_diff(&ComplexMatrix::identity(dim * dim)) == 0.0);
        }
    }

    #[test]
    fn swap_trace_is_symmetric_minus_antisymmetric_dimension() {
        let dim = 5;
        let sym = dim * (dim + 1) / 2;
        let anti = dim * (dim - 1) / 2;
        assert_eq!(swap_operator(dim).trace().re, (sym - anti) as f64);
    }

    #[test]
    fn projector_ranks_and_completeness() {
        let (m1, p1) = parity_projectors(1);
        assert_eq!(m1[(0, 0)], C64::new(0.0, 0.0));
        assert_eq!(p1[(0, 0)], C64::new(1.0, 0.0));

        let (m2, _) = parity_projectors(2);
        assert_eq!(rank(&m2), 1);

        let (m5, p5) = parity_projectors(5);
        assert_eq!(m5.trace().re, 10.0);
        assert_eq!(rank(&p5), 15);
        assert!(m5.add(&p5).unwrap().max_abs_diff(&ComplexMatrix::identity(25)) < 1e-15);
        assert!((&m5 * &p5).max_abs() < 1e-15);
        assert!((&m5 * &m5).max_abs_diff(&m5) < 1e-15);
    }

    #[test]
    fn observables_are_hermitian_and_projectors_idempotent() {
        for dims in [d(2, 2), d(2, 3)] {
            for label in [ObservableLabel::A, ObservableLabel::V1, ObservableLabel::V2]
                .into_iter()
                .chain(ObservableLabel::parity_outcomes())
            {
                let o = copy_observable(dims, label).unwrap();
                assert!(o.matrix().hermiticity_deviation() < 1e-10, "{label}");
                if label.is_projector() {
                    let sq = o.matrix() * o.matrix();
                    assert!(sq.max_abs_diff(o.matrix()) < 1e-10, "{label}");
                }
            }
        }
    }

    #[test]
    fn a_is_positive_semidefinite() {
        let a = copy_observable(d(2, 3), ObservableLabel::A).unwrap();
        let eig = crate::linalg::eig_hermitian(a.matrix()).unwrap();
        assert!(eig.values[0] > -1e-12);
    }

    #[test]
    fn definitions_are_consistent() {
        use Parity::*;
        let dims = d(2, 3);
        let get = |l| copy_observable(dims, l).unwrap().matrix().clone();
        let mm = get(ObservableLabel::Parity(Minus, Minus));
        let mp = get(ObservableLabel::Parity(Minus, Plus));
        let pm = get(ObservableLabel::Parity(Plus, Minus));
        let pp = get(ObservableLabel::Parity(Plus, Plus));
        let v1 = mm.sub(&pm).unwrap().scale_real(4.0);
        let v2 = mm.sub(&mp).unwrap().scale_real(4.0);
        assert!(get(ObservableLabel::V1).max_abs_diff(&v1) < 1e-12);
        assert!(get(ObservableLabel::V2).max_abs_diff(&v2) < 1e-12);
        assert!(get(ObservableLabel::A).max_abs_diff(&mm.scale_real(4.0)) < 1e-12);
        let sum = mm.add(&mp).unwrap().add(&pm).unwrap().add(&pp).unwrap();
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(36)) < 1e-12);
    }

    #[test]
    fn bell_state_has_unit_a_expectation() {
        let dims = d(2, 2);
        let bell = PureState::maximally_entangled(2).unwrap();
        let a = copy_observable(dims, ObservableLabel::A).unwrap();
        // purity formula: c² = 2(1 − Tr(I/2)²) = 1
        assert!((a.expectation_pure(&bell).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn v1_vanishes_on_pure_products() {
        let mut rng = stream(41);
        let dims = d(3, 2);
        let v1 = copy_observable(dims, ObservableLabel::V1).unwrap();
        for _ in 0..10 {
            let a = crate::states::gaussian_vector(3, &mut rng);
            let b = crate::states::gaussian_vector(2, &mut rng);
            let prod = PureState::product(&a, &b).unwrap();
            assert!(v1.expectation_pure(&prod).norm() < 1e-12);
        }
    }

    #[test]
    fn mixed_parity_sectors_vanish_on_pure_copies() {
        use Parity::*;
        let mut rng = stream(43);
        for dims in [d(2, 2), d(2, 3), d(3, 3)] {
            let mp = copy_observable(dims, ObservableLabel::Parity(Minus, Plus)).unwrap();
            let pm = copy_observable(dims, ObservableLabel::Parity(Plus, Minus)).unwrap();
            let a = copy_observable(dims, ObservableLabel::A).unwrap();
            let v1 = copy_observable(dims, ObservableLabel::V1).unwrap();
            let v2 = copy_observable(dims, ObservableLabel::V2).unwrap();
            for _ in 0..20 {
                let psi = random_pure(dims, &mut rng);
                assert!(mp.expectation_pure(&psi).norm() < 1e-10);
                assert!(pm.expectation_pure(&psi).norm() < 1e-10);
                let av = a.expectation_pure(&psi).re;
                assert!((v1.expectation_pure(&psi).re - av).abs() < 1e-10);
                assert!((v2.expectation_pure(&psi).re - av).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn mixed_parity_weight_detects_mixedness() {
        use Parity::*;
        let mut rng = stream(47);
        let dims = d(2, 3);
        let mp = copy_observable(dims, ObservableLabel::Parity(Minus, Plus)).unwrap();
        for k in 0..40 {
            let rho = if k % 2 == 0 {
                random_pure(dims, &mut rng).density()
            } else {
                random_density(dims, 1 + k % 6, &mut rng)
            };
            if mp.expectation(&rho).re > 1e-9 {
                assert!(rho.purity() < 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn density_expectation_matches_explicit_kron() {
        let mut rng = stream(53);
        let dims = d(2, 2);
        let rho = random_density(dims, 3, &mut rng);
        let v1 = copy_observable(dims, ObservableLabel::V1).unwrap();
        let rr = kron(rho.matrix(), rho.matrix()).unwrap();
        let direct = rr.trace_product(v1.matrix()).unwrap();
        assert!((v1.expectation(&rho) - direct).norm() < 1e-13);
    }
}
