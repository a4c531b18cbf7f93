//! Pure-state concurrence, the parity lower bound for mixed states, the
//! witness verdict, and executable checks of the inequalities behind the bound.
//!
//! For `V₁ = 4(P₋ − P₊)⊗P₋` and `V₂ = 4P₋⊗(P₋ − P₊)`,
//! `Tr(ρ⊗ρ V_i) = 2(Tr ρ² − Tr ρ_i²)` where `ρ_1 = Tr_B ρ`, `ρ_2 = Tr_A ρ`,
//! and `c(ρ)² ≥ Tr(ρ⊗ρ V_i)`.

use serde::{Deserialize, Serialize};

use crate::copyspace::{copy_observable, ObservableLabel};
use crate::error::{Error, Result};
use crate::linalg::{complete_basis, schmidt_decompose, BipartiteDims, ComplexMatrix, Subsystem, C64};
use crate::states::{DensityMatrix, PureState, SubnormalizedState, STATE_TOL};

/// A bound above this value certifies entanglement.
pub const WITNESS_THRESHOLD: f64 = 1e-7;

/// Largest accepted |operator form − purity form|.
pub const DISCREPANCY_TOL: f64 = 1e-8;

/// Imaginary part of `Tr(ρ⊗ρ V)` above which the evaluation is rejected.
pub const IMAGINARY_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Entangled,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub v1: f64,
    pub v2: f64,
    pub best: f64,
    pub purity_v1: f64,
    pub purity_v2: f64,
    pub discrepancy: f64,
    pub verdict: Verdict,
    pub global_purity: f64,
    pub marginal_purity_a: f64,
    pub marginal_purity_b: f64,
}

impl BoundReport {
    /// `(v1 + v2)/2`, the symmetrized bound.
    pub fn mean(&self) -> f64 {
        0.5 * (self.v1 + self.v2)
    }
}

/// `c(ψ) = √⟨ψ⊗ψ|A|ψ⊗ψ⟩`, with a negative radicand clamped to zero.
pub fn pure_concurrence(psi: &PureState) -> f64 {
    let a = copy_observable(psi.dims(), ObservableLabel::A).expect("copy space within size limit");
    let sq = a.expectation_pure(psi).re;
    debug_assert!(
        (sq - 2.0 * (1.0 - psi.marginal_purity())).abs() < 1e-9,
        "operator and purity forms of c² disagree"
    );
    sq.max(0.0).sqrt()
}

/// `‖φ‖² c(φ/‖φ‖) = √(2(‖φ‖⁴ − Tr ρ_A²))` for an unnormalized vector, with
/// `ρ_A` the unnormalized marginal.
pub fn weighted_concurrence(amplitudes: &[C64], dims: BipartiteDims) -> f64 {
    let (da, db) = (dims.dim_a(), dims.dim_b());
    let mut norm2 = 0.0;
    let mut marg2 = 0.0;
    for i in 0..da {
        let row_i = &amplitudes[i * db..(i + 1) * db];
        let nii: f64 = row_i.iter().map(|z| z.norm_sqr()).sum();
        norm2 += nii;
        marg2 += nii * nii;
        for j in (i + 1)..da {
            let row_j = &amplitudes[j * db..(j + 1) * db];
            let overlap: C64 = row_i.iter().zip(row_j).map(|(x, y)| x * y.conj()).sum();
            marg2 += 2.0 * overlap.norm_sqr();
        }
    }
    (2.0 * (norm2 * norm2 - marg2)).max(0.0).sqrt()
}

/// `(Tr(ρ⊗ρ V₁), Tr(ρ⊗ρ V₂))` evaluated on the copy-space operators.
pub fn bound_operator_form(rho: &DensityMatrix) -> Result<(f64, f64)> {
    let eval = |label| -> Result<f64> {
        let obs = copy_observable(rho.dims(), label)?;
        let z = obs.expectation(rho);
        if z.im.abs() > IMAGINARY_TOL {
            return Err(Error::Numerical(format!(
                "Tr(ρ⊗ρ {label}) has imaginary residue {:.3e}",
                z.im
            )));
        }
        Ok(z.re)
    };
    Ok((eval(ObservableLabel::V1)?, eval(ObservableLabel::V2)?))
}

/// `(2(Tr ρ² − Tr ρ_A²), 2(Tr ρ² − Tr ρ_B²))`.
pub fn bound_purity_form(rho: &DensityMatrix) -> (f64, f64) {
    let p = rho.purity();
    (
        2.0 * (p - rho.marginal_purity(Subsystem::A)),
        2.0 * (p - rho.marginal_purity(Subsystem::B)),
    )
}

/// Both forms of the bound and the resulting verdict. The verdict is one-sided:
/// a non-positive bound never certifies separability.
pub fn witness(rho: &DensityMatrix) -> Result<BoundReport> {
    let (v1, v2) = bound_operator_form(rho)?;
    let (purity_v1, purity_v2) = bound_purity_form(rho);
    let discrepancy = (v1 - purity_v1).abs().max((v2 - purity_v2).abs());
    if discrepancy > DISCREPANCY_TOL {
        return Err(Error::Numerical(format!(
            "operator and purity forms differ by {discrepancy:.3e}"
        )));
    }
    let best = v1.max(v2);
    Ok(BoundReport {
        v1,
        v2,
        best,
        purity_v1,
        purity_v2,
        discrepancy,
        verdict: if best > WITNESS_THRESHOLD {
            Verdict::Entangled
        } else {
            Verdict::Inconclusive
        },
        global_purity: rho.purity(),
        marginal_purity_a: rho.marginal_purity(Subsystem::A),
        marginal_purity_b: rho.marginal_purity(Subsystem::B),
    })
}

/// Two sides of the single-pair inequality `⟨ψ⊗φ|V₁|ψ⊗φ⟩ ≤ c(ψ)·c(φ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairInequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// Evaluates the pair inequality in the Schmidt bases of `phi`.
///
/// With `φ = Σ √λ_i |i⟩|i⟩` and `ψ = Σ ψ_ij |i⟩|j⟩` in the same local bases,
///
/// ```text
/// lhs = 2 Σ_{i≠j} [Re(ψ*_ii ψ_jj) √(λ_i λ_j) − |ψ_ij|² λ_i]
/// rhs = √2 · √(Σ_{i≠j} λ_i λ_j) · √(Σ_{i≠j, p≠q} |ψ_ip ψ_jq − ψ_iq ψ_jp|²)
/// ```
///
/// so `lhs = ⟨ψ⊗φ|V₁|ψ⊗φ⟩` and `rhs = c(ψ)·c(φ)`.
pub fn verify_pair_inequality(psi: &PureState, phi: &PureState) -> Result<PairInequalityReport> {
    if psi.dims() != phi.dims() {
        return Err(Error::contract(format!(
            "pair inequality needs equal dimensions, got {} and {}",
            psi.dims(),
            phi.dims()
        )));
    }
    for (name, s) in [("psi", psi), ("phi", phi)] {
        if (s.norm() - 1.0).abs() > STATE_TOL {
            return Err(Error::contract(format!("{name} is not normalized")));
        }
    }
    let dims = phi.dims();
    let (da, db) = (dims.dim_a(), dims.dim_b());
    let schmidt = schmidt_decompose(phi)?;
    let basis_a = complete_basis(schmidt.basis_a());
    let basis_b = complete_basis(schmidt.basis_b());

    // ψ_ij = ⟨a_i b_j|ψ⟩ = (A† Ψ B*)_ij
    let amp = ComplexMatrix::from_vec(da, db, psi.amplitudes().to_vec())?;
    let b_conj = ComplexMatrix::from_fn(db, db, |r, c| basis_b[(r, c)].conj());
    let coeff = &(&basis_a.adjoint() * &amp) * &b_conj;

    let k = schmidt.coefficients().len();
    let lambda = |i: usize| if i < k { schmidt.coefficients()[i] } else { 0.0 };

    let mut overlap_term = 0.0;
    let mut lambda_pairs = 0.0;
    for i in 0..k {
        for j in 0..k {
            if i != j {
                overlap_term += (coeff[(i, i)].conj() * coeff[(j, j)]).re * (lambda(i) * lambda(j)).sqrt();
                lambda_pairs += lambda(i) * lambda(j);
            }
        }
    }
    let mut marginal_term = 0.0;
    for i in 0..da {
        for j in 0..db {
            if i != j {
                marginal_term += coeff[(i, j)].norm_sqr() * lambda(i);
            }
        }
    }
    let mut minors = 0.0;
    for i in 0..da {
        for j in 0..da {
            if i == j {
                continue;
            }
            for p in 0..db {
                for q in 0..db {
                    if p != q {
                        minors += (coeff[(i, p)] * coeff[(j, q)] - coeff[(i, q)] * coeff[(j, p)]).norm_sqr();
                    }
                }
            }
        }
    }
    let lhs = 2.0 * (overlap_term - marginal_term);
    let rhs = std::f64::consts::SQRT_2 * lambda_pairs.sqrt() * minors.sqrt();
    Ok(PairInequalityReport {
        lhs,
        rhs,
        margin: rhs - lhs,
    })
}

/// Both sides of `Tr(ρ⊗ρ V_i) ≤ (Σ_k ‖φ_k‖² c(φ_k/‖φ_k‖))²` for a given
/// decomposition `ρ = Σ_k |φ_k⟩⟨φ_k|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompositionInequalityReport {
    pub bound_v1: f64,
    pub bound_v2: f64,
    pub average_concurrence: f64,
    pub margin_v1: f64,
    pub margin_v2: f64,
}

impl DecompositionInequalityReport {
    pub fn min_margin(&self) -> f64 {
        self.margin_v1.min(self.margin_v2)
    }
}

pub fn verify_decomposition_inequality(members: &[SubnormalizedState]) -> Result<DecompositionInequalityReport> {
    let rho = DensityMatrix::from_mixture(members)?;
    let (bound_v1, bound_v2) = bound_operator_form(&rho)?;
    let average_concurrence: f64 = members
        .iter()
        .map(|m| weighted_concurrence(m.amplitudes(), m.dims()))
        .sum();
    let sq = average_concurrence * average_concurrence;
    Ok(DecompositionInequalityReport {
        bound_v1,
        bound_v2,
        average_concurrence,
        margin_v1: sq - bound_v1,
        margin_v2: sq - bound_v2,
    })
}
