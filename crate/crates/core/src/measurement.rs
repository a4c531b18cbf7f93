//! Joint parity measurement on `ρ⊗ρ` and its finite-shot simulation.
//!
//! One shot records the exchange parity of the two A-copies and of the two
//! B-copies. With outcome probabilities `p(s₁,s₂) = Tr(ρ⊗ρ P(s₁,s₂))`,
//! `Tr(ρ⊗ρ V₁) = 4(p₋₋ − p₊₋)` and `Tr(ρ⊗ρ V₂) = 4(p₋₋ − p₋₊)`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::copyspace::{copy_observable, ObservableLabel, Parity};
use crate::error::{Error, Result};
use crate::linalg::BipartiteDims;
use crate::rng::stream;
use crate::states::DensityMatrix;

/// Negative probabilities down to this value are clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// Outcome probabilities; the first slot is the A-copies parity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParityDistribution {
    pub p_mm: f64,
    pub p_mp: f64,
    pub p_pm: f64,
    pub p_pp: f64,
}

impl ParityDistribution {
    /// Clamps round-off outside `[0, 1]` and renormalizes; larger violations
    /// are an error.
    pub fn new(p_mm: f64, p_mp: f64, p_pm: f64, p_pp: f64) -> Result<Self> {
        let raw = [p_mm, p_mp, p_pm, p_pp];
        for (name, &p) in ["p_mm", "p_mp", "p_pm", "p_pp"].iter().zip(&raw) {
            if !(-CLAMP_TOL..=1.0 + CLAMP_TOL).contains(&p) {
                return Err(Error::Numerical(format!("{name} = {p:e} is not a probability")));
            }
        }
        let clamped = raw.map(|p| p.clamp(0.0, 1.0));
        let sum: f64 = clamped.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Numerical(format!("parity probabilities sum to {sum}")));
        }
        let [p_mm, p_mp, p_pm, p_pp] = clamped.map(|p| p / sum);
        Ok(Self { p_mm, p_mp, p_pm, p_pp })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.p_mm, self.p_mp, self.p_pm, self.p_pp]
    }

    pub fn v1(&self) -> f64 {
        4.0 * (self.p_mm - self.p_pm)
    }

    pub fn v2(&self) -> f64 {
        4.0 * (self.p_mm - self.p_mp)
    }
}

pub fn parity_distribution(rho: &DensityMatrix) -> Result<ParityDistribution> {
    use Parity::*;
    let p = |a, b| -> Result<f64> {
        Ok(copy_observable(rho.dims(), ObservableLabel::Parity(a, b))?
            .expectation(rho)
            .re)
    };
    ParityDistribution::new(p(Minus, Minus)?, p(Minus, Plus)?, p(Plus, Minus)?, p(Plus, Plus)?)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub shots: u64,
    /// Outcome counts in the order (−,−), (−,+), (+,−), (+,+).
    pub counts: [u64; 4],
    pub v1_hat: f64,
    pub v2_hat: f64,
    pub std_err_v1: f64,
    pub std_err_v2: f64,
    pub seed: u64,
}

pub const SHOT_CSV_HEADER: &str = "shots,c_mm,c_mp,c_pm,c_pp,v1_hat,v2_hat,se_v1,se_v2,seed";

impl ShotEstimate {
    /// Estimators and delta-method standard errors from raw counts.
    pub fn from_counts(counts: [u64; 4], seed: u64) -> Result<Self> {
        let shots: u64 = counts.iter().sum();
        if shots == 0 {
            return Err(Error::contract("at least one shot is required"));
        }
        let n = shots as f64;
        let f = counts.map(|c| c as f64 / n);
        let (f_mm, f_mp, f_pm) = (f[0], f[1], f[2]);
        let se = |a: f64, b: f64| 4.0 * ((a + b - (a - b).powi(2)).max(0.0) / n).sqrt();
        Ok(Self {
            shots,
            counts,
            v1_hat: 4.0 * (counts[0] as f64 - counts[2] as f64) / n,
            v2_hat: 4.0 * (counts[0] as f64 - counts[1] as f64) / n,
            std_err_v1: se(f_mm, f_pm),
            std_err_v2: se(f_mm, f_mp),
            seed,
        })
    }

    pub fn to_csv_row(&self) -> String {
        let [c_mm, c_mp, c_pm, c_pp] = self.counts;
        format!(
            "{},{c_mm},{c_mp},{c_pm},{c_pp},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.shots, self.v1_hat, self.v2_hat, self.std_err_v1, self.std_err_v2, self.seed
        )
    }
}

/// Multinomial draw of `shots` outcomes by inverse CDF, seeded by `seed`.
pub fn sample_shots(dist: &ParityDistribution, shots: u64, seed: u64) -> Result<ShotEstimate> {
    if shots == 0 {
        return Err(Error::contract("at least one shot is required"));
    }
    let mut rng = stream(seed);
    let counts = draw_counts(dist, shots, &mut rng);
    ShotEstimate::from_counts(counts, seed)
}

pub fn draw_counts<R: Rng + ?Sized>(dist: &ParityDistribution, shots: u64, rng: &mut R) -> [u64; 4] {
    let p = dist.as_array();
    let cdf = [p[0], p[0] + p[1], p[0] + p[1] + p[2]];
    let mut counts = [0u64; 4];
    for _ in 0..shots {
        let u: f64 = rng.random();
        let k = cdf.iter().position(|&c| u < c).unwrap_or(3);
        counts[k] += 1;
    }
    counts
}

/// Observables needed for the parity protocol versus full state tomography.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolCost {
    /// One parity observable per subsystem, assuming a parity measurement is a
    /// single observable irrespective of dimension. Counted as one joint
    /// four-outcome measurement per copy pair, the figure would be 1.
    pub parity_observables: u64,
    /// `(dim_a·dim_b)² − 1`, i.e. `d⁴ − 1` for two `d`-level subsystems.
    pub tomography_observables: u64,
}

pub fn protocol_cost(dims: BipartiteDims) -> ProtocolCost {
    let n = dims.total() as u64;
    ProtocolCost {
        parity_observables: 2,
        tomography_observables: n * n - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concurrence::bound_purity_form;
    use crate::rng::stream;
    use crate::states::{gaussian_vector, random_density, random_pure, werner_state, PureState};

    fn d(a: usize, b: usize) -> BipartiteDims {
        BipartiteDims::new(a, b).unwrap()
    }

    #[test]
    fn distribution_of_bell_state() {
        let bell = PureState::maximally_entangled(2).unwrap().density();
        let p = parity_distribution(&bell).unwrap();
        assert!((p.p_mm - 0.25).abs() < 1e-12);
        assert!(p.p_mp.abs() < 1e-12 && p.p_pm.abs() < 1e-12);
    }

    #[test]
    fn distribution_of_product_state() {
        let mut rng = stream(151);
        let prod = PureState::product(&gaussian_vector(2, &mut rng), &gaussian_vector(3, &mut rng)).unwrap();
        let p = parity_distribution(&prod.density()).unwrap();
        assert!(p.p_mm.abs() < 1e-12 && p.p_mp.abs() < 1e-12 && p.p_pm.abs() < 1e-12);
        assert!((p.p_pp - 1.0).abs() < 1e-12);
    }

    #[test]
    fn distribution_of_maximally_mixed_qubits() {
        let p = parity_distribution(&DensityMatrix::maximally_mixed(d(2, 2))).unwrap();
        // Tr P(−,−) = 1 for 2×2, divided by 16
        assert!((p.p_mm - 1.0 / 16.0).abs() < 1e-12);
        assert!((p.v1() + 0.5).abs() < 1e-12);
    }

    #[test]
    fn parity_identities_against_purity_form() {
        let mut rng = stream(157);
        for dims in [d(2, 2), d(2, 3), d(3, 3)] {
            for rank in [1, 2, dims.total()] {
                let rho = random_density(dims, rank, &mut rng);
                let p = parity_distribution(&rho).unwrap();
                let (v1, v2) = bound_purity_form(&rho);
                assert!((4.0 * p.p_mm - (v1 + 4.0 * p.p_pm)).abs() < 1e-10);
                assert!((4.0 * p.p_mm - (v2 + 4.0 * p.p_mp)).abs() < 1e-10);
            }
            let psi = random_pure(dims, &mut rng);
            let p = parity_distribution(&psi.density()).unwrap();
            assert!(p.p_mp.abs() < 1e-10 && p.p_pm.abs() < 1e-10);
        }
    }

    #[test]
    fn clamping_and_rejection() {
        let p = ParityDistribution::new(-1e-13, 0.5, 0.5, 0.0).unwrap();
        assert_eq!(p.p_mm, 0.0);
        assert!(ParityDistribution::new(-1e-6, 0.5, 0.5, 0.0).is_err());
        assert!(ParityDistribution::new(0.5, 0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn degenerate_distribution_has_zero_error() {
        let dist = ParityDistribution::new(1.0, 0.0, 0.0, 0.0).unwrap();
        let est = sample_shots(&dist, 1000, 3).unwrap();
        assert_eq!(est.v1_hat, 4.0);
        assert_eq!(est.v2_hat, 4.0);
        assert_eq!(est.std_err_v1, 0.0);
        assert_eq!(est.std_err_v2, 0.0);
    }

    #[test]
    fn single_shot_estimator_domain() {
        let dist = parity_distribution(&werner_state(0.6).unwrap()).unwrap();
        for seed in 0..20 {
            let est = sample_shots(&dist, 1, seed).unwrap();
            assert_eq!(est.counts.iter().sum::<u64>(), 1);
            assert!([-4.0, 0.0, 4.0].contains(&est.v1_hat));
            assert!([-4.0, 0.0, 4.0].contains(&est.v2_hat));
        }
        assert!(sample_shots(&dist, 0, 0).is_err());
    }

    #[test]
    fn werner_estimate_within_five_standard_errors() {
        let dist = parity_distribution(&werner_state(0.8).unwrap()).unwrap();
        let est = sample_shots(&dist, 1_000_000, 2024).unwrap();
        assert!((est.v1_hat - 0.46).abs() <= 5.0 * est.std_err_v1);
        assert!((est.v2_hat - 0.46).abs() <= 5.0 * est.std_err_v2);
    }

    #[test]
    fn sampling_is_deterministic() {
        let dist = parity_distribution(&werner_state(0.3).unwrap()).unwrap();
        assert_eq!(
            sample_shots(&dist, 5000, 9).unwrap(),
            sample_shots(&dist, 5000, 9).unwrap()
        );
    }

    #[test]
    fn csv_row_layout() {
        let est = ShotEstimate::from_counts([3, 1, 0, 6], 42).unwrap();
        let row = est.to_csv_row();
        assert_eq!(row.split(',').count(), SHOT_CSV_HEADER.split(',').count());
        assert!(row.starts_with("10,3,1,0,6,"));
        assert!(row.ends_with(",42"));
    }

    #[test]
    fn protocol_cost_counts() {
        let c = protocol_cost(d(2, 2));
        assert_eq!((c.parity_observables, c.tomography_observables), (2, 15));
        let c = protocol_cost(d(3, 3));
        assert_eq!((c.parity_observables, c.tomography_observables), (2, 80));
        let c = protocol_cost(d(2, 5));
        assert_eq!((c.parity_observables, c.tomography_observables), (2, 99));
    }

    fn mean_var(xs: &[f64]) -> (f64, f64) {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        (mean, xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0))
    }

    fn v1_runs(dist: &ParityDistribution, shots: u64, count: u64, master: u64) -> Vec<f64> {
        (0..count)
            .map(|i| {
                sample_shots(dist, shots, crate::rng::derive_seed(master, i))
                    .unwrap()
                    .v1_hat
            })
            .collect()
    }

    #[test]
    fn estimator_is_unbiased() {
        let dist = parity_distribution(&werner_state(0.8).unwrap()).unwrap();
        let (mean, var) = mean_var(&v1_runs(&dist, 10_000, 200, 31));
        assert!((mean - dist.v1()).abs() <= 5.0 * (var / 200.0).sqrt());
    }

    #[test]
    fn variance_scales_inversely_with_shots() {
        let dist = parity_distribution(&werner_state(0.8).unwrap()).unwrap();
        let (_, small) = mean_var(&v1_runs(&dist, 1_000, 300, 37));
        let (_, large) = mean_var(&v1_runs(&dist, 100_000, 300, 41));
        let ratio = small / large;
        assert!((60.0..=170.0).contains(&ratio), "ratio {ratio}");
    }
}
