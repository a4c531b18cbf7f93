//! Convex-roof upper estimate of the concurrence.
//!
//! Every pure-state ensemble of `ρ` is `φ_k = Σ_j √μ_j |e_j⟩ T_jk` for a
//! co-isometry `T` (`T T† = I`), with `(μ_j, |e_j⟩)` the eigenpairs of `ρ`.
//! The optimizer minimizes the average concurrence `Σ_k ‖φ_k‖² c(φ̂_k)` over
//! `T` by sweeping complex Givens rotations between pairs of ensemble
//! members, so the co-isometry constraint holds exactly at every step. The
//! result is an upper estimate of `c(ρ)`, never the exact roof.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, C64, ZERO};
use crate::rng::indexed_stream;
use crate::states::{haar_unitary, DensityMatrix, SubnormalizedState};

/// Eigenvalues above this count towards the rank of `ρ`.
pub const RANK_TOL: f64 = 1e-10;

pub const DEFAULT_RESTARTS: usize = 20;
pub const DEFAULT_MAX_SWEEPS: usize = 500;

/// Sweep-level relative improvement below which a restart has converged.
pub const CONVERGENCE_TOL: f64 = 1e-8;

/// Averages below this are treated as converged at zero.
const ZERO_FLOOR: f64 = 1e-12;

const GOLDEN_ITERS: usize = 40;
const SCAN_POINTS: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoofEstimate {
    pub value: f64,
    pub ensemble_size: usize,
    pub restarts_used: usize,
    pub converged: bool,
    pub final_gradient_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoofSettings {
    /// Defaults to `rank²`.
    pub ensemble_size: Option<usize>,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub seed: u64,
}

impl Default for RoofSettings {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: DEFAULT_RESTARTS,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            seed: 0,
        }
    }
}

impl RoofSettings {
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// `W` with columns `√μ_j |e_j⟩` for the eigenvalues above [`RANK_TOL`].
fn weighted_eigenbasis(rho: &DensityMatrix) -> ComplexMatrix {
    let eig = rho.eigen();
    let n = rho.dims().total();
    let support: Vec<usize> = (0..n).rev().filter(|&j| eig.values[j] > RANK_TOL).collect();
    ComplexMatrix::from_fn(n, support.len(), |r, c| {
        let j = support[c];
        eig.vectors[(r, j)] * eig.values[j].sqrt()
    })
}

/// The ensemble `{W T e_k}` realized by a `rank × m` co-isometry `T`.
pub fn ensemble_from_isometry(rho: &DensityMatrix, t: &ComplexMatrix) -> Result<Vec<SubnormalizedState>> {
    let w = weighted_eigenbasis(rho);
    if t.rows() != w.cols() {
        return Err(Error::contract(format!(
            "mixing matrix has {} rows but rank(ρ) = {}",
            t.rows(),
            w.cols()
        )));
    }
    let dev = (t * &t.adjoint()).max_abs_diff(&ComplexMatrix::identity(t.rows()));
    if dev > 1e-9 {
        return Err(Error::contract(format!(
            "mixing matrix is not a co-isometry (max |T T† − I| = {dev:.3e})"
        )));
    }
    let phis = &w * t;
    (0..phis.cols())
        .map(|k| SubnormalizedState::new(rho.dims(), phis.col(k)))
        .collect()
}

/// Upper estimate of `c(ρ)` using default sweep limits.
pub fn roof_concurrence(rho: &DensityMatrix, ensemble_size: usize, restarts: usize, seed: u64) -> Result<RoofEstimate> {
    roof_concurrence_with(
        rho,
        &RoofSettings {
            ensemble_size: Some(ensemble_size),
            restarts,
            max_sweeps: DEFAULT_MAX_SWEEPS,
            seed,
        },
    )
}

/// Runs `settings.restarts` independent descents (restart `r` draws from the
/// stream `(seed, r)`) and keeps the smallest average.
pub fn roof_concurrence_with(rho: &DensityMatrix, settings: &RoofSettings) -> Result<RoofEstimate> {
    let w = weighted_eigenbasis(rho);
    let rank = w.cols();
    let m = settings.ensemble_size.unwrap_or(rank * rank);
    if m < rank {
        return Err(Error::contract(format!("ensemble size {m} is below rank(ρ) = {rank}")));
    }
    if settings.restarts == 0 {
        return Err(Error::contract("at least one restart is required"));
    }
    let layout = Layout::new(rho);
    let runs: Vec<Descent> = (0..settings.restarts)
        .into_par_iter()
        .map(|r| {
            let t = initial_mixing(rank, m, settings.seed, r as u64);
            let phis = &w * &t;
            let members = (0..m).map(|k| layout.member(&phis.col(k))).collect();
            descend(members, &layout, settings.max_sweeps)
        })
        .collect();
    let best = runs
        .iter()
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one restart");
    Ok(RoofEstimate {
        value: best.value.max(0.0),
        ensemble_size: m,
        restarts_used: settings.restarts,
        converged: best.converged,
        final_gradient_norm: best.gradient_norm,
    })
}

/// Restart 0 starts from the eigen-ensemble padded with zero members; the
/// others from the first `rank` rows of a Haar unitary.
fn initial_mixing(rank: usize, m: usize, seed: u64, restart: u64) -> ComplexMatrix {
    if restart == 0 {
        return ComplexMatrix::from_fn(rank, m, |r, c| if r == c { C64::new(1.0, 0.0) } else { ZERO });
    }
    let mut rng = indexed_stream(seed, restart);
    let u = haar_unitary(m, &mut rng);
    ComplexMatrix::from_fn(rank, m, |r, c| u[(r, c)])
}

/// Member amplitudes reshaped so that rows index the smaller subsystem; the
/// marginal on that subsystem is then `M M†`.
struct Layout {
    rows: usize,
    cols: usize,
    transpose: bool,
}

impl Layout {
    fn new(rho: &DensityMatrix) -> Self {
        let dims = rho.dims();
        let (da, db) = (dims.dim_a(), dims.dim_b());
        if da <= db {
            Self {
                rows: da,
                cols: db,
                transpose: false,
            }
        } else {
            Self {
                rows: db,
                cols: da,
                transpose: true,
            }
        }
    }

    fn member(&self, v: &[C64]) -> Vec<C64> {
        if !self.transpose {
            return v.to_vec();
        }
        let (da, db) = (self.cols, self.rows);
        let mut out = vec![ZERO; v.len()];
        for a in 0..da {
            for b in 0..db {
                out[b * da + a] = v[a * db + b];
            }
        }
        out
    }

    /// `M_x M_y†` (rows × rows), row-major.
    fn gram(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let (r, c) = (self.rows, self.cols);
        let mut g = vec![ZERO; r * r];
        for i in 0..r {
            for j in 0..r {
                g[i * r + j] = (0..c).map(|k| x[i * c + k] * y[j * c + k].conj()).sum();
            }
        }
        g
    }

    /// `√(2((Tr G)² − Tr G²))` with `G = M M†`.
    fn value(&self, gram: &[C64]) -> f64 {
        self.smoothed(gram, 0.0)
    }

    /// `‖φ‖²·√(c² + ε²)`, the member value with the kink at `c = 0` rounded off.
    fn smoothed(&self, gram: &[C64], eps2: f64) -> f64 {
        let t = tr(gram);
        ((2.0 * (t * t - tr_prod(gram, gram))).max(0.0) + eps2 * t * t).sqrt()
    }
}

fn tr(x: &[C64]) -> f64 {
    let r = (x.len() as f64).sqrt() as usize;
    (0..r).map(|i| x[i * r + i].re).sum()
}

/// `Tr(XY)` for Hermitian `X`, `Y`.
fn tr_prod(x: &[C64], y: &[C64]) -> f64 {
    let r = (x.len() as f64).sqrt() as usize;
    let mut acc = 0.0;
    for i in 0..r {
        for j in 0..r {
            acc += (x[i * r + j] * y[j * r + i]).re;
        }
    }
    acc
}

/// Average concurrence of the pair `(φ_k, φ_l)` after the rotation
/// `φ_k ← cosθ φ_k − e^{iα} sinθ φ_l`, `φ_l ← e^{−iα} sinθ φ_k + cosθ φ_l`.
///
/// With `X = M_k M_k†`, `Y = M_l M_l†` and `K` the Hermitian cross term, the
/// rotated marginals are `c²X + s²Y ± cs K`, so every quantity entering the
/// concurrence is a trigonometric polynomial in θ with the coefficients below.
struct PairObjective {
    eps2: f64,
    x: f64,
    y: f64,
    k: f64,
    xx: f64,
    yy: f64,
    xy: f64,
    kk: f64,
    xk: f64,
    yk: f64,
}

impl PairObjective {
    fn new(
        layout: &Layout,
        gram_k: &[C64],
        gram_l: &[C64],
        phi_k: &[C64],
        phi_l: &[C64],
        alpha: f64,
        eps2: f64,
    ) -> Self {
        // cross term for a = φ_k, b = −e^{iα} φ_l: K = M_a M_b† + h.c.
        let z0 = layout.gram(phi_k, phi_l);
        let phase = -C64::from_polar(1.0, -alpha);
        let r = layout.rows;
        let kmat: Vec<C64> = (0..r * r)
            .map(|idx| {
                let (i, j) = (idx / r, idx % r);
                phase * z0[i * r + j] + (phase * z0[j * r + i]).conj()
            })
            .collect();
        Self {
            eps2,
            x: tr(gram_k),
            y: tr(gram_l),
            k: tr(&kmat),
            xx: tr_prod(gram_k, gram_k),
            yy: tr_prod(gram_l, gram_l),
            xy: tr_prod(gram_k, gram_l),
            kk: tr_prod(&kmat, &kmat),
            xk: tr_prod(gram_k, &kmat),
            yk: tr_prod(gram_l, &kmat),
        }
    }

    /// `√(2(n⁴ − Tr ρ²))` for `ρ = p²X + q²Y + pq·sign·K`.
    fn member(&self, p: f64, q: f64, sign: f64) -> f64 {
        let n2 = p * p * self.x + q * q * self.y + sign * p * q * self.k;
        let pur = p.powi(4) * self.xx
            + q.powi(4) * self.yy
            + p * p * q * q * (2.0 * self.xy + self.kk)
            + sign * 2.0 * p.powi(3) * q * self.xk
            + sign * 2.0 * p * q.powi(3) * self.yk;
        ((2.0 * (n2 * n2 - pur)).max(0.0) + self.eps2 * n2 * n2).sqrt()
    }

    fn eval(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        // rotated φ_k = c·a + s·b; rotated φ_l = s·(e^{−iα}φ_k) + c·φ_l with cross term −K
        self.member(c, s, 1.0) + self.member(s, c, -1.0)
    }
}

/// Minimum of `f` on `[−π/2, π/2]`: coarse scan, then golden-section refinement
/// of the best cell.
fn line_search(f: impl Fn(f64) -> f64) -> (f64, f64) {
    use std::f64::consts::FRAC_PI_2;
    let step = 2.0 * FRAC_PI_2 / SCAN_POINTS as f64;
    let mut best = (0.0, f(0.0));
    for i in 0..SCAN_POINTS {
        let t = -FRAC_PI_2 + step * (i as f64 + 0.5);
        let v = f(t);
        if v < best.1 {
            best = (t, v);
        }
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERS {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    for (t, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (t, v);
        }
    }
    best
}

struct Descent {
    value: f64,
    converged: bool,
    gradient_norm: f64,
}

const PHASES: [f64; 2] = [0.0, std::f64::consts::FRAC_PI_2];

/// Smoothing levels `ε` visited before the exact objective (`ε = 0`).
const SMOOTHING: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

/// Relative sweep improvement that ends a smoothed stage.
const STAGE_TOL: f64 = 1e-6;

fn descend(mut members: Vec<Vec<C64>>, layout: &Layout, max_sweeps: usize) -> Descent {
    let m = members.len();
    let mut grams: Vec<Vec<C64>> = members.iter().map(|v| layout.gram(v, v)).collect();
    let exact = |grams: &[Vec<C64>]| grams.iter().map(|g| layout.value(g)).sum::<f64>();
    let mut converged = m == 1 || exact(&grams) < ZERO_FLOOR;

    let mut sweeps = 0;
    if !converged {
        for eps in SMOOTHING {
            let stage_budget = max_sweeps / 10;
            let mut stage_sweeps = 0;
            while stage_sweeps < stage_budget && sweeps < max_sweeps {
                stage_sweeps += 1;
                sweeps += 1;
                let (before, after) = sweep(&mut members, &mut grams, layout, eps * eps);
                if before - after <= STAGE_TOL * before {
                    break;
                }
            }
        }
    }
    while !converged && sweeps < max_sweeps {
        sweeps += 1;
        let (before, after) = sweep(&mut members, &mut grams, layout, 0.0);
        if before - after <= CONVERGENCE_TOL * before || after < ZERO_FLOOR {
            converged = true;
        }
    }

    Descent {
        value: exact(&grams),
        converged,
        gradient_norm: gradient_norm(&members, &grams, layout),
    }
}

/// One pass of line-searched rotations over every pair and both phases;
/// returns the smoothed objective before and after.
fn sweep(members: &mut [Vec<C64>], grams: &mut [Vec<C64>], layout: &Layout, eps2: f64) -> (f64, f64) {
    let m = members.len();
    let mut values: Vec<f64> = grams.iter().map(|g| layout.smoothed(g, eps2)).collect();
    let before: f64 = values.iter().sum();
    for k in 0..m {
        for l in (k + 1)..m {
            for &alpha in &PHASES {
                let obj = PairObjective::new(layout, &grams[k], &grams[l], &members[k], &members[l], alpha, eps2);
                let current = values[k] + values[l];
                let (theta, best) = line_search(|t| obj.eval(t));
                if best < current - 1e-15 * current.max(1.0) {
                    rotate(members, k, l, theta, alpha);
                    grams[k] = layout.gram(&members[k], &members[k]);
                    grams[l] = layout.gram(&members[l], &members[l]);
                    values[k] = layout.smoothed(&grams[k], eps2);
                    values[l] = layout.smoothed(&grams[l], eps2);
                }
            }
        }
    }
    (before, values.iter().sum())
}

fn rotate(members: &mut [Vec<C64>], k: usize, l: usize, theta: f64, alpha: f64) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, alpha);
    for idx in 0..members[k].len() {
        let (a, b) = (members[k][idx], members[l][idx]);
        members[k][idx] = a * c - e * s * b;
        members[l][idx] = e.conj() * s * a + b * c;
    }
}

/// Norm of the central-difference derivatives of the objective along every
/// pairwise rotation generator at the final ensemble.
fn gradient_norm(members: &[Vec<C64>], grams: &[Vec<C64>], layout: &Layout) -> f64 {
    let h = 1e-6;
    let m = members.len();
    let mut acc = 0.0;
    for k in 0..m {
        for l in (k + 1)..m {
            for &alpha in &PHASES {
                let obj = PairObjective::new(layout, &grams[k], &grams[l], &members[k], &members[l], alpha, 0.0);
                let g = (obj.eval(h) - obj.eval(-h)) / (2.0 * h);
                acc += g * g;
            }
        }
    }
    acc.sqrt()
}
