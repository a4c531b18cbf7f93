//! Ensemble scatter generation and its CSV form.
//!
//! Each row pairs a random state's mixedness `√(1 − Tr ρ²)` with the mean and
//! maximum of the two parity bounds and, optionally, the squared convex-roof
//! estimate. The CSV has one `#` header line, one row per state in index
//! order and a `#` footer with the fraction of rows whose mean bound is
//! positive. Floats carry 17 significant digits so rows round-trip exactly.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concurrence::witness;
use crate::error::{Error, Result};
use crate::linalg::BipartiteDims;
use crate::oracle::{roof_concurrence_with, RoofSettings, DEFAULT_MAX_SWEEPS, DEFAULT_RESTARTS};
use crate::rng::derive_seed;
use crate::states::{sample_ensemble_member, RandomEnsembleConfig};

pub const DEFAULT_COUNT: usize = 1000;

pub const SCATTER_HEADER: &str = "# state_index,mixedness,mean_bound,max_bound,oracle_sq,dims,seed";

/// Slack allowed when checking `max_bound ≤ oracle_sq`.
pub const DOMINANCE_SLACK: f64 = 2e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub restarts: usize,
    /// `None` means `rank²`.
    pub ensemble_size: Option<usize>,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            restarts: DEFAULT_RESTARTS,
            ensemble_size: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterConfig {
    pub ensemble: RandomEnsembleConfig,
    pub oracle: Option<OracleOptions>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterRow {
    pub state_index: usize,
    pub mixedness: f64,
    pub mean_bound: f64,
    pub max_bound: f64,
    pub oracle_sq: Option<f64>,
    pub dims: BipartiteDims,
    /// Stream seed the state was drawn from.
    pub seed: u64,
}

impl ScatterRow {
    pub fn dominance_holds(&self) -> bool {
        self.oracle_sq.is_none_or(|sq| self.max_bound <= sq + DOMINANCE_SLACK)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScatterTable {
    pub band: [f64; 2],
    pub rows: Vec<ScatterRow>,
}

impl ScatterTable {
    pub fn positive_fraction(&self) -> f64 {
        if self.rows.is_empty() {
            return 0.0;
        }
        let positive = self.rows.iter().filter(|r| r.mean_bound > 0.0).count();
        positive as f64 / self.rows.len() as f64
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(SCATTER_HEADER);
        out.push('\n');
        for r in &self.rows {
            let oracle = r.oracle_sq.map(fmt_f64).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.state_index,
                fmt_f64(r.mixedness),
                fmt_f64(r.mean_bound),
                fmt_f64(r.max_bound),
                oracle,
                r.dims,
                r.seed
            );
        }
        if !self.rows.is_empty() {
            let _ = writeln!(
                out,
                "# band=[{};{}] count={} positive_mean_bound_fraction={}",
                fmt_f64(self.band[0]),
                fmt_f64(self.band[1]),
                self.rows.len(),
                fmt_f64(self.positive_fraction())
            );
        }
        out
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h == SCATTER_HEADER => {}
            other => return Err(Error::Format(format!("expected scatter header, found {other:?}"))),
        }
        let mut rows = Vec::new();
        let mut band = None;
        for line in lines {
            if let Some(footer) = line.strip_prefix("# ") {
                band = Some(parse_footer_band(footer)?);
                continue;
            }
            rows.push(parse_row(line)?);
        }
        Ok(Self {
            band: band.unwrap_or([0.0, 0.0]),
            rows,
        })
    }
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(field: &str, name: &str) -> Result<f64> {
    field
        .parse()
        .map_err(|_| Error::Format(format!("column '{name}': cannot parse {field:?}")))
}

fn parse_row(line: &str) -> Result<ScatterRow> {
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != 7 {
        return Err(Error::Format(format!(
            "expected 7 columns, found {}: {line}",
            cols.len()
        )));
    }
    let dims = cols[5]
        .split_once('x')
        .and_then(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .ok_or_else(|| Error::Format(format!("column 'dims': cannot parse {:?}", cols[5])))?;
    Ok(ScatterRow {
        state_index: cols[0]
            .parse()
            .map_err(|_| Error::Format(format!("column 'state_index': cannot parse {:?}", cols[0])))?,
        mixedness: parse_f64(cols[1], "mixedness")?,
        mean_bound: parse_f64(cols[2], "mean_bound")?,
        max_bound: parse_f64(cols[3], "max_bound")?,
        oracle_sq: if cols[4].is_empty() {
            None
        } else {
            Some(parse_f64(cols[4], "oracle_sq")?)
        },
        dims: BipartiteDims::new(dims.0, dims.1)?,
        seed: cols[6]
            .parse()
            .map_err(|_| Error::Format(format!("column 'seed': cannot parse {:?}", cols[6])))?,
    })
}

fn parse_footer_band(footer: &str) -> Result<[f64; 2]> {
    let inner = footer
        .strip_prefix("band=[")
        .and_then(|s| s.split_once(']'))
        .map(|(b, _)| b)
        .ok_or_else(|| Error::Format(format!("malformed footer: {footer}")))?;
    let (lo, hi) = inner
        .split_once(';')
        .ok_or_else(|| Error::Format(format!("malformed footer band: {inner}")))?;
    Ok([parse_f64(lo, "band")?, parse_f64(hi, "band")?])
}

/// Rows for `cfg.ensemble.count` states. State `i` and its oracle run use
/// streams derived from `(seed, i)`; rows come back in index order.
pub fn scatter(cfg: &ScatterConfig) -> Result<ScatterTable> {
    cfg.ensemble.validate()?;
    let rows = (0..cfg.ensemble.count)
        .into_par_iter()
        .map(|i| scatter_row(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ScatterTable {
        band: cfg.ensemble.band,
        rows,
    })
}

pub fn scatter_row(cfg: &ScatterConfig, index: usize) -> Result<ScatterRow> {
    let ens = &cfg.ensemble;
    let rho = sample_ensemble_member(ens, index as u64)?;
    let report = witness(&rho)?;
    let state_seed = derive_seed(ens.seed, index as u64);
    let oracle_sq = match cfg.oracle {
        Some(opts) => {
            let est = roof_concurrence_with(
                &rho,
                &RoofSettings {
                    ensemble_size: opts.ensemble_size,
                    restarts: opts.restarts,
                    max_sweeps: DEFAULT_MAX_SWEEPS,
                    seed: state_seed,
                },
            )?;
            Some(est.value * est.value)
        }
        None => None,
    };
    Ok(ScatterRow {
        state_index: index,
        mixedness: rho.mixedness(),
        mean_bound: report.mean(),
        max_bound: report.best,
        oracle_sq,
        dims: ens.dims,
        seed: state_seed,
    })
}
