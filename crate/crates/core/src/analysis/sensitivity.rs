//! Logarithmic sensitivity of the reduced PageRank to one link weight.
//!
//! The entry `GR(c, p)` of the link `p → c` is scaled by `1 + δ` and column
//! `p` is renormalized to sum 1. With `P` the PageRank of `GR` and `P(δ)`
//! that of the perturbed matrix,
//!
//! ```text
//! D(i) ≈ d ln P(i) / dδ
//!      = [P(+δ)(i) − P(−δ)(i)] / (2 δ P(i))     (central, default)
//!      = [P(+δ)(i) − P(i)] / (δ P(i))            (forward)
//! ```

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::average::stationary;
use crate::error::{Error, Result};
use crate::google::PageRankConfig;
use crate::reduced::ReducedMatrixSet;

pub const DEFAULT_DELTA: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    #[default]
    Central,
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityConfig {
    pub delta: f64,
    pub estimator: Estimator,
    pub pagerank: PageRankConfig,
}

impl Default for SensitivityConfig {
    fn default() -> Self {
        SensitivityConfig {
            delta: DEFAULT_DELTA,
            estimator: Estimator::Central,
            pagerank: PageRankConfig {
                tol: 1e-14,
                max_iter: 100_000,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityResult {
    /// `(source, destination)` of the varied link.
    pub link: (String, String),
    pub delta: f64,
    pub names: Vec<String>,
    pub d: Vec<f64>,
    /// Set when the link has zero weight, so there is nothing to vary.
    pub degenerate: bool,
}

impl SensitivityResult {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.names.iter().position(|n| n == name).map(|i| self.d[i])
    }
}

/// `GR` with link `p → c` scaled by `1 + delta` and column `p` renormalized.
pub fn perturb_link(gr: &DMatrix<f64>, p: usize, c: usize, delta: f64) -> DMatrix<f64> {
    let mut m = gr.clone();
    m[(c, p)] *= 1.0 + delta;
    let sum = m.column(p).sum();
    m.column_mut(p).iter_mut().for_each(|x| *x /= sum);
    m
}

fn check_delta(cfg: &SensitivityConfig) -> Result<()> {
    let ok = match cfg.estimator {
        Estimator::Central => cfg.delta.abs() < 1.0,
        Estimator::Forward => cfg.delta > -1.0,
    };
    if !ok || !cfg.delta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "delta {} leaves the link weight non-positive",
            cfg.delta
        )));
    }
    Ok(())
}

fn sensitivity_at(
    rset: &ReducedMatrixSet,
    base: &[f64],
    p: usize,
    c: usize,
    cfg: &SensitivityConfig,
) -> Result<(Vec<f64>, bool)> {
    let nr = rset.nr();
    if cfg.delta == 0.0 {
        return Ok((vec![0.0; nr], false));
    }
    if rset.gr[(c, p)] == 0.0 {
        log::warn!(
            "link {} -> {} has zero weight; sensitivity is identically zero",
            rset.names[p],
            rset.names[c]
        );
        return Ok((vec![0.0; nr], true));
    }
    let solve = |delta: f64| -> Result<Vec<f64>> {
        Ok(stationary(&perturb_link(&rset.gr, p, c, delta), &cfg.pagerank)?.probabilities)
    };
    let plus = solve(cfg.delta)?;
    let (minus, span) = match cfg.estimator {
        Estimator::Central => (solve(-cfg.delta)?, 2.0 * cfg.delta),
        Estimator::Forward => (base.to_vec(), cfg.delta),
    };
    let d = (0..nr)
        .map(|i| {
            if base[i] > 0.0 {
                (plus[i] - minus[i]) / (span * base[i])
            } else {
                0.0
            }
        })
        .collect();
    Ok((d, false))
}

pub fn sensitivity(rset: &ReducedMatrixSet, from: &str, to: &str, cfg: &SensitivityConfig) -> Result<SensitivityResult> {
    check_delta(cfg)?;
    let p = rset.position_or_err(from)?;
    let c = rset.position_or_err(to)?;
    let base = stationary(&rset.gr, &cfg.pagerank)?.probabilities;
    let (d, degenerate) = sensitivity_at(rset, &base, p, c, cfg)?;
    Ok(SensitivityResult {
        link: (from.to_string(), to.to_string()),
        delta: cfg.delta,
        names: rset.names.clone(),
        d,
        degenerate,
    })
}

fn two_way_at(rset: &ReducedMatrixSet, base: &[f64], p: usize, c: usize, cfg: &SensitivityConfig) -> Result<f64> {
    let (forward, _) = sensitivity_at(rset, base, p, c, cfg)?;
    let (backward, _) = sensitivity_at(rset, base, c, p, cfg)?;
    Ok(forward[c] + backward[c])
}

/// `D_{p→c}(c) + D_{c→p}(c)`.
pub fn two_way_sensitivity(rset: &ReducedMatrixSet, p: &str, c: &str, cfg: &SensitivityConfig) -> Result<f64> {
    check_delta(cfg)?;
    let pi = rset.position_or_err(p)?;
    let ci = rset.position_or_err(c)?;
    let base = stationary(&rset.gr, &cfg.pagerank)?.probabilities;
    two_way_at(rset, &base, pi, ci, cfg)
}

/// Two-way sensitivities with rows indexed by `cs` and columns by `ps`.
pub fn diagonal_sensitivity_matrix<S: AsRef<str> + Sync>(
    rset: &ReducedMatrixSet,
    ps: &[S],
    cs: &[S],
    cfg: &SensitivityConfig,
) -> Result<DMatrix<f64>> {
    check_delta(cfg)?;
    let resolve = |names: &[S]| -> Result<Vec<usize>> {
        let mut misses = Vec::new();
        let idx: Vec<usize> = names
            .iter()
            .filter_map(|n| {
                let found = rset.position(n.as_ref());
                if found.is_none() {
                    misses.push(n.as_ref().to_string());
                }
                found
            })
            .collect();
        if misses.is_empty() {
            Ok(idx)
        } else {
            Err(Error::Unresolved(misses))
        }
    };
    let pi = resolve(ps)?;
    let ci = resolve(cs)?;
    let base = stationary(&rset.gr, &cfg.pagerank)?.probabilities;
    let cells: Vec<(usize, usize)> = (0..ci.len())
        .flat_map(|r| (0..pi.len()).map(move |col| (r, col)))
        .collect();
    let values: Vec<f64> = cells
        .par_iter()
        .map(|&(r, col)| two_way_at(rset, &base, pi[col], ci[r], cfg))
        .collect::<Result<_>>()?;
    Ok(DMatrix::from_row_iterator(ci.len(), pi.len(), values))
}
