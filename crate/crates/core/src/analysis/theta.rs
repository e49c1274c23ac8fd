//! Per-edition subset rankings and their multi-edition Θ aggregation.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::google::PageRankVector;
use crate::graph::NodeSubset;

pub const DEFAULT_THETA_CUTOFF: u32 = 100;

/// Ranks of named items within one edition, 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditionRankTable {
    pub edition_tag: String,
    pub entries: BTreeMap<String, u32>,
}

impl EditionRankTable {
    /// Builds a table from names listed best-first.
    pub fn from_ordered<S: Into<String>>(edition_tag: &str, names: impl IntoIterator<Item = S>) -> Self {
        let entries = names
            .into_iter()
            .enumerate()
            .map(|(i, n)| (n.into(), i as u32 + 1))
            .collect();
        EditionRankTable {
            edition_tag: edition_tag.to_string(),
            entries,
        }
    }

    pub fn rank(&self, name: &str) -> Option<u32> {
        self.entries.get(name).copied()
    }

    /// Names ordered by rank.
    pub fn ordered(&self) -> Vec<(&str, u32)> {
        let mut v: Vec<_> = self.entries.iter().map(|(n, &r)| (n.as_str(), r)).collect();
        v.sort_by_key(|&(_, r)| r);
        v
    }
}

/// Ranks the subset members by their global PageRank probability.
pub fn local_subset_ranking(pr: &PageRankVector, subset: &NodeSubset, edition_tag: &str) -> EditionRankTable {
    let mut order: Vec<usize> = (0..subset.len()).collect();
    let idx = subset.indices();
    order.sort_by(|&a, &b| {
        let (na, nb) = (idx[a], idx[b]);
        pr.probabilities[nb as usize]
            .total_cmp(&pr.probabilities[na as usize])
            .then(na.cmp(&nb))
    });
    EditionRankTable::from_ordered(edition_tag, order.into_iter().map(|i| subset.names()[i].clone()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaEntry {
    pub name: String,
    pub theta: u64,
    /// Rank in each input table, in input order.
    pub ranks: Vec<Option<u32>>,
}

/// `Θ = Σ_E (cutoff + 1 − R_E)` over editions with `R_E ≤ cutoff`, sorted by
/// decreasing Θ with names as tie-break.
pub fn theta_score(tables: &[EditionRankTable], cutoff: u32) -> Vec<ThetaEntry> {
    let names: BTreeSet<&str> = tables
        .iter()
        .flat_map(|t| t.entries.keys().map(String::as_str))
        .collect();
    let mut out: Vec<ThetaEntry> = names
        .into_iter()
        .map(|name| {
            let ranks: Vec<Option<u32>> = tables.iter().map(|t| t.rank(name)).collect();
            let theta = ranks
                .iter()
                .flatten()
                .filter(|&&r| r >= 1 && r <= cutoff)
                .map(|&r| (cutoff + 1 - r) as u64)
                .sum();
            ThetaEntry {
                name: name.to_string(),
                theta,
                ranks,
            }
        })
        .collect();
    out.sort_by(|a, b| b.theta.cmp(&a.theta).then_with(|| a.name.cmp(&b.name)));
    out
}
