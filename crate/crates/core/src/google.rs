//! Implicit Google matrix and PageRank by power iteration.
//!
//! The operator is never materialized. For a vector `v` it computes
//!
//! ```text
//! w_i = α Σ_{j→i} v_j / k_out(j)  +  α D / N  +  (1 − α) T / N
//! ```
//!
//! where `D` is the mass sitting on dangling nodes and `T = Σ v_j`. The two
//! scalar terms are the dangling and teleportation columns folded into
//! accumulators, so one application costs O(N + E).

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, NodeId};

pub const DEFAULT_ALPHA: f64 = 0.85;

const PAR_MIN_LEN: usize = 4096;

/// How operator applications are scheduled.
///
/// Row sums are always evaluated by a single thread in in-link order, so the
/// only difference between modes is the scalar reductions: `deterministic`
/// sums them sequentially, otherwise rayon chooses the association.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Execution {
    pub parallel: bool,
    pub deterministic: bool,
}

impl Default for Execution {
    fn default() -> Self {
        Execution {
            parallel: true,
            deterministic: true,
        }
    }
}

impl Execution {
    pub const SEQUENTIAL: Execution = Execution {
        parallel: false,
        deterministic: true,
    };

    fn sum(&self, xs: &[f64]) -> f64 {
        if self.parallel && !self.deterministic {
            xs.par_iter().sum()
        } else {
            xs.iter().sum()
        }
    }

    fn sum_over(&self, xs: &[f64], idx: &[NodeId]) -> f64 {
        if self.parallel && !self.deterministic {
            idx.par_iter().map(|&j| xs[j as usize]).sum()
        } else {
            idx.iter().map(|&j| xs[j as usize]).sum()
        }
    }
}

#[derive(Debug, Clone)]
pub struct GoogleOperator<'g> {
    graph: &'g DirectedGraph,
    alpha: f64,
    inv_out_degree: Vec<f64>,
    dangling: Vec<NodeId>,
    exec: Execution,
}

impl<'g> GoogleOperator<'g> {
    pub fn new(graph: &'g DirectedGraph, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidArgument(format!("alpha {alpha} not in (0,1)")));
        }
        let n = graph.n_nodes();
        let mut inv_out_degree = vec![0.0; n];
        let mut dangling = Vec::new();
        for j in 0..n as NodeId {
            match graph.out_degree(j) {
                0 => dangling.push(j),
                k => inv_out_degree[j as usize] = 1.0 / k as f64,
            }
        }
        Ok(GoogleOperator {
            graph,
            alpha,
            inv_out_degree,
            dangling,
            exec: Execution::default(),
        })
    }

    pub fn with_execution(mut self, exec: Execution) -> Self {
        self.exec = exec;
        self
    }

    pub fn execution(&self) -> Execution {
        self.exec
    }

    pub fn graph(&self) -> &'g DirectedGraph {
        self.graph
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn n(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn dangling_nodes(&self) -> &[NodeId] {
        &self.dangling
    }

    /// Dense element `G[i][j]` (row = destination, column = source).
    pub fn entry(&self, i: NodeId, j: NodeId) -> f64 {
        let n = self.n() as f64;
        let teleport = (1.0 - self.alpha) / n;
        if self.graph.is_dangling(j) {
            self.alpha / n + teleport
        } else if self.graph.out_links(j).binary_search(&i).is_ok() {
            self.alpha * self.inv_out_degree[j as usize] + teleport
        } else {
            teleport
        }
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n()];
        self.apply_into(v, &mut out)?;
        Ok(out)
    }

    pub fn apply_into(&self, v: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len(v.len())?;
        self.check_len(out.len())?;
        self.apply_unchecked(v, out, self.exec);
        Ok(())
    }

    pub(crate) fn apply_unchecked(&self, v: &[f64], out: &mut [f64], exec: Execution) {
        let n = self.n() as f64;
        let dangling_mass = exec.sum_over(v, &self.dangling);
        let total = exec.sum(v);
        let base = self.alpha * dangling_mass / n + (1.0 - self.alpha) * total / n;
        let alpha = self.alpha;
        let row = |i: usize| -> f64 {
            let mut acc = 0.0;
            for &j in self.graph.in_links(i as NodeId) {
                acc += v[j as usize] * self.inv_out_degree[j as usize];
            }
            alpha * acc + base
        };
        if exec.parallel {
            out.par_iter_mut()
                .with_min_len(PAR_MIN_LEN)
                .enumerate()
                .for_each(|(i, w)| *w = row(i));
        } else {
            for (i, w) in out.iter_mut().enumerate() {
                *w = row(i);
            }
        }
    }

    /// Computes `Gᵀ y`.
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len())?;
        let mut out = vec![0.0; self.n()];
        self.apply_transpose_unchecked(y, &mut out, self.exec);
        Ok(out)
    }

    pub(crate) fn apply_transpose_unchecked(&self, y: &[f64], out: &mut [f64], exec: Execution) {
        let n = self.n() as f64;
        let total = exec.sum(y);
        let teleport = (1.0 - self.alpha) * total / n;
        let dangling_col = self.alpha * total / n + teleport;
        let alpha = self.alpha;
        let col = |j: usize| -> f64 {
            let links = self.graph.out_links(j as NodeId);
            if links.is_empty() {
                return dangling_col;
            }
            let mut acc = 0.0;
            for &i in links {
                acc += y[i as usize];
            }
            alpha * acc * self.inv_out_degree[j] + teleport
        };
        if exec.parallel {
            out.par_iter_mut()
                .with_min_len(PAR_MIN_LEN)
                .enumerate()
                .for_each(|(j, w)| *w = col(j));
        } else {
            for (j, w) in out.iter_mut().enumerate() {
                *w = col(j);
            }
        }
    }

    /// Materializes G by applying the operator to every basis vector.
    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut g = DMatrix::zeros(n, n);
        let mut e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            self.apply_unchecked(&e, &mut col, Execution::SEQUENTIAL);
            e[j] = 0.0;
            g.column_mut(j).copy_from_slice(&col);
        }
        g
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    /// L1 bound on `‖G·P − P‖₁`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        PageRankConfig {
            tol: 1e-12,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PageRankVector {
    pub probabilities: Vec<f64>,
    /// Node ids by decreasing probability; `k_index[0]` has K = 1.
    pub k_index: Vec<NodeId>,
    pub residual: f64,
    pub iterations: usize,
    /// L1 residual after each iteration.
    pub residual_history: Vec<f64>,
}

impl PageRankVector {
    pub fn from_probabilities(probabilities: Vec<f64>, residual: f64, iterations: usize) -> Self {
        let k_index = order_by_probability(&probabilities);
        PageRankVector {
            probabilities,
            k_index,
            residual,
            iterations,
            residual_history: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// 1-based K of every node.
    pub fn ranks(&self) -> Vec<usize> {
        let mut k = vec![0; self.len()];
        for (pos, &node) in self.k_index.iter().enumerate() {
            k[node as usize] = pos + 1;
        }
        k
    }
}

/// Decreasing probability, ties by ascending id.
pub(crate) fn order_by_probability(p: &[f64]) -> Vec<NodeId> {
    let mut idx: Vec<NodeId> = (0..p.len() as NodeId).collect();
    idx.sort_by(|&a, &b| {
        p[b as usize]
            .total_cmp(&p[a as usize])
            .then(a.cmp(&b))
    });
    idx
}

/// Power iteration from the uniform vector.
pub fn pagerank(op: &GoogleOperator<'_>, cfg: &PageRankConfig) -> Result<PageRankVector> {
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance {} must be positive", cfg.tol)));
    }
    let n = op.n();
    let mut v = vec![1.0 / n as f64; n];
    let mut w = vec![0.0; n];
    let mut history = Vec::new();

    for it in 1..=cfg.max_iter {
        op.apply_unchecked(&v, &mut w, op.exec);
        let mass = op.exec.sum(&w);
        w.iter_mut().for_each(|x| *x /= mass);
        let residual: f64 = v.iter().zip(&w).map(|(a, b)| (a - b).abs()).sum();
        history.push(residual);
        std::mem::swap(&mut v, &mut w);
        if residual <= cfg.tol {
            let mut pr = PageRankVector::from_probabilities(v, residual, it);
            pr.residual_history = history;
            return Ok(pr);
        }
    }
    Err(Error::NonConvergence {
        what: "pagerank",
        iterations: cfg.max_iter,
        residual: history.last().copied().unwrap_or(f64::INFINITY),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedNode {
    pub k: usize,
    pub node: NodeId,
    pub original_id: u64,
    pub label: Option<String>,
    pub probability: f64,
}

pub fn rank_nodes(pr: &PageRankVector, graph: &DirectedGraph) -> Vec<RankedNode> {
    pr.k_index
        .iter()
        .enumerate()
        .map(|(pos, &node)| RankedNode {
            k: pos + 1,
            node,
            original_id: graph.external_id(node),
            label: graph.label(node).map(str::to_string),
            probability: pr.probabilities[node as usize],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn cycle2() -> DirectedGraph {
        DirectedGraph::from_edges(2, [(0, 1), (1, 0)], false).unwrap()
    }

    #[test]
    fn apply_two_cycle() {
        let g = cycle2();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let w = op.apply(&[1.0, 0.0]).unwrap();
        assert!(close(&w, &[0.075, 0.925], 1e-15), "{w:?}");
    }

    #[test]
    fn all_dangling_maps_to_uniform() {
        let g = DirectedGraph::from_edges(4, [], false).unwrap();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let w = op.apply(&[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(close(&w, &[0.25; 4], 1e-15));
        assert!(close(&op.apply(&[0.25; 4]).unwrap(), &[0.25; 4], 1e-15));
    }

    #[test]
    fn apply_rejects_wrong_length() {
        let g = cycle2();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        assert!(matches!(
            op.apply(&[1.0]),
            Err(Error::LengthMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn alpha_must_be_open_interval() {
        let g = cycle2();
        assert!(GoogleOperator::new(&g, 1.0).is_err());
        assert!(GoogleOperator::new(&g, 0.0).is_err());
    }

    #[test]
    fn transpose_matches_dense() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 0)], false).unwrap();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let dense = op.to_dense();
        let y = [0.3, -0.1, 0.5, 0.7];
        let got = op.apply_transpose(&y).unwrap();
        let want = dense.transpose() * nalgebra::DVector::from_column_slice(&y);
        assert!(close(&got, want.as_slice(), 1e-15));
    }

    #[test]
    fn entry_matches_materialization() {
        let g = DirectedGraph::from_edges(4, [(0, 1), (0, 2), (1, 2), (2, 0)], false).unwrap();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let dense = op.to_dense();
        for i in 0..4 {
            for j in 0..4 {
                assert!((dense[(i, j)] - op.entry(i as NodeId, j as NodeId)).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn pagerank_two_cycle_and_single_node() {
        let g = cycle2();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let pr = pagerank(&op, &PageRankConfig::default()).unwrap();
        assert!(close(&pr.probabilities, &[0.5, 0.5], 1e-15));
        assert_eq!(pr.k_index, vec![0, 1]);

        let g1 = DirectedGraph::from_edges(1, [], false).unwrap();
        let op1 = GoogleOperator::new(&g1, 0.85).unwrap();
        let pr1 = pagerank(&op1, &PageRankConfig::default()).unwrap();
        assert_eq!(pr1.probabilities, vec![1.0]);
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let g = DirectedGraph::from_edges(3, [(0, 1), (1, 2)], false).unwrap();
        let op = GoogleOperator::new(&g, 0.85).unwrap();
        let cfg = PageRankConfig { tol: 1e-15, max_iter: 2 };
        match pagerank(&op, &cfg) {
            Err(Error::NonConvergence { iterations: 2, residual, .. }) => assert!(residual > 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(pagerank(&op, &PageRankConfig { tol: 0.0, max_iter: 10 }).is_err());
    }

    #[test]
    fn rank_order_and_ties() {
        let pr = PageRankVector::from_probabilities(vec![0.2, 0.5, 0.3], 0.0, 0);
        assert_eq!(pr.k_index, vec![1, 2, 0]);
        assert_eq!(pr.ranks(), vec![3, 1, 2]);

        let tie = PageRankVector::from_probabilities(vec![0.5, 0.5], 0.0, 0);
        assert_eq!(tie.k_index, vec![0, 1]);

        let g = DirectedGraph::from_edges(3, [], false).unwrap();
        let ranked = rank_nodes(&pr, &g);
        assert_eq!(ranked.iter().map(|r| r.k).collect::<Vec<_>>(), vec![1, 2, 3]);
        assert_eq!(ranked[0].node, 1);
        assert_eq!(ranked[0].probability, 0.5);
    }

    #[test]
    fn fast_mode_agrees_with_deterministic() {
        let edges: Vec<(NodeId, NodeId)> = (0..5000u32).map(|i| (i, (i * 7 + 3) % 5000)).collect();
        let g = DirectedGraph::from_edges(5000, edges, false).unwrap();
        let det = GoogleOperator::new(&g, 0.85).unwrap();
        let fast = det.clone().with_execution(Execution { parallel: true, deterministic: false });
        let a = pagerank(&det, &PageRankConfig::default()).unwrap();
        let b = pagerank(&fast, &PageRankConfig::default()).unwrap();
        assert!(close(&a.probabilities, &b.probabilities, 1e-12));
        let again = pagerank(&det, &PageRankConfig::default()).unwrap();
        assert_eq!(a.probabilities, again.probabilities);
    }
}
