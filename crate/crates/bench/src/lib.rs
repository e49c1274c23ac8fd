//! Shared workloads for the criterion benches.

use grm_core::generate::{random_graph, random_subset};
use grm_core::{DirectedGraph, NodeSubset};

/// Sparse graph with a Wikipedia-like mean out-degree and 15% dangling nodes.
pub fn wiki_like(n: usize, seed: u64) -> DirectedGraph {
    random_graph(n, 12, 0.15, seed)
}

pub fn subset_of(graph: &DirectedGraph, nr: usize) -> NodeSubset {
    random_subset(graph, nr, 42)
}
