//! Seeded random networks for tests, verification runs and benchmarks.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{DirectedGraph, NodeId, NodeSubset};

/// Random directed graph where each node is dangling with probability
/// `dangling_fraction` and otherwise links to between 1 and
/// `2 * mean_out_degree` distinct random targets.
pub fn random_graph(n: usize, mean_out_degree: usize, dangling_fraction: f64, seed: u64) -> DirectedGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let max_deg = (2 * mean_out_degree).max(1).min(n.saturating_sub(1).max(1));
    for s in 0..n as NodeId {
        if n < 2 || rng.random_bool(dangling_fraction.clamp(0.0, 1.0)) {
            continue;
        }
        let deg = rng.random_range(1..=max_deg);
        for t in sample(&mut rng, n - 1, deg) {
            // Skip over `s` so there are no self-loops.
            let t = t as NodeId;
            edges.push((s, if t >= s { t + 1 } else { t }));
        }
    }
    DirectedGraph::from_edges(n, edges, false).expect("ids in range")
}

/// `nr` distinct random nodes, in random order.
pub fn random_subset(graph: &DirectedGraph, nr: usize, seed: u64) -> NodeSubset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9E37_79B9_7F4A_7C15);
    let picks = sample(&mut rng, graph.n_nodes(), nr)
        .into_iter()
        .map(|i| i as NodeId)
        .collect();
    NodeSubset::new(graph, picks).expect("distinct in-range picks")
}
