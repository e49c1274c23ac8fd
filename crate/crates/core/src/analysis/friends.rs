//! Friendship networks: for a source column `j`, the friends are the rows
//! with the largest off-diagonal entries of the chosen component.

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduced::{Component, ReducedMatrixSet};

pub const DEFAULT_TOP_K: usize = 4;

/// `Indirect` when the hidden (`Gqrnd`) entry exceeds the direct (`Grr`) one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dominance {
    Direct,
    Indirect,
}

impl Dominance {
    pub fn classify(direct: f64, hidden: f64) -> Self {
        if hidden > direct {
            Dominance::Indirect
        } else {
            Dominance::Direct
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dominance::Direct => "direct",
            Dominance::Indirect => "indirect",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Generation {
    Leader,
    Closure,
}

impl Generation {
    pub fn as_str(self) -> &'static str {
        match self {
            Generation::Leader => "leader",
            Generation::Closure => "closure",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Friend {
    pub index: usize,
    pub name: String,
    pub weight: f64,
    pub dominance: Dominance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendEdge {
    pub source: usize,
    pub target: usize,
    pub weight: f64,
    pub dominance: Dominance,
    pub generation: Generation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FriendshipGraph {
    pub nodes: Vec<String>,
    pub component: Component,
    pub edges: Vec<FriendEdge>,
}

impl FriendshipGraph {
    pub fn out_degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.source == node).count()
    }

    /// Edges as `(source, target)` index pairs.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        self.edges.iter().map(|e| (e.source, e.target)).collect()
    }
}

struct Ranker<'a> {
    rset: &'a ReducedMatrixSet,
    matrix: DMatrix<f64>,
    k: usize,
}

impl<'a> Ranker<'a> {
    fn new(rset: &'a ReducedMatrixSet, k: usize, component: Component) -> Result<Self> {
        let nr = rset.nr();
        if k == 0 || k >= nr {
            return Err(Error::InvalidArgument(format!(
                "top-k must satisfy 0 < k < Nr, got k = {k}, Nr = {nr}"
            )));
        }
        Ok(Ranker {
            rset,
            matrix: rset.component(component),
            k,
        })
    }

    fn top(&self, j: usize) -> Vec<Friend> {
        let col = self.matrix.column(j);
        let mut rows: Vec<usize> = (0..self.rset.nr()).filter(|&i| i != j).collect();
        rows.sort_by(|&a, &b| col[b].total_cmp(&col[a]).then(a.cmp(&b)));
        rows.truncate(self.k);
        rows.into_iter()
            .map(|i| Friend {
                index: i,
                name: self.rset.names[i].clone(),
                weight: col[i],
                dominance: Dominance::classify(self.rset.grr[(i, j)], self.rset.gqrnd[(i, j)]),
            })
            .collect()
    }
}

/// The `k` strongest off-diagonal entries of column `source`.
pub fn top_friends(rset: &ReducedMatrixSet, source: &str, k: usize, component: Component) -> Result<Vec<Friend>> {
    let j = rset.position_or_err(source)?;
    Ok(Ranker::new(rset, k, component)?.top(j))
}

/// Every node points to its top-`k` friends.
pub fn friendship_graph(rset: &ReducedMatrixSet, k: usize, component: Component) -> Result<FriendshipGraph> {
    let ranker = Ranker::new(rset, k, component)?;
    let edges = (0..rset.nr())
        .flat_map(|j| {
            ranker.top(j).into_iter().map(move |f| FriendEdge {
                source: j,
                target: f.index,
                weight: f.weight,
                dominance: f.dominance,
                generation: Generation::Leader,
            })
        })
        .collect();
    Ok(FriendshipGraph {
        nodes: rset.names.clone(),
        component,
        edges,
    })
}

/// Leaders point to their top-`k` friends; every node reached that way is
/// expanded in turn, breadth first, until nothing new is reached.
pub fn leader_closure_graph<S: AsRef<str>>(
    rset: &ReducedMatrixSet,
    leaders: &[S],
    k: usize,
    component: Component,
) -> Result<FriendshipGraph> {
    let ranker = Ranker::new(rset, k, component)?;
    let nr = rset.nr();
    let mut expanded = vec![false; nr];
    let mut queue = VecDeque::new();

    let mut misses = Vec::new();
    for l in leaders {
        match rset.position(l.as_ref()) {
            Some(j) if !expanded[j] => {
                expanded[j] = true;
                queue.push_back((j, Generation::Leader));
            }
            Some(_) => {}
            None => misses.push(l.as_ref().to_string()),
        }
    }
    if !misses.is_empty() {
        return Err(Error::Unresolved(misses));
    }

    let mut edges = Vec::new();
    while let Some((j, generation)) = queue.pop_front() {
        for f in ranker.top(j) {
            if !expanded[f.index] {
                expanded[f.index] = true;
                queue.push_back((f.index, Generation::Closure));
            }
            edges.push(FriendEdge {
                source: j,
                target: f.index,
                weight: f.weight,
                dominance: f.dominance,
                generation,
            });
        }
    }
    Ok(FriendshipGraph {
        nodes: rset.names.clone(),
        component,
        edges,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reduced::{ReduceConfig, ReduceDiagnostics};

    fn rset(grr: DMatrix<f64>, gqrnd: DMatrix<f64>) -> ReducedMatrixSet {
        let n = grr.nrows();
        ReducedMatrixSet {
            names: (0..n).map(|i| format!("n{}", i + 1)).collect(),
            original_ids: None,
            gr: &grr + &gqrnd,
            grr,
            gpr: DMatrix::zeros(n, n),
            gqrd: DMatrix::zeros(n, n),
            gqrnd,
            lambda_c: None,
            alpha: 0.85,
            edition_tag: "test".into(),
            config: ReduceConfig::default(),
            diagnostics: ReduceDiagnostics::default(),
        }
    }

    #[test]
    fn top_two_of_column() {
        let mut grr = DMatrix::zeros(4, 4);
        grr[(0, 0)] = 0.9;
        grr[(1, 0)] = 0.3;
        grr[(2, 0)] = 0.1;
        grr[(3, 0)] = 0.2;
        let s = rset(grr, DMatrix::zeros(4, 4));
        let f = top_friends(&s, "n1", 2, Component::GrrPlusGqrnd).unwrap();
        assert_eq!(f.iter().map(|f| f.name.as_str()).collect::<Vec<_>>(), vec!["n2", "n4"]);
        assert_eq!(f[0].weight, 0.3);
        assert_eq!(f[1].weight, 0.2);
    }

    #[test]
    fn equal_entries_break_by_index() {
        let s = rset(DMatrix::from_element(5, 5, 0.2), DMatrix::zeros(5, 5));
        let f = top_friends(&s, "n3", 2, Component::Grr).unwrap();
        assert_eq!(f.iter().map(|f| f.index).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn hidden_dominance() {
        let mut grr = DMatrix::zeros(3, 3);
        let mut gq = DMatrix::zeros(3, 3);
        grr[(1, 0)] = 0.01;
        gq[(1, 0)] = 0.02;
        grr[(2, 0)] = 0.05;
        gq[(2, 0)] = 0.01;
        let s = rset(grr, gq);
        let f = top_friends(&s, "n1", 2, Component::GrrPlusGqrnd).unwrap();
        assert_eq!(f[0].index, 2);
        assert_eq!(f[0].dominance, Dominance::Direct);
        assert_eq!(f[1].dominance, Dominance::Indirect);
    }

    #[test]
    fn k_must_leave_room_for_the_diagonal() {
        let s = rset(DMatrix::zeros(3, 3), DMatrix::zeros(3, 3));
        assert!(top_friends(&s, "n1", 3, Component::Grr).is_err());
        assert!(top_friends(&s, "n1", 0, Component::Grr).is_err());
        assert!(top_friends(&s, "missing", 1, Component::Grr).is_err());
    }

    #[test]
    fn every_node_gets_k_edges() {
        let s = rset(DMatrix::from_fn(3, 3, |i, j| (i * 3 + j) as f64), DMatrix::zeros(3, 3));
        let g = friendship_graph(&s, 2, Component::GrrPlusGqrnd).unwrap();
        for j in 0..3 {
            assert_eq!(g.out_degree(j), 2);
        }
    }

    #[test]
    fn leader_closure_stops_at_fixed_point() {
        // n1 and n2 point at each other; n3..n5 point at n4 or n5.
        let mut m = DMatrix::zeros(5, 5);
        m[(1, 0)] = 1.0;
        m[(0, 1)] = 1.0;
        m[(3, 2)] = 1.0;
        m[(4, 3)] = 1.0;
        m[(3, 4)] = 1.0;
        let s = rset(DMatrix::zeros(5, 5), m);
        let g = leader_closure_graph(&s, &["n1"], 1, Component::Gqrnd).unwrap();
        assert_eq!(g.edge_pairs(), vec![(0, 1), (1, 0)]);
        assert_eq!(g.edges[0].generation, Generation::Leader);
        assert_eq!(g.edges[1].generation, Generation::Closure);
        assert!(leader_closure_graph(&s, &["nobody"], 1, Component::Gqrnd).is_err());
    }
}
