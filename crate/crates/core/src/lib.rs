//! Google matrix, PageRank and reduced Google matrix analysis of directed
//! networks.
//!
//! The pipeline is: load a [`DirectedGraph`], rank it with [`pagerank`] on a
//! [`GoogleOperator`], pick a [`NodeSubset`], [`reduce`] it to a
//! [`ReducedMatrixSet`] and feed that to the [`analysis`] products.

pub mod analysis;
pub mod error;
pub mod export;
pub mod generate;
pub mod google;
pub mod graph;
pub mod reduced;

pub use error::{Error, Result};
pub use google::{
    pagerank, rank_nodes, Execution, GoogleOperator, PageRankConfig, PageRankVector, RankedNode, DEFAULT_ALPHA,
};
pub use graph::{
    load_edge_list, load_labels, parse_edge_list, read_subset_file, resolve_subset, DirectedGraph, LabelReport,
    NodeId, NodeSubset,
};
pub use reduced::{
    complement_leading_eigen, dense_google, dense_oracle_reduce, reduce, ComplementEigen, Component, ReduceConfig,
    ReduceDiagnostics, ReducedMatrixSet,
};

pub use nalgebra::DMatrix;
