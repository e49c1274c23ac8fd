//! Analysis products derived from PageRank vectors and reduced matrices.

pub mod average;
pub mod friends;
pub mod sensitivity;
pub mod theta;

pub use average::{average_reduced, pagerank_of_reduced, stationary};
pub use friends::{
    friendship_graph, leader_closure_graph, top_friends, Dominance, Friend, FriendEdge, FriendshipGraph,
    Generation, DEFAULT_TOP_K,
};
pub use sensitivity::{
    diagonal_sensitivity_matrix, perturb_link, sensitivity, two_way_sensitivity, Estimator, SensitivityConfig,
    SensitivityResult, DEFAULT_DELTA,
};
pub use theta::{local_subset_ranking, theta_score, EditionRankTable, ThetaEntry, DEFAULT_THETA_CUTOFF};
