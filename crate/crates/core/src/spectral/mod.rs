//! Spectral metrics: eigenvector centrality, symmetry ratio, spectral
//! clusters, algebraic connectivity, good expansion, spanning trees, natural
//! connectivity and the random-walk/current-flow family.

mod cache;
mod clusters;
mod eigen;
mod walks;

pub use cache::{Eigen, SpectralCache, DENSE_CAP};
pub use clusters::{
    similarity_matrix, spectral_clusters, SpectralCluster, SpectralClusters, CONDUCTANCE_THRESHOLD,
    JUMP_THRESHOLD,
};
pub use eigen::{
    algebraic_connectivity, eigenvector_centrality, good_expansion_test, natural_connectivity,
    spanning_tree_count, spanning_tree_count_deleting, symmetry_ratio, GoodExpansion,
    NaturalConnectivity, SpanningTrees, SPANNING_EXACT_CAP,
};
pub use walks::{
    current_flow_betweenness, current_flow_closeness, current_flow_closeness_pinv,
    hitting_times_pinv, network_criticality, random_walk_betweenness, random_walk_distances,
    Criticality, CurrentFlowCloseness, RandomWalkDistances, CURRENT_FLOW_CAP, WALK_CAP,
};
