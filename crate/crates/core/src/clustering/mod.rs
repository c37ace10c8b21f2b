//! Clustering coefficients, edge clustering, modularity and community
//! detection.

mod coefficients;
mod communities;

pub use coefficients::{
    average_clustering, barrat_local, clustering_by_degree, clustering_coefficient,
    edge_clustering, local_clustering, onnela_local, opsahl, soffer_global, soffer_global_triangle,
    soffer_local, transitivity, wasserman_directed, ClusteringVariant, SofferNode, TauDef,
};
pub use communities::{
    detect_communities_edge_betweenness, detect_communities_spectral, modularity,
    participation_coefficient, zscore_within_module, CommunityAssignment,
};
