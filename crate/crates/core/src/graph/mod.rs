//! Graph data model, traversals, component analysis, generators and
//! exhaustive reference solvers.

mod components;
pub mod generate;
mod maxflow;
mod oracle;
mod paths;
mod topology;

pub use components::{
    components, components_masked, is_connected, strong_components, ComponentReport,
};
pub use generate::{generate, Model};
pub use maxflow::{edge_connectivity, vertex_connectivity};
pub(crate) use oracle::UnionFind;
pub use oracle::{
    brute_force_oracle, brute_force_oracle_capped, reliability_counts_exact, OracleCaps,
    OracleProblem,
};
pub(crate) use paths::HeapItem;
pub use paths::{
    all_pairs, all_pairs_hops, bfs_hops, bfs_hops_masked, bfs_tree, dijkstra, dijkstra_by,
    shortest_paths, tree_path, DistanceView, PolicyGraph, DOWN, UP,
};
pub use topology::{BuildOptions, CoordKind, Topology};
