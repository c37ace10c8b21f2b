//! Connectivity metrics: FM partitioning and the cut searches on top of it,
//! percolation, reliability, partition resilience and component statistics.

mod partition;
mod reliability;

pub use partition::{
    balance_window, cheeger_approx, delay_resilience, fm_partition, fm_partition_with,
    local_delay_resilience, sparsity_approx, CutObjective, DelayResilience, PartitionReport,
};
pub use reliability::{
    disconnection_stats, edge_importance, partition_resilience_factor, percolation_threshold,
    reliability_polynomial, DisconnectionStats, EdgeImportance, PartitionResilience, Reliability,
    ResilienceOptions, RELIABILITY_EXACT_EDGES, RELIABILITY_SAMPLES,
};
