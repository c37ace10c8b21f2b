//! Flow and load metrics: betweenness, AS hegemony, central point
//! dominance, effective load, Motter–Lai capacities, performance,
//! elasticity, impact factors and survivability.

pub(crate) mod betweenness;
mod hegemony;
mod impact;
mod load;
mod performance;
mod survivability;

pub(crate) use betweenness::{accumulate, node_betweenness_masked, Masks};
pub use betweenness::{
    betweenness, central_point_dominance, edge_betweenness, node_betweenness,
    normalized_node_betweenness, Target,
};
pub use hegemony::{as_hegemony, viewpoint_betweenness};
pub use impact::{
    component_impact_factor, vulnerability_impact_factors, AgentMeasure, ImpactFactors,
};
pub use load::{effective_load, motter_lai_capacities, pair_load, EffectiveLoad, PairSet};
pub use performance::{
    elasticity, performance, router_loads, uniform_throughput, ElasticityCurve, EndpointConvention,
    Performance,
};
pub use survivability::{
    baseline_load, delivered_share, survivability_failures, Demand, Evaluation, FailureEntity,
    FailureModel, Survivability,
};
