//! Metric catalog: one entry per CLI key, grouped under the rows of the
//! metric table, plus the topics deliberately left out.

use std::collections::BTreeMap;

use serde::Serialize;

use super::AnalyzeOptions;
use crate::adjacency::{self, EdgeDegreeRule, RichClubOptions};
use crate::clustering::{self, ClusteringVariant};
use crate::connectivity::{self, ResilienceOptions};
use crate::distance::{self, AsplMode};
use crate::error::{Error, Result};
use crate::geo;
use crate::graph::{
    brute_force_oracle, edge_connectivity, vertex_connectivity, OracleProblem, Topology,
};
use crate::metric::{Codomain, EdgeValue, MetricValue, Mode, Scalar, Scope};
use crate::spectral;
use crate::throughput::{
    self, AgentMeasure, Demand, EndpointConvention, Evaluation, FailureEntity, FailureModel,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Implemented,
    /// Exact value from the exhaustive solver, small graphs only.
    OracleOnly,
    OutOfScope,
}

impl Status {
    pub fn key(self) -> &'static str {
        match self {
            Status::Implemented => "implemented",
            Status::OracleOnly => "oracle-only",
            Status::OutOfScope => "out-of-scope",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Adjacency,
    Clustering,
    Connectivity,
    Distance,
    Throughput,
    Spectral,
    Geographic,
}

/// Graph attributes a metric cannot do without.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Needs {
    pub weights: bool,
    pub coords: bool,
    pub labels: bool,
    pub node_weights: bool,
    pub undirected: bool,
    pub events: bool,
}

impl Needs {
    const NONE: Needs = Needs {
        weights: false,
        coords: false,
        labels: false,
        node_weights: false,
        undirected: false,
        events: false,
    };

    /// `Incompatible` naming the first missing attribute.
    pub fn check(&self, t: &Topology, o: &AnalyzeOptions) -> Result<()> {
        let missing = if self.weights && !t.is_weighted() {
            "requires edge weights"
        } else if self.coords && t.coords().is_none() {
            "requires node coordinates"
        } else if self.labels && t.labels().is_none() {
            "requires node labels"
        } else if self.node_weights && t.node_weights().is_none() {
            "requires node weights"
        } else if self.undirected && t.is_directed() {
            "requires an undirected graph"
        } else if self.events && o.geo_events.is_empty() {
            "requires geographic events in the options"
        } else {
            return Ok(());
        };
        Err(Error::incompatible(missing))
    }
}

pub type Eval = fn(&Topology, &AnalyzeOptions) -> Result<MetricValue>;
pub type CodomainFn = fn(&Topology, &AnalyzeOptions) -> Codomain;

#[derive(Clone, Copy)]
pub struct MetricSpec {
    pub key: &'static str,
    pub name: &'static str,
    /// Metric table row this key belongs to.
    pub row: &'static str,
    pub family: Family,
    pub scope: Scope,
    pub mode: Mode,
    pub status: Status,
    pub needs: Needs,
    pub codomain: CodomainFn,
    pub eval: Eval,
    pub note: &'static str,
}

impl std::fmt::Debug for MetricSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MetricSpec")
            .field("key", &self.key)
            .field("row", &self.row)
            .field("status", &self.status)
            .finish()
    }
}

#[allow(clippy::too_many_arguments)]
const fn spec(
    key: &'static str,
    name: &'static str,
    row: &'static str,
    family: Family,
    scope: Scope,
    mode: Mode,
    codomain: CodomainFn,
    eval: Eval,
) -> MetricSpec {
    MetricSpec {
        key,
        name,
        row,
        family,
        scope,
        mode,
        status: Status::Implemented,
        needs: Needs::NONE,
        codomain,
        eval,
        note: "",
    }
}

impl MetricSpec {
    const fn needs(mut self, needs: Needs) -> Self {
        self.needs = needs;
        self
    }

    const fn oracle(mut self) -> Self {
        self.status = Status::OracleOnly;
        self.note = "exact exhaustive solver; undefined above 12 nodes or 20 edges";
        self
    }

    const fn note(mut self, note: &'static str) -> Self {
        self.note = note;
        self
    }
}

/// Topics with no key, each with the reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct OutOfScope {
    pub key: &'static str,
    pub topic: &'static str,
    /// Table row the topic belongs to, if any.
    pub row: Option<&'static str>,
    pub note: &'static str,
}

pub const OUT_OF_SCOPE: [OutOfScope; 6] = [
    OutOfScope {
        key: "multilevel_hierarchy",
        topic: "layered and multilevel graph hierarchies, multilevel reachability",
        row: None,
        note: "single-layer topologies only",
    },
    OutOfScope {
        key: "generator_fidelity",
        topic: "KE and HOT topology generators",
        row: None,
        note: "only ER, BA and WS generators are provided, as test inputs",
    },
    OutOfScope {
        key: "bgp_collection",
        topic: "BGP data collection and live measurement",
        row: None,
        note: "topologies are read from files",
    },
    OutOfScope {
        key: "epidemics",
        topic: "network epidemics",
        row: None,
        note: "no spreading processes are simulated",
    },
    OutOfScope {
        key: "spectral_clusters_traffic_svd",
        topic: "spectral cluster identification from a traffic-matrix SVD",
        row: Some(R_SPECTRAL_CLUSTERS),
        note: "the adjacency-based variant is available as spectral_clusters",
    },
    OutOfScope {
        key: "interacting_networks",
        topic: "robustness of interacting networks",
        row: None,
        note: "one network per analysis",
    },
];

const R_DEGREE: &str = "Node Degree / Degree-Freq. Distr.";
const R_STRENGTH: &str = "Strength / Strength Distribution";
const R_ENTROPY: &str = "Entropy";
const R_SKEWNESS: &str = "Skewness";
const R_VULN_FN: &str = "Vulnerability Function";
const R_ASSORT: &str = "Assortative Coefficient";
const R_KNN: &str = "Average Neighbor Connectivity";
const R_RICH: &str = "Rich-Club Connectivity";
const R_CLUSTER: &str = "Clustering Coefficient";
const R_EDGE_CLUSTER: &str = "Edge Clustering Coefficient";
const R_MODULARITY: &str = "Modularity";
const R_MOD_MATRIX: &str = "Modularity Matrix";
const R_EB_PART: &str = "Edge Betweenness Part. Algorithm";
const R_ZSCORE: &str = "Z-Score of Within Module-Degree";
const R_PARTICIPATION: &str = "Participation Coefficient";
const R_CONNECTIVITY: &str = "Vertex-, Edge- & Cond. Connectivity";
const R_SPARSITY: &str = "Sparsity";
const R_CHEEGER: &str = "Cheeger Constant";
const R_M_DEGREE: &str = "Minimum m-Degree";
const R_PARTITION: &str = "Network Partitioning Algorithm";
const R_DISRUPTION: &str = "Ratio of Disruption";
const R_DECAY: &str = "Local Decay Resilience";
const R_TOUGHNESS: &str = "Toughness / Integrity / Scatt. No.";
const R_TENACITY: &str = "Tenacity / Edge-T. / Mixed-T.";
const R_PERCOLATION: &str = "Percolation Threshold";
const R_RELIABILITY: &str = "Reliability Polynomial";
const R_RESILIENCE: &str = "Partition Resilience Factor";
const R_COMPONENTS: &str = "Total Number of Isolated Components";
const R_GIANT: &str = "Frac. of Nodes in Largest Component";
const R_MEAN_SIZE: &str = "Average Size of Isolated Components";
const R_CLASS_FREQ: &str = "Distr. of Component Class Frequency";
const R_CLASS_NODES: &str = "Distr. of Rel. No. of Nodes per Class";
const R_REACH: &str = "Reachability";
const R_ASPL: &str = "ASPL";
const R_DIK: &str = "Diameter-Inverse-K";
const R_DIAMETER: &str = "Diameter";
const R_GLOBAL_EFF: &str = "Global Network Efficiency";
const R_HARMONIC: &str = "Harm. Mean of Geodesic Distances";
const R_LOCAL_EFF: &str = "Local Network Efficiency";
const R_CYCLIC: &str = "Cyclic Coefficient";
const R_CPL: &str = "Characteristic Path Length";
const R_EXPANSION: &str = "Expansion";
const R_ECCENTRICITY: &str = "Effective Eccentricity / Eff. Diameter";
const R_BETWEENNESS: &str = "Betweenness Centrality, node / link";
const R_HEGEMONY: &str = "AS Hegemony";
const R_EDGE_DEGREE: &str = "Edge Degree";
const R_CPD: &str = "Central Point Dominance";
const R_LOAD: &str = "Effective Load";
const R_PERFORMANCE: &str = "Performance";
const R_ELASTICITY: &str = "Elasticity";
const R_IMPACT: &str = "Vulnerability Impact Factors";
const R_SURV_FAIL: &str = "Survivability Function, Failures";
const R_EIGENVECTOR: &str = "Eigenvector Centrality";
const R_SYMMETRY: &str = "Symmetry Ratio";
const R_SPECTRAL_CLUSTERS: &str = "Spectral Cluster Identification";
const R_ALGEBRAIC: &str = "Algebraic Connectivity";
const R_GOOD_EXP: &str = "Good Expansion";
const R_SPANNING: &str = "Number of Spanning Trees";
const R_NATURAL: &str = "Natural Connectivity";
const R_RW_ASPL: &str = "Random Walk ASPL";
const R_CF_CLOSENESS: &str = "Current-Flow Closeness";
const R_RW_BETWEENNESS: &str = "Random Walk Betweenness";
const R_CF_BETWEENNESS: &str = "Current-Flow Betweenness";
const R_CRITICALITY: &str = "Network Criticality";
const R_DIST_STRENGTH: &str = "Distance Strength";
const R_SURV_GEO: &str = "Survivability Function, Geographical";
const R_OUTREACH: &str = "Outreach";
const R_POINTWISE: &str = "Pointwise Vulnerability";
const R_GLOBAL_VULN: &str = "Global Vulnerability";
const R_REL_VAR: &str = "Rel. Variance of Pointwise Vuln.";
const R_GEO_DIVERSITY: &str = "Eff. / Total Geograph. Path Diversity";

/// Rows of the metric table, in table order.
pub const ROWS: [&str; 71] = [
    R_DEGREE,
    R_STRENGTH,
    R_ENTROPY,
    R_SKEWNESS,
    R_VULN_FN,
    R_ASSORT,
    R_KNN,
    R_RICH,
    R_CLUSTER,
    R_EDGE_CLUSTER,
    R_MODULARITY,
    R_MOD_MATRIX,
    R_EB_PART,
    R_ZSCORE,
    R_PARTICIPATION,
    R_CONNECTIVITY,
    R_SPARSITY,
    R_CHEEGER,
    R_M_DEGREE,
    R_PARTITION,
    R_DISRUPTION,
    R_DECAY,
    R_TOUGHNESS,
    R_TENACITY,
    R_PERCOLATION,
    R_RELIABILITY,
    R_RESILIENCE,
    R_COMPONENTS,
    R_GIANT,
    R_MEAN_SIZE,
    R_CLASS_FREQ,
    R_CLASS_NODES,
    R_REACH,
    R_ASPL,
    R_DIK,
    R_DIAMETER,
    R_GLOBAL_EFF,
    R_HARMONIC,
    R_LOCAL_EFF,
    R_CYCLIC,
    R_CPL,
    R_EXPANSION,
    R_ECCENTRICITY,
    R_BETWEENNESS,
    R_HEGEMONY,
    R_EDGE_DEGREE,
    R_CPD,
    R_LOAD,
    R_PERFORMANCE,
    R_ELASTICITY,
    R_IMPACT,
    R_SURV_FAIL,
    R_EIGENVECTOR,
    R_SYMMETRY,
    R_SPECTRAL_CLUSTERS,
    R_ALGEBRAIC,
    R_GOOD_EXP,
    R_SPANNING,
    R_NATURAL,
    R_RW_ASPL,
    R_CF_CLOSENESS,
    R_RW_BETWEENNESS,
    R_CF_BETWEENNESS,
    R_CRITICALITY,
    R_DIST_STRENGTH,
    R_SURV_GEO,
    R_OUTREACH,
    R_POINTWISE,
    R_GLOBAL_VULN,
    R_REL_VAR,
    R_GEO_DIVERSITY,
];

// ---- codomains -----------------------------------------------------------

fn v(t: &Topology) -> f64 {
    t.node_count() as f64
}

fn unit(_: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::closed(0.0, 1.0)
}

fn nonneg(_: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::at_least(0.0)
}

fn unbounded(_: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::UNBOUNDED
}

/// Balanced cuts can reach ⌊v²/4⌋ on dense graphs.
fn quarter_v_squared(t: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::closed(0.0, (t.node_count() * t.node_count() / 4) as f64)
}

/// Weighted distances are 1/w, so inverse distances exceed 1 when w > 1.
fn unit_unless_weighted(t: &Topology, o: &AnalyzeOptions) -> Codomain {
    if o.weighted && t.is_weighted() {
        Codomain::at_least(0.0)
    } else {
        Codomain::closed(0.0, 1.0)
    }
}

fn up_to_v(t: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::closed(0.0, v(t))
}

fn node_ids(t: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::closed(0.0, v(t) - 1.0)
}

fn up_to_e(t: &Topology, _: &AnalyzeOptions) -> Codomain {
    Codomain::closed(0.0, t.edge_count() as f64)
}

/// Hop distances are at most v − 1; weighted lengths are unbounded.
fn distances(t: &Topology, o: &AnalyzeOptions) -> Codomain {
    if o.weighted {
        Codomain::at_least(0.0)
    } else {
        Codomain::closed(0.0, v(t) - 1.0)
    }
}

fn degrees(t: &Topology, _: &AnalyzeOptions) -> Codomain {
    let m = if t.is_directed() { 2.0 } else { 1.0 };
    Codomain::closed(0.0, m * (v(t) - 1.0))
}

// ---- value helpers -------------------------------------------------------

fn scalar(x: Result<f64>) -> Result<MetricValue> {
    x.map(MetricValue::scalar)
}

fn option_scalar(x: Option<f64>, reason: &str) -> Result<MetricValue> {
    x.map(MetricValue::scalar)
        .ok_or_else(|| Error::undefined(reason))
}

fn nodes(values: Vec<f64>) -> MetricValue {
    MetricValue::per_node(values.into_iter().map(Some))
}

fn counts(values: Vec<usize>) -> MetricValue {
    MetricValue::per_node(values.into_iter().map(|x| Some(x as f64)))
}

/// Per-edge values keyed by the endpoints of `g`'s edge ids.
fn edges(g: &Topology, values: impl IntoIterator<Item = Option<f64>>) -> MetricValue {
    MetricValue::PerEdge {
        values: g
            .edges()
            .iter()
            .zip(values)
            .map(|(&(u, w), x)| EdgeValue {
                u,
                w,
                value: Scalar::from(x),
            })
            .collect(),
    }
}

fn weighted(t: &Topology, o: &AnalyzeOptions) -> Result<bool> {
    if o.weighted && !t.is_weighted() {
        return Err(Error::incompatible(
            "weighted evaluation requires edge weights",
        ));
    }
    Ok(o.weighted)
}

/// Community labels: the node labels when present, otherwise the spectral
/// modularity split.
fn partition(t: &Topology) -> Result<Vec<usize>> {
    if let Some(labels) = t.labels() {
        let ids: BTreeMap<&str, usize> = labels
            .iter()
            .map(String::as_str)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .zip(0..)
            .collect();
        return Ok(labels.iter().map(|l| ids[l.as_str()]).collect());
    }
    Ok(clustering::detect_communities_spectral(t)?.community)
}

fn oracle(t: &Topology, p: OracleProblem) -> Result<MetricValue> {
    brute_force_oracle(t, p)
        .map(MetricValue::scalar)
        .map_err(|e| match e {
            Error::TooLarge { what, actual, cap } => Error::undefined(format!(
                "exact solver limited to {cap} {what}, graph has {actual}"
            )),
            other => other,
        })
}

/// Unit demands between up to 500 seeded node pairs.
fn sampled_demands(t: &Topology, seed: u64) -> Vec<Demand> {
    use rand::seq::index::sample;
    let n = t.node_count();
    let total = n * n.saturating_sub(1) / 2;
    let take = total.min(500);
    let mut r = crate::rng(seed);
    let mut picks: Vec<usize> = sample(&mut r, total, take).into_vec();
    picks.sort_unstable();
    picks
        .into_iter()
        .map(|k| {
            // k-th unordered pair in row-major order
            let mut i = 0;
            let mut rest = k;
            while rest >= n - 1 - i {
                rest -= n - 1 - i;
                i += 1;
            }
            Demand {
                source: i,
                target: i + 1 + rest,
                amount: 1.0,
            }
        })
        .collect()
}

/// Reachable share of the other nodes, per node.
fn reach_share(t: &Topology, alive: &[bool]) -> Vec<f64> {
    let n = t.node_count();
    let c = crate::graph::components_masked(t, alive);
    (0..n)
        .map(|u| {
            if alive[u] {
                (c.sizes[c.component_of[u]] - 1) as f64 / (n - 1) as f64
            } else {
                0.0
            }
        })
        .collect()
}

/// Impact factors with nodes as agents, reachable share as the measure and
/// the highest-degree node failing; M_min = 0.
fn impact(t: &Topology, o: &AnalyzeOptions) -> Result<throughput::ImpactFactors> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    if n < 2 {
        return Err(Error::undefined("needs at least two nodes"));
    }
    let normal = reach_share(&g, &vec![true; n]);
    let hub = crate::challenge::descending_order(
        &g.degrees().iter().map(|&k| k as f64).collect::<Vec<_>>(),
    )[0];
    let mut alive = vec![true; n];
    alive[hub] = false;
    let fault = reach_share(&g, &alive);
    let agents: Vec<AgentMeasure> = (0..n)
        .filter(|&u| normal[u] > 0.0)
        .map(|u| AgentMeasure {
            normal: normal[u],
            fault: fault[u],
            min: 0.0,
        })
        .collect();
    if agents.is_empty() {
        return Err(Error::undefined("no node reaches another"));
    }
    throughput::vulnerability_impact_factors(&agents, o.impact_threshold)
}

use Family::*;
use Mode::{Dynamic, Failures, Static, WorstCase};
use Scope::{Global, Local};

const W: Needs = Needs {
    weights: true,
    ..Needs::NONE
};
const G: Needs = Needs {
    coords: true,
    ..Needs::NONE
};
const UNDIRECTED: Needs = Needs {
    undirected: true,
    ..Needs::NONE
};

static CATALOG: &[MetricSpec] = &[
    // adjacency
    spec("degree", "Node degree", R_DEGREE, Adjacency, Local, Static, degrees, |t, _| Ok(counts(adjacency::degree_metrics(t).degree))),
    spec("degree_distribution", "Degree-frequency distribution P(k)", R_DEGREE, Adjacency, Global, Static, unit, |t, _| {
        Ok(MetricValue::distribution(adjacency::degree_metrics(t).p_k.into_iter().map(|(k, p)| (k as f64, Some(p)))))
    }),
    spec("strength", "Node strength", R_STRENGTH, Adjacency, Local, Static, nonneg, |t, _| Ok(nodes(adjacency::degree_metrics(t).strength))),
    spec("strength_distribution", "Strength distribution P(s)", R_STRENGTH, Adjacency, Global, Static, unit, |t, _| {
        Ok(MetricValue::distribution(adjacency::degree_metrics(t).p_s.into_iter().map(|(s, p)| (s, Some(p)))))
    }),
    spec(
        "entropy",
        "Degree entropy",
        R_ENTROPY,
        Adjacency,
        Global,
        Static,
        |t, _| Codomain::closed(0.0, (v(t) - 1.0).max(1.0).ln()),
        |t, _| scalar(adjacency::entropy(t)),
    ),
    spec("skewness", "Skewness", R_SKEWNESS, Adjacency, Global, Static, unit, |t, o| scalar(adjacency::skewness(t, o.seed))),
    spec("vulnerability_function", "Vulnerability function", R_VULN_FN, Adjacency, Global, Static, nonneg, |t, _| {
        scalar(adjacency::vulnerability_function(t))
    })
    .note("positive and unbounded above"),
    spec(
        "assortative_coefficient",
        "Assortative coefficient",
        R_ASSORT,
        Adjacency,
        Global,
        Static,
        |_, _| Codomain::closed(-1.0, 1.0),
        |t, _| scalar(adjacency::assortative_coefficient(t)),
    ),
    spec("neighbor_connectivity", "Average neighbor connectivity k_nn(k)", R_KNN, Adjacency, Global, Static, degrees, |t, o| {
        let w = weighted(t, o)?;
        Ok(MetricValue::distribution(
            adjacency::neighbor_connectivity(t, w)?.into_iter().map(|(k, x)| (k as f64, Some(x))),
        ))
    }),
    spec("rich_club", "Rich-club coefficient", R_RICH, Adjacency, Global, Static, unit, |t, o| {
        let opts = RichClubOptions { weighted: weighted(t, o)?, null_samples: 0, seed: o.seed };
        Ok(MetricValue::distribution(adjacency::rich_club(t, opts)?.into_iter().map(|p| (p.threshold, p.phi))))
    }),
    spec("rich_club_normalized", "Rich-club coefficient over its rewired null", R_RICH, Adjacency, Global, Static, nonneg, |t, o| {
        let opts = RichClubOptions { weighted: weighted(t, o)?, null_samples: o.null_samples.max(1), seed: o.seed };
        Ok(MetricValue::distribution(adjacency::rich_club(t, opts)?.into_iter().map(|p| (p.threshold, p.rho))))
    }),
    // clustering
    spec("clustering_local", "Local clustering coefficient", R_CLUSTER, Clustering, Local, Static, unit, |t, _| {
        clustering::clustering_coefficient(t, ClusteringVariant::WattsLocal)
    }),
    spec("clustering_average", "Average clustering coefficient", R_CLUSTER, Clustering, Global, Static, unit, |t, _| {
        clustering::clustering_coefficient(t, ClusteringVariant::GlobalAvg)
    }),
    spec("transitivity", "Triangle clustering coefficient", R_CLUSTER, Clustering, Global, Static, unit, |t, _| {
        clustering::clustering_coefficient(t, ClusteringVariant::GlobalTriangle)
    }),
    spec("clustering_soffer", "Degree-corrected clustering coefficient", R_CLUSTER, Clustering, Global, Static, unit, |t, _| {
        clustering::clustering_coefficient(t, ClusteringVariant::SofferGlobal)
    }),
    spec("clustering_weighted", "Weighted local clustering coefficient", R_CLUSTER, Clustering, Local, Static, unit, |t, _| {
        clustering::clustering_coefficient(t, ClusteringVariant::BarratWeighted)
    })
    .needs(W),
    spec(
        "edge_clustering",
        "Edge clustering coefficient",
        R_EDGE_CLUSTER,
        Clustering,
        Local,
        Static,
        |_, _| Codomain::closed(0.0, 2.0),
        |t, _| Ok(edges(&t.underlying_undirected(), clustering::edge_clustering(t, 3)?)),
    ),
    spec(
        "modularity",
        "Modularity of the node labels or the spectral split",
        R_MODULARITY,
        Clustering,
        Global,
        Static,
        |_, _| Codomain::closed(-0.5, 1.0),
        |t, _| scalar(clustering::modularity(t, &partition(t)?)),
    ),
    spec("communities_spectral", "Leading-eigenvector community of each node", R_MOD_MATRIX, Clustering, Local, Static, node_ids, |t, _| {
        Ok(counts(clustering::detect_communities_spectral(t)?.community))
    }),
    spec(
        "communities_edge_betweenness",
        "Edge-betweenness community of each node",
        R_EB_PART,
        Clustering,
        Local,
        Static,
        node_ids,
        |t, o| Ok(counts(clustering::detect_communities_edge_betweenness(t, o.edge_betweenness_sample, o.seed)?.community)),
    ),
    spec("within_module_zscore", "Within-module degree z-score", R_ZSCORE, Clustering, Local, Static, unbounded, |t, _| {
        Ok(nodes(clustering::zscore_within_module(t, &partition(t)?)?))
    }),
    spec("participation_coefficient", "Participation coefficient", R_PARTICIPATION, Clustering, Local, Static, unit, |t, _| {
        Ok(MetricValue::per_node(clustering::participation_coefficient(t, &partition(t)?)?))
    }),
    // connectivity
    spec("vertex_connectivity", "Vertex connectivity", R_CONNECTIVITY, Connectivity, Global, WorstCase, node_ids, |t, _| {
        Ok(MetricValue::scalar(vertex_connectivity(t) as f64))
    }),
    spec("edge_connectivity", "Edge connectivity", R_CONNECTIVITY, Connectivity, Global, WorstCase, node_ids, |t, _| {
        Ok(MetricValue::scalar(edge_connectivity(t) as f64))
    }),
    spec("conditional_connectivity", "Conditional vertex connectivity", R_CONNECTIVITY, Connectivity, Global, WorstCase, up_to_v, |t, o| {
        oracle(t, OracleProblem::ConditionalVertexCut { min_size: o.conditional_min_size })
    })
    .oracle(),
    spec("sparsity", "Sparsity (partitioning heuristic)", R_SPARSITY, Connectivity, Global, WorstCase, up_to_v, |t, o| {
        scalar(connectivity::sparsity_approx(t, o.seed))
    })
    .note("upper bound on the minimum from the partitioning heuristic"),
    spec("sparsity_exact", "Sparsity", R_SPARSITY, Connectivity, Global, WorstCase, up_to_v, |t, _| oracle(t, OracleProblem::SparsityMin))
        .oracle(),
    spec("cheeger", "Cheeger constant (partitioning heuristic)", R_CHEEGER, Connectivity, Global, WorstCase, node_ids, |t, o| {
        scalar(connectivity::cheeger_approx(t, o.seed))
    })
    .note("upper bound on the minimum from the partitioning heuristic"),
    spec("cheeger_exact", "Cheeger constant", R_CHEEGER, Connectivity, Global, WorstCase, node_ids, |t, _| oracle(t, OracleProblem::Cheeger))
        .oracle(),
    spec("min_m_degree", "Minimum m-degree", R_M_DEGREE, Connectivity, Global, WorstCase, up_to_e, |t, o| {
        oracle(t, OracleProblem::MinMDegree { m: o.m })
    })
    .oracle(),
    spec("fm_partition", "Side of each node in the balanced min-cut bipartition", R_PARTITION, Connectivity, Local, WorstCase, unit, |t, o| {
        let p = connectivity::fm_partition(t, o.partition_ratio, o.partition_slack, o.seed)?;
        Ok(MetricValue::per_node(p.side.into_iter().map(|s| Some(s as u8 as f64))))
    }),
    spec("fm_partition_cut", "Cut size of the balanced min-cut bipartition", R_PARTITION, Connectivity, Global, WorstCase, up_to_e, |t, o| {
        Ok(MetricValue::scalar(connectivity::fm_partition(t, o.partition_ratio, o.partition_slack, o.seed)?.cut_size as f64))
    }),
    spec("ratio_of_disruption", "Ratio of disruption", R_DISRUPTION, Connectivity, Global, WorstCase, nonneg, |t, _| {
        oracle(t, OracleProblem::RatioOfDisruption)
    })
    .oracle(),
    spec("delay_resilience", "Decay resilience", R_DECAY, Connectivity, Global, WorstCase, quarter_v_squared, |t, o| {
        option_scalar(connectivity::delay_resilience(t, o.hops, o.policy, o.seed)?.global, "no node has a separable neighbourhood")
    }),
    spec("delay_resilience_local", "Local decay resilience", R_DECAY, Connectivity, Local, WorstCase, quarter_v_squared, |t, o| {
        Ok(MetricValue::per_node(connectivity::delay_resilience(t, o.hops, o.policy, o.seed)?.per_node))
    }),
    spec("toughness", "Toughness", R_TOUGHNESS, Connectivity, Global, WorstCase, nonneg, |t, _| oracle(t, OracleProblem::Toughness)).oracle(),
    spec("integrity", "Integrity", R_TOUGHNESS, Connectivity, Global, WorstCase, up_to_v, |t, _| oracle(t, OracleProblem::Integrity)).oracle(),
    spec(
        "scattering_number",
        "Scattering number",
        R_TOUGHNESS,
        Connectivity,
        Global,
        WorstCase,
        |t, _| Codomain::closed(-v(t), v(t)),
        |t, _| oracle(t, OracleProblem::Scattering),
    )
    .oracle(),
    spec("tenacity", "Tenacity", R_TENACITY, Connectivity, Global, WorstCase, nonneg, |t, _| oracle(t, OracleProblem::Tenacity)).oracle(),
    spec("edge_tenacity", "Edge tenacity", R_TENACITY, Connectivity, Global, WorstCase, nonneg, |t, _| oracle(t, OracleProblem::EdgeTenacity))
        .oracle(),
    spec("mixed_tenacity", "Mixed tenacity", R_TENACITY, Connectivity, Global, WorstCase, nonneg, |t, _| {
        oracle(t, OracleProblem::MixedTenacity)
    })
    .oracle(),
    spec("percolation_threshold", "Percolation threshold", R_PERCOLATION, Connectivity, Global, Failures, unit, |t, _| {
        scalar(connectivity::percolation_threshold(t))
    }),
    spec("reliability", "All-terminal reliability at the configured p", R_RELIABILITY, Connectivity, Global, Failures, unit, |t, o| {
        let all: Vec<usize> = (0..t.node_count()).collect();
        Ok(MetricValue::scalar(connectivity::reliability_polynomial(t, &all, o.reliability_p, o.seed)?.value))
    }),
    spec("partition_resilience", "Partition resilience factor", R_RESILIENCE, Connectivity, Global, Failures, unit, |t, o| {
        let opts = ResilienceOptions { seed: o.seed, ..ResilienceOptions::default() };
        Ok(MetricValue::scalar(connectivity::partition_resilience_factor(t, opts)?.value))
    }),
    spec("component_count", "Number of isolated components", R_COMPONENTS, Connectivity, Global, Dynamic, up_to_v, |t, _| {
        Ok(MetricValue::scalar(connectivity::disconnection_stats(t)?.components as f64))
    }),
    spec("giant_fraction", "Fraction of nodes in the largest component", R_GIANT, Connectivity, Global, Dynamic, unit, |t, _| {
        Ok(MetricValue::scalar(connectivity::disconnection_stats(t)?.largest_fraction))
    }),
    spec("mean_component_size", "Average size of isolated components", R_MEAN_SIZE, Connectivity, Global, Dynamic, up_to_v, |t, _| {
        Ok(MetricValue::scalar(connectivity::disconnection_stats(t)?.mean_size))
    }),
    spec(
        "component_class_frequency",
        "Number of components per size class",
        R_CLASS_FREQ,
        Connectivity,
        Global,
        Dynamic,
        up_to_v,
        |t, _| {
            let s = connectivity::disconnection_stats(t)?;
            let n = s.components as f64;
            Ok(MetricValue::distribution(s.class_components.into_iter().map(|(c, f)| (c as f64, Some((f * n).round())))))
        },
    ),
    spec("component_class_nodes", "Share of nodes per component size class", R_CLASS_NODES, Connectivity, Global, Dynamic, unit, |t, _| {
        Ok(MetricValue::distribution(connectivity::disconnection_stats(t)?.class_frequency.into_iter().map(|(c, f)| (c as f64, Some(f)))))
    }),
    spec("reachability", "Share of connected ordered pairs", R_REACH, Connectivity, Global, Dynamic, unit, |t, _| {
        Ok(MetricValue::scalar(connectivity::disconnection_stats(t)?.reachability))
    }),
    // distance
    spec("aspl", "Average shortest path length", R_ASPL, Distance, Global, Static, distances, |t, o| {
        scalar(distance::aspl(t, AsplMode::FiniteOnly, weighted(t, o)?))
    }),
    spec("aspl_giant", "Average shortest path length in the largest component", R_ASPL, Distance, Global, Static, distances, |t, o| {
        scalar(distance::aspl(t, AsplMode::GiantComponent, weighted(t, o)?))
    }),
    spec("aspl_local", "Mean distance from each node", R_ASPL, Distance, Local, Static, distances, |t, o| {
        Ok(MetricValue::per_node(distance::distance_summary(t, weighted(t, o)?)?.per_node_mean))
    }),
    spec("dik", "Diameter-inverse-K", R_DIK, Distance, Global, Static, nonneg, |t, o| {
        option_scalar(distance::distance_summary(t, weighted(t, o)?)?.dik, "no connected pair")
    }),
    spec("diameter", "Diameter", R_DIAMETER, Distance, Global, Static, distances, |t, o| {
        option_scalar(distance::distance_summary(t, weighted(t, o)?)?.diameter, "no connected pair")
    })
    .note("largest finite distance"),
    spec("global_efficiency", "Global efficiency", R_GLOBAL_EFF, Distance, Global, Static, unit_unless_weighted, |t, o| {
        Ok(MetricValue::scalar(distance::global_efficiency(t, weighted(t, o)?)?.global))
    }),
    spec("nodal_efficiency", "Efficiency of each node", R_GLOBAL_EFF, Distance, Local, Static, unit_unless_weighted, |t, o| {
        Ok(nodes(distance::global_efficiency(t, weighted(t, o)?)?.per_node))
    }),
    spec("harmonic_mean_distance", "Harmonic mean of geodesic distances", R_HARMONIC, Distance, Global, Static, nonneg, |t, o| {
        option_scalar(distance::global_efficiency(t, weighted(t, o)?)?.harmonic_mean, "no connected pair")
    }),
    spec("local_efficiency", "Local efficiency", R_LOCAL_EFF, Distance, Local, Static, unit, |t, _| {
        Ok(MetricValue::per_node(distance::local_efficiency(t)?.per_node))
    }),
    spec("local_efficiency_global", "Mean local efficiency", R_LOCAL_EFF, Distance, Global, Static, unit, |t, _| {
        option_scalar(distance::local_efficiency(t)?.global, "no node has two neighbours")
    }),
    spec("cyclic_coefficient", "Cyclic coefficient", R_CYCLIC, Distance, Local, Static, unit, |t, _| {
        Ok(MetricValue::per_node(distance::local_efficiency(t)?.cyclic))
    }),
    spec("cyclic_coefficient_global", "Mean cyclic coefficient", R_CYCLIC, Distance, Global, Static, unit, |t, _| {
        option_scalar(distance::local_efficiency(t)?.cyclic_global, "no node has two neighbours")
    }),
    spec("characteristic_path_length", "Mean distance between label classes", R_CPL, Distance, Local, Static, node_ids, |t, _| {
        let c = distance::characteristic_path_length(t)?;
        Ok(MetricValue::Matrix {
            labels: c.labels,
            values: c.values.into_iter().map(|row| row.into_iter().map(Scalar::from).collect()).collect(),
        })
    })
    .needs(Needs { labels: true, ..Needs::NONE }),
    spec("expansion", "Expansion at the configured hop count", R_EXPANSION, Distance, Global, Static, unit, |t, o| {
        Ok(MetricValue::scalar(distance::expansion(t, o.hops, o.policy)?.global))
    }),
    spec("expansion_local", "Expansion of each node", R_EXPANSION, Distance, Local, Static, unit, |t, o| {
        Ok(nodes(distance::expansion(t, o.hops, o.policy)?.per_node))
    }),
    spec("effective_eccentricity", "Effective eccentricity", R_ECCENTRICITY, Distance, Local, Static, node_ids, |t, o| {
        Ok(counts(distance::effective_eccentricity(t, o.eccentricity_ratio)?))
    }),
    spec("effective_diameter", "Effective diameter", R_ECCENTRICITY, Distance, Global, Static, node_ids, |t, o| {
        Ok(MetricValue::scalar(distance::effective_diameter(t, o.eccentricity_ratio)? as f64))
    }),
    // throughput
    spec(
        "betweenness",
        "Node betweenness",
        R_BETWEENNESS,
        Throughput,
        Local,
        Static,
        |t, _| {
            let n = v(t);
            let m = if t.is_directed() { 1.0 } else { 0.5 };
            Codomain::closed(0.0, m * ((n - 1.0) * (n - 2.0)).max(0.0))
        },
        |t, o| Ok(nodes(throughput::node_betweenness(t, weighted(t, o)?)?)),
    ),
    spec(
        "edge_betweenness",
        "Link betweenness",
        R_BETWEENNESS,
        Throughput,
        Local,
        Static,
        |t, _| {
            let n = v(t);
            let m = if t.is_directed() { 1.0 } else { 0.5 };
            Codomain::closed(0.0, m * n * (n - 1.0))
        },
        |t, o| Ok(edges(t, throughput::edge_betweenness(t, weighted(t, o)?)?.into_iter().map(Some))),
    ),
    spec("as_hegemony", "Hegemony with every node as a viewpoint", R_HEGEMONY, Throughput, Local, Static, unit, |t, o| {
        let all: Vec<usize> = (0..t.node_count()).collect();
        Ok(nodes(throughput::as_hegemony(t, &all, o.hegemony_alpha)?))
    }),
    spec(
        "edge_degree",
        "Edge degree min(k_i, k_j)",
        R_EDGE_DEGREE,
        Throughput,
        Local,
        Static,
        |t, o| {
            let d = degrees(t, o);
            Codomain::closed(0.0, d.hi.unwrap_or(0.0))
        },
        |t, _| Ok(edges(t, adjacency::edge_degree(t, EdgeDegreeRule::Min).into_iter().map(|k| Some(k as f64)))),
    ),
    spec("central_point_dominance", "Central point dominance", R_CPD, Throughput, Global, Static, unit, |t, _| {
        scalar(throughput::central_point_dominance(t))
    }),
    spec(
        "effective_load",
        "Mean load over sampled communicating sets",
        R_LOAD,
        Throughput,
        Local,
        Dynamic,
        |t, _| Codomain::closed(0.0, v(t) * (v(t) - 1.0)),
        |t, o| Ok(nodes(throughput::effective_load(t, o.load_fraction, o.ensemble, o.seed)?.mean)),
    ),
    spec("performance", "Gravity-flow throughput with node weights as demand and capacity", R_PERFORMANCE, Throughput, Global, Static, nonneg, |t, _| {
        let y = t.node_weights().expect("checked by needs");
        let p = throughput::performance(t, y, y, EndpointConvention::TransitAndEndpoint)?;
        option_scalar(p.throughput, "no router carries traffic")
    })
    .needs(Needs { node_weights: true, ..Needs::NONE }),
    spec("elasticity", "Elasticity under removal by decreasing degree", R_ELASTICITY, Throughput, Global, Dynamic, unit, |t, _| {
        let k: Vec<f64> = t.degrees().iter().map(|&k| k as f64).collect();
        Ok(MetricValue::scalar(throughput::elasticity(t, &crate::challenge::descending_order(&k))?.integral))
    })
    .needs(UNDIRECTED),
    spec("impact_component", "Component impact factor of each node", R_IMPACT, Throughput, Local, Dynamic, unit, |t, o| {
        Ok(nodes(impact(t, o)?.cif))
    })
    .note("agents are nodes with a reachable peer; measure is the reachable share; the highest-degree node fails"),
    spec("impact_system", "System impact factor", R_IMPACT, Throughput, Global, Dynamic, unit, |t, o| {
        Ok(MetricValue::scalar(impact(t, o)?.sif))
    })
    .note("share of agents whose component impact factor exceeds the threshold"),
    spec("survivability_failures", "Distribution of delivered traffic share under link failures", R_SURV_FAIL, Throughput, Global, Failures, unit, |t, o| {
        let s = survivability(t, o)?;
        Ok(MetricValue::distribution(s.distribution.into_iter().map(|(x, p)| (x, Some(p)))))
    }),
    spec("survivability_failures_expected", "Expected delivered traffic share under link failures", R_SURV_FAIL, Throughput, Global, Failures, unit, |t, o| {
        Ok(MetricValue::scalar(survivability(t, o)?.expected))
    }),
    // spectral
    spec("eigenvector_centrality", "Eigenvector centrality", R_EIGENVECTOR, Spectral, Local, Static, unit, |t, _| {
        Ok(nodes(spectral::eigenvector_centrality(t, 1e-10, 10_000)?))
    }),
    spec("symmetry_ratio", "Symmetry ratio", R_SYMMETRY, Spectral, Global, Static, up_to_v, |t, _| scalar(spectral::symmetry_ratio(t))),
    spec("spectral_clusters", "Leaf cluster of each node in the spectral hierarchy", R_SPECTRAL_CLUSTERS, Spectral, Local, Static, node_ids, |t, o| {
        Ok(counts(spectral::spectral_clusters(t, o.cluster_depth)?.leaf_of))
    }),
    spec(
        "algebraic_connectivity",
        "Algebraic connectivity",
        R_ALGEBRAIC,
        Spectral,
        Global,
        Static,
        |t, _| {
            let n = v(t);
            let kmin = t.underlying_undirected().degrees().into_iter().min().unwrap_or(0) as f64;
            Codomain::closed(0.0, if n > 1.0 { n / (n - 1.0) * kmin } else { 0.0 })
        },
        |t, _| scalar(spectral::algebraic_connectivity(t)),
    ),
    spec("good_expansion", "Good expansion (1 when the spectral test passes)", R_GOOD_EXP, Spectral, Global, Static, unit, |t, o| {
        let g = spectral::good_expansion_test(t, weighted(t, o)?)?;
        Ok(MetricValue::scalar(g.is_good_expansion as u8 as f64))
    }),
    spec(
        "spanning_trees_ln",
        "Natural log of the number of spanning trees",
        R_SPANNING,
        Spectral,
        Global,
        Static,
        |t, _| {
            let k: Vec<f64> = t.degrees().into_iter().filter(|&k| k > 0).map(|k| k as f64).collect();
            let top = k.iter().cloned().fold(1.0, f64::max);
            Codomain::closed(0.0, k.iter().map(|x| x.ln()).sum::<f64>() - top.ln())
        },
        |t, _| option_scalar(spectral::spanning_tree_count(t)?.ln_count, "graph is disconnected"),
    )
    .needs(UNDIRECTED),
    spec(
        "natural_connectivity",
        "Natural connectivity",
        R_NATURAL,
        Spectral,
        Global,
        Static,
        |t, _| {
            let n = v(t);
            Codomain::closed(0.0, (n - 1.0) - n.ln() + (1.0 + (n - 1.0) * (-n).exp()).ln())
        },
        |t, _| Ok(MetricValue::scalar(spectral::natural_connectivity(t)?.value)),
    ),
    spec("random_walk_aspl", "Mean random-walk hitting time", R_RW_ASPL, Spectral, Global, Static, nonneg, |t, _| {
        let d = spectral::random_walk_distances(t)?;
        let n = d.pair.len();
        if n < 2 {
            return Err(Error::undefined("needs at least two nodes"));
        }
        Ok(MetricValue::scalar(d.to_target.iter().sum::<f64>() / (n * (n - 1)) as f64))
    }),
    spec("random_walk_distance", "Total random-walk hitting time into each node", R_RW_ASPL, Spectral, Local, Static, nonneg, |t, _| {
        Ok(nodes(spectral::random_walk_distances(t)?.to_target))
    }),
    spec("current_flow_closeness", "Current-flow closeness", R_CF_CLOSENESS, Spectral, Local, Static, nonneg, |t, _| {
        Ok(nodes(spectral::current_flow_closeness(t)?.per_node))
    }),
    spec("random_walk_betweenness", "Random-walk betweenness", R_RW_BETWEENNESS, Spectral, Local, Static, nonneg, |t, _| {
        Ok(nodes(spectral::random_walk_betweenness(t)?))
    }),
    spec("current_flow_betweenness", "Current-flow betweenness", R_CF_BETWEENNESS, Spectral, Local, Static, nonneg, |t, _| {
        Ok(nodes(spectral::current_flow_betweenness(t)?))
    }),
    spec("network_criticality", "Network criticality", R_CRITICALITY, Spectral, Global, Static, nonneg, |t, _| {
        Ok(MetricValue::scalar(spectral::network_criticality(t, None)?.tau))
    }),
    spec("kirchhoff_index", "Kirchhoff index", R_CRITICALITY, Spectral, Global, Static, nonneg, |t, _| {
        Ok(MetricValue::scalar(spectral::network_criticality(t, None)?.kirchhoff))
    }),
    // geographic
    spec("distance_strength", "Distance strength", R_DIST_STRENGTH, Geographic, Local, Static, nonneg, |t, _| {
        Ok(nodes(geo::distance_strength_outreach(t)?.distance_strength))
    })
    .needs(G),
    spec("geo_survivability", "Distribution of the largest-component share after geographic events", R_SURV_GEO, Geographic, Global, Dynamic, unit, |t, o| {
        let s = geo::geo_survivability(t, &o.geo_events)?;
        Ok(MetricValue::distribution(s.distribution.into_iter().map(|(x, p)| (x, Some(p)))))
    })
    .needs(Needs { coords: true, events: true, ..Needs::NONE }),
    spec("geo_survivability_expected", "Expected largest-component share after geographic events", R_SURV_GEO, Geographic, Global, Dynamic, unit, |t, o| {
        Ok(MetricValue::scalar(geo::geo_survivability(t, &o.geo_events)?.expected))
    })
    .needs(Needs { coords: true, events: true, ..Needs::NONE }),
    spec("outreach", "Outreach", R_OUTREACH, Geographic, Local, Static, nonneg, |t, _| {
        let s = geo::distance_strength_outreach(t)?;
        Ok(nodes(s.outreach.ok_or_else(|| Error::incompatible("requires edge weights"))?))
    })
    .needs(Needs { coords: true, weights: true, ..Needs::NONE }),
    spec("pointwise_vulnerability", "Pointwise vulnerability", R_POINTWISE, Geographic, Local, Dynamic, unit, |t, _| {
        Ok(nodes(geo::pointwise_vulnerability(t)?.per_node))
    })
    .needs(G),
    spec("global_vulnerability", "Global vulnerability", R_GLOBAL_VULN, Geographic, Global, Dynamic, unit, |t, _| {
        Ok(MetricValue::scalar(geo::pointwise_vulnerability(t)?.global))
    })
    .needs(G),
    spec("vulnerability_relative_variance", "Relative variance of pointwise vulnerability", R_REL_VAR, Geographic, Global, Dynamic, nonneg, |t, _| {
        option_scalar(geo::pointwise_vulnerability(t)?.relative_variance, "mean vulnerability is zero")
    })
    .needs(G),
    spec("tggd", "Total geographic path diversity", R_GEO_DIVERSITY, Geographic, Global, Static, unit, |t, o| {
        Ok(MetricValue::scalar(geo::tggd(t, &o.geo)?.tggd))
    })
    .needs(G),
    spec("ctggd", "Compensated total geographic path diversity", R_GEO_DIVERSITY, Geographic, Global, Static, unit, |t, o| {
        Ok(MetricValue::scalar(geo::tggd(t, &o.geo)?.ctggd))
    })
    .needs(G),
];

fn survivability(t: &Topology, o: &AnalyzeOptions) -> Result<throughput::Survivability> {
    let model = FailureModel {
        entity: FailureEntity::Link,
        probability: vec![o.failure_probability; t.edge_count()],
    };
    // scale unit demands so the busiest link is exactly at capacity
    let mut demands = sampled_demands(t, o.seed);
    let load = throughput::baseline_load(t, &demands);
    let scale = (0..load.len())
        .filter(|&id| load[id] > 0.0)
        .map(|id| t.weight(id) / load[id])
        .fold(f64::INFINITY, f64::min);
    if scale.is_finite() {
        for d in &mut demands {
            d.amount *= scale * (1.0 - 1e-9);
        }
    }
    throughput::survivability_failures(
        t,
        &demands,
        &model,
        Evaluation::MonteCarlo {
            samples: o.samples,
            seed: o.seed,
        },
    )
}

pub fn catalog() -> &'static [MetricSpec] {
    CATALOG
}

pub fn lookup(key: &str) -> Result<&'static MetricSpec> {
    CATALOG
        .iter()
        .find(|s| s.key == key)
        .ok_or_else(|| Error::UnknownMetric(key.to_string()))
}

/// One line of `--list-metrics`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Listing {
    pub row: String,
    pub status: Status,
    pub keys: Vec<String>,
    pub note: String,
}

/// Every table row with its keys, followed by the out-of-scope topics.
pub fn listing() -> Vec<Listing> {
    let mut out: Vec<Listing> = ROWS
        .iter()
        .map(|&row| {
            let specs: Vec<&MetricSpec> = CATALOG.iter().filter(|s| s.row == row).collect();
            let status = if specs.iter().any(|s| s.status == Status::Implemented) {
                Status::Implemented
            } else if specs.is_empty() {
                Status::OutOfScope
            } else {
                Status::OracleOnly
            };
            let extra: Vec<&str> = OUT_OF_SCOPE
                .iter()
                .filter(|o| o.row == Some(row))
                .map(|o| o.key)
                .collect();
            let note = if extra.is_empty() {
                String::new()
            } else {
                format!("out of scope: {}", extra.join(", "))
            };
            Listing {
                row: row.to_string(),
                status,
                keys: specs.iter().map(|s| s.key.to_string()).collect(),
                note,
            }
        })
        .collect();
    out.extend(OUT_OF_SCOPE.iter().map(|o| Listing {
        row: o.topic.to_string(),
        status: Status::OutOfScope,
        keys: vec![o.key.to_string()],
        note: o.note.to_string(),
    }));
    out
}

/// Plain-text rendering: `status<TAB>row<TAB>keys<TAB>note`.
pub fn listing_text() -> String {
    listing()
        .into_iter()
        .map(|l| {
            format!(
                "{}\t{}\t{}\t{}\n",
                l.status.key(),
                l.row,
                l.keys.join(","),
                l.note
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_unique_and_rows_known() {
        let mut keys: Vec<&str> = CATALOG.iter().map(|s| s.key).collect();
        keys.extend(OUT_OF_SCOPE.iter().map(|o| o.key));
        let n = keys.len();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), n);
        for s in CATALOG {
            assert!(ROWS.contains(&s.row), "{}", s.key);
        }
    }

    #[test]
    fn every_row_has_a_key() {
        for row in ROWS {
            assert!(CATALOG.iter().any(|s| s.row == row), "{row}");
        }
        assert_eq!(listing().len(), ROWS.len() + OUT_OF_SCOPE.len());
    }

    #[test]
    fn demand_pairs_are_valid() {
        let t = crate::graph::generate::complete(6).unwrap();
        let d = sampled_demands(&t, 1);
        assert_eq!(d.len(), 15);
        assert!(d.iter().all(|x| x.source < x.target && x.target < 6));
        let mut pairs: Vec<_> = d.iter().map(|x| (x.source, x.target)).collect();
        pairs.dedup();
        assert_eq!(pairs.len(), 15);
    }

    #[test]
    fn impact_on_star() {
        let t = crate::graph::generate::star(5).unwrap();
        let f = impact(&t, &AnalyzeOptions::default()).unwrap();
        assert_eq!(f.cif, vec![1.0; 5]);
        assert_eq!(f.sif, 1.0);
    }
}
