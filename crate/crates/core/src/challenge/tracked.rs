//! Global metrics evaluated on the surviving graph after each challenge step,
//! and per-entity ranking metrics for targeted attacks.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Entity;
use crate::clustering::{edge_clustering, local_clustering};
use crate::error::{Error, Result};
use crate::graph::{bfs_hops, components, Topology};
use crate::spectral::eigenvector_centrality;
use crate::throughput::{edge_betweenness, node_betweenness};

/// Degradation metrics recorded along a trace. Fractions and pair averages
/// are taken relative to the original node (or edge) count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackedMetric {
    /// |V_L| / v.
    GiantFraction,
    /// Connected ordered pairs / v(v−1).
    Reachability,
    /// Σ 1/d_ij over ordered pairs / v(v−1).
    GlobalEfficiency,
    /// Mean hop distance over connected surviving pairs.
    Aspl,
    Components,
    /// Surviving edges / e.
    EdgeFraction,
}

impl TrackedMetric {
    pub const ALL: [TrackedMetric; 6] = [
        TrackedMetric::GiantFraction,
        TrackedMetric::Reachability,
        TrackedMetric::GlobalEfficiency,
        TrackedMetric::Aspl,
        TrackedMetric::Components,
        TrackedMetric::EdgeFraction,
    ];

    pub fn key(self) -> &'static str {
        match self {
            TrackedMetric::GiantFraction => "giant_fraction",
            TrackedMetric::Reachability => "reachability",
            TrackedMetric::GlobalEfficiency => "global_efficiency",
            TrackedMetric::Aspl => "aspl",
            TrackedMetric::Components => "components",
            TrackedMetric::EdgeFraction => "edge_fraction",
        }
    }

    pub fn parse(key: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.key() == key)
            .ok_or_else(|| Error::UnknownMetric(key.to_string()))
    }

    /// Value on `view`, the surviving graph; `v0`/`e0` are the original
    /// node and edge counts.
    pub fn evaluate(self, view: &Topology, v0: usize, e0: usize) -> Result<f64> {
        let pairs0 = (v0 * v0.saturating_sub(1)) as f64;
        match self {
            TrackedMetric::GiantFraction => Ok(components(view).largest() as f64 / v0 as f64),
            TrackedMetric::Components => Ok(components(view).count() as f64),
            TrackedMetric::EdgeFraction => {
                if e0 == 0 {
                    return Err(Error::undefined("graph has no edges"));
                }
                Ok(view.edge_count() as f64 / e0 as f64)
            }
            TrackedMetric::Reachability => {
                if pairs0 == 0.0 {
                    return Err(Error::undefined("needs at least two nodes"));
                }
                let connected = if view.is_directed() {
                    hop_sums(view).iter().map(|s| s.0).sum::<f64>()
                } else {
                    components(view)
                        .sizes
                        .iter()
                        .map(|&s| (s * (s - 1)) as f64)
                        .sum()
                };
                Ok(connected / pairs0)
            }
            TrackedMetric::GlobalEfficiency => {
                if pairs0 == 0.0 {
                    return Err(Error::undefined("needs at least two nodes"));
                }
                Ok(hop_sums(view).iter().map(|s| s.2).sum::<f64>() / pairs0)
            }
            TrackedMetric::Aspl => {
                let sums = hop_sums(view);
                let count: f64 = sums.iter().map(|s| s.0).sum();
                if count == 0.0 {
                    return Err(Error::undefined("no connected pairs remain"));
                }
                Ok(sums.iter().map(|s| s.1).sum::<f64>() / count)
            }
        }
    }
}

/// Per source: (reachable targets, Σ d, Σ 1/d).
fn hop_sums(t: &Topology) -> Vec<(f64, f64, f64)> {
    (0..t.node_count())
        .into_par_iter()
        .map(|s| {
            bfs_hops(t, s)
                .iter()
                .enumerate()
                .filter(|&(w, _)| w != s)
                .fold((0.0, 0.0, 0.0), |acc, (_, d)| match d {
                    Some(d) => (acc.0 + 1.0, acc.1 + *d as f64, acc.2 + 1.0 / *d as f64),
                    None => acc,
                })
        })
        .collect()
}

/// Metric used to rank entities in a targeted attack.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKey {
    Degree,
    Strength,
    Betweenness,
    /// Harmonic closeness Σ 1/d_ij.
    Closeness,
    Clustering,
    Eigenvector,
    EdgeBetweenness,
    EdgeClustering,
}

impl RankKey {
    pub const ALL: [RankKey; 8] = [
        RankKey::Degree,
        RankKey::Strength,
        RankKey::Betweenness,
        RankKey::Closeness,
        RankKey::Clustering,
        RankKey::Eigenvector,
        RankKey::EdgeBetweenness,
        RankKey::EdgeClustering,
    ];

    pub fn key(self) -> &'static str {
        match self {
            RankKey::Degree => "degree",
            RankKey::Strength => "strength",
            RankKey::Betweenness => "betweenness",
            RankKey::Closeness => "closeness",
            RankKey::Clustering => "clustering",
            RankKey::Eigenvector => "eigenvector",
            RankKey::EdgeBetweenness => "edge_betweenness",
            RankKey::EdgeClustering => "edge_clustering",
        }
    }

    pub fn parse(key: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.key() == key)
            .ok_or_else(|| Error::UnknownMetric(key.to_string()))
    }

    pub fn entity(self) -> Entity {
        match self {
            RankKey::EdgeBetweenness | RankKey::EdgeClustering => Entity::Edge,
            _ => Entity::Node,
        }
    }

    /// Scores indexed by node id or edge id of `t`.
    pub fn scores(self, t: &Topology) -> Result<Vec<f64>> {
        let n = t.node_count();
        Ok(match self {
            RankKey::Degree => (0..n).map(|u| t.degree(u) as f64).collect(),
            RankKey::Strength => (0..n).map(|u| t.strength(u)).collect(),
            RankKey::Betweenness => node_betweenness(t, false)?,
            RankKey::Closeness => (0..n)
                .into_par_iter()
                .map(|s| {
                    bfs_hops(t, s)
                        .iter()
                        .flatten()
                        .filter(|&&d| d > 0)
                        .map(|&d| 1.0 / d as f64)
                        .sum()
                })
                .collect(),
            RankKey::Clustering => local_clustering(t)
                .into_iter()
                .map(|c| c.unwrap_or(0.0))
                .collect(),
            RankKey::Eigenvector => eigenvector_centrality(t, 1e-10, 10_000)?,
            RankKey::EdgeBetweenness => edge_betweenness(t, false)?,
            RankKey::EdgeClustering => edge_clustering(t, 3)?
                .into_iter()
                .map(|c| c.unwrap_or(0.0))
                .collect(),
        })
    }
}

/// Indices sorted by descending score, ties by lowest index.
pub fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn intact_values() {
        let t = complete(4).unwrap();
        assert_eq!(
            TrackedMetric::GiantFraction.evaluate(&t, 4, 6).unwrap(),
            1.0
        );
        assert_eq!(TrackedMetric::Reachability.evaluate(&t, 4, 6).unwrap(), 1.0);
        assert_eq!(
            TrackedMetric::GlobalEfficiency.evaluate(&t, 4, 6).unwrap(),
            1.0
        );
        assert_eq!(TrackedMetric::Aspl.evaluate(&t, 4, 6).unwrap(), 1.0);
        // P3 counted against an original v of 4
        let p = path(3).unwrap();
        assert_eq!(TrackedMetric::Reachability.evaluate(&p, 4, 6).unwrap(), 0.5);
        assert!(
            (TrackedMetric::GlobalEfficiency.evaluate(&p, 4, 6).unwrap() - 5.0 / 12.0).abs()
                < 1e-12
        );
        assert!(TrackedMetric::Aspl
            .evaluate(&Topology::undirected(2, &[]).unwrap(), 2, 1)
            .is_err());
    }

    #[test]
    fn keys_round_trip() {
        for m in TrackedMetric::ALL {
            assert_eq!(TrackedMetric::parse(m.key()).unwrap(), m);
        }
        for k in RankKey::ALL {
            assert_eq!(RankKey::parse(k.key()).unwrap(), k);
        }
        assert!(matches!(
            RankKey::parse("nope"),
            Err(Error::UnknownMetric(_))
        ));
    }

    #[test]
    fn order_ties_by_id() {
        assert_eq!(descending_order(&[1.0, 3.0, 3.0, 0.0]), vec![1, 2, 0, 3]);
    }
}
