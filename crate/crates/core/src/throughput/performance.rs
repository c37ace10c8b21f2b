//! Gravity-flow performance and elasticity under node removal. Every pair
//! is routed on one deterministic shortest path (lowest-id BFS parent).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_tree, is_connected, Topology};

/// Which routers on a path consume capacity for a flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndpointConvention {
    /// Every router on the path, source and destination included.
    #[default]
    TransitAndEndpoint,
    /// Interior routers only.
    TransitOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Performance {
    /// ρ* = min_r b_r/ℓ_r; `None` when no router is loaded.
    pub rho: Option<f64>,
    /// P(G) = ρ*·Σ_{i<j} y_i y_j.
    pub throughput: Option<f64>,
    /// ℓ_r per router.
    pub load: Vec<f64>,
    /// Router attaining the minimum.
    pub bottleneck: Option<usize>,
}

/// Per-router gravity load ℓ_r = Σ_{pairs through r} y_i y_j over unordered
/// pairs, one BFS-tree path per pair taken from the lower-id endpoint.
pub fn router_loads(t: &Topology, demand: &[f64], conv: EndpointConvention) -> Vec<f64> {
    let n = t.node_count();
    let mut load = vec![0.0; n];
    let mut sub = vec![0.0; n];
    for i in 0..n {
        let (dist, parent) = bfs_tree(t, i);
        let mut order: Vec<usize> = (0..n).filter(|&u| dist[u].is_some()).collect();
        order.sort_by_key(|&u| dist[u]);
        for &u in &order {
            sub[u] = if u > i { demand[u] } else { 0.0 };
        }
        for &u in order.iter().rev() {
            if let Some(p) = parent[u] {
                sub[p] += sub[u];
            }
        }
        for &u in &order {
            let own = if u > i { demand[u] } else { 0.0 };
            let carried = match conv {
                EndpointConvention::TransitAndEndpoint => sub[u],
                EndpointConvention::TransitOnly if u == i => 0.0,
                EndpointConvention::TransitOnly => sub[u] - own,
            };
            load[u] += demand[i] * carried;
        }
    }
    load
}

/// ρ* and P(G) for demands `y` and router capacities `b`.
pub fn performance(
    t: &Topology,
    demand: &[f64],
    capacity: &[f64],
    conv: EndpointConvention,
) -> Result<Performance> {
    let n = t.node_count();
    if demand.len() != n || capacity.len() != n {
        return Err(Error::param(
            "demand and capacity vectors must have one entry per node",
        ));
    }
    if demand.iter().chain(capacity).any(|&x| !(x > 0.0)) {
        return Err(Error::param("demands and capacities must be positive"));
    }
    if !is_connected(t) {
        return Err(Error::undefined("performance needs a connected graph"));
    }
    let load = router_loads(t, demand, conv);
    let mut best: Option<(f64, usize)> = None;
    for r in 0..n {
        if load[r] > 0.0 {
            let x = capacity[r] / load[r];
            if best.is_none_or(|(b, _)| x < b) {
                best = Some((x, r));
            }
        }
    }
    let pair_mass: f64 = (0..n)
        .map(|i| demand[i] * demand[i + 1..].iter().sum::<f64>())
        .sum();
    Ok(Performance {
        rho: best.map(|b| b.0),
        throughput: best.map(|b| b.0 * pair_mass),
        load,
        bottleneck: best.map(|b| b.1),
    })
}

/// Unnormalised homogeneous throughput with unit link capacities: every
/// unordered pair sends ρ, ρ = 1/max link load, T = ρ·#pairs. Zero when the
/// graph is disconnected or has fewer than two nodes.
pub fn uniform_throughput(t: &Topology) -> f64 {
    let n = t.node_count();
    if n < 2 || !is_connected(t) {
        return 0.0;
    }
    let mut link = vec![0.0f64; t.edge_count()];
    let mut sub = vec![0.0; n];
    for i in 0..n {
        let (dist, parent) = bfs_tree(t, i);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&u| dist[u]);
        for &u in &order {
            sub[u] = if u > i { 1.0 } else { 0.0 };
        }
        for &u in order.iter().rev() {
            if let Some(p) = parent[u] {
                sub[p] += sub[u];
                link[t.edge_id(p, u).expect("tree edge")] += sub[u];
            }
        }
    }
    let max = link.iter().cloned().fold(0.0, f64::max);
    let pairs = (n * (n - 1) / 2) as f64;
    pairs / max
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElasticityCurve {
    /// Removal fractions n̂/v, starting at 0.
    pub fraction: Vec<f64>,
    /// T_G normalised so the first value is 1.
    pub throughput: Vec<f64>,
    /// Trapezoid integral of the curve up to the last recorded point.
    pub integral: f64,
    /// True when a removal disconnected the graph and the curve stopped.
    pub stopped_early: bool,
}

/// Removes nodes in `sequence` order and records normalised throughput after
/// each removal. A disconnecting removal records T = 0 and ends the curve.
pub fn elasticity(t: &Topology, sequence: &[usize]) -> Result<ElasticityCurve> {
    let n = t.node_count();
    if t.is_directed() {
        return Err(Error::incompatible(
            "elasticity is defined on undirected graphs",
        ));
    }
    let base = uniform_throughput(t);
    if base <= 0.0 {
        return Err(Error::undefined(
            "baseline throughput is zero (disconnected or trivial graph)",
        ));
    }
    let mut alive = vec![true; n];
    let mut fraction = vec![0.0];
    let mut throughput = vec![1.0];
    let mut stopped_early = false;
    for (k, &u) in sequence.iter().enumerate() {
        if u >= n || !alive[u] {
            return Err(Error::param(format!(
                "invalid or repeated node {u} in removal sequence"
            )));
        }
        alive[u] = false;
        let (sub, _) = t.induced(&alive);
        let live = n - k - 1;
        let value = uniform_throughput(&sub) / base;
        fraction.push((k + 1) as f64 / n as f64);
        throughput.push(value);
        if value == 0.0 && live >= 2 {
            stopped_early = true;
            break;
        }
    }
    let integral = fraction
        .windows(2)
        .zip(throughput.windows(2))
        .map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) / 2.0)
        .sum();
    Ok(ElasticityCurve {
        fraction,
        throughput,
        integral,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn p3_example() {
        let t = path(3).unwrap();
        let b = [10.0; 3];
        let y = [1.0; 3];
        let p = performance(&t, &y, &b, EndpointConvention::TransitOnly).unwrap();
        assert_eq!(p.rho, Some(10.0));
        let p = performance(&t, &y, &b, EndpointConvention::TransitAndEndpoint).unwrap();
        assert!((p.rho.unwrap() - 10.0 / 3.0).abs() < 1e-12);
        assert!((p.throughput.unwrap() - 10.0).abs() < 1e-12);
        let p2 = performance(&t, &y, &[20.0; 3], EndpointConvention::TransitAndEndpoint).unwrap();
        assert!((p2.rho.unwrap() - 20.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn unconstrained_when_no_transit() {
        let t = path(2).unwrap();
        let p = performance(&t, &[1.0; 2], &[1.0; 2], EndpointConvention::TransitOnly).unwrap();
        assert_eq!(p.rho, None);
    }

    #[test]
    fn complete_graph_throughput() {
        assert_eq!(uniform_throughput(&complete(6).unwrap()), 15.0);
        // star: every leaf link carries v−1 pairs
        assert_eq!(uniform_throughput(&star(5).unwrap()), 10.0 / 4.0);
    }

    #[test]
    fn full_mesh_bound() {
        let t = complete(20).unwrap();
        let seq: Vec<usize> = (0..20).collect();
        let c = elasticity(&t, &seq).unwrap();
        assert!(c.integral <= 1.0 / 3.0 + 1e-6);
        assert_eq!(c.throughput[0], 1.0);
        assert_eq!(*c.throughput.last().unwrap(), 0.0);
    }

    #[test]
    fn star_hub_removal_hurts_more() {
        let t = star(5).unwrap();
        let hub = elasticity(&t, &[0]).unwrap();
        let leaf = elasticity(&t, &[1]).unwrap();
        assert!(hub.throughput[1] < leaf.throughput[1]);
        assert!(hub.stopped_early);
    }
}
