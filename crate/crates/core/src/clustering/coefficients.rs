//! Clustering coefficients: local and global simple-graph versions, the
//! degree-corrected variant, weighted variants and edge clustering.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::metric::MetricValue;

/// Triplet value used by the weighted global coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TauDef {
    Arithmetic,
    Geometric,
    Max,
    Min,
}

impl TauDef {
    fn value(self, a: f64, b: f64) -> f64 {
        match self {
            TauDef::Arithmetic => (a + b) / 2.0,
            TauDef::Geometric => (a * b).sqrt(),
            TauDef::Max => a.max(b),
            TauDef::Min => a.min(b),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "tau", rename_all = "snake_case")]
pub enum ClusteringVariant {
    WattsLocal,
    GlobalAvg,
    GlobalTriangle,
    SofferLocal,
    SofferGlobal,
    SofferGlobalTriangle,
    BarratWeighted,
    OnnelaWeighted,
    Opsahl(TauDef),
    WassermanDirected(TauDef),
}

/// Neighbour sets of the underlying simple graph plus an adjacency test.
struct Simple {
    g: Topology,
}

impl Simple {
    fn new(t: &Topology) -> Self {
        Simple {
            g: t.underlying_undirected(),
        }
    }

    fn k(&self, u: usize) -> usize {
        self.g.degree(u)
    }

    /// e(V_i): edges among the neighbours of every node.
    fn neighbour_edges(&self) -> Vec<usize> {
        let n = self.g.node_count();
        let mut mark = vec![false; n];
        (0..n)
            .map(|i| {
                let nb = self.g.neighbors(i);
                nb.iter().for_each(|&(j, _)| mark[j] = true);
                let mut e = 0;
                for &(j, _) in nb {
                    e += self
                        .g
                        .neighbors(j)
                        .iter()
                        .filter(|&&(l, _)| l > j && mark[l])
                        .count();
                }
                nb.iter().for_each(|&(j, _)| mark[j] = false);
                e
            })
            .collect()
    }
}

/// C_i = e(V_i)/(k_i(k_i−1)/2); `None` for k_i ≤ 1.
pub fn local_clustering(t: &Topology) -> Vec<Option<f64>> {
    let s = Simple::new(t);
    s.neighbour_edges()
        .into_iter()
        .enumerate()
        .map(|(i, e)| {
            let k = s.k(i);
            (k > 1).then(|| 2.0 * e as f64 / (k * (k - 1)) as f64)
        })
        .collect()
}

fn mean_defined(values: &[Option<f64>], what: &str) -> Result<f64> {
    let d: Vec<f64> = values.iter().flatten().copied().collect();
    if d.is_empty() {
        return Err(Error::undefined(format!("no node has a defined {what}")));
    }
    Ok(d.iter().sum::<f64>() / d.len() as f64)
}

/// C: mean of C_i over nodes with k_i > 1.
pub fn average_clustering(t: &Topology) -> Result<f64> {
    mean_defined(&local_clustering(t), "clustering coefficient")
}

/// C_Δ = Σ e(V_i) / Σ k_i(k_i−1)/2.
pub fn transitivity(t: &Topology) -> Result<f64> {
    let s = Simple::new(t);
    let num: usize = s.neighbour_edges().iter().sum();
    let den: usize = (0..s.g.node_count())
        .map(|i| s.k(i) * s.k(i).saturating_sub(1) / 2)
        .sum();
    if den == 0 {
        return Err(Error::undefined("no connected triplets"));
    }
    Ok(num as f64 / den as f64)
}

/// C(k): mean C_i per degree class k ≥ 2.
pub fn clustering_by_degree(t: &Topology) -> BTreeMap<usize, f64> {
    let c = local_clustering(t);
    let g = t.underlying_undirected();
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (i, v) in c.iter().enumerate() {
        if let Some(v) = v {
            let e = acc.entry(g.degree(i)).or_insert((0.0, 0));
            e.0 += v;
            e.1 += 1;
        }
    }
    acc.into_iter()
        .map(|(k, (s, n))| (k, s / n as f64))
        .collect()
}

/// Degree-corrected clustering for one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SofferNode {
    pub neighbour_edges: usize,
    /// Ω_i = ⌊½ Σ_{j∈V_i} min(k_j − 1, k_i − 1)⌋.
    pub omega_bound: usize,
    /// ω_i from the greedy rewiring, between e(V_i) and Ω_i.
    pub omega: usize,
    /// c̃_i = e(V_i)/ω_i; `None` when ω_i = 0.
    pub value: Option<f64>,
    /// e(V_i)/Ω_i.
    pub value_bound: Option<f64>,
}

/// Greedy maximum number of edges in a simple graph whose node degrees stay
/// within `caps`: the node with the largest remaining cap is joined to the
/// nodes with the next largest caps.
fn greedy_edges(mut caps: Vec<usize>) -> usize {
    let mut edges = 0;
    loop {
        caps.retain(|&c| c > 0);
        if caps.len() < 2 {
            return edges;
        }
        caps.sort_unstable_by(|a, b| b.cmp(a));
        let c = caps[0].min(caps.len() - 1);
        caps[0] = 0;
        for x in caps.iter_mut().skip(1).take(c) {
            *x -= 1;
        }
        edges += c;
    }
}

pub fn soffer_local(t: &Topology) -> Vec<SofferNode> {
    let s = Simple::new(t);
    let e = s.neighbour_edges();
    (0..s.g.node_count())
        .map(|i| {
            let ki = s.k(i);
            let caps: Vec<usize> =
                s.g.neighbors(i)
                    .iter()
                    .map(|&(j, _)| (s.k(j) - 1).min(ki.saturating_sub(1)))
                    .collect();
            let omega_bound = caps.iter().sum::<usize>() / 2;
            let omega = greedy_edges(caps).clamp(e[i], omega_bound.max(e[i]));
            let ratio = |w: usize| (w > 0).then(|| e[i] as f64 / w as f64);
            SofferNode {
                neighbour_edges: e[i],
                omega_bound,
                omega,
                value: ratio(omega),
                value_bound: ratio(omega_bound),
            }
        })
        .collect()
}

/// C̃: mean c̃_i over nodes with ω_i > 0.
pub fn soffer_global(t: &Topology) -> Result<f64> {
    let v: Vec<Option<f64>> = soffer_local(t).iter().map(|x| x.value).collect();
    mean_defined(&v, "degree-corrected coefficient")
}

/// C̃_Δ = Σ e(V_i) / Σ ω_i.
pub fn soffer_global_triangle(t: &Topology) -> Result<f64> {
    let s = soffer_local(t);
    let den: usize = s.iter().map(|x| x.omega).sum();
    if den == 0 {
        return Err(Error::undefined("all ω_i are zero"));
    }
    Ok(s.iter().map(|x| x.neighbour_edges).sum::<usize>() as f64 / den as f64)
}

fn require_weights(t: &Topology) -> Result<Topology> {
    if !t.is_weighted() {
        return Err(Error::incompatible(
            "weighted clustering needs edge weights",
        ));
    }
    Ok(t.underlying_undirected())
}

fn weight_between(g: &Topology, a: usize, b: usize) -> Option<f64> {
    g.edge_id(a, b).map(|id| g.weight(id))
}

/// Ĉ^w_i = 1/(s_i(k_i−1)) Σ_{(j,h)} (w_ij + w_ih)/2 a_ij a_ih a_jh over
/// ordered neighbour pairs.
pub fn barrat_local(t: &Topology) -> Result<Vec<Option<f64>>> {
    let g = require_weights(t)?;
    Ok((0..g.node_count())
        .map(|i| {
            let nb = g.neighbors(i);
            let k = nb.len();
            if k < 2 {
                return None;
            }
            let mut sum = 0.0;
            for (x, &(j, e1)) in nb.iter().enumerate() {
                for &(h, e2) in &nb[x + 1..] {
                    if g.has_edge(j, h) {
                        sum += g.weight(e1) + g.weight(e2);
                    }
                }
            }
            Some(sum / (g.strength(i) * (k - 1) as f64))
        })
        .collect())
}

/// C̃^w_i = 2/(k_i(k_i−1)) Σ_{j<h} (ŵ_ij ŵ_jh ŵ_ih)^{1/3}, ŵ = w / max w.
pub fn onnela_local(t: &Topology) -> Result<Vec<Option<f64>>> {
    let g = require_weights(t)?;
    let wmax = (0..g.edge_count())
        .map(|id| g.weight(id))
        .fold(0.0, f64::max);
    Ok((0..g.node_count())
        .map(|i| {
            let nb = g.neighbors(i);
            let k = nb.len();
            if k < 2 {
                return None;
            }
            let mut sum = 0.0;
            for (x, &(j, e1)) in nb.iter().enumerate() {
                for &(h, e2) in &nb[x + 1..] {
                    if let Some(wjh) = weight_between(&g, j, h) {
                        sum += (g.weight(e1) * g.weight(e2) * wjh / wmax.powi(3)).cbrt();
                    }
                }
            }
            Some(2.0 * sum / (k * (k - 1)) as f64)
        })
        .collect())
}

/// C_τ over undirected triplets centred on each node.
pub fn opsahl(t: &Topology, tau: TauDef) -> Result<f64> {
    let g = t.underlying_undirected();
    let (mut closed, mut all) = (0.0, 0.0);
    for i in 0..g.node_count() {
        let nb = g.neighbors(i);
        for (x, &(j, e1)) in nb.iter().enumerate() {
            for &(h, e2) in &nb[x + 1..] {
                let v = tau.value(g.weight(e1), g.weight(e2));
                all += v;
                if g.has_edge(j, h) {
                    closed += v;
                }
            }
        }
    }
    if all == 0.0 {
        return Err(Error::undefined("no triplets"));
    }
    Ok(closed / all)
}

/// C_τ with directed triplets i→j→h (i ≠ h), closed when i→h exists.
pub fn wasserman_directed(t: &Topology, tau: TauDef) -> Result<f64> {
    if !t.is_directed() {
        return Err(Error::incompatible(
            "directed triplet definition needs a directed graph",
        ));
    }
    let (mut closed, mut all) = (0.0, 0.0);
    for i in 0..t.node_count() {
        for &(j, e1) in t.neighbors(i) {
            for &(h, e2) in t.neighbors(j) {
                if h == i {
                    continue;
                }
                let v = tau.value(t.weight(e1), t.weight(e2));
                all += v;
                if t.has_edge(i, h) {
                    closed += v;
                }
            }
        }
    }
    if all == 0.0 {
        return Err(Error::undefined("no directed triplets"));
    }
    Ok(closed / all)
}

/// Dispatches one variant into a report value.
pub fn clustering_coefficient(t: &Topology, variant: ClusteringVariant) -> Result<MetricValue> {
    use ClusteringVariant::*;
    Ok(match variant {
        WattsLocal => MetricValue::per_node(local_clustering(t)),
        GlobalAvg => MetricValue::scalar(average_clustering(t)?),
        GlobalTriangle => MetricValue::scalar(transitivity(t)?),
        SofferLocal => MetricValue::per_node(soffer_local(t).iter().map(|x| x.value)),
        SofferGlobal => MetricValue::scalar(soffer_global(t)?),
        SofferGlobalTriangle => MetricValue::scalar(soffer_global_triangle(t)?),
        BarratWeighted => MetricValue::per_node(barrat_local(t)?),
        OnnelaWeighted => MetricValue::per_node(onnela_local(t)?),
        Opsahl(tau) => MetricValue::scalar(opsahl(t, tau)?),
        WassermanDirected(tau) => MetricValue::scalar(wasserman_directed(t, tau)?),
    })
}

/// Edge clustering per edge id of the underlying simple graph:
/// order 3 gives (T∆+1)/min(k_i−1, k_j−1), order 4 gives
/// (z4+1)/((k_i−1)(k_j−1)) with z4 the squares through the edge.
pub fn edge_clustering(t: &Topology, order: usize) -> Result<Vec<Option<f64>>> {
    if order != 3 && order != 4 {
        return Err(Error::param(format!(
            "loop order {order} not supported (3 or 4)"
        )));
    }
    let g = t.underlying_undirected();
    let n = g.node_count();
    let mut mark = vec![false; n];
    Ok(g.edges()
        .iter()
        .map(|&(i, j)| {
            let (ki, kj) = (g.degree(i), g.degree(j));
            if ki < 2 || kj < 2 {
                return None;
            }
            g.neighbors(j).iter().for_each(|&(x, _)| mark[x] = true);
            let value = if order == 3 {
                let tri = g.neighbors(i).iter().filter(|&&(x, _)| mark[x]).count();
                (tri + 1) as f64 / (ki - 1).min(kj - 1) as f64
            } else {
                let mut z4 = 0;
                for &(a, _) in g.neighbors(i) {
                    if a == j {
                        continue;
                    }
                    z4 += g
                        .neighbors(a)
                        .iter()
                        .filter(|&&(b, _)| b != i && b != j && mark[b])
                        .count();
                }
                (z4 + 1) as f64 / ((ki - 1) * (kj - 1)) as f64
            };
            g.neighbors(j).iter().for_each(|&(x, _)| mark[x] = false);
            Some(value)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn bowtie() -> Topology {
        // two triangles sharing node 0
        Topology::undirected(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap()
    }

    #[test]
    fn simple_examples() {
        let k3 = complete(3).unwrap();
        assert_eq!(local_clustering(&k3), vec![Some(1.0); 3]);
        assert_eq!(transitivity(&k3).unwrap(), 1.0);
        let s = local_clustering(&star(4).unwrap());
        assert_eq!(s, vec![Some(0.0), None, None, None]);
        let b = bowtie();
        assert!((local_clustering(&b)[0].unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // 3 × 2 triangles over 6 + 4·1 connected triplets
        assert!((transitivity(&b).unwrap() - 0.6).abs() < 1e-12);
    }

    #[test]
    fn greedy_capacity_graph() {
        assert_eq!(greedy_edges(vec![3, 3, 3, 3]), 6);
        assert_eq!(greedy_edges(vec![1, 1, 1]), 1);
        assert_eq!(greedy_edges(vec![2, 1, 1]), 2);
        assert_eq!(greedy_edges(vec![0, 0]), 0);
    }

    #[test]
    fn soffer_on_bowtie() {
        let s = soffer_local(&bowtie());
        // centre: neighbours have degree 2, so each offers one excess edge
        assert_eq!(s[0].omega_bound, 2);
        assert_eq!(s[0].omega, 2);
        assert_eq!(s[0].value, Some(1.0));
        assert_eq!(s[1].value, Some(1.0));
        let star_leaves = soffer_local(&star(4).unwrap());
        assert_eq!(star_leaves[0].value, None);
    }

    #[test]
    fn weighted_variants_collapse_on_unit_weights() {
        let t = barabasi_albert(60, 3, 4).unwrap();
        let w: Vec<(usize, usize, f64)> = t.edges().iter().map(|&(a, b)| (a, b, 1.0)).collect();
        let tw = Topology::weighted(60, &w).unwrap();
        let c = local_clustering(&t);
        let b = barrat_local(&tw).unwrap();
        let o = onnela_local(&tw).unwrap();
        for i in 0..60 {
            match c[i] {
                Some(x) => {
                    assert!((b[i].unwrap() - x).abs() < 1e-12);
                    assert!((o[i].unwrap() - x).abs() < 1e-12);
                }
                None => assert!(b[i].is_none() && o[i].is_none()),
            }
        }
        let ct = transitivity(&t).unwrap();
        for tau in [
            TauDef::Arithmetic,
            TauDef::Geometric,
            TauDef::Max,
            TauDef::Min,
        ] {
            assert!((opsahl(&tw, tau).unwrap() - ct).abs() < 1e-12);
        }
        assert!(barrat_local(&t).is_err());
    }

    #[test]
    fn directed_triplets() {
        let t = Topology::directed(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(wasserman_directed(&t, TauDef::Min).unwrap(), 1.0);
        let t = Topology::directed(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(wasserman_directed(&t, TauDef::Min).unwrap(), 0.0);
    }

    #[test]
    fn edge_cc_examples() {
        let e = edge_clustering(&complete(3).unwrap(), 3).unwrap();
        assert_eq!(e, vec![Some(2.0); 3]);
        // two triangles joined by a bridge 2-3
        let t = Topology::undirected(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)])
            .unwrap();
        let e = edge_clustering(&t, 3).unwrap();
        let bridge = t.edge_id(2, 3).unwrap();
        assert_eq!(e[bridge], Some(0.5));
        let e = edge_clustering(&path(3).unwrap(), 3).unwrap();
        assert_eq!(e, vec![None, None]);
        // C4: each edge lies on one square
        let e = edge_clustering(&cycle(4).unwrap(), 4).unwrap();
        assert_eq!(e, vec![Some(2.0); 4]);
    }
}
