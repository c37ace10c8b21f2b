//! Shortest-path betweenness by Brandes accumulation, for nodes and edges,
//! hop or weighted (`1/w` lengths), with optional masks and target weights.

use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{HeapItem, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Node,
    Edge,
}

/// Restrictions applied to one accumulation run.
#[derive(Clone, Copy, Default)]
pub(crate) struct Masks<'a> {
    pub nodes: Option<&'a [bool]>,
    pub edges: Option<&'a [bool]>,
}

impl Masks<'_> {
    fn node(&self, u: usize) -> bool {
        self.nodes.is_none_or(|m| m[u])
    }
    fn edge(&self, id: usize) -> bool {
        self.edges.is_none_or(|m| m[id])
    }
}

/// Per-source scratch space.
pub(crate) struct Sweep {
    dist: Vec<f64>,
    sigma: Vec<f64>,
    delta: Vec<f64>,
    order: Vec<usize>,
    preds: Vec<Vec<(usize, usize)>>,
}

const TIE: f64 = 1e-12;

impl Sweep {
    pub(crate) fn new(n: usize) -> Self {
        Sweep {
            dist: vec![f64::INFINITY; n],
            sigma: vec![0.0; n],
            delta: vec![0.0; n],
            order: Vec::with_capacity(n),
            preds: vec![Vec::new(); n],
        }
    }

    fn reset(&mut self) {
        for &u in &self.order {
            self.dist[u] = f64::INFINITY;
            self.sigma[u] = 0.0;
            self.delta[u] = 0.0;
            self.preds[u].clear();
        }
        self.order.clear();
    }

    fn explore_hops(&mut self, t: &Topology, s: usize, m: Masks) {
        let mut queue = VecDeque::from([s]);
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        while let Some(u) = queue.pop_front() {
            self.order.push(u);
            for &(w, id) in t.neighbors(u) {
                if !m.node(w) || !m.edge(id) {
                    continue;
                }
                if self.dist[w].is_infinite() {
                    self.dist[w] = self.dist[u] + 1.0;
                    queue.push_back(w);
                }
                if self.dist[w] == self.dist[u] + 1.0 {
                    self.sigma[w] += self.sigma[u];
                    self.preds[w].push((u, id));
                }
            }
        }
    }

    fn explore_weighted(&mut self, t: &Topology, s: usize, m: Masks) {
        let mut heap = BinaryHeap::new();
        let mut done = vec![false; t.node_count()];
        self.dist[s] = 0.0;
        self.sigma[s] = 1.0;
        heap.push(HeapItem(0.0, s));
        while let Some(HeapItem(d, u)) = heap.pop() {
            if done[u] || d > self.dist[u] {
                continue;
            }
            done[u] = true;
            self.order.push(u);
            for &(w, id) in t.neighbors(u) {
                if !m.node(w) || !m.edge(id) || done[w] {
                    continue;
                }
                let nd = d + 1.0 / t.weight(id);
                let cur = self.dist[w];
                let tol = TIE * nd.max(1.0);
                if nd < cur - tol {
                    self.dist[w] = nd;
                    self.sigma[w] = self.sigma[u];
                    self.preds[w].clear();
                    self.preds[w].push((u, id));
                    heap.push(HeapItem(nd, w));
                } else if (nd - cur).abs() <= tol {
                    self.sigma[w] += self.sigma[u];
                    self.preds[w].push((u, id));
                }
            }
        }
    }

    /// One source: explore, then accumulate into `node_acc` / `edge_acc`.
    /// `term(w)` is the weight of target `w` (1 for plain betweenness).
    pub(crate) fn run(
        &mut self,
        t: &Topology,
        s: usize,
        weighted: bool,
        m: Masks,
        term: &dyn Fn(usize) -> f64,
        node_acc: &mut [f64],
        edge_acc: Option<&mut [f64]>,
    ) {
        self.reset();
        if weighted {
            self.explore_weighted(t, s, m);
        } else {
            self.explore_hops(t, s, m);
        }
        let mut edge_acc = edge_acc;
        for i in (0..self.order.len()).rev() {
            let w = self.order[i];
            let coeff = (if w == s { 0.0 } else { term(w) } + self.delta[w]) / self.sigma[w];
            for k in 0..self.preds[w].len() {
                let (u, id) = self.preds[w][k];
                let c = self.sigma[u] * coeff;
                self.delta[u] += c;
                if let Some(acc) = edge_acc.as_deref_mut() {
                    acc[id] += c;
                }
            }
            if w != s {
                node_acc[w] += self.delta[w];
            }
        }
    }
}

/// Raw sums over `sources` (ordered pairs). Sources are processed in fixed
/// chunks and reduced in order, so the result does not depend on threads.
pub(crate) fn accumulate(
    t: &Topology,
    sources: &[usize],
    weighted: bool,
    m: Masks,
    want_edges: bool,
    term: &(dyn Fn(usize, usize) -> f64 + Sync),
) -> (Vec<f64>, Vec<f64>) {
    let n = t.node_count();
    let e = if want_edges { t.edge_count() } else { 0 };
    let chunk = sources.len().div_ceil(64).max(1);
    let parts: Vec<(Vec<f64>, Vec<f64>)> = sources
        .par_chunks(chunk)
        .map(|srcs| {
            let mut sw = Sweep::new(n);
            let mut nodes = vec![0.0; n];
            let mut edges = vec![0.0; e];
            for &s in srcs {
                let tf = |w: usize| term(s, w);
                sw.run(
                    t,
                    s,
                    weighted,
                    m,
                    &tf,
                    &mut nodes,
                    want_edges.then_some(&mut edges[..]),
                );
            }
            (nodes, edges)
        })
        .collect();
    let mut nodes = vec![0.0; n];
    let mut edges = vec![0.0; e];
    for (pn, pe) in parts {
        nodes.iter_mut().zip(pn).for_each(|(a, b)| *a += b);
        edges.iter_mut().zip(pe).for_each(|(a, b)| *a += b);
    }
    (nodes, edges)
}

fn check_weighted(t: &Topology, weighted: bool) -> Result<()> {
    if weighted && !t.is_weighted() {
        return Err(Error::incompatible(
            "weighted betweenness needs edge weights",
        ));
    }
    Ok(())
}

fn live_sources(t: &Topology, m: Masks) -> Vec<usize> {
    (0..t.node_count()).filter(|&u| m.node(u)).collect()
}

pub(crate) fn node_betweenness_masked(t: &Topology, weighted: bool, m: Masks) -> Vec<f64> {
    let (mut b, _) = accumulate(t, &live_sources(t, m), weighted, m, false, &|_, _| 1.0);
    if !t.is_directed() {
        b.iter_mut().for_each(|x| *x /= 2.0);
    }
    b
}

pub(crate) fn edge_betweenness_masked(t: &Topology, weighted: bool, m: Masks) -> Vec<f64> {
    let (_, mut b) = accumulate(t, &live_sources(t, m), weighted, m, true, &|_, _| 1.0);
    if !t.is_directed() {
        b.iter_mut().for_each(|x| *x /= 2.0);
    }
    b
}

/// B_u = Σ σ(i,u,j)/σ(i,j) over unordered pairs (undirected) or ordered
/// pairs (directed), endpoints excluded.
pub fn node_betweenness(t: &Topology, weighted: bool) -> Result<Vec<f64>> {
    check_weighted(t, weighted)?;
    Ok(node_betweenness_masked(t, weighted, Masks::default()))
}

/// Edge betweenness indexed by edge id, same pair convention as nodes.
pub fn edge_betweenness(t: &Topology, weighted: bool) -> Result<Vec<f64>> {
    check_weighted(t, weighted)?;
    Ok(edge_betweenness_masked(t, weighted, Masks::default()))
}

pub fn betweenness(t: &Topology, target: Target, weighted: bool) -> Result<Vec<f64>> {
    match target {
        Target::Node => node_betweenness(t, weighted),
        Target::Edge => edge_betweenness(t, weighted),
    }
}

/// Betweenness normalised by the number of pairs not involving the node.
pub fn normalized_node_betweenness(t: &Topology, weighted: bool) -> Result<Vec<f64>> {
    let v = t.node_count();
    if v < 3 {
        return Err(Error::undefined("normalised betweenness needs v >= 3"));
    }
    let pairs = ((v - 1) * (v - 2)) as f64 / if t.is_directed() { 1.0 } else { 2.0 };
    Ok(node_betweenness(t, weighted)?
        .into_iter()
        .map(|b| b / pairs)
        .collect())
}

/// CPD = Σ_u (B'_max − B'_u)/(v − 1) over pair-normalised betweenness.
pub fn central_point_dominance(t: &Topology) -> Result<f64> {
    let b = normalized_node_betweenness(t, false)?;
    let max = b.iter().cloned().fold(f64::MIN, f64::max);
    let v = t.node_count() as f64;
    Ok(b.iter().map(|x| max - x).sum::<f64>() / (v - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn examples() {
        let b = node_betweenness(&path(3).unwrap(), false).unwrap();
        assert_eq!(b, vec![0.0, 1.0, 0.0]);
        let b = node_betweenness(&star(6).unwrap(), false).unwrap();
        assert_eq!(b[0], 10.0);
        let e = edge_betweenness(&path(3).unwrap(), false).unwrap();
        assert_eq!(e, vec![2.0, 2.0]);
    }

    #[test]
    fn directed_counts_ordered_pairs() {
        let t = Topology::directed(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(node_betweenness(&t, false).unwrap(), vec![0.0, 1.0, 0.0]);
        let t = Topology::directed(3, &[(0, 1), (1, 0), (1, 2), (2, 1)]).unwrap();
        assert_eq!(node_betweenness(&t, false).unwrap(), vec![0.0, 2.0, 0.0]);
    }

    #[test]
    fn weighted_prefers_fast_links() {
        // 0-1-2 fast, 0-2 slow: the detour through 1 is shorter
        let t = Topology::weighted(3, &[(0, 1, 4.0), (1, 2, 4.0), (0, 2, 1.0)]).unwrap();
        assert_eq!(node_betweenness(&t, true).unwrap(), vec![0.0, 1.0, 0.0]);
        assert_eq!(node_betweenness(&t, false).unwrap(), vec![0.0, 0.0, 0.0]);
        assert!(node_betweenness(&path(3).unwrap(), true).is_err());
    }

    #[test]
    fn split_over_equal_paths() {
        let b = node_betweenness(&cycle(4).unwrap(), false).unwrap();
        assert_eq!(b, vec![0.5; 4]);
    }

    #[test]
    fn cpd_examples() {
        assert!((central_point_dominance(&star(7).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(
            central_point_dominance(&complete(5).unwrap())
                .unwrap()
                .abs()
                < 1e-12
        );
        assert!(central_point_dominance(&cycle(5).unwrap()).unwrap().abs() < 1e-12);
    }
}
