//! Shortest-path machinery: BFS hop counts, Dijkstra over `1/w` lengths,
//! deterministic shortest-path trees and valley-free (policy) reachability.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::Topology;
use crate::error::{Error, Result};

/// Distances from one source. `None` marks an unreachable node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceView {
    pub source: usize,
    pub dists: Vec<Option<f64>>,
}

impl DistanceView {
    pub fn get(&self, target: usize) -> Option<f64> {
        self.dists[target]
    }
}

/// Hop counts (unweighted) or Dijkstra distances over edge length `1/w_ij`.
pub fn shortest_paths(t: &Topology, source: usize, weighted: bool) -> Result<DistanceView> {
    if source >= t.node_count() {
        return Err(Error::param(format!("source {source} out of range")));
    }
    let dists = if weighted {
        dijkstra(t, source)
    } else {
        bfs_hops(t, source)
            .into_iter()
            .map(|d| d.map(f64::from))
            .collect()
    };
    Ok(DistanceView { source, dists })
}

/// BFS along out-edges.
pub fn bfs_hops(t: &Topology, source: usize) -> Vec<Option<u32>> {
    let mut dist = vec![None; t.node_count()];
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &(w, _) in t.neighbors(u) {
            if dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS restricted to `alive` nodes; dead nodes are reported unreachable.
pub fn bfs_hops_masked(t: &Topology, source: usize, alive: &[bool]) -> Vec<Option<u32>> {
    let mut dist = vec![None; t.node_count()];
    if !alive[source] {
        return dist;
    }
    let mut queue = VecDeque::new();
    dist[source] = Some(0);
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        let du = dist[u].unwrap();
        for &(w, _) in t.neighbors(u) {
            if alive[w] && dist[w].is_none() {
                dist[w] = Some(du + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

#[derive(PartialEq)]
pub(crate) struct HeapItem(pub f64, pub usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on distance, then on node id
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra with edge length `1/w_ij`.
pub fn dijkstra(t: &Topology, source: usize) -> Vec<Option<f64>> {
    dijkstra_by(t, source, |id| 1.0 / t.weight(id))
}

/// Dijkstra with an arbitrary positive edge length.
pub fn dijkstra_by(t: &Topology, source: usize, length: impl Fn(usize) -> f64) -> Vec<Option<f64>> {
    let n = t.node_count();
    let mut dist: Vec<Option<f64>> = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[source] = Some(0.0);
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        for &(w, id) in t.neighbors(u) {
            let nd = d + length(id);
            if dist[w].is_none_or(|old| nd < old) {
                dist[w] = Some(nd);
                heap.push(HeapItem(nd, w));
            }
        }
    }
    dist
}

/// All-pairs hop distances, one BFS per source.
pub fn all_pairs_hops(t: &Topology) -> Vec<Vec<Option<u32>>> {
    (0..t.node_count())
        .into_par_iter()
        .map(|s| bfs_hops(t, s))
        .collect()
}

/// All-pairs distances as `f64`, hop or weighted.
pub fn all_pairs(t: &Topology, weighted: bool) -> Vec<Vec<Option<f64>>> {
    (0..t.node_count())
        .into_par_iter()
        .map(|s| {
            if weighted {
                dijkstra(t, s)
            } else {
                bfs_hops(t, s)
                    .into_iter()
                    .map(|d| d.map(f64::from))
                    .collect()
            }
        })
        .collect()
}

/// BFS tree whose parent pointers pick the lowest-id predecessor on a
/// shortest path. Returns `(dist, parent)`.
pub fn bfs_tree(t: &Topology, source: usize) -> (Vec<Option<u32>>, Vec<Option<usize>>) {
    let dist = bfs_hops(t, source);
    let parent = (0..t.node_count())
        .map(|v| {
            let dv = dist[v]?;
            if dv == 0 {
                return None;
            }
            t.in_neighbors(v)
                .iter()
                .map(|&(u, _)| u)
                .find(|&u| dist[u] == Some(dv - 1))
        })
        .collect();
    (dist, parent)
}

/// Node sequence from the tree root to `target` (inclusive), if reachable.
pub fn tree_path(
    parent: &[Option<usize>],
    dist: &[Option<u32>],
    target: usize,
) -> Option<Vec<usize>> {
    dist[target]?;
    let mut path = vec![target];
    let mut cur = target;
    while let Some(p) = parent[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    Some(path)
}

/// Relationship-aware view of a directed AS graph. A directed edge `a→b`
/// without its reverse is a customer→provider link; reciprocal edges are
/// peer links. Valley-free paths climb customer→provider links, cross at
/// most one peer link, then descend provider→customer links.
pub struct PolicyGraph<'a> {
    t: &'a Topology,
}

/// Phase of a valley-free walk.
pub const UP: usize = 0;
pub const DOWN: usize = 1;

impl<'a> PolicyGraph<'a> {
    pub fn new(t: &'a Topology) -> Self {
        PolicyGraph { t }
    }

    pub fn topology(&self) -> &Topology {
        self.t
    }

    /// Successor states `(node, phase)` of `(u, phase)`. Undirected graphs
    /// carry no policy and every edge is usable in phase `UP`.
    pub fn successors(&self, u: usize, phase: usize, out: &mut Vec<(usize, usize)>) {
        out.clear();
        let t = self.t;
        if !t.is_directed() {
            out.extend(t.neighbors(u).iter().map(|&(w, _)| (w, UP)));
            return;
        }
        if phase == UP {
            for &(w, _) in t.neighbors(u) {
                if t.has_edge(w, u) {
                    out.push((w, DOWN));
                } else {
                    out.push((w, UP));
                }
            }
        }
        for &(w, _) in t.in_neighbors(u) {
            if !t.has_edge(u, w) {
                out.push((w, DOWN));
            }
        }
    }

    /// Shortest valley-free hop counts from `source`.
    pub fn hops(&self, source: usize) -> Vec<Option<u32>> {
        let n = self.t.node_count();
        let mut state = vec![None; 2 * n];
        let mut best = vec![None; n];
        let mut queue = VecDeque::new();
        state[2 * source + UP] = Some(0u32);
        best[source] = Some(0);
        queue.push_back((source, UP));
        let mut buf = Vec::new();
        while let Some((u, ph)) = queue.pop_front() {
            let d = state[2 * u + ph].unwrap();
            self.successors(u, ph, &mut buf);
            for &(w, nph) in &buf {
                if state[2 * w + nph].is_none() {
                    state[2 * w + nph] = Some(d + 1);
                    if best[w].is_none() {
                        best[w] = Some(d + 1);
                    }
                    queue.push_back((w, nph));
                }
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_hops() {
        let t = Topology::undirected(3, &[(0, 1), (1, 2)]).unwrap();
        let d = shortest_paths(&t, 0, false).unwrap();
        assert_eq!(d.dists, vec![Some(0.0), Some(1.0), Some(2.0)]);
    }

    #[test]
    fn weighted_single_edge() {
        let t = Topology::weighted(2, &[(0, 1, 2.0)]).unwrap();
        let d = shortest_paths(&t, 0, true).unwrap();
        assert_eq!(d.get(1), Some(0.5));
    }

    #[test]
    fn unreachable_marker() {
        let t = Topology::undirected(2, &[]).unwrap();
        let d = shortest_paths(&t, 0, false).unwrap();
        assert_eq!(d.get(1), None);
        let d = shortest_paths(&t, 0, true).unwrap();
        assert_eq!(d.get(1), None);
    }

    #[test]
    fn tree_picks_lowest_parent() {
        // 0 connects to 1 and 2, both connect to 3
        let t = Topology::undirected(4, &[(0, 2), (0, 1), (2, 3), (1, 3)]).unwrap();
        let (d, p) = bfs_tree(&t, 0);
        assert_eq!(tree_path(&p, &d, 3), Some(vec![0, 1, 3]));
    }

    #[test]
    fn valley_free() {
        // 0 and 1 are customers of 2; 3 is a customer of 1
        let t = Topology::directed(4, &[(0, 2), (1, 2), (3, 1)]).unwrap();
        let pg = PolicyGraph::new(&t);
        assert_eq!(pg.hops(0), vec![Some(0), Some(2), Some(1), Some(3)]);
        // 2 can only descend
        assert_eq!(pg.hops(2), vec![Some(1), Some(1), Some(0), Some(2)]);
        // peer 0<->1 then customers of 1; 0 cannot climb after the peer link
        let t = Topology::directed(4, &[(0, 1), (1, 0), (2, 1), (0, 3)]).unwrap();
        let pg = PolicyGraph::new(&t);
        assert_eq!(pg.hops(0), vec![Some(0), Some(1), Some(2), Some(1)]);
        assert_eq!(pg.hops(2)[3], None);
    }
}
