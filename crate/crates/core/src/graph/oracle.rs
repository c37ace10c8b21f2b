//! Exhaustive reference solvers for small graphs. Every routine enumerates
//! node subsets (bitmasks) or edge states and is exponential by design.

use serde::{Deserialize, Serialize};

use super::Topology;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum OracleProblem {
    MinVertexCut,
    MinEdgeCut,
    /// Smallest vertex cut leaving only components of at least `min_size`.
    ConditionalVertexCut {
        min_size: usize,
    },
    Toughness,
    Integrity,
    Scattering,
    Tenacity,
    EdgeTenacity,
    MixedTenacity,
    RatioOfDisruption,
    Cheeger,
    SparsityMin,
    MinMDegree {
        m: usize,
    },
    ReliabilityAllTerminal {
        p: f64,
    },
    /// `single_node_connected` selects the residual convention.
    PartitionResilience {
        single_node_connected: bool,
    },
}

impl OracleProblem {
    fn enumerates_edges(self) -> bool {
        matches!(
            self,
            OracleProblem::EdgeTenacity
                | OracleProblem::MixedTenacity
                | OracleProblem::ReliabilityAllTerminal { .. }
        )
    }
}

/// Enumeration limits; defaults are 12 nodes and 20 edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCaps {
    pub max_nodes: usize,
    pub max_edges: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            max_nodes: 12,
            max_edges: 20,
        }
    }
}

/// Exact value of `problem` on `t` (directed graphs are read as undirected).
pub fn brute_force_oracle(t: &Topology, problem: OracleProblem) -> Result<f64> {
    brute_force_oracle_capped(t, problem, OracleCaps::default())
}

pub fn brute_force_oracle_capped(
    t: &Topology,
    problem: OracleProblem,
    caps: OracleCaps,
) -> Result<f64> {
    let g = Masks::new(t);
    if g.n > caps.max_nodes.min(30) {
        return Err(Error::TooLarge {
            what: "nodes",
            actual: g.n,
            cap: caps.max_nodes.min(30),
        });
    }
    if problem.enumerates_edges() && g.edges.len() > caps.max_edges.min(30) {
        return Err(Error::TooLarge {
            what: "edges",
            actual: g.edges.len(),
            cap: caps.max_edges.min(30),
        });
    }
    use OracleProblem::*;
    match problem {
        MinVertexCut => Ok(g.min_vertex_cut(1) as f64),
        ConditionalVertexCut { min_size } => g
            .conditional_cut(min_size)
            .map(|c| c as f64)
            .ok_or_else(|| {
                Error::undefined("no vertex cut satisfies the component-size condition")
            }),
        MinEdgeCut => Ok(g.min_edge_cut() as f64),
        Toughness => g.toughness(),
        Integrity => Ok(g.integrity() as f64),
        Scattering => g.scattering(),
        Tenacity => Ok(g.tenacity()),
        EdgeTenacity => Ok(g.edge_tenacity(false)),
        MixedTenacity => Ok(g.edge_tenacity(true)),
        RatioOfDisruption => g.ratio_of_disruption(),
        Cheeger => g.cheeger(),
        SparsityMin => g.sparsity(),
        MinMDegree { m } => g.min_m_degree(m).map(|x| x as f64),
        ReliabilityAllTerminal { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(format!("edge reliability {p} outside [0,1]")));
            }
            Ok(g.all_terminal_reliability(p))
        }
        PartitionResilience {
            single_node_connected,
        } => g.partition_resilience(single_node_connected),
    }
}

/// Bitmask adjacency of the underlying undirected graph.
struct Masks {
    n: usize,
    adj: Vec<u32>,
    edges: Vec<(usize, usize)>,
}

impl Masks {
    fn new(t: &Topology) -> Self {
        let u = t.underlying_undirected();
        let n = u.node_count();
        let mut adj = vec![0u32; n];
        if n <= 32 {
            for &(a, b) in u.edges() {
                adj[a] |= 1 << b;
                adj[b] |= 1 << a;
            }
        }
        Masks {
            n,
            adj,
            edges: u.edges().to_vec(),
        }
    }

    fn full(&self) -> u32 {
        if self.n == 32 {
            u32::MAX
        } else {
            (1u32 << self.n) - 1
        }
    }

    /// Component sizes of the subgraph induced by `alive`.
    fn comps(&self, alive: u32) -> Vec<u32> {
        let mut left = alive;
        let mut out = Vec::new();
        while left != 0 {
            let start = left & left.wrapping_neg();
            let mut comp = start;
            let mut frontier = start;
            while frontier != 0 {
                let b = frontier.trailing_zeros() as usize;
                frontier &= frontier - 1;
                let fresh = self.adj[b] & alive & !comp;
                comp |= fresh;
                frontier |= fresh;
            }
            left &= !comp;
            out.push(comp);
        }
        out
    }

    fn omega_largest(&self, alive: u32) -> (usize, usize) {
        let c = self.comps(alive);
        (
            c.len(),
            c.iter().map(|m| m.count_ones() as usize).max().unwrap_or(0),
        )
    }

    fn boundary(&self, a: u32) -> usize {
        let rest = self.full() & !a;
        let mut cut = 0;
        let mut bits = a;
        while bits != 0 {
            let b = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            cut += (self.adj[b] & rest).count_ones() as usize;
        }
        cut
    }

    fn subsets(&self) -> impl Iterator<Item = u32> {
        let full = self.full();
        (0..=full as u64).map(|x| x as u32)
    }

    fn is_complete(&self) -> bool {
        (0..self.n).all(|u| self.adj[u].count_ones() as usize == self.n - 1)
    }

    fn min_vertex_cut(&self, min_size: usize) -> usize {
        self.conditional_cut(min_size)
            .unwrap_or(self.n.saturating_sub(1))
    }

    /// Smallest S with G−S disconnected and every component ≥ `min_size`.
    fn conditional_cut(&self, min_size: usize) -> Option<usize> {
        let full = self.full();
        let mut best: Option<usize> = None;
        for s in self.subsets() {
            let k = s.count_ones() as usize;
            if best.is_some_and(|b| k >= b) {
                continue;
            }
            let c = self.comps(full & !s);
            if c.len() >= 2 && c.iter().all(|m| m.count_ones() as usize >= min_size) {
                best = Some(k);
            }
        }
        best
    }

    fn min_edge_cut(&self) -> usize {
        if self.n < 2 {
            return 0;
        }
        // A always contains node 0 to halve the enumeration
        let mut best = usize::MAX;
        for a in self.subsets() {
            if a & 1 == 0 || a == self.full() {
                continue;
            }
            best = best.min(self.boundary(a));
        }
        best
    }

    fn toughness(&self) -> Result<f64> {
        if self.is_complete() {
            return Err(Error::undefined("complete graph has no vertex cut"));
        }
        let full = self.full();
        let mut best = f64::INFINITY;
        for s in self.subsets() {
            let (w, _) = self.omega_largest(full & !s);
            if w >= 2 {
                best = best.min(s.count_ones() as f64 / w as f64);
            }
        }
        Ok(best)
    }

    fn integrity(&self) -> usize {
        let full = self.full();
        self.subsets()
            .map(|s| s.count_ones() as usize + self.omega_largest(full & !s).1)
            .min()
            .unwrap_or(0)
    }

    fn scattering(&self) -> Result<f64> {
        if self.is_complete() {
            return Err(Error::undefined("complete graph has no vertex cut"));
        }
        let full = self.full();
        let mut best = i64::MIN;
        for s in self.subsets() {
            let (w, _) = self.omega_largest(full & !s);
            if w >= 2 {
                best = best.max(w as i64 - s.count_ones() as i64);
            }
        }
        Ok(best as f64)
    }

    fn tenacity(&self) -> f64 {
        let full = self.full();
        let mut best = f64::INFINITY;
        for s in self.subsets() {
            if s == full {
                continue;
            }
            let (w, l) = self.omega_largest(full & !s);
            best = best.min((s.count_ones() as usize + l) as f64 / w as f64);
        }
        best
    }

    /// Edge tenacity (`mixed = false`, largest component measured in edges)
    /// or mixed tenacity (`mixed = true`, measured in nodes).
    fn edge_tenacity(&self, mixed: bool) -> f64 {
        let e = self.edges.len();
        let mut best = f64::INFINITY;
        let mut uf = UnionFind::new(self.n);
        for state in 0..(1u64 << e) {
            // bit set = edge removed
            uf.reset();
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if state >> i & 1 == 0 {
                    uf.union(a, b);
                }
            }
            let removed = state.count_ones() as usize;
            let mut nodes = vec![0usize; self.n];
            let mut edges_in = vec![0usize; self.n];
            for u in 0..self.n {
                nodes[uf.find(u)] += 1;
            }
            for (i, &(a, _)) in self.edges.iter().enumerate() {
                if state >> i & 1 == 0 {
                    edges_in[uf.find(a)] += 1;
                }
            }
            let omega = nodes.iter().filter(|&&c| c > 0).count();
            let largest = if mixed {
                *nodes.iter().max().unwrap()
            } else {
                *edges_in.iter().max().unwrap()
            };
            best = best.min((removed + largest) as f64 / omega as f64);
        }
        best
    }

    fn ratio_of_disruption(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::undefined("needs at least two nodes"));
        }
        let mut best: f64 = 0.0;
        for a in self.subsets() {
            let k = a.count_ones() as usize;
            if k == 0 || k > self.n / 2 {
                continue;
            }
            let cut = self.boundary(a);
            if cut == 0 {
                return Err(Error::undefined(
                    "disconnected graph: a side with empty boundary",
                ));
            }
            best = best.max(k as f64 / (cut * (self.n - k)) as f64);
        }
        Ok(best)
    }

    fn cheeger(&self) -> Result<f64> {
        if self.n < 2 {
            return Err(Error::undefined("needs at least two nodes"));
        }
        let mut best = f64::INFINITY;
        for a in self.subsets() {
            let k = a.count_ones() as usize;
            if k == 0 || 2 * k > self.n {
                continue;
            }
            best = best.min(self.boundary(a) as f64 / k as f64);
        }
        Ok(best)
    }

    fn min_m_degree(&self, m: usize) -> Result<usize> {
        if m == 0 || m >= self.n {
            return Err(Error::param(format!("m={m} must lie in [1, v−1]")));
        }
        Ok(self
            .subsets()
            .filter(|a| a.count_ones() as usize == m)
            .map(|a| self.boundary(a))
            .min()
            .unwrap())
    }

    /// min |X|/(|A||A'|) over separations (A, X, A'): for each X the
    /// components of G−X are split into two groups as evenly as possible.
    fn sparsity(&self) -> Result<f64> {
        let full = self.full();
        let mut best = f64::INFINITY;
        for x in self.subsets() {
            if x.count_ones() == 0 && self.comps(full).len() < 2 {
                continue;
            }
            let sizes: Vec<usize> = self
                .comps(full & !x)
                .iter()
                .map(|m| m.count_ones() as usize)
                .collect();
            if sizes.len() < 2 {
                continue;
            }
            let total: usize = sizes.iter().sum();
            // subset sums reachable with the first component on side A
            let mut reach = vec![false; total + 1];
            reach[0] = true;
            for &s in &sizes {
                for t in (s..=total).rev() {
                    if reach[t - s] {
                        reach[t] = true;
                    }
                }
            }
            let prod = (1..total)
                .filter(|&a| reach[a])
                .map(|a| a * (total - a))
                .max()
                .unwrap();
            best = best.min(x.count_ones() as f64 / prod as f64);
        }
        if best.is_infinite() {
            return Err(Error::undefined(
                "no separating vertex set (complete graph)",
            ));
        }
        Ok(best)
    }

    fn all_terminal_reliability(&self, p: f64) -> f64 {
        let counts = self.operating_counts();
        let e = self.edges.len() as i32;
        counts
            .iter()
            .enumerate()
            .map(|(j, &a)| a as f64 * p.powi(j as i32) * (1.0 - p).powi(e - j as i32))
            .sum()
    }

    /// a_j: number of operating edge subsets of size j that connect all nodes.
    fn operating_counts(&self) -> Vec<u64> {
        let e = self.edges.len();
        let mut counts = vec![0u64; e + 1];
        let mut uf = UnionFind::new(self.n);
        for state in 0..(1u64 << e) {
            uf.reset();
            let mut merged = 0;
            for (i, &(a, b)) in self.edges.iter().enumerate() {
                if state >> i & 1 == 1 && uf.union(a, b) {
                    merged += 1;
                }
            }
            if merged + 1 == self.n {
                counts[state.count_ones() as usize] += 1;
            }
        }
        counts
    }

    fn partition_resilience(&self, single_node_connected: bool) -> Result<f64> {
        if self.n < 3 {
            return Err(Error::param("partition resilience needs v >= 3"));
        }
        let full = self.full();
        let mut hit = vec![0u64; self.n + 1];
        let mut total = vec![0u64; self.n + 1];
        for s in self.subsets() {
            let i = s.count_ones() as usize;
            if i < 2 || i >= self.n {
                continue;
            }
            total[i] += 1;
            let rest = full & !s;
            let disconnected = if rest.count_ones() == 1 {
                !single_node_connected
            } else {
                self.comps(rest).len() > 1
            };
            if disconnected {
                hit[i] += 1;
            }
        }
        let sum: f64 = (2..self.n).map(|i| hit[i] as f64 / total[i] as f64).sum();
        Ok(sum / (self.n - 2) as f64)
    }
}

/// All-terminal reliability polynomial coefficients a_j by enumeration.
pub fn reliability_counts_exact(t: &Topology) -> Result<Vec<u64>> {
    let g = Masks::new(t);
    if g.edges.len() > 30 {
        return Err(Error::TooLarge {
            what: "edges",
            actual: g.edges.len(),
            cap: 30,
        });
    }
    Ok(g.operating_counts())
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn reset(&mut self) {
        for (i, p) in self.parent.iter_mut().enumerate() {
            *p = i;
        }
        self.size.iter_mut().for_each(|s| *s = 1);
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if two sets were merged.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::{complete, cycle, path, star};

    fn q(t: &Topology, p: OracleProblem) -> f64 {
        brute_force_oracle(t, p).unwrap()
    }

    #[test]
    fn spec_examples() {
        assert_eq!(q(&cycle(4).unwrap(), OracleProblem::Cheeger), 1.0);
        assert_eq!(q(&path(4).unwrap(), OracleProblem::Integrity), 3.0);
        assert_eq!(q(&cycle(4).unwrap(), OracleProblem::Tenacity), 1.5);
        assert_eq!(q(&complete(4).unwrap(), OracleProblem::Cheeger), 2.0);
    }

    #[test]
    fn connectivity_values() {
        let k5 = complete(5).unwrap();
        assert_eq!(q(&k5, OracleProblem::MinVertexCut), 4.0);
        assert_eq!(q(&k5, OracleProblem::MinEdgeCut), 4.0);
        let s = star(5).unwrap();
        assert_eq!(q(&s, OracleProblem::MinVertexCut), 1.0);
        assert_eq!(q(&s, OracleProblem::Toughness), 0.25);
        assert_eq!(q(&s, OracleProblem::Scattering), 3.0);
        assert!(brute_force_oracle(&k5, OracleProblem::Toughness).is_err());
    }

    #[test]
    fn sparsity_examples() {
        assert_eq!(q(&path(3).unwrap(), OracleProblem::SparsityMin), 1.0);
        // two K4 sharing articulation node 3
        let mut edges = Vec::new();
        for grp in [[0, 1, 2, 3], [3, 4, 5, 6]] {
            for i in 0..4 {
                for j in i + 1..4 {
                    edges.push((grp[i], grp[j]));
                }
            }
        }
        let t = Topology::undirected(7, &edges).unwrap();
        assert!((q(&t, OracleProblem::SparsityMin) - 1.0 / 9.0).abs() < 1e-12);
        // two K4 joined by one edge: the bridge endpoint is the articulation node
        let t = crate::graph::generate::two_cliques_bridge(4, 4).unwrap();
        assert!((q(&t, OracleProblem::SparsityMin) - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn reliability_triangle() {
        let t = complete(3).unwrap();
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            let r = q(&t, OracleProblem::ReliabilityAllTerminal { p });
            assert!((r - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-12);
        }
    }

    #[test]
    fn resilience() {
        let p = OracleProblem::PartitionResilience {
            single_node_connected: true,
        };
        assert_eq!(q(&complete(4).unwrap(), p), 0.0);
        assert_eq!(q(&star(4).unwrap(), p), 0.25);
    }

    #[test]
    fn cap_refusal() {
        let t = complete(13).unwrap();
        assert!(matches!(
            brute_force_oracle(&t, OracleProblem::Cheeger),
            Err(Error::TooLarge { .. })
        ));
    }
}
