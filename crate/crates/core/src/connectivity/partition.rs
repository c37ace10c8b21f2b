//! Fiduccia–Mattheyses bipartitioning and the cut searches built on it.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_hops, components, PolicyGraph, Topology};
use crate::rng;

const RESTARTS: u64 = 8;

/// What the pass selects its best prefix by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutObjective {
    /// ξ, the number of cut edges.
    CutSize,
    /// ξ / min(|A|, |A'|).
    Ratio,
}

impl CutObjective {
    fn eval(self, cut: usize, a: usize, n: usize) -> f64 {
        match self {
            CutObjective::CutSize => cut as f64,
            CutObjective::Ratio => cut as f64 / a.min(n - a) as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionReport {
    /// `true` for nodes on side A, the side sized by the target ratio.
    pub side: Vec<bool>,
    /// Ids of the edges between the two sides.
    pub cut_edges: Vec<usize>,
    /// |A|/v.
    pub ratio: f64,
    pub cut_size: usize,
    /// Balance slack c in nodes.
    pub slack: f64,
    pub objective: f64,
}

impl PartitionReport {
    pub fn side_size(&self) -> usize {
        self.side.iter().filter(|&&s| s).count()
    }
}

/// Feasible |A| window for ratio r and slack c.
pub fn balance_window(v: usize, ratio: f64, slack: f64) -> Result<(usize, usize)> {
    if !(ratio > 0.0 && ratio <= 0.5) {
        return Err(Error::param(format!(
            "target ratio {ratio} outside (0, 0.5]"
        )));
    }
    if !(slack >= 0.0) {
        return Err(Error::param("balance slack must be non-negative"));
    }
    if v < 2 {
        return Err(Error::param("partitioning needs v >= 2"));
    }
    let mid = ratio * v as f64;
    let lo = ((mid - slack - 1e-9).ceil().max(1.0)) as usize;
    let hi = ((mid + slack + 1e-9).floor() as usize).min(v - 1);
    if lo > hi {
        return Err(Error::param(format!(
            "infeasible balance: no integer |A| within {slack} of {mid}"
        )));
    }
    Ok((lo, hi))
}

/// FM bipartition of a connected graph with |A| in the balance window.
/// Directed graphs are partitioned on their underlying undirected graph.
pub fn fm_partition(t: &Topology, ratio: f64, slack: f64, seed: u64) -> Result<PartitionReport> {
    fm_partition_with(t, ratio, slack, CutObjective::CutSize, seed)
}

pub fn fm_partition_with(
    t: &Topology,
    ratio: f64,
    slack: f64,
    objective: CutObjective,
    seed: u64,
) -> Result<PartitionReport> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    let window = balance_window(n, ratio, slack)?;
    if components(&g).count() > 1 {
        return Err(Error::incompatible("partitioning needs a connected graph"));
    }
    let runs: Vec<(f64, usize, Vec<bool>)> = (0..RESTARTS)
        .into_par_iter()
        .map(|k| {
            let mut fm = Fm::new(&g, window, ratio, objective, seed.wrapping_add(k));
            fm.run();
            (fm.best_value(), fm.cut, fm.side)
        })
        .collect();
    let (value, cut, side) = runs
        .into_iter()
        .reduce(|a, b| if b.0 < a.0 - 1e-12 { b } else { a })
        .unwrap();
    // g shares edge ids with t
    let cut_edges: Vec<usize> = (0..g.edge_count())
        .filter(|&id| {
            let (a, b) = g.edge(id);
            side[a] != side[b]
        })
        .map(|id| original_edge(t, &g, id))
        .collect();
    debug_assert_eq!(cut, cut_edges.len());
    let a = side.iter().filter(|&&s| s).count();
    Ok(PartitionReport {
        ratio: a as f64 / n as f64,
        cut_size: cut,
        slack,
        objective: value,
        cut_edges,
        side,
    })
}

fn original_edge(t: &Topology, g: &Topology, id: usize) -> usize {
    if !t.is_directed() {
        return id;
    }
    let (a, b) = g.edge(id);
    t.edge_id(a, b).or_else(|| t.edge_id(b, a)).unwrap()
}

/// Gain buckets: one doubly linked list per gain value.
struct Buckets {
    offset: i64,
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    max: i64,
}

const NIL: usize = usize::MAX;

impl Buckets {
    fn new(n: usize, max_gain: i64) -> Self {
        Buckets {
            offset: max_gain,
            head: vec![NIL; (2 * max_gain + 1) as usize],
            next: vec![NIL; n],
            prev: vec![NIL; n],
            max: -max_gain - 1,
        }
    }

    fn insert(&mut self, u: usize, gain: i64) {
        let b = (gain + self.offset) as usize;
        self.prev[u] = NIL;
        self.next[u] = self.head[b];
        if self.head[b] != NIL {
            self.prev[self.head[b]] = u;
        }
        self.head[b] = u;
        self.max = self.max.max(gain);
    }

    fn remove(&mut self, u: usize, gain: i64) {
        let b = (gain + self.offset) as usize;
        if self.prev[u] != NIL {
            self.next[self.prev[u]] = self.next[u];
        } else {
            self.head[b] = self.next[u];
        }
        if self.next[u] != NIL {
            self.prev[self.next[u]] = self.prev[u];
        }
    }

    /// Highest-gain node, lowering the max pointer past empty buckets.
    fn top(&mut self) -> Option<(usize, i64)> {
        while self.max >= -self.offset {
            let u = self.head[(self.max + self.offset) as usize];
            if u != NIL {
                return Some((u, self.max));
            }
            self.max -= 1;
        }
        None
    }
}

struct Fm<'a> {
    g: &'a Topology,
    window: (usize, usize),
    objective: CutObjective,
    side: Vec<bool>,
    size_a: usize,
    cut: usize,
}

impl<'a> Fm<'a> {
    fn new(
        g: &'a Topology,
        window: (usize, usize),
        ratio: f64,
        objective: CutObjective,
        seed: u64,
    ) -> Self {
        let n = g.node_count();
        let size_a = ((ratio * n as f64).round() as usize).clamp(window.0, window.1);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng(seed));
        let mut side = vec![false; n];
        for &u in &order[..size_a] {
            side[u] = true;
        }
        let cut = g
            .edges()
            .iter()
            .filter(|&&(a, b)| side[a] != side[b])
            .count();
        Fm {
            g,
            window,
            objective,
            side,
            size_a,
            cut,
        }
    }

    fn best_value(&self) -> f64 {
        self.objective.eval(self.cut, self.size_a, self.side.len())
    }

    fn gain(&self, u: usize) -> i64 {
        self.g
            .neighbors(u)
            .iter()
            .map(|&(w, _)| if self.side[w] != self.side[u] { 1 } else { -1 })
            .sum()
    }

    fn run(&mut self) {
        while self.pass() {}
    }

    /// One FM pass; returns whether the objective improved.
    fn pass(&mut self) -> bool {
        let n = self.side.len();
        let max_gain = self.g.max_degree().max(1) as i64;
        let mut gain: Vec<i64> = (0..n).map(|u| self.gain(u)).collect();
        // bucket 0 holds side-A nodes, bucket 1 side-B nodes
        let mut buckets = [Buckets::new(n, max_gain), Buckets::new(n, max_gain)];
        for u in (0..n).rev() {
            buckets[usize::from(!self.side[u])].insert(u, gain[u]);
        }
        let mut locked = vec![false; n];
        let start = self.best_value();
        let mut best = (start, 0usize);
        let mut moves = Vec::new();
        let (lo, hi) = (
            self.window.0.saturating_sub(1).max(1),
            (self.window.1 + 1).min(n - 1),
        );
        loop {
            // a pass may step one node outside the window; only in-window
            // states are recorded
            let from_a = if self.size_a > lo {
                buckets[0].top()
            } else {
                None
            };
            let from_b = if self.size_a < hi {
                buckets[1].top()
            } else {
                None
            };
            let (u, g) = match (from_a, from_b) {
                (Some(a), Some(b)) => {
                    if b.1 > a.1 {
                        b
                    } else {
                        a
                    }
                }
                (Some(a), None) => a,
                (None, Some(b)) => b,
                (None, None) => break,
            };
            let was_a = self.side[u];
            buckets[usize::from(!was_a)].remove(u, g);
            locked[u] = true;
            self.side[u] = !was_a;
            if was_a {
                self.size_a -= 1;
            } else {
                self.size_a += 1;
            }
            self.cut = (self.cut as i64 - g) as usize;
            for &(w, _) in self.g.neighbors(u) {
                if locked[w] {
                    continue;
                }
                let b = usize::from(!self.side[w]);
                buckets[b].remove(w, gain[w]);
                // w on u's old side: the edge turns external
                gain[w] += if self.side[w] == was_a { 2 } else { -2 };
                buckets[b].insert(w, gain[w]);
            }
            moves.push(u);
            let inside = (self.window.0..=self.window.1).contains(&self.size_a);
            let value = self.best_value();
            if inside && value < best.0 - 1e-12 {
                best = (value, moves.len());
            }
        }
        for &u in moves[best.1..].iter().rev() {
            let g = self.gain(u);
            self.side[u] = !self.side[u];
            if self.side[u] {
                self.size_a += 1;
            } else {
                self.size_a -= 1;
            }
            self.cut = (self.cut as i64 - g) as usize;
        }
        best.0 < start - 1e-12
    }
}

const GRID: [f64; 5] = [0.05, 0.15, 0.25, 0.35, 0.45];

fn grid_partitions(
    g: &Topology,
    objective: CutObjective,
    seed: u64,
) -> Result<Vec<PartitionReport>> {
    let n = g.node_count();
    let slack = (0.05 * n as f64).ceil();
    let mut seen = Vec::new();
    let mut out = Vec::new();
    for a in GRID {
        let w = balance_window(n, a, slack)?;
        if seen.contains(&w) {
            continue;
        }
        seen.push(w);
        out.push(fm_partition_with(g, a, slack, objective, seed)?);
    }
    Ok(out)
}

/// Heuristic Cheeger constant ĥ: the best |∂A|/|A| over the ratio grid
/// {0.05, …, 0.45} with slack ceil(0.05·v). Zero for disconnected graphs.
pub fn cheeger_approx(t: &Topology, seed: u64) -> Result<f64> {
    let g = t.underlying_undirected();
    if g.node_count() < 2 {
        return Err(Error::undefined("Cheeger constant needs v >= 2"));
    }
    if components(&g).count() > 1 {
        return Ok(0.0);
    }
    Ok(grid_partitions(&g, CutObjective::Ratio, seed)?
        .iter()
        .map(|p| p.objective)
        .fold(f64::INFINITY, f64::min))
}

/// Heuristic min Q_X = |X|/(|A||A'|). Each grid bipartition yields two
/// separators: the cut-edge endpoints on either side.
pub fn sparsity_approx(t: &Topology, seed: u64) -> Result<f64> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    if n < 3 {
        return Err(Error::param("sparsity needs v >= 3"));
    }
    if components(&g).count() > 1 {
        return Ok(0.0);
    }
    let mut best = f64::INFINITY;
    for p in grid_partitions(&g, CutObjective::CutSize, seed)? {
        for side in [true, false] {
            let mut x = vec![false; n];
            for &id in &p.cut_edges {
                let (a, b) = g.edge(id);
                x[if p.side[a] == side { a } else { b }] = true;
            }
            let sx = x.iter().filter(|&&b| b).count();
            let this = (0..n).filter(|&u| p.side[u] == side && !x[u]).count();
            let other = (0..n).filter(|&u| p.side[u] != side).count();
            if this > 0 && other > 0 {
                best = best.min(sx as f64 / (this * other) as f64);
            }
        }
    }
    if best.is_infinite() {
        return Err(Error::undefined("no separating vertex set found"));
    }
    Ok(best)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayResilience {
    /// R_i(h); `None` when |G_i(h)| < 2.
    pub per_node: Vec<Option<f64>>,
    /// R(v(h)), the mean over defined nodes.
    pub global: Option<f64>,
    /// v(h), the mean size of G_i(h).
    pub mean_subgraph_size: f64,
}

fn ball(t: &Topology, i: usize, h: u32, policy: bool) -> Vec<bool> {
    let d = if policy {
        PolicyGraph::new(t).hops(i)
    } else {
        bfs_hops(&t.underlying_undirected(), i)
    };
    d.iter().map(|d| matches!(d, Some(x) if *x <= h)).collect()
}

/// Halving cut of the h-hop subgraph around `i` (ratio 0.5, slack 0.5).
/// `policy` reaches the environment over valley-free paths only.
pub fn local_delay_resilience(
    t: &Topology,
    i: usize,
    h: u32,
    policy: bool,
    seed: u64,
) -> Result<Option<f64>> {
    t.check_node(i)?;
    local_in(
        t,
        &ball(t, i, h_checked(h)?, policy_checked(t, policy)?),
        seed,
    )
}

fn h_checked(h: u32) -> Result<u32> {
    if h == 0 {
        return Err(Error::param("h must be at least 1"));
    }
    Ok(h)
}

fn policy_checked(t: &Topology, policy: bool) -> Result<bool> {
    if policy && !t.is_directed() {
        return Err(Error::incompatible(
            "policy-compliant environments need a directed AS graph",
        ));
    }
    Ok(policy)
}

fn local_in(t: &Topology, keep: &[bool], seed: u64) -> Result<Option<f64>> {
    if keep.iter().filter(|&&k| k).count() < 2 {
        return Ok(None);
    }
    let (sub, _) = t.underlying_undirected().induced(keep);
    Ok(Some(fm_partition(&sub, 0.5, 0.5, seed)?.cut_size as f64))
}

pub fn delay_resilience(t: &Topology, h: u32, policy: bool, seed: u64) -> Result<DelayResilience> {
    let h = h_checked(h)?;
    let policy = policy_checked(t, policy)?;
    let rows: Vec<(usize, Option<f64>)> = (0..t.node_count())
        .into_par_iter()
        .map(|i| {
            let keep = ball(t, i, h, policy);
            let size = keep.iter().filter(|&&k| k).count();
            local_in(t, &keep, seed).map(|r| (size, r))
        })
        .collect::<Result<_>>()?;
    let defined: Vec<f64> = rows.iter().filter_map(|r| r.1).collect();
    Ok(DelayResilience {
        global: (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64),
        mean_subgraph_size: rows.iter().map(|r| r.0 as f64).sum::<f64>() / rows.len().max(1) as f64,
        per_node: rows.into_iter().map(|r| r.1).collect(),
    })
}
