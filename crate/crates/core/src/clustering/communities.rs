//! Community structure: modularity of an assignment, leading-eigenvector
//! bisection, Girvan–Newman edge removal, within-module degree z-score and
//! participation coefficient.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components_masked, Topology};
use crate::rng;
use crate::throughput::{accumulate, Masks};

/// Node → community map with its mixing matrix and modularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    /// Dense community ids, numbered by first appearance.
    pub community: Vec<usize>,
    /// e_ij: fraction of edge ends joining communities i and j.
    pub mixing: Vec<Vec<f64>>,
    pub modularity: f64,
}

impl CommunityAssignment {
    /// Builds the mixing matrix and Q for `labels` on the simple graph of `t`.
    pub fn new(t: &Topology, labels: &[usize]) -> Result<Self> {
        if labels.len() != t.node_count() {
            return Err(Error::param("assignment must label every node"));
        }
        let community = densify(labels);
        let k = community.iter().max().map_or(0, |m| m + 1);
        let g = t.underlying_undirected();
        let m = g.edge_count() as f64;
        if m == 0.0 {
            return Err(Error::undefined("modularity needs at least one edge"));
        }
        let mut counts = vec![vec![0usize; k]; k];
        for &(a, b) in g.edges() {
            counts[community[a]][community[b]] += 1;
            counts[community[b]][community[a]] += 1;
        }
        // e_ij from integer end counts so that exact partitions give exact Q
        let mixing: Vec<Vec<f64>> = counts
            .iter()
            .map(|row| row.iter().map(|&c| c as f64 / (2.0 * m)).collect())
            .collect();
        let modularity = (0..k)
            .map(|i| {
                let ends: usize = counts[i].iter().sum();
                let a = ends as f64 / (2.0 * m);
                counts[i][i] as f64 / (2.0 * m) - a * a
            })
            .sum();
        Ok(CommunityAssignment {
            community,
            mixing,
            modularity,
        })
    }

    pub fn count(&self) -> usize {
        self.mixing.len()
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.community.len())
            .filter(|&u| self.community[u] == c)
            .collect()
    }
}

fn densify(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

/// Q = Tr E − ||E²||.
pub fn modularity(t: &Topology, labels: &[usize]) -> Result<f64> {
    Ok(CommunityAssignment::new(t, labels)?.modularity)
}

const POWER_TOL: f64 = 1e-10;
const POWER_MAX_ITER: usize = 10_000;
const SPLIT_EPS: f64 = 1e-8;

/// Implicit generalised modularity matrix of one group.
struct GroupMatrix<'a> {
    g: &'a Topology,
    nodes: &'a [usize],
    pos: &'a [usize],
    k: Vec<f64>,
    two_m: f64,
    /// Σ_{l∈g} B_il, the diagonal correction.
    row_sum: Vec<f64>,
}

impl<'a> GroupMatrix<'a> {
    fn new(g: &'a Topology, nodes: &'a [usize], pos: &'a [usize], in_group: &[bool]) -> Self {
        let two_m = 2.0 * g.edge_count() as f64;
        let k: Vec<f64> = nodes.iter().map(|&u| g.degree(u) as f64).collect();
        let kg: f64 = k.iter().sum();
        let row_sum = nodes
            .iter()
            .zip(&k)
            .map(|(&u, &ku)| {
                let inside = g.neighbors(u).iter().filter(|&&(w, _)| in_group[w]).count() as f64;
                inside - ku * kg / two_m
            })
            .collect();
        GroupMatrix {
            g,
            nodes,
            pos,
            k,
            two_m,
            row_sum,
        }
    }

    fn apply(&self, x: &[f64], out: &mut [f64]) {
        let kx: f64 = self.k.iter().zip(x).map(|(a, b)| a * b).sum();
        for (a, &u) in self.nodes.iter().enumerate() {
            let mut s = 0.0;
            for &(w, _) in self.g.neighbors(u) {
                let p = self.pos[w];
                if p != usize::MAX {
                    s += x[p];
                }
            }
            out[a] = s - self.k[a] * kx / self.two_m - self.row_sum[a] * x[a];
        }
    }

    /// Absolute row-sum bound on the spectrum, used as the shift.
    fn shift(&self) -> f64 {
        self.nodes
            .iter()
            .enumerate()
            .map(|(a, &u)| {
                let kg: f64 = self.k.iter().sum();
                self.g.degree(u) as f64 + self.k[a] * kg / self.two_m + self.row_sum[a].abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Leading eigenpair of the group matrix by shifted power iteration.
fn leading_eigen(m: &GroupMatrix, seed: u64) -> (f64, Vec<f64>) {
    use rand::Rng;
    let n = m.nodes.len();
    let c = m.shift() + 1.0;
    let mut r = rng(seed);
    let mut x: Vec<f64> = (0..n).map(|_| r.gen::<f64>() - 0.5).collect();
    normalise(&mut x);
    let mut y = vec![0.0; n];
    for _ in 0..POWER_MAX_ITER {
        m.apply(&x, &mut y);
        y.iter_mut().zip(&x).for_each(|(a, b)| *a += c * b);
        normalise(&mut y);
        let diff = y
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        std::mem::swap(&mut x, &mut y);
        if diff < POWER_TOL {
            break;
        }
    }
    m.apply(&x, &mut y);
    let lambda = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    (lambda, x)
}

fn normalise(x: &mut [f64]) {
    let n = x.iter().map(|a| a * a).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|a| *a /= n);
    }
}

/// Recursive leading-eigenvector bisection. A group is split only when the
/// leading eigenvalue is positive and the split raises Q.
pub fn detect_communities_spectral(t: &Topology) -> Result<CommunityAssignment> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Err(Error::undefined(
            "community detection needs at least one edge",
        ));
    }
    let mut labels = vec![0usize; n];
    let mut next = 1;
    let mut stack = vec![(0..n).collect::<Vec<usize>>()];
    let mut pos = vec![usize::MAX; n];
    let mut in_group = vec![false; n];
    let mut round = 0u64;
    while let Some(nodes) = stack.pop() {
        if nodes.len() < 2 {
            continue;
        }
        for (a, &u) in nodes.iter().enumerate() {
            pos[u] = a;
            in_group[u] = true;
        }
        let m = GroupMatrix::new(&g, &nodes, &pos, &in_group);
        let (lambda, vec) = leading_eigen(&m, round);
        round += 1;
        let mut split = None;
        if lambda > SPLIT_EPS {
            let s: Vec<f64> = vec
                .iter()
                .map(|&x| if x > 0.0 { 1.0 } else { -1.0 })
                .collect();
            let mut bs = vec![0.0; nodes.len()];
            m.apply(&s, &mut bs);
            let dq: f64 = s.iter().zip(&bs).map(|(a, b)| a * b).sum::<f64>() / (2.0 * m.two_m);
            let plus: Vec<usize> = nodes
                .iter()
                .zip(&s)
                .filter(|(_, &x)| x > 0.0)
                .map(|(&u, _)| u)
                .collect();
            let minus: Vec<usize> = nodes
                .iter()
                .zip(&s)
                .filter(|(_, &x)| x < 0.0)
                .map(|(&u, _)| u)
                .collect();
            if dq > SPLIT_EPS && !plus.is_empty() && !minus.is_empty() {
                split = Some((plus, minus));
            }
        }
        for &u in &nodes {
            pos[u] = usize::MAX;
            in_group[u] = false;
        }
        if let Some((plus, minus)) = split {
            for &u in &minus {
                labels[u] = next;
            }
            next += 1;
            stack.push(minus);
            stack.push(plus);
        }
    }
    CommunityAssignment::new(&g, &labels)
}

/// Girvan–Newman: repeatedly delete the edge of highest betweenness (lowest
/// id on ties) and keep the component partition of highest Q on the
/// original graph. `sample_fraction < 1` estimates betweenness from a seeded
/// subset of sources, redrawn at each step.
pub fn detect_communities_edge_betweenness(
    t: &Topology,
    sample_fraction: Option<f64>,
    seed: u64,
) -> Result<CommunityAssignment> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    let e = g.edge_count();
    if e == 0 {
        return Err(Error::undefined(
            "community detection needs at least one edge",
        ));
    }
    let frac = sample_fraction.unwrap_or(1.0);
    if !(frac > 0.0 && frac <= 1.0) {
        return Err(Error::param(format!(
            "sample fraction {frac} outside (0,1]"
        )));
    }
    let all_nodes = vec![true; n];
    let mut alive = vec![true; e];
    let mut best = CommunityAssignment::new(&g, &components_of(&g, &alive, &all_nodes))?;
    let mut count = best.count();
    let mut r = rng(seed);
    for _ in 0..e {
        let sources: Vec<usize> = if frac >= 1.0 {
            (0..n).collect()
        } else {
            let k = ((frac * n as f64).ceil() as usize).clamp(1, n);
            let mut s = index::sample(&mut r, n, k).into_vec();
            s.sort_unstable();
            s
        };
        let m = Masks {
            nodes: None,
            edges: Some(&alive),
        };
        let (_, eb) = accumulate(&g, &sources, false, m, true, &|_, _| 1.0);
        let mut pick: Option<(usize, f64)> = None;
        for id in (0..e).filter(|&id| alive[id]) {
            let tol = 1e-9 * eb[id].abs().max(1.0);
            if pick.is_none_or(|(_, b)| eb[id] > b + tol) {
                pick = Some((id, eb[id]));
            }
        }
        let Some((id, _)) = pick else { break };
        alive[id] = false;
        let labels = components_of(&g, &alive, &all_nodes);
        let c = labels.iter().max().unwrap() + 1;
        if c > count {
            count = c;
            let a = CommunityAssignment::new(&g, &labels)?;
            if a.modularity > best.modularity + 1e-12 {
                best = a;
            }
        }
    }
    Ok(best)
}

fn components_of(g: &Topology, edge_alive: &[bool], node_alive: &[bool]) -> Vec<usize> {
    let (sub, _) = g.without_edges(&edge_alive.iter().map(|&a| !a).collect::<Vec<_>>());
    components_masked(&sub, node_alive).component_of
}

/// z_i = (κ_i − mean κ)/σ within the node's community, κ_i the number of
/// links to its own community; σ = 0 gives z = 0.
pub fn zscore_within_module(t: &Topology, labels: &[usize]) -> Result<Vec<f64>> {
    let a = CommunityAssignment::new(t, labels).or_else(|e| match e {
        Error::Undefined(_) => Ok(CommunityAssignment {
            community: densify(labels),
            mixing: Vec::new(),
            modularity: 0.0,
        }),
        other => Err(other),
    })?;
    let g = t.underlying_undirected();
    let n = g.node_count();
    let kappa: Vec<f64> = (0..n)
        .map(|u| {
            g.neighbors(u)
                .iter()
                .filter(|&&(w, _)| a.community[w] == a.community[u])
                .count() as f64
        })
        .collect();
    let k = a.community.iter().max().map_or(0, |m| m + 1);
    let mut stats = vec![(0.0, 0.0, 0usize); k];
    for u in 0..n {
        let s = &mut stats[a.community[u]];
        s.0 += kappa[u];
        s.1 += kappa[u] * kappa[u];
        s.2 += 1;
    }
    Ok((0..n)
        .map(|u| {
            let (s, ss, c) = stats[a.community[u]];
            let mean = s / c as f64;
            let var = (ss / c as f64 - mean * mean).max(0.0);
            if var <= 1e-24 {
                0.0
            } else {
                (kappa[u] - mean) / var.sqrt()
            }
        })
        .collect())
}

/// P_i = 1 − Σ_c (k_ic / k_i)²; `None` for isolated nodes.
pub fn participation_coefficient(t: &Topology, labels: &[usize]) -> Result<Vec<Option<f64>>> {
    if labels.len() != t.node_count() {
        return Err(Error::param("assignment must label every node"));
    }
    let community = densify(labels);
    let g = t.underlying_undirected();
    let k = community.iter().max().map_or(0, |m| m + 1);
    let mut counts = vec![0usize; k];
    Ok((0..g.node_count())
        .map(|u| {
            let nb = g.neighbors(u);
            if nb.is_empty() {
                return None;
            }
            counts.iter_mut().for_each(|c| *c = 0);
            nb.iter().for_each(|&(w, _)| counts[community[w]] += 1);
            let ku = nb.len() as f64;
            Some(1.0 - counts.iter().map(|&c| (c as f64 / ku).powi(2)).sum::<f64>())
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn two_triangles() -> Topology {
        Topology::undirected(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn modularity_examples() {
        let t = two_triangles();
        assert!(modularity(&t, &[0; 6]).unwrap().abs() < 1e-12);
        assert!((modularity(&t, &[0, 0, 0, 1, 1, 1]).unwrap() - 0.5).abs() < 1e-12);
        let a = CommunityAssignment::new(&t, &[7, 7, 7, 3, 3, 3]).unwrap();
        assert_eq!(a.community, vec![0, 0, 0, 1, 1, 1]);
        let total: f64 = a.mixing.iter().flatten().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn planted_cliques() {
        let t = two_cliques_bridge(5, 5).unwrap();
        let want = [0, 0, 0, 0, 0, 1, 1, 1, 1, 1];
        let s = detect_communities_spectral(&t).unwrap();
        assert_eq!(s.community, want);
        let gn = detect_communities_edge_betweenness(&t, None, 0).unwrap();
        assert_eq!(gn.community, want);
        assert!((s.modularity - modularity(&t, &want).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_not_split() {
        let s = detect_communities_spectral(&complete(6).unwrap()).unwrap();
        assert_eq!(s.count(), 1);
        assert_eq!(s.modularity, 0.0);
    }

    #[test]
    fn sampled_equals_exact_at_one() {
        let t = barabasi_albert(40, 2, 9).unwrap();
        let a = detect_communities_edge_betweenness(&t, None, 1).unwrap();
        let b = detect_communities_edge_betweenness(&t, Some(1.0), 2).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zscore_examples() {
        let z = zscore_within_module(&complete(3).unwrap(), &[0, 0, 0]).unwrap();
        assert_eq!(z, vec![0.0; 3]);
        let z = zscore_within_module(&star(4).unwrap(), &[0; 4]).unwrap();
        assert!((z[0] - 3f64.sqrt()).abs() < 1e-12);
        assert!((z[1] + 1.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn participation_examples() {
        let t = path(3).unwrap();
        let p = participation_coefficient(&t, &[0, 0, 0]).unwrap();
        assert_eq!(p, vec![Some(0.0); 3]);
        let p = participation_coefficient(&t, &[0, 1, 2]).unwrap();
        assert_eq!(p[1], Some(0.5));
        let p = participation_coefficient(&star(5).unwrap(), &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(p[0], Some(0.75));
        let iso = Topology::undirected(2, &[]).unwrap();
        assert_eq!(
            participation_coefficient(&iso, &[0, 0]).unwrap(),
            vec![None, None]
        );
    }
}
