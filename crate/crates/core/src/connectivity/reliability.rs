//! Failure-probability measures: percolation threshold, K-terminal
//! reliability, partition resilience and component statistics.

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{components, components_masked, Topology, UnionFind};
use crate::rng;

/// Critical uniform node-failure fraction: 1 − p_c = 1/(κ − 1) with
/// κ = ⟨k²⟩/⟨k⟩, clamped to [0, 1].
pub fn percolation_threshold(t: &Topology) -> Result<f64> {
    let g = t.underlying_undirected();
    let n = g.node_count() as f64;
    let k1 = (0..g.node_count()).map(|u| g.degree(u) as f64).sum::<f64>() / n;
    let k2 = (0..g.node_count())
        .map(|u| (g.degree(u) as f64).powi(2))
        .sum::<f64>()
        / n;
    if !(k1 > 0.0) || k2 / k1 <= 1.0 {
        return Err(Error::undefined(
            "degenerate degree sequence (<k²>/<k> <= 1)",
        ));
    }
    Ok((1.0 - 1.0 / (k2 / k1 - 1.0)).clamp(0.0, 1.0))
}

/// Exact enumeration limit for reliability.
pub const RELIABILITY_EXACT_EDGES: usize = 20;
/// Monte Carlo sample count above the limit.
pub const RELIABILITY_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reliability {
    pub value: f64,
    /// a_j: operating edge subsets of size j (exact only).
    pub coefficients: Option<Vec<u64>>,
    /// 95% confidence interval (Monte Carlo only).
    pub ci95: Option<(f64, f64)>,
    pub samples: usize,
}

/// Terminal set K; empty means all nodes.
fn terminal_set(t: &Topology, terminals: &[usize]) -> Result<Vec<usize>> {
    for &k in terminals {
        t.check_node(k)?;
    }
    Ok(if terminals.is_empty() {
        (0..t.node_count()).collect()
    } else {
        terminals.to_vec()
    })
}

fn k_connected(uf: &mut UnionFind, k: &[usize]) -> bool {
    let r = uf.find(k[0]);
    k[1..].iter().all(|&x| uf.find(x) == r)
}

/// Operating counts a_j, optionally conditioned on one edge being fixed.
fn counts(g: &Topology, k: &[usize], fixed: Option<(usize, bool)>) -> Vec<u64> {
    let e = g.edge_count();
    let free: Vec<usize> = (0..e)
        .filter(|&i| fixed.map_or(true, |f| f.0 != i))
        .collect();
    let m = free.len();
    let chunks: Vec<Vec<u64>> = (0..(1u64 << m))
        .into_par_iter()
        .fold(
            || (vec![0u64; m + 1], UnionFind::new(g.node_count())),
            |(mut c, mut uf), state| {
                uf.reset();
                if let Some((id, true)) = fixed {
                    let (a, b) = g.edge(id);
                    uf.union(a, b);
                }
                for (bit, &id) in free.iter().enumerate() {
                    if state >> bit & 1 == 1 {
                        let (a, b) = g.edge(id);
                        uf.union(a, b);
                    }
                }
                if k_connected(&mut uf, k) {
                    c[state.count_ones() as usize] += 1;
                }
                (c, uf)
            },
        )
        .map(|(c, _)| c)
        .collect();
    let mut out = vec![0u64; m + 1];
    for c in chunks {
        out.iter_mut().zip(c).for_each(|(o, x)| *o += x);
    }
    out
}

fn evaluate(coef: &[u64], p: f64) -> f64 {
    let m = coef.len() as i32 - 1;
    coef.iter()
        .enumerate()
        .map(|(j, &a)| a as f64 * p.powi(j as i32) * (1.0 - p).powi(m - j as i32))
        .sum()
}

/// Rel(K) for uniform edge reliability p: exact up to 20 edges, Monte Carlo
/// with 10⁵ samples above.
pub fn reliability_polynomial(
    t: &Topology,
    terminals: &[usize],
    p: f64,
    seed: u64,
) -> Result<Reliability> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge reliability {p} outside [0,1]")));
    }
    let k = terminal_set(t, terminals)?;
    let g = t.underlying_undirected();
    if k.len() <= 1 {
        return Ok(Reliability {
            value: 1.0,
            coefficients: None,
            ci95: None,
            samples: 0,
        });
    }
    if g.edge_count() <= RELIABILITY_EXACT_EDGES {
        let coef = counts(&g, &k, None);
        return Ok(Reliability {
            value: evaluate(&coef, p),
            coefficients: Some(coef),
            ci95: None,
            samples: 0,
        });
    }
    let n = RELIABILITY_SAMPLES;
    let hits: usize = (0..64u64)
        .into_par_iter()
        .map(|chunk| {
            let mut r = rng(seed.wrapping_add(chunk));
            let mut uf = UnionFind::new(g.node_count());
            let share = n / 64 + usize::from((chunk as usize) < n % 64);
            (0..share)
                .filter(|_| {
                    uf.reset();
                    for &(a, b) in g.edges() {
                        if r.gen::<f64>() < p {
                            uf.union(a, b);
                        }
                    }
                    k_connected(&mut uf, &k)
                })
                .count()
        })
        .sum();
    let m = hits as f64 / n as f64;
    let half = 1.96 * (m * (1.0 - m) / n as f64).sqrt();
    Ok(Reliability {
        value: m,
        coefficients: None,
        ci95: Some(((m - half).max(0.0), (m + half).min(1.0))),
        samples: n,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeImportance {
    pub edge: usize,
    /// Rel(G*e) − Rel(G−e) at the requested p.
    pub birnbaum: f64,
    /// Edges this one dominates: Rel(G−e) ≤ Rel(G−h) and Rel(G*e) ≥ Rel(G*h)
    /// at every p of an interior grid.
    pub dominates: Vec<usize>,
}

/// Edge ranking by contraction/deletion comparison (exact sizes only),
/// sorted by decreasing Birnbaum importance then edge id.
pub fn edge_importance(t: &Topology, terminals: &[usize], p: f64) -> Result<Vec<EdgeImportance>> {
    let k = terminal_set(t, terminals)?;
    let g = t.underlying_undirected();
    if g.edge_count() > RELIABILITY_EXACT_EDGES {
        return Err(Error::TooLarge {
            what: "edges",
            actual: g.edge_count(),
            cap: RELIABILITY_EXACT_EDGES,
        });
    }
    if k.len() <= 1 {
        return Err(Error::undefined("fewer than two terminals"));
    }
    let grid: Vec<f64> = (1..20).map(|i| i as f64 / 20.0).collect();
    let polys: Vec<(Vec<u64>, Vec<u64>)> = (0..g.edge_count())
        .map(|e| {
            (
                counts(&g, &k, Some((e, false))),
                counts(&g, &k, Some((e, true))),
            )
        })
        .collect();
    let curve = |c: &Vec<u64>| -> Vec<f64> { grid.iter().map(|&q| evaluate(c, q)).collect() };
    let curves: Vec<(Vec<f64>, Vec<f64>)> =
        polys.iter().map(|(d, c)| (curve(d), curve(c))).collect();
    let tol = 1e-12;
    let mut out: Vec<EdgeImportance> = (0..g.edge_count())
        .map(|e| {
            let dominates = (0..g.edge_count())
                .filter(|&h| {
                    h != e
                        && (0..grid.len()).all(|i| {
                            curves[e].0[i] <= curves[h].0[i] + tol
                                && curves[e].1[i] >= curves[h].1[i] - tol
                        })
                })
                .map(|h| original_edge(t, &g, h))
                .collect();
            EdgeImportance {
                edge: original_edge(t, &g, e),
                birnbaum: evaluate(&polys[e].1, p) - evaluate(&polys[e].0, p),
                dominates,
            }
        })
        .collect();
    out.sort_by(|a, b| b.birnbaum.total_cmp(&a.birnbaum).then(a.edge.cmp(&b.edge)));
    Ok(out)
}

fn original_edge(t: &Topology, g: &Topology, id: usize) -> usize {
    if !t.is_directed() {
        return id;
    }
    let (a, b) = g.edge(id);
    t.edge_id(a, b).or_else(|| t.edge_id(b, a)).unwrap()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResilienceOptions {
    /// Count a single surviving node as connected.
    pub single_node_connected: bool,
    /// Exact enumeration up to this many nodes.
    pub exact_cap: usize,
    /// Monte Carlo subsets per size i above the cap.
    pub samples_per_size: usize,
    pub seed: u64,
}

impl Default for ResilienceOptions {
    fn default() -> Self {
        ResilienceOptions {
            single_node_connected: true,
            exact_cap: 16,
            samples_per_size: 200,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionResilience {
    /// R_F = Σ_{i=2}^{v−1} k(i)/(v−2).
    pub value: f64,
    /// k(i) for i = 2..v−1.
    pub partial: Vec<f64>,
    pub exact: bool,
}

/// Partition resilience factor from the partial i-connectivities k(i).
pub fn partition_resilience_factor(
    t: &Topology,
    opts: ResilienceOptions,
) -> Result<PartitionResilience> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    if n < 3 {
        return Err(Error::param("partition resilience needs v >= 3"));
    }
    let disconnected = |alive: &[bool]| -> bool {
        let left = alive.iter().filter(|&&a| a).count();
        if left <= 1 {
            return left == 1 && !opts.single_node_connected;
        }
        components_masked(&g, alive).count() > 1
    };
    let exact = n <= opts.exact_cap.min(24);
    let partial: Vec<f64> = if exact {
        let mut hit = vec![0u64; n + 1];
        let mut total = vec![0u64; n + 1];
        let rows: Vec<(usize, bool)> = (0..(1u64 << n))
            .into_par_iter()
            .filter(|s| (2..n).contains(&(s.count_ones() as usize)))
            .map(|s| {
                let alive: Vec<bool> = (0..n).map(|u| s >> u & 1 == 0).collect();
                (s.count_ones() as usize, disconnected(&alive))
            })
            .collect();
        for (i, d) in rows {
            total[i] += 1;
            hit[i] += u64::from(d);
        }
        (2..n).map(|i| hit[i] as f64 / total[i] as f64).collect()
    } else {
        if opts.samples_per_size == 0 {
            return Err(Error::param("sample count must be positive"));
        }
        (2..n)
            .into_par_iter()
            .map(|i| {
                let mut r = rng(opts.seed.wrapping_add(i as u64));
                let hits = (0..opts.samples_per_size)
                    .filter(|_| {
                        let mut alive = vec![true; n];
                        index::sample(&mut r, n, i)
                            .iter()
                            .for_each(|u| alive[u] = false);
                        disconnected(&alive)
                    })
                    .count();
                hits as f64 / opts.samples_per_size as f64
            })
            .collect()
    };
    Ok(PartitionResilience {
        value: partial.iter().sum::<f64>() / (n - 2) as f64,
        partial,
        exact,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisconnectionStats {
    /// N, the number of components.
    pub components: usize,
    /// |V_L|/v.
    pub largest_fraction: f64,
    pub mean_size: f64,
    /// (c, f(c)): component sizes in (10^{c−1}, 10^c] (sizes 1..=10 in c = 1)
    /// and the fraction of nodes they hold.
    pub class_frequency: Vec<(u32, f64)>,
    /// (c, share of components in class c).
    pub class_components: Vec<(u32, f64)>,
    /// R, the fraction of ordered pairs joined by a path.
    pub reachability: f64,
}

fn size_class(s: usize) -> u32 {
    let mut c = 1;
    let mut bound = 10usize;
    while s > bound {
        c += 1;
        bound = bound.saturating_mul(10);
    }
    c
}

/// Component statistics; directed graphs use weak components.
pub fn disconnection_stats(t: &Topology) -> Result<DisconnectionStats> {
    let n = t.node_count();
    if n == 0 {
        return Err(Error::undefined("empty graph"));
    }
    let comps = components(t);
    let mut classes = std::collections::BTreeMap::new();
    let mut counts = std::collections::BTreeMap::new();
    for &s in &comps.sizes {
        *classes.entry(size_class(s)).or_insert(0usize) += s;
        *counts.entry(size_class(s)).or_insert(0usize) += 1;
    }
    let pairs: usize = comps.sizes.iter().map(|&s| s * (s - 1)).sum();
    Ok(DisconnectionStats {
        components: comps.count(),
        largest_fraction: comps.largest() as f64 / n as f64,
        mean_size: n as f64 / comps.count() as f64,
        class_frequency: classes
            .into_iter()
            .map(|(c, s)| (c, s as f64 / n as f64))
            .collect(),
        class_components: counts
            .into_iter()
            .map(|(c, k)| (c, k as f64 / comps.count() as f64))
            .collect(),
        reachability: if n < 2 {
            1.0
        } else {
            pairs as f64 / (n * (n - 1)) as f64
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;
    use crate::graph::{brute_force_oracle, OracleProblem};

    #[test]
    fn percolation_examples() {
        assert_eq!(percolation_threshold(&cycle(4).unwrap()).unwrap(), 0.0);
        assert!((percolation_threshold(&complete(4).unwrap()).unwrap() - 0.5).abs() < 1e-12);
        assert!(percolation_threshold(&path(2).unwrap()).is_err());
    }

    #[test]
    fn reliability_examples() {
        let k2 = path(2).unwrap();
        assert!((reliability_polynomial(&k2, &[], 0.3, 0).unwrap().value - 0.3).abs() < 1e-12);
        let k3 = complete(3).unwrap();
        for p in [0.0, 0.2, 0.7, 1.0] {
            let r = reliability_polynomial(&k3, &[], p, 0).unwrap();
            assert!((r.value - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-12);
        }
        // two-terminal on a triangle: direct edge or the two-hop detour
        let r = reliability_polynomial(&k3, &[0, 1], 0.5, 0).unwrap();
        assert!((r.value - (0.5 + 0.5 * 0.25)).abs() < 1e-12);
        assert!(reliability_polynomial(&k3, &[0, 7], 0.5, 0).is_err());
    }

    #[test]
    fn reliability_matches_oracle_and_mc() {
        let t = erdos_renyi(7, 0.5, 3).unwrap();
        let exact = reliability_polynomial(&t, &[], 0.8, 0).unwrap().value;
        let o = brute_force_oracle(&t, OracleProblem::ReliabilityAllTerminal { p: 0.8 }).unwrap();
        assert!((exact - o).abs() < 1e-12);
        let big = complete(8).unwrap();
        let mc = reliability_polynomial(&big, &[0, 1], 0.3, 1).unwrap();
        let (lo, hi) = mc.ci95.unwrap();
        assert!(lo <= mc.value && mc.value <= hi && mc.samples == RELIABILITY_SAMPLES);
    }

    #[test]
    fn bridge_is_most_important() {
        let t = Topology::undirected(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        let ranking = edge_importance(&t, &[], 0.9).unwrap();
        assert_eq!(ranking[0].edge, 3);
        assert_eq!(ranking[0].dominates, vec![0, 1, 2]);
    }

    #[test]
    fn resilience_examples() {
        let opts = ResilienceOptions::default();
        assert_eq!(
            partition_resilience_factor(&complete(4).unwrap(), opts)
                .unwrap()
                .value,
            0.0
        );
        let s = partition_resilience_factor(&star(4).unwrap(), opts).unwrap();
        assert_eq!(s.partial, vec![0.5, 0.0]);
        assert_eq!(s.value, 0.25);
        let mc = ResilienceOptions {
            exact_cap: 0,
            samples_per_size: 4000,
            ..opts
        };
        let s = partition_resilience_factor(&star(4).unwrap(), mc).unwrap();
        assert!(!s.exact && (s.value - 0.25).abs() < 0.03);
    }

    #[test]
    fn disconnection_examples() {
        let two = Topology::undirected(4, &[(0, 1), (2, 3)]).unwrap();
        let d = disconnection_stats(&two).unwrap();
        assert!((d.reachability - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(d.components, 2);
        assert_eq!(
            disconnection_stats(&complete(5).unwrap())
                .unwrap()
                .reachability,
            1.0
        );
        let iso = disconnection_stats(&Topology::undirected(6, &[]).unwrap()).unwrap();
        assert_eq!((iso.components, iso.reachability), (6, 0.0));
        assert_eq!(size_class(1), 1);
        assert_eq!(size_class(11), 2);
        assert_eq!(size_class(100), 2);
    }
}
