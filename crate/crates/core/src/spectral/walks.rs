//! Random-walk and electrical measures: hitting distances, random-walk and
//! current-flow betweenness, current-flow closeness and network criticality.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cache::{directed_adjacency, row_normalized, SpectralCache, DENSE_CAP};
use crate::error::{Error, Result};
use crate::graph::{components, strong_components, Topology};

/// Per-target dense solves are refused above this many nodes.
pub const WALK_CAP: usize = 400;
/// Pairwise current-flow sweeps are refused above this many nodes.
pub const CURRENT_FLOW_CAP: usize = 1000;

fn require_connected(t: &Topology) -> Result<()> {
    let n = t.node_count();
    if n < 2 {
        return Err(Error::undefined("needs v >= 2"));
    }
    let count = if t.is_directed() {
        strong_components(t).count()
    } else {
        components(t).count()
    };
    if count > 1 {
        return Err(Error::undefined("graph is not (strongly) connected"));
    }
    Ok(())
}

fn require_undirected(t: &Topology, what: &str) -> Result<()> {
    if t.is_directed() {
        return Err(Error::incompatible(format!(
            "{what} is not applicable to directed graphs"
        )));
    }
    Ok(())
}

fn cap(t: &Topology, cap: usize, what: &'static str) -> Result<()> {
    if t.node_count() > cap {
        return Err(Error::TooLarge {
            what,
            actual: t.node_count(),
            cap,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomWalkDistances {
    /// d^rw_(s,t) = expected hops from s until t is first hit; row s, column t.
    pub pair: Vec<Vec<f64>>,
    /// d^rw_t = Σ_s d^rw_(s,t).
    pub to_target: Vec<f64>,
}

struct WalkSolves {
    dist: Vec<Vec<f64>>,
    visits: Vec<f64>,
}

/// For every target t, factor I − R with row and column t removed and solve
/// for the row sums (hitting times) and column sums (visits) of F^t.
fn walk_solves(t: &Topology) -> Result<WalkSolves> {
    require_connected(t)?;
    cap(t, WALK_CAP, "nodes for random-walk solves")?;
    let n = t.node_count();
    let r = row_normalized(&directed_adjacency(t, t.is_weighted()));
    let per_target: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|tt| {
            let keep: Vec<usize> = (0..n).filter(|&u| u != tt).collect();
            let m = DMatrix::from_fn(n - 1, n - 1, |i, j| {
                (if i == j { 1.0 } else { 0.0 }) - r[(keep[i], keep[j])]
            });
            let ones = DVector::from_element(n - 1, 1.0);
            let lu = m.clone().lu();
            let h = lu.solve(&ones).expect("absorbing chain is non-singular");
            let c = m
                .transpose()
                .lu()
                .solve(&ones)
                .expect("absorbing chain is non-singular");
            let mut dist = vec![0.0; n];
            let mut visits = vec![0.0; n];
            for (i, &u) in keep.iter().enumerate() {
                dist[u] = h[i];
                visits[u] = c[i];
            }
            (dist, visits)
        })
        .collect();
    let mut dist = vec![vec![0.0; n]; n];
    let mut visits = vec![0.0; n];
    for (tt, (d, c)) in per_target.into_iter().enumerate() {
        for s in 0..n {
            dist[s][tt] = d[s];
            visits[s] += c[s];
        }
    }
    Ok(WalkSolves { dist, visits })
}

/// Expected random-walk hop counts; transitions follow edge weights when
/// present and out-links on directed graphs.
pub fn random_walk_distances(t: &Topology) -> Result<RandomWalkDistances> {
    let w = walk_solves(t)?;
    let n = t.node_count();
    let to_target = (0..n)
        .map(|tt| (0..n).map(|s| w.dist[s][tt]).sum())
        .collect();
    Ok(RandomWalkDistances {
        pair: w.dist,
        to_target,
    })
}

/// B^rw_i = Σ_{s,t} F_{sit}: expected visits to i over walks between all
/// ordered pairs, including the start at i.
pub fn random_walk_betweenness(t: &Topology) -> Result<Vec<f64>> {
    Ok(walk_solves(t)?.visits)
}

/// Hitting times of an undirected graph from L⁺:
/// H(s,t) = Σ_k s_k (L⁺_sk − L⁺_st − L⁺_tk + L⁺_tt).
pub fn hitting_times_pinv(t: &Topology) -> Result<Vec<Vec<f64>>> {
    require_undirected(t, "the Laplacian hitting-time formula")?;
    require_connected(t)?;
    let cache = SpectralCache::new(t, t.is_weighted());
    let p = cache.laplacian_pinv()?;
    let n = t.node_count();
    let s: Vec<f64> = (0..n).map(|u| cache.laplacian()[(u, u)]).collect();
    Ok((0..n)
        .map(|a| {
            (0..n)
                .map(|b| {
                    if a == b {
                        return 0.0;
                    }
                    (0..n)
                        .map(|k| s[k] * (p[(a, k)] - p[(a, b)] - p[(b, k)] + p[(b, b)]))
                        .sum()
                })
                .collect()
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurrentFlowCloseness {
    /// C^c_s = v / Σ_t r_st.
    pub per_node: Vec<f64>,
    /// Σ_t r_st = v·M_ss + trace(M) − 2/v with M = (L + J)⁻¹.
    pub total_resistance: Vec<f64>,
}

/// Current-flow closeness from (L + J)⁻¹.
pub fn current_flow_closeness(t: &Topology) -> Result<CurrentFlowCloseness> {
    require_undirected(t, "current-flow closeness")?;
    require_connected(t)?;
    cap(t, DENSE_CAP, "nodes for current-flow closeness")?;
    let n = t.node_count();
    let l = SpectralCache::new(t, t.is_weighted()).laplacian();
    let m = (l + DMatrix::from_element(n, n, 1.0))
        .try_inverse()
        .ok_or_else(|| Error::NoConvergence("L + J is singular".into()))?;
    let trace = m.trace();
    let total: Vec<f64> = (0..n)
        .map(|s| n as f64 * m[(s, s)] + trace - 2.0 / n as f64)
        .collect();
    Ok(CurrentFlowCloseness {
        per_node: total.iter().map(|r| n as f64 / r).collect(),
        total_resistance: total,
    })
}

/// The same closeness from pairwise resistances r_st = u_stᵀ L⁺ u_st.
pub fn current_flow_closeness_pinv(t: &Topology) -> Result<CurrentFlowCloseness> {
    require_undirected(t, "current-flow closeness")?;
    require_connected(t)?;
    let cache = SpectralCache::new(t, t.is_weighted());
    let p = cache.laplacian_pinv()?;
    let n = t.node_count();
    let total: Vec<f64> = (0..n)
        .map(|s| {
            (0..n)
                .map(|u| p[(s, s)] + p[(u, u)] - 2.0 * p[(s, u)])
                .sum()
        })
        .collect();
    Ok(CurrentFlowCloseness {
        per_node: total.iter().map(|r| n as f64 / r).collect(),
        total_resistance: total,
    })
}

/// B^c_i: current through i summed over unordered source–sink pairs that do
/// not include i, with unit current injected at s and extracted at t.
pub fn current_flow_betweenness(t: &Topology) -> Result<Vec<f64>> {
    require_undirected(t, "current-flow betweenness")?;
    require_connected(t)?;
    cap(t, CURRENT_FLOW_CAP, "nodes for current-flow betweenness")?;
    let cache = SpectralCache::new(t, t.is_weighted());
    let p = cache.laplacian_pinv()?;
    let n = t.node_count();
    let cond: Vec<f64> = (0..t.edge_count())
        .map(|id| if t.is_weighted() { t.weight(id) } else { 1.0 })
        .collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let mut acc = vec![0.0; n];
            let mut through = vec![0.0; n];
            for tt in s + 1..n {
                through.iter_mut().for_each(|x| *x = 0.0);
                for (id, &(a, b)) in t.edges().iter().enumerate() {
                    let pa = p[(a, s)] - p[(a, tt)];
                    let pb = p[(b, s)] - p[(b, tt)];
                    let i = cond[id] * (pa - pb).abs();
                    through[a] += i;
                    through[b] += i;
                }
                for u in 0..n {
                    if u != s && u != tt {
                        acc[u] += 0.5 * through[u];
                    }
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; n];
    for r in rows {
        out.iter_mut().zip(r).for_each(|(o, x)| *o += x);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criticality {
    /// τ = Σ_{s≠t} τ_st over ordered pairs.
    pub tau: f64,
    /// K(G) = Σ_{s<t} r_st.
    pub kirchhoff: f64,
    /// τ̃ when a traffic matrix was given.
    pub tanc: Option<f64>,
}

/// Network criticality τ and, with a traffic matrix γ_st, the traffic-aware
/// variant with α_st = 1 + (γ_st + γ_ts)/(2γ) + (γ_{*s} − γ_{s*})/(vγ), where
/// γ_{*s} is the traffic into s and γ_{s*} the traffic out of s.
pub fn network_criticality(t: &Topology, traffic: Option<&[Vec<f64>]>) -> Result<Criticality> {
    require_undirected(t, "network criticality")?;
    require_connected(t)?;
    let cache = SpectralCache::new(t, t.is_weighted());
    let p = cache.laplacian_pinv()?;
    let n = t.node_count();
    let r = |s: usize, u: usize| p[(s, s)] + p[(u, u)] - 2.0 * p[(s, u)];
    let mut kirchhoff = 0.0;
    for s in 0..n {
        for u in s + 1..n {
            kirchhoff += r(s, u);
        }
    }
    let tanc = match traffic {
        None => None,
        Some(g) => {
            if g.len() != n || g.iter().any(|row| row.len() != n) {
                return Err(Error::param(format!("traffic matrix must be {n}x{n}")));
            }
            if g.iter().flatten().any(|&x| !(x >= 0.0)) {
                return Err(Error::param("traffic entries must be non-negative"));
            }
            let total: f64 = g.iter().flatten().sum();
            if total <= 0.0 {
                return Err(Error::param("traffic matrix is all zero"));
            }
            let out: Vec<f64> = g.iter().map(|row| row.iter().sum()).collect();
            let inn: Vec<f64> = (0..n).map(|s| g.iter().map(|row| row[s]).sum()).collect();
            let mut acc = 0.0;
            for s in 0..n {
                for u in 0..n {
                    if s != u {
                        let alpha = 1.0
                            + (g[s][u] + g[u][s]) / (2.0 * total)
                            + (inn[s] - out[s]) / (n as f64 * total);
                        acc += alpha * r(s, u);
                    }
                }
            }
            Some(acc)
        }
    };
    let tau = (0..n)
        .map(|s| (0..n).filter(|&u| u != s).map(|u| r(s, u)).sum::<f64>())
        .sum();
    Ok(Criticality {
        tau,
        kirchhoff,
        tanc,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn k2_values() {
        let t = path(2).unwrap();
        let d = random_walk_distances(&t).unwrap();
        assert!((d.pair[0][1] - 1.0).abs() < 1e-12 && (d.pair[1][0] - 1.0).abs() < 1e-12);
        let c = network_criticality(&t, None).unwrap();
        assert!((c.tau - 2.0).abs() < 1e-12);
        assert!((c.kirchhoff - 1.0).abs() < 1e-12);
        let cl = current_flow_closeness(&t).unwrap();
        assert!((cl.total_resistance[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn star_hitting_times() {
        let d = random_walk_distances(&star(4).unwrap()).unwrap();
        assert!((d.pair[1][0] - 1.0).abs() < 1e-10);
        assert!((d.pair[0][1] - 5.0).abs() < 1e-10);
        let h = hitting_times_pinv(&star(4).unwrap()).unwrap();
        assert!((h[0][1] - 5.0).abs() < 1e-9);
    }

    #[test]
    fn closeness_routes_agree() {
        let t = erdos_renyi(15, 0.3, 2).unwrap();
        if components(&t).count() == 1 {
            let a = current_flow_closeness(&t).unwrap();
            let b = current_flow_closeness_pinv(&t).unwrap();
            for i in 0..15 {
                assert!((a.per_node[i] - b.per_node[i]).abs() < 1e-10);
            }
        }
        let p = current_flow_closeness(&path(3).unwrap()).unwrap();
        assert!(p.per_node[1] > p.per_node[0]);
    }

    #[test]
    fn betweenness_identities() {
        let t = erdos_renyi(12, 0.4, 5).unwrap();
        let b = random_walk_betweenness(&t).unwrap();
        let tau = network_criticality(&t, None).unwrap().tau;
        for i in 0..12 {
            assert!((b[i] / t.degree(i) as f64 - tau / 2.0).abs() < 1e-9 * tau);
        }
        let c = current_flow_betweenness(&path(3).unwrap()).unwrap();
        assert!((c[1] - 1.0).abs() < 1e-12 && c[0].abs() < 1e-12);
    }

    #[test]
    fn uniform_traffic_scales_tau() {
        let t = cycle(5).unwrap();
        let g = vec![vec![1.0; 5]; 5]
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r[i] = 0.0;
                r
            })
            .collect::<Vec<_>>();
        let c = network_criticality(&t, Some(&g)).unwrap();
        assert!((c.tanc.unwrap() - c.tau * (1.0 + 1.0 / 20.0)).abs() < 1e-9);
        assert!(
            network_criticality(&Topology::directed(2, &[(0, 1), (1, 0)]).unwrap(), None).is_err()
        );
    }

    #[test]
    fn directed_walks() {
        let t = Topology::directed(3, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        let d = random_walk_distances(&t).unwrap();
        assert!((d.pair[0][2] - 2.0).abs() < 1e-12);
        assert!((d.pair[2][0] - 1.0).abs() < 1e-12);
    }
}
