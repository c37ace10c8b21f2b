//! Degree-based metrics: degree and strength distributions, entropy,
//! skewness, vulnerability function, assortativity, neighbour connectivity
//! and rich-club connectivity.

use std::collections::{BTreeMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::rng;

/// Degrees, strengths and their distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeView {
    /// k_i; total degree (in + out) on directed graphs.
    pub degree: Vec<usize>,
    pub out_degree: Option<Vec<usize>>,
    pub in_degree: Option<Vec<usize>>,
    /// s_i = Σ_j w_ij (equals k_i on unweighted undirected graphs).
    pub strength: Vec<f64>,
    /// P(k) over observed degrees.
    pub p_k: BTreeMap<usize, f64>,
    /// P(s) over observed strengths, sorted by strength.
    pub p_s: Vec<(f64, f64)>,
    /// D(k) = P(k)·v.
    pub d_k: BTreeMap<usize, f64>,
    /// Population standard deviation of D(k) over observed classes.
    pub sigma_d: f64,
}

fn total_degrees(t: &Topology) -> Vec<usize> {
    (0..t.node_count())
        .map(|u| {
            if t.is_directed() {
                t.out_degree(u) + t.in_degree(u)
            } else {
                t.degree(u)
            }
        })
        .collect()
}

fn total_strengths(t: &Topology) -> Vec<f64> {
    (0..t.node_count())
        .map(|u| {
            let out = t.strength(u);
            if t.is_directed() {
                out + t
                    .in_neighbors(u)
                    .iter()
                    .map(|&(_, id)| t.weight(id))
                    .sum::<f64>()
            } else {
                out
            }
        })
        .collect()
}

pub fn degree_metrics(t: &Topology) -> DegreeView {
    let n = t.node_count() as f64;
    let degree = total_degrees(t);
    let strength = total_strengths(t);
    let mut counts_k: BTreeMap<usize, usize> = BTreeMap::new();
    for &k in &degree {
        *counts_k.entry(k).or_insert(0) += 1;
    }
    let p_k: BTreeMap<usize, f64> = counts_k.iter().map(|(&k, &c)| (k, c as f64 / n)).collect();
    let mut counts: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    for &s in &strength {
        counts.entry(s.to_bits()).or_insert((s, 0)).1 += 1;
    }
    let mut p_s: Vec<(f64, f64)> = counts.values().map(|&(s, c)| (s, c as f64 / n)).collect();
    p_s.sort_by(|a, b| a.0.total_cmp(&b.0));
    let d_k: BTreeMap<usize, f64> = counts_k.iter().map(|(&k, &c)| (k, c as f64)).collect();
    let mean = d_k.values().sum::<f64>() / d_k.len() as f64;
    let var = d_k.values().map(|d| (d - mean).powi(2)).sum::<f64>() / d_k.len() as f64;
    let (out_degree, in_degree) = if t.is_directed() {
        let n = t.node_count();
        (
            Some((0..n).map(|u| t.out_degree(u)).collect()),
            Some((0..n).map(|u| t.in_degree(u)).collect()),
        )
    } else {
        (None, None)
    };
    DegreeView {
        degree,
        out_degree,
        in_degree,
        strength,
        p_k,
        p_s,
        d_k,
        sigma_d: var.sqrt(),
    }
}

/// H = −Σ_{k=1}^{v−1} P(k) ln P(k).
pub fn entropy(t: &Topology) -> Result<f64> {
    let v = t.node_count();
    if v < 2 {
        return Err(Error::undefined("entropy needs v >= 2"));
    }
    let view = degree_metrics(t);
    let h = view
        .p_k
        .iter()
        .filter(|(&k, &p)| k >= 1 && k < v && p > 0.0)
        .map(|(_, &p)| -p * p.ln())
        .sum::<f64>();
    Ok(h.max(0.0))
}

/// H_max = ln(v − 1), reported for normalisation.
pub fn entropy_max(t: &Topology) -> Result<f64> {
    let v = t.node_count();
    if v < 2 {
        return Err(Error::undefined("entropy needs v >= 2"));
    }
    Ok(((v - 1) as f64).ln())
}

/// Sk = Σ r_i k_i / (k̄·v(v+1)/2), rank 1 for the highest degree. Ties are
/// ordered by a seeded shuffle; the mean over 32 shuffles is returned.
pub fn skewness(t: &Topology, seed: u64) -> Result<f64> {
    let k = total_degrees(t);
    let v = k.len();
    let mean = k.iter().sum::<usize>() as f64 / v as f64;
    if mean == 0.0 {
        return Err(Error::undefined("skewness needs at least one edge"));
    }
    let denom = mean * (v * (v + 1)) as f64 / 2.0;
    let mut r = rng(seed);
    let rounds = 32;
    let mut acc = 0.0;
    let mut order: Vec<usize> = (0..v).collect();
    for _ in 0..rounds {
        order.shuffle(&mut r);
        // stable sort keeps the shuffled order among equal degrees
        order.sort_by(|&a, &b| k[b].cmp(&k[a]));
        acc += order
            .iter()
            .enumerate()
            .map(|(i, &u)| (i + 1) as f64 * k[u] as f64)
            .sum::<f64>()
            / denom;
    }
    Ok(acc / rounds as f64)
}

/// v_σ = exp[σ/v + v − e − 2 + 2/v] on simple (undirected, unweighted) graphs.
pub fn vulnerability_function(t: &Topology) -> Result<f64> {
    if t.is_directed() || t.is_weighted() {
        return Err(Error::incompatible(
            "vulnerability function requires a simple graph",
        ));
    }
    let v = t.node_count() as f64;
    let e = t.edge_count() as f64;
    let sigma = degree_metrics(t).sigma_d;
    Ok((sigma / v + v - e - 2.0 + 2.0 / v).exp())
}

/// Pearson correlation of degrees at both ends of every edge, each edge
/// counted in both orientations.
pub fn assortative_coefficient(t: &Topology) -> Result<f64> {
    let k = total_degrees(t);
    if t.edge_count() == 0 {
        return Err(Error::undefined("assortativity needs at least one edge"));
    }
    let (mut sx, mut sxx, mut sxy) = (0.0, 0.0, 0.0);
    let m = 2.0 * t.edge_count() as f64;
    for &(a, b) in t.edges() {
        let (x, y) = (k[a] as f64, k[b] as f64);
        sx += x + y;
        sxx += x * x + y * y;
        sxy += 2.0 * x * y;
    }
    let mean = sx / m;
    let var = sxx / m - mean * mean;
    if var <= 1e-12 * (1.0 + mean * mean) {
        return Err(Error::undefined("zero degree variance over edge endpoints"));
    }
    Ok(((sxy / m - mean * mean) / var).clamp(-1.0, 1.0))
}

/// k_nn(k) (unweighted) or k^w_nn(k) (weighted), per observed degree k ≥ 1.
pub fn neighbor_connectivity(t: &Topology, weighted: bool) -> Result<BTreeMap<usize, f64>> {
    if weighted && !t.is_weighted() {
        return Err(Error::incompatible(
            "weighted neighbour connectivity needs edge weights",
        ));
    }
    let g = t.underlying_undirected();
    let k = g.degrees();
    let mut acc: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for u in 0..g.node_count() {
        if k[u] == 0 {
            continue;
        }
        let knn = if weighted {
            let s = g.strength(u);
            g.neighbors(u)
                .iter()
                .map(|&(w, id)| g.weight(id) * k[w] as f64)
                .sum::<f64>()
                / s
        } else {
            g.neighbors(u)
                .iter()
                .map(|&(w, _)| k[w] as f64)
                .sum::<f64>()
                / k[u] as f64
        };
        let e = acc.entry(k[u]).or_insert((0.0, 0));
        e.0 += knn;
        e.1 += 1;
    }
    Ok(acc
        .into_iter()
        .map(|(k, (s, c))| (k, s / c as f64))
        .collect())
}

/// One threshold of the rich-club curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RichClubPoint {
    /// Degree k (unweighted) or strength s (weighted); members exceed it.
    pub threshold: f64,
    pub members: usize,
    pub phi: Option<f64>,
    /// Mean φ over the randomised ensemble.
    pub phi_null: Option<f64>,
    /// ρ = φ / φ_null.
    pub rho: Option<f64>,
}

/// Rich-club options: ensemble size and seed for the null model.
#[derive(Debug, Clone, Copy)]
pub struct RichClubOptions {
    pub weighted: bool,
    pub null_samples: usize,
    pub seed: u64,
}

impl Default for RichClubOptions {
    fn default() -> Self {
        RichClubOptions {
            weighted: false,
            null_samples: 100,
            seed: 0,
        }
    }
}

fn phi_curve(g: &Topology, weighted: bool, thresholds: &[f64]) -> Vec<(usize, Option<f64>)> {
    let n = g.node_count();
    let score: Vec<f64> = if weighted {
        (0..n).map(|u| g.strength(u)).collect()
    } else {
        (0..n).map(|u| g.degree(u) as f64).collect()
    };
    thresholds
        .iter()
        .map(|&th| {
            let inside: Vec<bool> = score.iter().map(|&s| s > th).collect();
            let r = inside.iter().filter(|&&x| x).count();
            if r <= 1 {
                return (r, None);
            }
            let mut internal = 0.0;
            for (id, &(a, b)) in g.edges().iter().enumerate() {
                if inside[a] && inside[b] {
                    internal += if weighted { g.weight(id) } else { 1.0 };
                }
            }
            let phi = if weighted {
                let total: f64 = (0..n).filter(|&u| inside[u]).map(|u| score[u]).sum();
                2.0 * internal / total
            } else {
                2.0 * internal / (r * (r - 1)) as f64
            };
            (r, Some(phi))
        })
        .collect()
}

/// φ(k) (or φ^w(s)) with its ρ against a degree-preserving null ensemble.
pub fn rich_club(t: &Topology, opts: RichClubOptions) -> Result<Vec<RichClubPoint>> {
    if opts.weighted && !t.is_weighted() {
        return Err(Error::incompatible("weighted rich-club needs edge weights"));
    }
    let g = t.underlying_undirected();
    let n = g.node_count();
    let thresholds: Vec<f64> = if opts.weighted {
        let mut s: Vec<f64> = (0..n).map(|u| g.strength(u)).collect();
        s.sort_by(f64::total_cmp);
        s.dedup();
        s
    } else {
        (0..g.max_degree()).map(|k| k as f64).collect()
    };
    let base = phi_curve(&g, opts.weighted, &thresholds);
    let mut sums = vec![(0.0, 0usize); thresholds.len()];
    let mut r = rng(opts.seed);
    for _ in 0..opts.null_samples {
        let mut null = double_edge_swap(&g, 10 * g.edge_count(), &mut r);
        if opts.weighted {
            let mut w: Vec<f64> = g.weights().unwrap().to_vec();
            w.shuffle(&mut r);
            null = Topology::weighted(
                n,
                &null
                    .edges()
                    .iter()
                    .zip(w)
                    .map(|(&(a, b), x)| (a, b, x))
                    .collect::<Vec<_>>(),
            )?;
        }
        for (i, (_, phi)) in phi_curve(&null, opts.weighted, &thresholds)
            .into_iter()
            .enumerate()
        {
            if let Some(p) = phi {
                sums[i].0 += p;
                sums[i].1 += 1;
            }
        }
    }
    Ok(thresholds
        .iter()
        .zip(base)
        .zip(sums)
        .map(|((&threshold, (members, phi)), (s, c))| {
            let phi_null = (c > 0).then(|| s / c as f64);
            let rho = match (phi, phi_null) {
                (Some(p), Some(q)) if q > 0.0 => Some(p / q),
                _ => None,
            };
            RichClubPoint {
                threshold,
                members,
                phi,
                phi_null,
                rho,
            }
        })
        .collect())
}

/// Degree-preserving randomisation by `attempts` double-edge swaps
/// (a–b, c–d → a–d, c–b), rejecting swaps that create loops or duplicates.
pub fn double_edge_swap<R: Rng>(t: &Topology, attempts: usize, r: &mut R) -> Topology {
    let mut edges: Vec<(usize, usize)> = t.edges().to_vec();
    let m = edges.len();
    if m < 2 {
        return t.clone();
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut present: HashSet<(usize, usize)> = edges.iter().map(|&(a, b)| key(a, b)).collect();
    for _ in 0..attempts {
        let i = r.gen_range(0..m);
        let j = r.gen_range(0..m);
        if i == j {
            continue;
        }
        let (a, b) = edges[i];
        let (mut c, mut d) = edges[j];
        if r.gen::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || a == c || b == d {
            continue;
        }
        if present.contains(&key(a, d)) || present.contains(&key(c, b)) {
            continue;
        }
        present.remove(&key(a, b));
        present.remove(&key(c, d));
        present.insert(key(a, d));
        present.insert(key(c, b));
        edges[i] = key(a, d);
        edges[j] = key(c, b);
    }
    Topology::undirected(t.node_count(), &edges).expect("swaps keep the graph simple")
}

/// How the two endpoint degrees of an edge are combined.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeDegreeRule {
    #[default]
    Min,
    Product,
}

/// k_(i,j) per edge id, from total degrees.
pub fn edge_degree(t: &Topology, rule: EdgeDegreeRule) -> Vec<usize> {
    let k = total_degrees(t);
    t.edges()
        .iter()
        .map(|&(u, w)| match rule {
            EdgeDegreeRule::Min => k[u].min(k[w]),
            EdgeDegreeRule::Product => k[u] * k[w],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn degree_examples() {
        let v = degree_metrics(&complete(3).unwrap());
        assert_eq!(v.degree, vec![2, 2, 2]);
        assert_eq!(v.p_k[&2], 1.0);
        let v = degree_metrics(&star(4).unwrap());
        assert_eq!(v.degree, vec![3, 1, 1, 1]);
        assert!(close(v.p_k[&1], 0.75) && close(v.p_k[&3], 0.25));
        let v = degree_metrics(&Topology::weighted(2, &[(0, 1, 5.0)]).unwrap());
        assert_eq!(v.strength, vec![5.0, 5.0]);
    }

    #[test]
    fn entropy_examples() {
        assert_eq!(entropy(&cycle(6).unwrap()).unwrap(), 0.0);
        let h = entropy(&star(4).unwrap()).unwrap();
        assert!(close(h, -(0.75f64 * 0.75f64.ln()) - 0.25 * 0.25f64.ln()));
        assert!((h - 0.5623).abs() < 1e-4);
    }

    #[test]
    fn skewness_examples() {
        assert!(close(skewness(&cycle(7).unwrap(), 1).unwrap(), 1.0));
        assert!(close(skewness(&star(4).unwrap(), 1).unwrap(), 0.8));
    }

    #[test]
    fn vulnerability_examples() {
        assert!(close(
            vulnerability_function(&complete(2).unwrap()).unwrap(),
            1.0
        ));
        assert!(close(
            vulnerability_function(&complete(3).unwrap()).unwrap(),
            (-4.0f64 / 3.0).exp()
        ));
        let d = Topology::directed(2, &[(0, 1)]).unwrap();
        assert!(matches!(
            vulnerability_function(&d),
            Err(Error::Incompatible(_))
        ));
    }

    #[test]
    fn assortativity_examples() {
        assert!(close(
            assortative_coefficient(&star(4).unwrap()).unwrap(),
            -1.0
        ));
        assert!(matches!(
            assortative_coefficient(&complete(4).unwrap()),
            Err(Error::Undefined(_))
        ));
    }

    #[test]
    fn knn_examples() {
        let m = neighbor_connectivity(&complete(3).unwrap(), false).unwrap();
        assert_eq!(m[&2], 2.0);
        let m = neighbor_connectivity(&star(4).unwrap(), false).unwrap();
        assert_eq!((m[&1], m[&3]), (3.0, 1.0));
    }

    #[test]
    fn rich_club_examples() {
        let pts = rich_club(
            &complete(4).unwrap(),
            RichClubOptions {
                null_samples: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(pts[2].phi, Some(1.0));
        let pts = rich_club(
            &star(4).unwrap(),
            RichClubOptions {
                null_samples: 5,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(pts[1].members, 1);
        assert_eq!(pts[1].phi, None);
    }

    #[test]
    fn weighted_rich_club_uniform_weights() {
        let g = erdos_renyi(30, 0.2, 4).unwrap();
        let w = Topology::weighted(
            30,
            &g.edges()
                .iter()
                .map(|&(a, b)| (a, b, 2.5))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let pts = rich_club(
            &w,
            RichClubOptions {
                weighted: true,
                null_samples: 2,
                seed: 3,
            },
        )
        .unwrap();
        for p in pts {
            let inside: Vec<usize> = (0..30).filter(|&u| w.strength(u) > p.threshold).collect();
            if inside.len() <= 1 {
                assert!(p.phi.is_none());
                continue;
            }
            let internal = g
                .edges()
                .iter()
                .filter(|&&(a, b)| inside.contains(&a) && inside.contains(&b))
                .count();
            let degsum: usize = inside.iter().map(|&u| g.degree(u)).sum();
            assert!(close(p.phi.unwrap(), 2.0 * internal as f64 / degsum as f64));
        }
    }

    #[test]
    fn swap_preserves_degrees() {
        let g = barabasi_albert(200, 3, 9).unwrap();
        let h = double_edge_swap(&g, 5000, &mut rng(1));
        assert_eq!(g.degrees(), h.degrees());
        assert_ne!(g.edges(), h.edges());
    }

    #[test]
    fn edge_degree_rules() {
        let t = crate::graph::generate::star(4).unwrap();
        assert_eq!(edge_degree(&t, EdgeDegreeRule::Min), vec![1, 1, 1]);
        assert_eq!(edge_degree(&t, EdgeDegreeRule::Product), vec![3, 3, 3]);
    }
}
