//! Distance metrics: average shortest path length and its disconnection
//! index, diameter, efficiencies, cyclic coefficient, labelled path length,
//! expansion and effective eccentricity.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_hops, components, dijkstra, PolicyGraph, Topology};

/// How unreachable pairs enter the average path length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AsplMode {
    /// Mean over reachable ordered pairs.
    FiniteOnly,
    /// Mean over pairs inside the largest component.
    GiantComponent,
    /// Finite mean divided by the reachable-pair fraction K.
    Dik,
}

fn distances_from(t: &Topology, s: usize, weighted: bool) -> Vec<Option<f64>> {
    if weighted {
        dijkstra(t, s)
    } else {
        bfs_hops(t, s)
            .into_iter()
            .map(|d| d.map(f64::from))
            .collect()
    }
}

fn check(t: &Topology, weighted: bool) -> Result<()> {
    if weighted && !t.is_weighted() {
        return Err(Error::incompatible("weighted distances need edge weights"));
    }
    Ok(())
}

/// Per-source aggregates gathered in one sweep.
#[derive(Debug, Clone, Default)]
struct SourceStats {
    reach: usize,
    sum: f64,
    sum_sq: f64,
    inv_sum: f64,
    ecc: f64,
}

fn sweep(t: &Topology, weighted: bool) -> Vec<SourceStats> {
    (0..t.node_count())
        .into_par_iter()
        .map(|s| {
            let mut st = SourceStats::default();
            for (j, d) in distances_from(t, s, weighted).into_iter().enumerate() {
                if let (Some(d), true) = (d, j != s) {
                    st.reach += 1;
                    st.sum += d;
                    st.sum_sq += d * d;
                    st.inv_sum += 1.0 / d;
                    st.ecc = st.ecc.max(d);
                }
            }
            st
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceSummary {
    /// d̄ over reachable ordered pairs.
    pub aspl: Option<f64>,
    /// d̄ inside the largest component.
    pub aspl_giant: Option<f64>,
    /// K = reachable ordered pairs / v(v−1).
    pub reachable_fraction: f64,
    /// DIK = d̄/K.
    pub dik: Option<f64>,
    /// Largest finite distance.
    pub diameter: Option<f64>,
    pub connected: bool,
    /// Standard deviation of the finite pair distances.
    pub width: Option<f64>,
    /// d̄_i over the nodes reachable from i.
    pub per_node_mean: Vec<Option<f64>>,
    /// Eccentricity within the node's reach.
    pub eccentricity: Vec<f64>,
}

pub fn distance_summary(t: &Topology, weighted: bool) -> Result<DistanceSummary> {
    check(t, weighted)?;
    let v = t.node_count();
    if v < 2 {
        return Err(Error::undefined("distance metrics need v >= 2"));
    }
    let st = sweep(t, weighted);
    let pairs: usize = st.iter().map(|s| s.reach).sum();
    let sum: f64 = st.iter().map(|s| s.sum).sum();
    let sum_sq: f64 = st.iter().map(|s| s.sum_sq).sum();
    let k = pairs as f64 / (v * (v - 1)) as f64;
    let aspl = (pairs > 0).then(|| sum / pairs as f64);
    let width = aspl.map(|m| (sum_sq / pairs as f64 - m * m).max(0.0).sqrt());
    let comps = components(t);
    let giant = (comps.count() > 0).then(|| comps.members(0));
    let aspl_giant = giant.and_then(|members| {
        let (s, c) = members
            .iter()
            .fold((0.0, 0usize), |(s, c), &u| (s + st[u].sum, c + st[u].reach));
        (c > 0).then(|| s / c as f64)
    });
    Ok(DistanceSummary {
        aspl,
        aspl_giant,
        reachable_fraction: k,
        dik: aspl.map(|d| d / k),
        diameter: (pairs > 0).then(|| st.iter().map(|s| s.ecc).fold(0.0, f64::max)),
        connected: comps.count() == 1,
        width,
        per_node_mean: st
            .iter()
            .map(|s| (s.reach > 0).then(|| s.sum / s.reach as f64))
            .collect(),
        eccentricity: st.iter().map(|s| s.ecc).collect(),
    })
}

/// Average shortest path length under the chosen disconnection policy.
/// On directed graphs the giant component is the largest weak component.
pub fn aspl(t: &Topology, mode: AsplMode, weighted: bool) -> Result<f64> {
    let s = distance_summary(t, weighted)?;
    let value = match mode {
        AsplMode::FiniteOnly => s.aspl,
        AsplMode::GiantComponent => s.aspl_giant,
        AsplMode::Dik => s.dik,
    };
    value.ok_or_else(|| Error::undefined("no pair of nodes is connected"))
}

/// Diameter D of a connected graph; `Undefined` when disconnected.
pub fn diameter(t: &Topology) -> Result<f64> {
    let s = distance_summary(t, false)?;
    if !s.connected {
        return Err(Error::undefined(
            "graph is disconnected (infinite diameter)",
        ));
    }
    Ok(s.diameter.unwrap_or(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Efficiency {
    /// E_i = Σ_{j≠i} 1/d_ij /(v−1).
    pub per_node: Vec<f64>,
    pub global: f64,
    /// h = 1/E_global; `None` when E_global = 0.
    pub harmonic_mean: Option<f64>,
}

pub fn global_efficiency(t: &Topology, weighted: bool) -> Result<Efficiency> {
    check(t, weighted)?;
    let v = t.node_count();
    if v < 2 {
        return Err(Error::undefined("efficiency needs v >= 2"));
    }
    let per_node: Vec<f64> = sweep(t, weighted)
        .iter()
        .map(|s| s.inv_sum / (v - 1) as f64)
        .collect();
    let global = per_node.iter().sum::<f64>() / v as f64;
    Ok(Efficiency {
        harmonic_mean: (global > 0.0).then(|| 1.0 / global),
        per_node,
        global,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalEfficiency {
    /// E(V_i): mean 1/d between neighbours of i in G − i.
    pub per_node: Vec<Option<f64>>,
    pub global: Option<f64>,
    /// Ê(V_i): mean 1/(d + 2) between neighbours of i in G − i.
    pub cyclic: Vec<Option<f64>>,
    pub cyclic_global: Option<f64>,
}

/// Hop distances from `s` to the marked targets, avoiding `banned`.
fn hops_to_targets(
    g: &Topology,
    s: usize,
    banned: usize,
    targets: &[usize],
    dist: &mut [u32],
) -> Vec<Option<u32>> {
    let mut touched = vec![s];
    dist[s] = 0;
    let mut left = targets.iter().filter(|&&x| x != s).count();
    let mut queue = VecDeque::from([s]);
    let is_target = |x: usize| targets.contains(&x);
    while let Some(u) = queue.pop_front() {
        if left == 0 {
            break;
        }
        for &(w, _) in g.neighbors(u) {
            if w == banned || dist[w] != u32::MAX {
                continue;
            }
            dist[w] = dist[u] + 1;
            touched.push(w);
            queue.push_back(w);
            if is_target(w) {
                left -= 1;
            }
        }
    }
    let out = targets
        .iter()
        .map(|&x| (dist[x] != u32::MAX).then_some(dist[x]))
        .collect();
    for x in touched {
        dist[x] = u32::MAX;
    }
    out
}

pub fn local_efficiency(t: &Topology) -> Result<LocalEfficiency> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    let rows: Vec<Option<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map_init(
            || vec![u32::MAX; n],
            |dist, i| {
                let nb: Vec<usize> = g.neighbors(i).iter().map(|&(w, _)| w).collect();
                let k = nb.len();
                if k < 2 {
                    return None;
                }
                let (mut e, mut c) = (0.0, 0.0);
                for (a, &j) in nb.iter().enumerate() {
                    let d = hops_to_targets(&g, j, i, &nb, dist);
                    for (b, dj) in d.into_iter().enumerate() {
                        if a == b {
                            continue;
                        }
                        if let Some(d) = dj {
                            e += 1.0 / d as f64;
                            c += 1.0 / (d as f64 + 2.0);
                        }
                    }
                }
                let pairs = (k * (k - 1)) as f64;
                Some((e / pairs, c / pairs))
            },
        )
        .collect();
    let mean = |xs: Vec<Option<f64>>| -> (Vec<Option<f64>>, Option<f64>) {
        let d: Vec<f64> = xs.iter().flatten().copied().collect();
        let m = (!d.is_empty()).then(|| d.iter().sum::<f64>() / d.len() as f64);
        (xs, m)
    };
    let (per_node, global) = mean(rows.iter().map(|r| r.map(|x| x.0)).collect());
    let (cyclic, cyclic_global) = mean(rows.iter().map(|r| r.map(|x| x.1)).collect());
    Ok(LocalEfficiency {
        per_node,
        global,
        cyclic,
        cyclic_global,
    })
}

/// Mean distance within and between label classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelPathLengths {
    pub labels: Vec<String>,
    /// L^{ab}; `None` when no pair in the block is reachable or the block is
    /// a single-member diagonal.
    pub values: Vec<Vec<Option<f64>>>,
    /// Fraction of the block's ordered pairs that were reachable.
    pub coverage: Vec<Vec<f64>>,
}

pub fn characteristic_path_length(t: &Topology) -> Result<LabelPathLengths> {
    let labels = t
        .labels()
        .ok_or_else(|| Error::incompatible("characteristic path length needs node labels"))?;
    let classes: Vec<String> = labels
        .iter()
        .cloned()
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let idx: BTreeMap<&str, usize> = classes
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_str(), i))
        .collect();
    let class_of: Vec<usize> = labels.iter().map(|l| idx[l.as_str()]).collect();
    let q = classes.len();
    let rows: Vec<(Vec<f64>, Vec<usize>)> = (0..t.node_count())
        .into_par_iter()
        .map(|s| {
            let mut sum = vec![0.0; q];
            let mut cnt = vec![0usize; q];
            for (j, d) in bfs_hops(t, s).into_iter().enumerate() {
                if let (Some(d), true) = (d, j != s) {
                    sum[class_of[j]] += d as f64;
                    cnt[class_of[j]] += 1;
                }
            }
            (sum, cnt)
        })
        .collect();
    let mut sum = vec![vec![0.0; q]; q];
    let mut cnt = vec![vec![0usize; q]; q];
    for (s, (rs, rc)) in rows.iter().enumerate() {
        for b in 0..q {
            sum[class_of[s]][b] += rs[b];
            cnt[class_of[s]][b] += rc[b];
        }
    }
    let size: Vec<usize> = (0..q)
        .map(|c| class_of.iter().filter(|&&x| x == c).count())
        .collect();
    let mut values = vec![vec![None; q]; q];
    let mut coverage = vec![vec![0.0; q]; q];
    for a in 0..q {
        for b in 0..q {
            let total = if a == b {
                size[a] * (size[a] - 1)
            } else {
                size[a] * size[b]
            };
            if total == 0 {
                continue;
            }
            coverage[a][b] = cnt[a][b] as f64 / total as f64;
            if cnt[a][b] > 0 {
                values[a][b] = Some(sum[a][b] / cnt[a][b] as f64);
            }
        }
    }
    Ok(LabelPathLengths {
        labels: classes,
        values,
        coverage,
    })
}

fn hops_for(t: &Topology, s: usize, policy: bool) -> Vec<Option<u32>> {
    if policy {
        PolicyGraph::new(t).hops(s)
    } else {
        bfs_hops(t, s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Expansion {
    /// E(h)_i = |{j ≠ i : d(i,j) ≤ h}|/v.
    pub per_node: Vec<f64>,
    pub global: f64,
}

/// Expansion within `h` hops; `policy` restricts to valley-free paths.
pub fn expansion(t: &Topology, h: u32, policy: bool) -> Result<Expansion> {
    if h == 0 {
        return Err(Error::param("h must be at least 1"));
    }
    let curve = expansion_curve(t, h, policy)?;
    let per_node: Vec<f64> = curve.iter().map(|c| c[h as usize - 1]).collect();
    let global = per_node.iter().sum::<f64>() / per_node.len().max(1) as f64;
    Ok(Expansion { per_node, global })
}

/// E(h)_i for h = 1..=h_max, per node.
pub fn expansion_curve(t: &Topology, h_max: u32, policy: bool) -> Result<Vec<Vec<f64>>> {
    if policy && !t.is_directed() {
        return Err(Error::incompatible(
            "policy-compliant expansion needs a directed AS graph",
        ));
    }
    let v = t.node_count() as f64;
    Ok((0..t.node_count())
        .into_par_iter()
        .map(|s| {
            let mut hist = vec![0usize; h_max as usize + 1];
            for (j, d) in hops_for(t, s, policy).into_iter().enumerate() {
                if let (Some(d), true) = (d, j != s) {
                    if d <= h_max {
                        hist[d as usize] += 1;
                    }
                }
            }
            let mut acc = 0;
            (1..=h_max as usize)
                .map(|h| {
                    acc += hist[h];
                    acc as f64 / v
                })
                .collect()
        })
        .collect())
}

/// Log-log least-squares slope p_i of E(h)_i ∝ h^p over the positive part
/// of the curve, with R². Diagnostic only; `None` with fewer than 2 points.
pub fn expansion_exponent(curve: &[f64]) -> Option<(f64, f64)> {
    let pts: Vec<(f64, f64)> = curve
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0.0)
        .map(|(h, &e)| (((h + 1) as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        sxy * sxy / (sxx * syy)
    };
    Some((slope, r2))
}

/// N(i,h) for h = 0..: counts include i itself.
fn reach_counts(t: &Topology, s: usize) -> Vec<usize> {
    let d = bfs_hops(t, s);
    let max = d.iter().flatten().copied().max().unwrap_or(0) as usize;
    let mut hist = vec![0usize; max + 1];
    d.iter().flatten().for_each(|&x| hist[x as usize] += 1);
    let mut acc = 0;
    hist.iter()
        .map(|c| {
            acc += c;
            acc
        })
        .collect()
}

/// Smallest h with N(i,h) ≥ r·N(i,∞).
pub fn effective_eccentricity(t: &Topology, r: f64) -> Result<Vec<usize>> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param(format!("r = {r} outside (0,1]")));
    }
    Ok((0..t.node_count())
        .into_par_iter()
        .map(|s| {
            let n = reach_counts(t, s);
            let total = *n.last().unwrap() as f64;
            n.iter()
                .position(|&c| c as f64 >= r * total - 1e-9)
                .unwrap()
        })
        .collect())
}

/// Smallest h with Σ_i N(i,h) ≥ r·Σ_i N(i,∞).
pub fn effective_diameter(t: &Topology, r: f64) -> Result<usize> {
    if !(r > 0.0 && r <= 1.0) {
        return Err(Error::param(format!("r = {r} outside (0,1]")));
    }
    let rows: Vec<Vec<usize>> = (0..t.node_count())
        .into_par_iter()
        .map(|s| reach_counts(t, s))
        .collect();
    let hmax = rows.iter().map(|r| r.len()).max().unwrap_or(1);
    let at = |row: &Vec<usize>, h: usize| row[h.min(row.len() - 1)];
    let total: usize = rows.iter().map(|r| *r.last().unwrap()).sum();
    Ok((0..hmax)
        .find(|&h| {
            rows.iter().map(|row| at(row, h)).sum::<usize>() as f64 >= r * total as f64 - 1e-9
        })
        .unwrap_or(hmax - 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn aspl_examples() {
        let p3 = path(3).unwrap();
        assert!((aspl(&p3, AsplMode::FiniteOnly, false).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(
            aspl(&complete(5).unwrap(), AsplMode::FiniteOnly, false).unwrap(),
            1.0
        );
        let two = Topology::undirected(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(aspl(&two, AsplMode::FiniteOnly, false).unwrap(), 1.0);
        assert!((aspl(&two, AsplMode::Dik, false).unwrap() - 3.0).abs() < 1e-12);
        assert!(aspl(
            &Topology::undirected(3, &[]).unwrap(),
            AsplMode::FiniteOnly,
            false
        )
        .is_err());
    }

    #[test]
    fn diameter_examples() {
        assert_eq!(diameter(&path(4).unwrap()).unwrap(), 3.0);
        assert_eq!(diameter(&complete(5).unwrap()).unwrap(), 1.0);
        assert_eq!(diameter(&cycle(6).unwrap()).unwrap(), 3.0);
    }

    #[test]
    fn efficiency_examples() {
        assert_eq!(
            global_efficiency(&complete(4).unwrap(), false)
                .unwrap()
                .global,
            1.0
        );
        let e = global_efficiency(&path(3).unwrap(), false).unwrap();
        assert!((e.global - 5.0 / 6.0).abs() < 1e-12);
        let e = global_efficiency(&Topology::undirected(3, &[]).unwrap(), false).unwrap();
        assert_eq!(e.global, 0.0);
        assert_eq!(e.harmonic_mean, None);
    }

    #[test]
    fn local_efficiency_examples() {
        let l = local_efficiency(&complete(4).unwrap()).unwrap();
        assert_eq!(l.per_node, vec![Some(1.0); 4]);
        let l = local_efficiency(&path(3).unwrap()).unwrap();
        assert_eq!(l.per_node, vec![None, Some(0.0), None]);
        let l = local_efficiency(&complete(3).unwrap()).unwrap();
        assert!((l.cyclic[0].unwrap() - 1.0 / 3.0).abs() < 1e-12);
        // C4: the two neighbours are 2 hops apart without i
        let l = local_efficiency(&cycle(4).unwrap()).unwrap();
        assert!((l.per_node[0].unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn label_path_lengths() {
        let labels = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let k4 = complete(4)
            .unwrap()
            .with_labels(labels(&["a", "a", "b", "b"]))
            .unwrap();
        let c = characteristic_path_length(&k4).unwrap();
        assert_eq!(c.values, vec![vec![Some(1.0); 2]; 2]);
        let p4 = path(4)
            .unwrap()
            .with_labels(labels(&["x", "y", "y", "x"]))
            .unwrap();
        let c = characteristic_path_length(&p4).unwrap();
        assert_eq!(c.values[0][0], Some(3.0));
        let single = path(3)
            .unwrap()
            .with_labels(labels(&["a", "b", "b"]))
            .unwrap();
        let c = characteristic_path_length(&single).unwrap();
        assert_eq!(c.values[0][0], None);
        assert!(characteristic_path_length(&path(3).unwrap()).is_err());
    }

    #[test]
    fn expansion_examples() {
        let e = expansion(&complete(5).unwrap(), 1, false).unwrap();
        assert!(e.per_node.iter().all(|&x| (x - 0.8).abs() < 1e-12));
        let e = expansion(&path(5).unwrap(), 2, false).unwrap();
        assert!((e.per_node[0] - 0.4).abs() < 1e-12);
        let (p, r2) = expansion_exponent(&[0.1, 0.4, 0.9]).unwrap();
        assert!((p - 2.0).abs() < 1e-12 && (r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn effective_eccentricity_examples() {
        let s = star(5).unwrap();
        let e = effective_eccentricity(&s, 1.0).unwrap();
        assert_eq!(e, vec![1, 2, 2, 2, 2]);
        assert_eq!(effective_eccentricity(&s, 1e-6).unwrap(), vec![0; 5]);
        assert_eq!(effective_diameter(&s, 1.0).unwrap(), 2);
    }
}
