//! Geographic metrics: distance strength and outreach, survivability under
//! regional failures, pointwise vulnerability and geographic path diversity.
//!
//! Coordinates come from [`Topology::coords`]. Lat/lon inputs use
//! great-circle kilometres, planar inputs plain Euclidean units.

use std::collections::{BTreeMap, BinaryHeap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{bfs_hops_masked, components_masked, CoordKind, HeapItem, Topology};

/// Mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Distance between two coordinate pairs under `kind`.
pub fn geo_distance(kind: CoordKind, a: [f64; 2], b: [f64; 2]) -> f64 {
    match kind {
        CoordKind::Planar => ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt(),
        CoordKind::LatLon => {
            let (p1, p2) = (a[0].to_radians(), b[0].to_radians());
            let dp = p2 - p1;
            let dl = (b[1] - a[1]).to_radians();
            let h = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
            2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
        }
    }
}

fn coords(t: &Topology) -> Result<(CoordKind, &[[f64; 2]])> {
    t.coords()
        .ok_or_else(|| Error::incompatible("node coordinates are required"))
}

/// Unit used for distances of this coordinate kind.
pub fn distance_unit(kind: CoordKind) -> &'static str {
    match kind {
        CoordKind::LatLon => "km",
        CoordKind::Planar => "planar",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthOutreach {
    /// D_i = Σ_j g_ij over (out-)neighbours.
    pub distance_strength: Vec<f64>,
    /// O_i = Σ_j w_ij g_ij; `None` for unweighted graphs.
    pub outreach: Option<Vec<f64>>,
}

pub fn distance_strength_outreach(t: &Topology) -> Result<StrengthOutreach> {
    let (kind, c) = coords(t)?;
    let n = t.node_count();
    let mut d = vec![0.0; n];
    let mut o = vec![0.0; n];
    for u in 0..n {
        for &(w, id) in t.neighbors(u) {
            let g = geo_distance(kind, c[u], c[w]);
            d[u] += g;
            o[u] += t.weight(id) * g;
        }
    }
    Ok(StrengthOutreach {
        distance_strength: d,
        outreach: t.is_weighted().then_some(o),
    })
}

/// A failure footprint. Disk radii use the distance unit of the coordinates;
/// polygon vertices are given in coordinate space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Region {
    Disk { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        match self {
            Region::Disk { center, radius } => {
                if !(radius.is_finite() && *radius >= 0.0) || !center.iter().all(|x| x.is_finite())
                {
                    return Err(Error::param("malformed disk region"));
                }
            }
            Region::Polygon { vertices } => {
                if vertices.len() < 3 || !vertices.iter().flatten().all(|x| x.is_finite()) {
                    return Err(Error::param(
                        "malformed polygon region (needs >= 3 finite vertices)",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn contains(&self, kind: CoordKind, p: [f64; 2]) -> bool {
        match self {
            Region::Disk { center, radius } => geo_distance(kind, *center, p) <= *radius,
            Region::Polygon { vertices } => {
                // even-odd ray casting
                let mut inside = false;
                let mut j = vertices.len() - 1;
                for i in 0..vertices.len() {
                    let (a, b) = (vertices[i], vertices[j]);
                    if (a[1] > p[1]) != (b[1] > p[1])
                        && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
                    {
                        inside = !inside;
                    }
                    j = i;
                }
                inside
            }
        }
    }
}

/// Nodes whose coordinates fall inside `region`.
pub fn nodes_in_region(t: &Topology, region: &Region) -> Result<Vec<usize>> {
    region.validate()?;
    let (kind, c) = coords(t)?;
    Ok((0..t.node_count())
        .filter(|&u| region.contains(kind, c[u]))
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoEvent {
    pub region: Region,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeoSurvivability {
    /// (x, P[|V_L|/v = x]) ascending in x, including the no-event residual.
    pub distribution: Vec<(f64, f64)>,
    pub expected: f64,
    /// Smallest outcome with positive probability.
    pub worst_case: f64,
    /// |V_L|/v after each event, in input order.
    pub per_event: Vec<f64>,
}

pub fn geo_survivability(t: &Topology, events: &[GeoEvent]) -> Result<GeoSurvivability> {
    coords(t)?;
    let n = t.node_count();
    let mut total = 0.0;
    for e in events {
        e.region.validate()?;
        if !(0.0..=1.0).contains(&e.probability) {
            return Err(Error::param("event probability outside [0, 1]"));
        }
        total += e.probability;
    }
    if total > 1.0 + 1e-9 {
        return Err(Error::param(format!(
            "event probabilities sum to {total} > 1"
        )));
    }
    let largest: Vec<usize> = events
        .par_iter()
        .map(|e| {
            let hit = nodes_in_region(t, &e.region)?;
            let mut alive = vec![true; n];
            hit.iter().for_each(|&u| alive[u] = false);
            Ok(components_masked(t, &alive).largest())
        })
        .collect::<Result<_>>()?;
    let mut mass: BTreeMap<usize, f64> = BTreeMap::new();
    for (e, &l) in events.iter().zip(&largest) {
        *mass.entry(l).or_default() += e.probability;
    }
    let residual = (1.0 - total).max(0.0);
    if residual > 0.0 {
        let all = vec![true; n];
        *mass
            .entry(components_masked(t, &all).largest())
            .or_default() += residual;
    }
    let distribution: Vec<(f64, f64)> = mass
        .into_iter()
        .map(|(l, p)| (l as f64 / n as f64, p))
        .collect();
    let expected = distribution.iter().map(|(x, p)| x * p).sum();
    let worst_case = distribution
        .iter()
        .filter(|(_, p)| *p > 0.0)
        .map(|(x, _)| *x)
        .fold(f64::INFINITY, f64::min);
    Ok(GeoSurvivability {
        distribution,
        expected,
        worst_case: if worst_case.is_finite() {
            worst_case
        } else {
            1.0
        },
        per_event: largest.iter().map(|&l| l as f64 / n as f64).collect(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vulnerability {
    pub per_node: Vec<f64>,
    /// U^g = max U_i.
    pub global: f64,
    /// var(U)/mean(U)²; `None` when every U_i is zero.
    pub relative_variance: Option<f64>,
    pub baseline_efficiency: f64,
}

/// E_eucl with pairs touching dead nodes contributing zero. The
/// normalisation always uses the full v(v−1).
fn euclidean_efficiency(t: &Topology, g: &[Vec<f64>], alive: &[bool]) -> f64 {
    let n = t.node_count();
    if n < 2 {
        return 0.0;
    }
    let sum: f64 = (0..n)
        .filter(|&m| alive[m])
        .map(|m| {
            let hops = bfs_hops_masked(t, m, alive);
            (0..n)
                .filter(|&x| x != m)
                .filter_map(|x| hops[x].map(|h| g[m][x] / h as f64))
                .sum::<f64>()
        })
        .sum();
    sum / (n * (n - 1)) as f64
}

fn distance_matrix(t: &Topology) -> Result<Vec<Vec<f64>>> {
    let (kind, c) = coords(t)?;
    let n = t.node_count();
    Ok((0..n)
        .map(|i| (0..n).map(|j| geo_distance(kind, c[i], c[j])).collect())
        .collect())
}

/// U_i = (E_eucl − E_eucl(G−i)) / E_eucl.
pub fn pointwise_vulnerability(t: &Topology) -> Result<Vulnerability> {
    let g = distance_matrix(t)?;
    let n = t.node_count();
    let alive = vec![true; n];
    let base = euclidean_efficiency(t, &g, &alive);
    if base <= 0.0 {
        return Err(Error::undefined("baseline euclidean efficiency is zero"));
    }
    let per_node: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut a = alive.clone();
            a[i] = false;
            ((base - euclidean_efficiency(t, &g, &a)) / base).clamp(0.0, 1.0)
        })
        .collect();
    let global = per_node.iter().cloned().fold(0.0, f64::max);
    let mean = per_node.iter().sum::<f64>() / n as f64;
    let relative_variance = (mean > 0.0).then(|| {
        per_node.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / n as f64 / (mean * mean)
    });
    Ok(Vulnerability {
        per_node,
        global,
        relative_variance,
        baseline_efficiency: base,
    })
}

/// Parameters of the geographic path diversity metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeoParams {
    /// Impact scale; `None` calibrates to 1 / median positive D_min so that
    /// a pair at the median scores 1 − e⁻¹.
    pub lambda: Option<f64>,
    pub omega: f64,
    /// Alternative paths considered per pair.
    pub k: usize,
    pub rho: f64,
}

impl Default for GeoParams {
    fn default() -> Self {
        GeoParams {
            lambda: None,
            omega: 0.5,
            k: 3,
            rho: 0.05,
        }
    }
}

impl GeoParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.omega) {
            return Err(Error::param("omega must lie in [0, 1]"));
        }
        if self.lambda.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::param("lambda must be positive"));
        }
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::param("rho must be non-negative"));
        }
        Ok(())
    }
}

/// Hop-shortest s→d path where entering a node in `used` costs an extra v
/// hops. Ties go to lower node ids.
fn penalised_path(t: &Topology, s: usize, d: usize, used: &HashSet<usize>) -> Option<Vec<usize>> {
    let n = t.node_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(HeapItem(0.0, s));
    while let Some(HeapItem(du, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if u == d {
            break;
        }
        for &(w, _) in t.neighbors(u) {
            let step = if used.contains(&w) {
                1.0 + n as f64
            } else {
                1.0
            };
            let nd = du + step;
            if nd < dist[w] || (nd == dist[w] && u < parent[w]) {
                dist[w] = nd;
                parent[w] = u;
                heap.push(HeapItem(nd, w));
            }
        }
    }
    if !dist[d].is_finite() {
        return None;
    }
    let mut p = vec![d];
    while *p.last().unwrap() != s {
        p.push(parent[*p.last().unwrap()]);
    }
    p.reverse();
    Some(p)
}

/// Projects coordinates to a local plane (km for lat/lon).
fn planar(kind: CoordKind, p: [f64; 2], lat0: f64) -> [f64; 2] {
    match kind {
        CoordKind::Planar => p,
        CoordKind::LatLon => {
            let k = EARTH_RADIUS_KM * std::f64::consts::PI / 180.0;
            [k * p[1] * lat0.to_radians().cos(), k * p[0]]
        }
    }
}

/// Interior points of a path; a direct link contributes its midpoint.
fn interior_points(c: &[[f64; 2]], p: &[usize]) -> Vec<[f64; 2]> {
    if p.len() > 2 {
        p[1..p.len() - 1].iter().map(|&u| c[u]).collect()
    } else {
        let (a, b) = (c[p[0]], c[p[p.len() - 1]]);
        vec![[(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0]]
    }
}

/// D_g(P_b, P_a) = ω·D_min² + (1 − ω)·A.
fn path_separation(kind: CoordKind, c: &[[f64; 2]], pa: &[usize], pb: &[usize], omega: f64) -> f64 {
    let ia = interior_points(c, pa);
    let ib = interior_points(c, pb);
    let dmin = ia
        .iter()
        .flat_map(|x| ib.iter().map(move |y| geo_distance(kind, *x, *y)))
        .fold(f64::INFINITY, f64::min);
    let lat0 = (c[pa[0]][0] + c[pa[pa.len() - 1]][0]) / 2.0;
    let ring: Vec<[f64; 2]> = pa
        .iter()
        .chain(pb.iter().rev().skip(1).take(pb.len().saturating_sub(2)))
        .map(|&u| planar(kind, c[u], lat0))
        .collect();
    let twice: f64 = (0..ring.len())
        .map(|i| {
            let (a, b) = (ring[i], ring[(i + 1) % ring.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    omega * dmin * dmin + (1.0 - omega) * twice.abs() / 2.0
}

/// D_min(P_i) for each alternative path of the pair (empty if the pair has
/// no alternative or is unreachable).
fn pair_separations(
    t: &Topology,
    kind: CoordKind,
    c: &[[f64; 2]],
    s: usize,
    d: usize,
    params: &GeoParams,
) -> Vec<f64> {
    let mut used = HashSet::new();
    let Some(p0) = penalised_path(t, s, d, &used) else {
        return Vec::new();
    };
    let mut paths = vec![p0];
    let mut out = Vec::new();
    for _ in 0..params.k {
        for p in &paths {
            used.extend(p[1..p.len() - 1].iter().copied());
        }
        let Some(p) = penalised_path(t, s, d, &used) else {
            break;
        };
        if paths.contains(&p) {
            break;
        }
        let sep = paths
            .iter()
            .map(|q| path_separation(kind, c, q, &p, params.omega))
            .fold(f64::INFINITY, f64::min);
        out.push(sep);
        paths.push(p);
    }
    out
}

fn pairs(t: &Topology) -> Vec<(usize, usize)> {
    let n = t.node_count();
    (0..n)
        .flat_map(|s| {
            (0..n)
                .filter(move |&d| if t.is_directed() { d != s } else { d > s })
                .map(move |d| (s, d))
        })
        .collect()
}

/// 1 / median of the positive path separations over all pairs (1 if none).
pub fn calibrate_lambda(t: &Topology, params: &GeoParams) -> Result<f64> {
    let (kind, c) = coords(t)?;
    let mut all: Vec<f64> = pairs(t)
        .par_iter()
        .flat_map_iter(|&(s, d)| pair_separations(t, kind, c, s, d, params))
        .filter(|&x| x > 0.0)
        .collect();
    if all.is_empty() {
        return Ok(1.0);
    }
    all.sort_by(f64::total_cmp);
    let m = all.len();
    let median = if m % 2 == 1 {
        all[m / 2]
    } else {
        (all[m / 2 - 1] + all[m / 2]) / 2.0
    };
    Ok(1.0 / median)
}

/// EGPD_sd = 1 − exp(−λ k_sd) with k_sd the summed separations of the
/// alternative paths.
pub fn egpd(t: &Topology, s: usize, d: usize, params: &GeoParams) -> Result<f64> {
    params.validate()?;
    let (kind, c) = coords(t)?;
    t.check_node(s)?;
    t.check_node(d)?;
    if s == d {
        return Err(Error::param("EGPD needs distinct endpoints"));
    }
    let lambda = match params.lambda {
        Some(l) => l,
        None => calibrate_lambda(t, params)?,
    };
    let k_sd: f64 = pair_separations(t, kind, c, s, d, params).iter().sum();
    Ok(1.0 - (-lambda * k_sd).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tggd {
    pub tggd: f64,
    /// e^{TGGD−1} · |E|^{−ρ}.
    pub ctggd: f64,
    pub lambda: f64,
    pub pairs: usize,
}

pub fn tggd(t: &Topology, params: &GeoParams) -> Result<Tggd> {
    params.validate()?;
    let (kind, c) = coords(t)?;
    if t.edge_count() == 0 {
        return Err(Error::undefined("TGGD needs at least one edge"));
    }
    let ps = pairs(t);
    if ps.is_empty() {
        return Err(Error::undefined("TGGD needs at least two nodes"));
    }
    let seps: Vec<Vec<f64>> = ps
        .par_iter()
        .map(|&(s, d)| pair_separations(t, kind, c, s, d, params))
        .collect();
    let lambda = match params.lambda {
        Some(l) => l,
        None => {
            let mut all: Vec<f64> = seps
                .iter()
                .flatten()
                .copied()
                .filter(|&x| x > 0.0)
                .collect();
            all.sort_by(f64::total_cmp);
            match all.len() {
                0 => 1.0,
                m if m % 2 == 1 => 1.0 / all[m / 2],
                m => 2.0 / (all[m / 2 - 1] + all[m / 2]),
            }
        }
    };
    let total: f64 = seps
        .iter()
        .map(|v| 1.0 - (-lambda * v.iter().sum::<f64>()).exp())
        .sum();
    let tggd = total / ps.len() as f64;
    let ctggd = (tggd - 1.0).exp() * (t.edge_count() as f64).powf(-params.rho);
    Ok(Tggd {
        tggd,
        ctggd,
        lambda,
        pairs: ps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn planar_graph(t: Topology, c: Vec<[f64; 2]>) -> Topology {
        t.with_coords(CoordKind::Planar, c).unwrap()
    }

    #[test]
    fn haversine_known_distance() {
        // one degree of latitude
        let d = geo_distance(CoordKind::LatLon, [0.0, 0.0], [1.0, 0.0]);
        assert!((d - EARTH_RADIUS_KM * std::f64::consts::PI / 180.0).abs() < 1e-9);
        assert_eq!(geo_distance(CoordKind::Planar, [0.0, 0.0], [3.0, 4.0]), 5.0);
    }

    #[test]
    fn strength_and_outreach() {
        let t = Topology::weighted(3, &[(0, 1, 1.0), (0, 2, 1.0)]).unwrap();
        let t = planar_graph(t, vec![[0.0, 0.0], [100.0, 0.0], [0.0, 300.0]]);
        let r = distance_strength_outreach(&t).unwrap();
        assert_eq!(r.distance_strength[0], 400.0);
        assert_eq!(r.outreach.unwrap()[0], 400.0);
        let u = planar_graph(path(3).unwrap(), vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(
            distance_strength_outreach(&u).unwrap().distance_strength,
            vec![1.0, 2.0, 1.0]
        );
        assert!(distance_strength_outreach(&path(3).unwrap()).is_err());
    }

    fn bowtie() -> Topology {
        // two triangles joined through cut vertex 3
        let t = Topology::undirected(
            7,
            &[
                (0, 1),
                (1, 2),
                (0, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (4, 6),
            ],
        )
        .unwrap();
        planar_graph(t, (0..7).map(|i| [i as f64, 0.0]).collect())
    }

    #[test]
    fn survivability_cut_vertex() {
        let t = bowtie();
        let ev = GeoEvent {
            region: Region::Disk {
                center: [3.0, 0.0],
                radius: 0.1,
            },
            probability: 0.5,
        };
        let s = geo_survivability(&t, &[ev]).unwrap();
        assert_eq!(s.distribution, vec![(3.0 / 7.0, 0.5), (1.0, 0.5)]);
        assert!((s.expected - 5.0 / 7.0).abs() < 1e-12);
        assert_eq!(s.worst_case, 3.0 / 7.0);
        let none = GeoEvent {
            region: Region::Disk {
                center: [50.0, 0.0],
                radius: 1.0,
            },
            probability: 1.0,
        };
        let s = geo_survivability(&t, &[none]).unwrap();
        assert_eq!(s.distribution, vec![(1.0, 1.0)]);
        assert_eq!(s.expected, 1.0);
    }

    #[test]
    fn polygon_region() {
        let r = Region::Polygon {
            vertices: vec![[2.5, -1.0], [4.5, -1.0], [4.5, 1.0], [2.5, 1.0]],
        };
        assert_eq!(nodes_in_region(&bowtie(), &r).unwrap(), vec![3, 4]);
        assert!(Region::Polygon {
            vertices: vec![[0.0, 0.0], [1.0, 1.0]]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn vulnerability_path_center() {
        let t = planar_graph(path(3).unwrap(), vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        let v = pointwise_vulnerability(&t).unwrap();
        assert!((v.baseline_efficiency - 1.0).abs() < 1e-12);
        assert_eq!(v.per_node[1], 1.0);
        assert_eq!(v.global, 1.0);
    }

    #[test]
    fn vulnerability_symmetric_complete() {
        let n = 6;
        let c = (0..n)
            .map(|i| {
                let a = i as f64 * std::f64::consts::TAU / n as f64;
                [a.cos(), a.sin()]
            })
            .collect();
        let v = pointwise_vulnerability(&planar_graph(complete(n).unwrap(), c)).unwrap();
        assert!(v.per_node.iter().all(|u| (u - v.per_node[0]).abs() < 1e-12));
        assert!(v.relative_variance.unwrap() < 1e-20);
    }

    #[test]
    fn egpd_cases() {
        let p = GeoParams {
            lambda: Some(1.0),
            ..GeoParams::default()
        };
        let tree = planar_graph(path(4).unwrap(), (0..4).map(|i| [i as f64, 0.0]).collect());
        assert_eq!(egpd(&tree, 0, 3, &p).unwrap(), 0.0);
        // square: two disjoint 2-hop routes from 0 to 2
        let sq = Topology::undirected(4, &[(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap();
        let wide = planar_graph(
            sq.clone(),
            vec![[0.0, 0.0], [1.0, 1.0], [2.0, 0.0], [1.0, -1.0]],
        );
        // D_min = 2, area = 2 → D_g = 0.5·4 + 0.5·2 = 3
        let e = egpd(&wide, 0, 2, &p).unwrap();
        assert!((e - (1.0 - (-3.0f64).exp())).abs() < 1e-12);
        let flat = planar_graph(sq, vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0], [1.0, 0.0]]);
        assert_eq!(egpd(&flat, 0, 2, &p).unwrap(), 0.0);
        let lo = egpd(
            &wide,
            0,
            2,
            &GeoParams {
                lambda: Some(0.1),
                ..p
            },
        )
        .unwrap();
        assert!(lo < e);
    }

    #[test]
    fn tggd_in_unit_interval() {
        let t = erdos_renyi(25, 0.2, 3).unwrap();
        let mut r = crate::rng(9);
        use rand::Rng;
        let c = (0..25)
            .map(|_| [r.gen::<f64>() * 100.0, r.gen::<f64>() * 100.0])
            .collect();
        let g = tggd(&planar_graph(t, c), &GeoParams::default()).unwrap();
        assert!((0.0..=1.0).contains(&g.tggd));
        assert!((0.0..=1.0).contains(&g.ctggd));
        assert!(g.lambda > 0.0);
    }
}
