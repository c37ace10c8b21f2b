//! Spectral cluster identification by eigenvector-weight jumps.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::cache::{directed_adjacency, symmetric_adjacency, Eigen, DENSE_CAP};
use crate::error::{Error, Result};
use crate::graph::Topology;

/// Minimum jump relative to the weight range.
pub const JUMP_THRESHOLD: f64 = 0.2;
/// Maximum conductance of an accepted split.
pub const CONDUCTANCE_THRESHOLD: f64 = 0.25;
/// Nontrivial eigenvectors tried per split.
const CANDIDATES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralCluster {
    pub members: Vec<usize>,
    /// Conductance of the cut that produced this cluster (root: `None`).
    pub conductance: Option<f64>,
    pub children: Vec<SpectralCluster>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralClusters {
    pub root: SpectralCluster,
    /// Leaf cluster index per node, numbered by first appearance.
    pub leaf_of: Vec<usize>,
}

/// SIM(A) = AAᵀ with a zero diagonal: entry (i,j) counts the nodes both i
/// and j point to.
pub fn similarity_matrix(t: &Topology) -> Result<DMatrix<f64>> {
    if !t.is_directed() {
        return Err(Error::incompatible("SIM(A) is built from a directed graph"));
    }
    let a = directed_adjacency(t, false);
    let mut s = &a * a.transpose();
    s.fill_diagonal(0.0);
    Ok(s)
}

/// Recursive bisection up to `depth` levels. Undirected graphs use A;
/// directed graphs use SIM(A). Each split sorts nodes by their weight in one
/// of the top nontrivial eigenvectors of N(·) and cuts at the largest jump.
pub fn spectral_clusters(t: &Topology, depth: usize) -> Result<SpectralClusters> {
    let n = t.node_count();
    if n > DENSE_CAP {
        return Err(Error::TooLarge {
            what: "nodes for spectral clustering",
            actual: n,
            cap: DENSE_CAP,
        });
    }
    let w = if t.is_directed() {
        similarity_matrix(t)?
    } else {
        symmetric_adjacency(t, false)
    };
    let root = split(&w, (0..n).collect(), None, depth);
    let mut leaf_of = vec![usize::MAX; n];
    let mut next = 0;
    let mut leaves = Vec::new();
    collect_leaves(&root, &mut leaves);
    // number leaves by their smallest member
    leaves.sort_by_key(|m| m.iter().min().copied());
    for m in leaves {
        for u in m {
            leaf_of[u] = next;
        }
        next += 1;
    }
    Ok(SpectralClusters { root, leaf_of })
}

fn collect_leaves(c: &SpectralCluster, out: &mut Vec<Vec<usize>>) {
    if c.children.is_empty() {
        out.push(c.members.clone());
    }
    for ch in &c.children {
        collect_leaves(ch, out);
    }
}

fn split(
    w: &DMatrix<f64>,
    members: Vec<usize>,
    conductance: Option<f64>,
    depth: usize,
) -> SpectralCluster {
    let mut node = SpectralCluster {
        members,
        conductance,
        children: Vec::new(),
    };
    if depth == 0 || node.members.len() < 2 {
        return node;
    }
    let m = &node.members;
    let k = m.len();
    let sub = DMatrix::from_fn(k, k, |i, j| w[(m[i], m[j])]);
    let deg: Vec<f64> = (0..k).map(|i| sub.row(i).sum()).collect();
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|&d| if d > 0.0 { d.sqrt().recip() } else { 0.0 })
        .collect();
    // symmetric form of N: (I + D^{-1/2} W D^{-1/2}) / 2
    let sym = DMatrix::from_fn(k, k, |i, j| {
        0.5 * (if i == j { 1.0 } else { 0.0 }) + 0.5 * sub[(i, j)] * inv_sqrt[i] * inv_sqrt[j]
    });
    let e = Eigen::of_symmetric(sym);
    let mut best: Option<(f64, Vec<bool>)> = None;
    for c in 1..=CANDIDATES.min(k - 1) {
        let col = e.vectors.column(k - 1 - c);
        let weights: Vec<f64> = (0..k)
            .map(|i| {
                if deg[i] > 0.0 {
                    col[i] * inv_sqrt[i]
                } else {
                    col[i]
                }
            })
            .collect();
        let Some(side) = jump_split(&weights) else {
            continue;
        };
        let phi = conductance_of(&sub, &deg, &side);
        if phi <= CONDUCTANCE_THRESHOLD && best.as_ref().map_or(true, |b| phi < b.0 - 1e-12) {
            best = Some((phi, side));
        }
    }
    if let Some((phi, side)) = best {
        let left: Vec<usize> = (0..k).filter(|&i| side[i]).map(|i| m[i]).collect();
        let right: Vec<usize> = (0..k).filter(|&i| !side[i]).map(|i| m[i]).collect();
        let mut parts = [left, right];
        parts.sort_by_key(|p| p[0]);
        node.children = parts
            .into_iter()
            .map(|p| split(w, p, Some(phi), depth - 1))
            .collect();
    }
    node
}

/// Side mask below the largest gap in the sorted weights, if the gap is at
/// least the threshold fraction of the range.
fn jump_split(weights: &[f64]) -> Option<Vec<bool>> {
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| weights[a].total_cmp(&weights[b]).then(a.cmp(&b)));
    let range = weights[order[order.len() - 1]] - weights[order[0]];
    if range <= 1e-12 {
        return None;
    }
    let (pos, gap) = (1..order.len())
        .map(|i| (i, weights[order[i]] - weights[order[i - 1]]))
        .fold((0, f64::NEG_INFINITY), |b, x| {
            if x.1 > b.1 + 1e-12 {
                x
            } else {
                b
            }
        });
    if gap / range < JUMP_THRESHOLD {
        return None;
    }
    let mut side = vec![false; weights.len()];
    order[..pos].iter().for_each(|&i| side[i] = true);
    Some(side)
}

/// cut(S, S̄) / min(vol S, vol S̄).
fn conductance_of(w: &DMatrix<f64>, deg: &[f64], side: &[bool]) -> f64 {
    let k = side.len();
    let mut cut = 0.0;
    for i in 0..k {
        for j in 0..k {
            if side[i] && !side[j] {
                cut += w[(i, j)];
            }
        }
    }
    let vol_s: f64 = (0..k).filter(|&i| side[i]).map(|i| deg[i]).sum();
    let vol_t: f64 = deg.iter().sum::<f64>() - vol_s;
    let denom = vol_s.min(vol_t);
    if denom <= 0.0 {
        if cut == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        cut / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn planted_cliques_split() {
        let t = two_cliques_bridge(5, 5).unwrap();
        let c = spectral_clusters(&t, 3).unwrap();
        assert_eq!(c.leaf_of, vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert!(c.root.children[0].conductance.unwrap() < 0.1);
    }

    #[test]
    fn complete_graph_not_split() {
        let c = spectral_clusters(&complete(6).unwrap(), 3).unwrap();
        assert!(c.root.children.is_empty());
        assert_eq!(c.leaf_of, vec![0; 6]);
    }

    #[test]
    fn common_providers() {
        // 0 and 1 are customers of both 2 and 3
        let t = Topology::directed(4, &[(0, 2), (0, 3), (1, 2), (1, 3)]).unwrap();
        let s = similarity_matrix(&t).unwrap();
        assert_eq!(s[(0, 1)], 2.0);
        assert_eq!(s[(0, 0)], 0.0);
        assert_eq!(s[(2, 3)], 0.0);
    }
}
