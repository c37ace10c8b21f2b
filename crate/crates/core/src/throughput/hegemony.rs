//! AS hegemony: betweenness seen from a set of viewpoints over valley-free
//! shortest paths, averaged after trimming the extreme viewpoints.

use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{PolicyGraph, Topology};

/// BC_i(u) for one viewpoint `i`: the fraction of shortest valley-free paths
/// from `i` that cross `u`, summed over destinations and divided by the
/// number of reachable destinations. Endpoints are not counted.
pub fn viewpoint_betweenness(t: &Topology, viewpoint: usize) -> Result<Vec<f64>> {
    let n = t.node_count();
    if viewpoint >= n {
        return Err(Error::param(format!("viewpoint {viewpoint} out of range")));
    }
    let pg = PolicyGraph::new(t);
    let idx = |u: usize, ph: usize| 2 * u + ph;
    let mut dist = vec![u32::MAX; 2 * n];
    let mut sigma = vec![0.0f64; 2 * n];
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    let start = idx(viewpoint, crate::graph::UP);
    dist[start] = 0;
    sigma[start] = 1.0;
    queue.push_back((viewpoint, crate::graph::UP));
    let mut buf = Vec::new();
    while let Some((u, ph)) = queue.pop_front() {
        let s = idx(u, ph);
        order.push((u, ph));
        pg.successors(u, ph, &mut buf);
        for &(w, nph) in &buf {
            let x = idx(w, nph);
            if dist[x] == u32::MAX {
                dist[x] = dist[s] + 1;
                queue.push_back((w, nph));
            }
            if dist[x] == dist[s] + 1 {
                sigma[x] += sigma[s];
            }
        }
    }
    // best distance and path count per node
    let mut best = vec![u32::MAX; n];
    for &(u, ph) in &order {
        best[u] = best[u].min(dist[idx(u, ph)]);
    }
    let mut paths = vec![0.0; n];
    for &(u, ph) in &order {
        if dist[idx(u, ph)] == best[u] {
            paths[u] += sigma[idx(u, ph)];
        }
    }
    let term = |u: usize, ph: usize| -> f64 {
        if u != viewpoint && dist[idx(u, ph)] == best[u] {
            1.0 / paths[u]
        } else {
            0.0
        }
    };
    let mut g = vec![0.0; 2 * n];
    let mut through = vec![0.0; n];
    for &(u, ph) in order.iter().rev() {
        let s = idx(u, ph);
        pg.successors(u, ph, &mut buf);
        let mut down = 0.0;
        for &(w, nph) in &buf {
            let x = idx(w, nph);
            if dist[x] == dist[s] + 1 {
                down += g[x];
            }
        }
        g[s] = term(u, ph) + down;
        if u != viewpoint {
            through[u] += sigma[s] * down;
        }
    }
    let reachable = (0..n)
        .filter(|&u| u != viewpoint && best[u] != u32::MAX)
        .count();
    if reachable == 0 {
        return Ok(vec![0.0; n]);
    }
    Ok(through.into_iter().map(|x| x / reachable as f64).collect())
}

/// H(u, α): per node, the viewpoint scores are sorted, ⌊α·n⌋ are dropped
/// from each end and the rest averaged.
pub fn as_hegemony(t: &Topology, viewpoints: &[usize], alpha: f64) -> Result<Vec<f64>> {
    if !(0.0..0.5).contains(&alpha) {
        return Err(Error::param(format!("alpha {alpha} outside [0, 0.5)")));
    }
    let k = viewpoints.len();
    let cut = (alpha * k as f64).floor() as usize;
    if k == 0 || k <= 2 * cut {
        return Err(Error::param("no viewpoint left after trimming"));
    }
    let scores: Vec<Vec<f64>> = viewpoints
        .par_iter()
        .map(|&i| viewpoint_betweenness(t, i))
        .collect::<Result<_>>()?;
    let n = t.node_count();
    Ok((0..n)
        .map(|u| {
            let mut col: Vec<f64> = scores.iter().map(|s| s[u]).collect();
            col.sort_by(|a, b| a.total_cmp(b));
            let kept = &col[cut..k - cut];
            kept.iter().sum::<f64>() / kept.len() as f64
        })
        .collect())
}
