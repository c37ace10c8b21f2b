//! Canonical test-graph generators. All randomised models draw from a
//! ChaCha8 stream seeded with the caller's seed.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Topology;
use crate::error::{Error, Result};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum Model {
    /// Erdős–Rényi G(v, p).
    Er {
        v: usize,
        p: f64,
    },
    /// Barabási–Albert preferential attachment, `m` edges per new node.
    Ba {
        v: usize,
        m: usize,
    },
    /// Watts–Strogatz ring of even degree `k` with rewiring probability `beta`.
    Ws {
        v: usize,
        k: usize,
        beta: f64,
    },
    Star {
        v: usize,
    },
    Path {
        v: usize,
    },
    Cycle {
        v: usize,
    },
    Complete {
        v: usize,
    },
}

pub fn generate(model: Model, seed: u64) -> Result<Topology> {
    match model {
        Model::Er { v, p } => erdos_renyi(v, p, seed),
        Model::Ba { v, m } => barabasi_albert(v, m, seed),
        Model::Ws { v, k, beta } => watts_strogatz(v, k, beta, seed),
        Model::Star { v } => star(v),
        Model::Path { v } => path(v),
        Model::Cycle { v } => cycle(v),
        Model::Complete { v } => complete(v),
    }
}

fn need_nodes(v: usize, min: usize, what: &str) -> Result<()> {
    if v < min {
        return Err(Error::param(format!(
            "{what} needs at least {min} nodes, got {v}"
        )));
    }
    Ok(())
}

pub fn complete(v: usize) -> Result<Topology> {
    need_nodes(v, 1, "complete graph")?;
    let edges: Vec<_> = (0..v)
        .flat_map(|a| (a + 1..v).map(move |b| (a, b)))
        .collect();
    Topology::undirected(v, &edges)
}

/// Star with hub 0 and `v − 1` leaves.
pub fn star(v: usize) -> Result<Topology> {
    need_nodes(v, 1, "star")?;
    let edges: Vec<_> = (1..v).map(|i| (0, i)).collect();
    Topology::undirected(v, &edges)
}

pub fn path(v: usize) -> Result<Topology> {
    need_nodes(v, 1, "path")?;
    let edges: Vec<_> = (1..v).map(|i| (i - 1, i)).collect();
    Topology::undirected(v, &edges)
}

pub fn cycle(v: usize) -> Result<Topology> {
    need_nodes(v, 3, "cycle")?;
    let edges: Vec<_> = (0..v).map(|i| (i, (i + 1) % v)).collect();
    Topology::undirected(v, &edges)
}

pub fn erdos_renyi(v: usize, p: f64, seed: u64) -> Result<Topology> {
    need_nodes(v, 1, "ER graph")?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("edge probability {p} outside [0,1]")));
    }
    let mut r = rng(seed);
    let mut edges = Vec::new();
    for a in 0..v {
        for b in a + 1..v {
            if r.gen::<f64>() < p {
                edges.push((a, b));
            }
        }
    }
    Topology::undirected(v, &edges)
}

/// Seed graph is the complete graph on `m + 1` nodes; every later node
/// attaches to `m` distinct targets drawn proportionally to degree.
pub fn barabasi_albert(v: usize, m: usize, seed: u64) -> Result<Topology> {
    if m < 1 {
        return Err(Error::param("BA needs m >= 1"));
    }
    need_nodes(v, m + 1, "BA graph")?;
    let mut r = rng(seed);
    let mut edges = Vec::with_capacity(m * v);
    // each endpoint occurrence; sampling uniformly from it is degree-proportional
    let mut ends = Vec::with_capacity(2 * m * v);
    for a in 0..=m {
        for b in a + 1..=m {
            edges.push((a, b));
            ends.push(a);
            ends.push(b);
        }
    }
    let mut targets = Vec::with_capacity(m);
    for u in m + 1..v {
        targets.clear();
        while targets.len() < m {
            let w = ends[r.gen_range(0..ends.len())];
            if !targets.contains(&w) {
                targets.push(w);
            }
        }
        for &w in &targets {
            edges.push((w, u));
            ends.push(w);
            ends.push(u);
        }
    }
    Topology::undirected(v, &edges)
}

pub fn watts_strogatz(v: usize, k: usize, beta: f64, seed: u64) -> Result<Topology> {
    if k % 2 != 0 || k == 0 {
        return Err(Error::param(format!(
            "WS degree k={k} must be even and positive"
        )));
    }
    if k >= v {
        return Err(Error::param(format!("WS degree k={k} must be below v={v}")));
    }
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::param(format!(
            "rewiring probability {beta} outside [0,1]"
        )));
    }
    let mut r = rng(seed);
    let mut adj = vec![std::collections::BTreeSet::new(); v];
    for a in 0..v {
        for j in 1..=k / 2 {
            let b = (a + j) % v;
            adj[a].insert(b);
            adj[b].insert(a);
        }
    }
    for j in 1..=k / 2 {
        for a in 0..v {
            let b = (a + j) % v;
            if r.gen::<f64>() >= beta || !adj[a].contains(&b) {
                continue;
            }
            if adj[a].len() >= v - 1 {
                continue;
            }
            let w = loop {
                let w = r.gen_range(0..v);
                if w != a && !adj[a].contains(&w) {
                    break w;
                }
            };
            adj[a].remove(&b);
            adj[b].remove(&a);
            adj[a].insert(w);
            adj[w].insert(a);
        }
    }
    let edges: Vec<_> = (0..v)
        .flat_map(|a| adj[a].iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
        .collect();
    Topology::undirected(v, &edges)
}

/// Uniform random labelled tree on `v` nodes via a Prüfer sequence.
pub fn random_tree(v: usize, seed: u64) -> Result<Topology> {
    need_nodes(v, 1, "tree")?;
    if v <= 2 {
        return path(v);
    }
    let mut r = rng(seed);
    let seq: Vec<usize> = (0..v - 2).map(|_| r.gen_range(0..v)).collect();
    let mut degree = vec![1usize; v];
    for &x in &seq {
        degree[x] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (0..v).filter(|&u| degree[u] == 1).collect();
    let mut edges = Vec::with_capacity(v - 1);
    for &x in &seq {
        let leaf = *leaves.iter().next().unwrap();
        leaves.remove(&leaf);
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let mut rest = leaves.into_iter();
    let (a, b) = (rest.next().unwrap(), rest.next().unwrap());
    edges.push((a, b));
    Topology::undirected(v, &edges)
}

/// Two cliques of sizes `a` and `b` joined by the single edge `(a−1, a)`.
pub fn two_cliques_bridge(a: usize, b: usize) -> Result<Topology> {
    need_nodes(a.min(b), 2, "clique")?;
    let mut edges = Vec::new();
    for x in 0..a {
        for y in x + 1..a {
            edges.push((x, y));
        }
    }
    for x in a..a + b {
        for y in x + 1..a + b {
            edges.push((x, y));
        }
    }
    edges.push((a - 1, a));
    Topology::undirected(a + b, &edges)
}

/// Two cliques of size `k` joined by a path with `len` interior nodes.
pub fn barbell(k: usize, len: usize) -> Result<Topology> {
    need_nodes(k, 2, "barbell clique")?;
    let n = 2 * k + len;
    let mut edges = Vec::new();
    for base in [0, k + len] {
        for x in base..base + k {
            for y in x + 1..base + k {
                edges.push((x, y));
            }
        }
    }
    // chain: clique-A node k−1, path nodes k..k+len, clique-B node k+len
    for i in k - 1..k + len {
        edges.push((i, i + 1));
    }
    Topology::undirected(n, &edges)
}

/// Random relabelling of `t`'s nodes; returns the new topology and the
/// permutation `new_id[old]`.
pub fn relabel(t: &Topology, seed: u64) -> (Topology, Vec<usize>) {
    let mut perm: Vec<usize> = (0..t.node_count()).collect();
    perm.shuffle(&mut rng(seed));
    let edges: Vec<_> = t.edges().iter().map(|&(a, b)| (perm[a], perm[b])).collect();
    let opts = super::BuildOptions {
        directed: t.is_directed(),
        dedup: false,
    };
    let g =
        Topology::build(t.node_count(), &edges, t.weights(), opts).expect("relabel keeps validity");
    (g, perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes() {
        assert_eq!(complete(4).unwrap().edge_count(), 6);
        assert_eq!(erdos_renyi(100, 0.0, 1).unwrap().edge_count(), 0);
        assert_eq!(erdos_renyi(10, 1.0, 1).unwrap().edge_count(), 45);
        let ba = barabasi_albert(1000, 2, 7).unwrap();
        assert_eq!(ba.edge_count(), 3 + 2 * 997);
        let ws = watts_strogatz(30, 4, 0.3, 3).unwrap();
        assert_eq!(ws.edge_count(), 60);
        assert_eq!(random_tree(17, 5).unwrap().edge_count(), 16);
        assert!(crate::graph::is_connected(&random_tree(17, 5).unwrap()));
    }

    #[test]
    fn determinism() {
        let a = barabasi_albert(1000, 2, 11).unwrap();
        let b = barabasi_albert(1000, 2, 11).unwrap();
        assert_eq!(a.edges(), b.edges());
        assert_eq!(a.fingerprint(), b.fingerprint());
        let c = barabasi_albert(1000, 2, 12).unwrap();
        assert_ne!(a.fingerprint(), c.fingerprint());
    }

    #[test]
    fn invalid() {
        assert!(erdos_renyi(10, 1.5, 0).is_err());
        assert!(barabasi_albert(10, 0, 0).is_err());
        assert!(watts_strogatz(10, 3, 0.1, 0).is_err());
    }

    #[test]
    fn barbell_shape() {
        let t = barbell(6, 4).unwrap();
        assert_eq!(t.node_count(), 16);
        assert_eq!(t.edge_count(), 2 * 15 + 5);
        assert!(crate::graph::is_connected(&t));
    }
}
