#![allow(dead_code)]

use netrobust::graph::generate::*;
use netrobust::graph::is_connected;
use netrobust::Topology;

/// Deterministic corpus of connected graphs with 3..=12 nodes.
pub fn small_corpus() -> Vec<(String, Topology)> {
    let mut out: Vec<(String, Topology)> = Vec::new();
    let mut push = |name: String, t: Topology| {
        if t.node_count() <= 12 && is_connected(&t) {
            out.push((name, t));
        }
    };
    for v in 3..=12 {
        push(format!("path{v}"), path(v).unwrap());
        push(format!("cycle{v}"), cycle(v).unwrap());
        push(format!("star{v}"), star(v).unwrap());
    }
    for v in 3..=8 {
        push(format!("complete{v}"), complete(v).unwrap());
    }
    for v in 5..=12 {
        push(format!("wheel{v}"), wheel(v));
    }
    for a in 3..=6 {
        for b in a..=6 {
            push(format!("cliques{a}+{b}"), two_cliques_bridge(a, b).unwrap());
        }
    }
    for k in 3..=5 {
        for len in 0..=2 {
            push(format!("barbell{k},{len}"), barbell(k, len).unwrap());
        }
    }
    for (r, c) in [(2, 2), (2, 3), (2, 4), (3, 3), (2, 5), (2, 6), (3, 4)] {
        push(format!("grid{r}x{c}"), grid(r, c));
    }
    for seed in 0..30 {
        let v = 5 + (seed as usize % 8);
        push(format!("tree{v}s{seed}"), random_tree(v, seed).unwrap());
    }
    for seed in 0..20 {
        let v = 6 + (seed as usize % 7);
        push(
            format!("ba{v},1s{seed}"),
            barabasi_albert(v, 1, seed).unwrap(),
        );
        push(
            format!("ba{v},2s{seed}"),
            barabasi_albert(v, 2, seed).unwrap(),
        );
    }
    for seed in 0..12 {
        let v = 6 + 2 * (seed as usize % 4);
        push(
            format!("ws{v}s{seed}"),
            watts_strogatz(v, 4, 0.3, seed).unwrap(),
        );
    }
    let mut seed = 0;
    let mut er = 0;
    while er < 70 {
        let v = 5 + (seed as usize % 8);
        let p = [0.3, 0.45, 0.6][seed as usize % 3];
        let t = erdos_renyi(v, p, seed).unwrap();
        seed += 1;
        if is_connected(&t) {
            push(format!("er{v},{p}s{seed}"), t);
            er += 1;
        }
    }
    out
}

pub fn wheel(v: usize) -> Topology {
    let mut edges: Vec<(usize, usize)> = (1..v).map(|i| (0, i)).collect();
    for i in 1..v {
        edges.push((i, if i + 1 == v { 1 } else { i + 1 }));
    }
    Topology::undirected(v, &edges).unwrap()
}

pub fn grid(r: usize, c: usize) -> Topology {
    let mut edges = Vec::new();
    for i in 0..r {
        for j in 0..c {
            let u = i * c + j;
            if j + 1 < c {
                edges.push((u, u + 1));
            }
            if i + 1 < r {
                edges.push((u, u + c));
            }
        }
    }
    Topology::undirected(r * c, &edges).unwrap()
}

/// Smallest cut over all node sets A with |A| in `lo..=hi`, by enumeration.
pub fn exact_bisection(t: &Topology, lo: usize, hi: usize) -> usize {
    let n = t.node_count();
    assert!(n <= 20);
    let mut best = usize::MAX;
    for mask in 1u32..(1 << n) - 1 {
        let k = mask.count_ones() as usize;
        if k < lo || k > hi {
            continue;
        }
        let cut = t
            .edges()
            .iter()
            .filter(|&&(a, b)| (mask >> a & 1) != (mask >> b & 1))
            .count();
        best = best.min(cut);
    }
    best
}

/// Hop distances by Floyd–Warshall; `usize::MAX` when unreachable.
pub fn hops(t: &Topology) -> Vec<Vec<usize>> {
    let n = t.node_count();
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in t.edges() {
        d[a][b] = 1;
        if !t.is_directed() {
            d[b][a] = 1;
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    for row in &mut d {
        for x in row.iter_mut() {
            if *x >= inf {
                *x = usize::MAX;
            }
        }
    }
    d
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
