//! Vertex and edge connectivity through unit-capacity max-flow (Dinic).

use std::collections::VecDeque;

use super::Topology;

struct Flow {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i32>,
    level: Vec<i32>,
    iter: Vec<usize>,
}

impl Flow {
    fn new(n: usize) -> Self {
        Flow {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            level: vec![0; n],
            iter: vec![0; n],
        }
    }

    fn add(&mut self, a: usize, b: usize, c: i32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    fn bfs(&mut self, s: usize) {
        self.level.iter_mut().for_each(|l| *l = -1);
        self.level[s] = 0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &e in &self.head[u] {
                let w = self.to[e];
                if self.cap[e] > 0 && self.level[w] < 0 {
                    self.level[w] = self.level[u] + 1;
                    q.push_back(w);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, f: i32) -> i32 {
        if u == t {
            return f;
        }
        while self.iter[u] < self.head[u].len() {
            let e = self.head[u][self.iter[u]];
            let w = self.to[e];
            if self.cap[e] > 0 && self.level[w] == self.level[u] + 1 {
                let d = self.dfs(w, t, f.min(self.cap[e]));
                if d > 0 {
                    self.cap[e] -= d;
                    self.cap[e ^ 1] += d;
                    return d;
                }
            }
            self.iter[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize, limit: i32) -> i32 {
        let mut total = 0;
        loop {
            self.bfs(s);
            if self.level[t] < 0 || total >= limit {
                return total;
            }
            self.iter.iter_mut().for_each(|i| *i = 0);
            loop {
                let f = self.dfs(s, t, i32::MAX);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}

fn local_edge(u: &Topology, s: usize, t: usize, limit: i32) -> i32 {
    let mut f = Flow::new(u.node_count());
    for &(a, b) in u.edges() {
        f.add(a, b, 1);
        f.add(b, a, 1);
    }
    f.max_flow(s, t, limit)
}

/// Local vertex connectivity between non-adjacent `s`, `t` via node splitting.
fn local_vertex(u: &Topology, s: usize, t: usize, limit: i32) -> i32 {
    let n = u.node_count();
    let big = n as i32 + 1;
    let mut f = Flow::new(2 * n);
    for x in 0..n {
        let c = if x == s || x == t { big } else { 1 };
        f.add(2 * x, 2 * x + 1, c);
    }
    for &(a, b) in u.edges() {
        f.add(2 * a + 1, 2 * b, big);
        f.add(2 * b + 1, 2 * a, big);
    }
    f.max_flow(2 * s + 1, 2 * t, limit)
}

/// Edge connectivity μ(G): minimum number of edges whose removal
/// disconnects the (underlying undirected) graph.
pub fn edge_connectivity(t: &Topology) -> usize {
    let u = t.underlying_undirected();
    let n = u.node_count();
    if n < 2 {
        return 0;
    }
    let mut best = (0..n).map(|x| u.degree(x)).min().unwrap() as i32;
    for x in 1..n {
        best = best.min(local_edge(&u, 0, x, best));
    }
    best as usize
}

/// Vertex connectivity κ(G); `v − 1` for complete graphs.
pub fn vertex_connectivity(t: &Topology) -> usize {
    let u = t.underlying_undirected();
    let n = u.node_count();
    if n < 2 {
        return 0;
    }
    let mut best = (n - 1) as i32;
    best = best.min((0..n).map(|x| u.degree(x)).min().unwrap() as i32);
    // some node outside a minimum cut lies among the first best+1 ids
    let mut s = 0;
    while (s as i32) <= best && s < n {
        for x in s + 1..n {
            if !u.has_edge(s, x) {
                best = best.min(local_vertex(&u, s, x, best));
            }
        }
        s += 1;
    }
    best as usize
}
