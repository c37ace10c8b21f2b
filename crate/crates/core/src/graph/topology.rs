use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// How node coordinates are to be interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordKind {
    /// Latitude/longitude in degrees; distances are great-circle kilometres.
    LatLon,
    /// Planar Euclidean coordinates in arbitrary units.
    Planar,
}

/// Options consulted by [`Topology::build`].
#[derive(Debug, Clone, Copy, Default)]
pub struct BuildOptions {
    pub directed: bool,
    /// Merge repeated edges instead of rejecting them (first weight wins).
    pub dedup: bool,
}

/// Immutable graph model with dense node ids `0..v`.
///
/// Undirected edges are stored once with `u < w`; the adjacency lists are
/// symmetric. Directed edges keep their orientation and an in-adjacency is
/// maintained alongside the out-adjacency.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    directed: bool,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    out_adj: Vec<Vec<(usize, usize)>>,
    in_adj: Vec<Vec<(usize, usize)>>,
    coords: Option<(CoordKind, Vec<[f64; 2]>)>,
    labels: Option<Vec<String>>,
    node_weights: Option<Vec<f64>>,
}

impl Topology {
    /// Build a topology from an edge list. `weights`, when given, must have
    /// one entry per edge.
    pub fn build(
        n: usize,
        edges: &[(usize, usize)],
        weights: Option<&[f64]>,
        opts: BuildOptions,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("a topology needs at least one node"));
        }
        if let Some(w) = weights {
            if w.len() != edges.len() {
                return Err(Error::param(format!(
                    "{} weights for {} edges",
                    w.len(),
                    edges.len()
                )));
            }
        }
        let mut seen = std::collections::HashSet::with_capacity(edges.len());
        let mut kept = Vec::with_capacity(edges.len());
        let mut kept_w = weights.map(|_| Vec::with_capacity(edges.len()));
        for (index, &(a, b)) in edges.iter().enumerate() {
            for node in [a, b] {
                if node >= n {
                    return Err(Error::NodeOutOfRange { index, node, v: n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop { index, node: a });
            }
            if let Some(w) = weights {
                let x = w[index];
                if !(x > 0.0) || !x.is_finite() {
                    return Err(Error::NonPositiveWeight { index, weight: x });
                }
            }
            let key = if opts.directed {
                (a, b)
            } else {
                (a.min(b), a.max(b))
            };
            if !seen.insert(key) {
                if opts.dedup {
                    continue;
                }
                return Err(Error::DuplicateEdge {
                    index,
                    u: key.0,
                    w: key.1,
                });
            }
            kept.push(key);
            if let (Some(kw), Some(w)) = (kept_w.as_mut(), weights) {
                kw.push(w[index]);
            }
        }
        Ok(Self::assemble(n, opts.directed, kept, kept_w))
    }

    /// Undirected, unweighted convenience constructor.
    pub fn undirected(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(n, edges, None, BuildOptions::default())
    }

    /// Directed, unweighted convenience constructor.
    pub fn directed(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::build(
            n,
            edges,
            None,
            BuildOptions {
                directed: true,
                dedup: false,
            },
        )
    }

    /// Undirected weighted convenience constructor.
    pub fn weighted(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let pairs: Vec<_> = edges.iter().map(|&(a, b, _)| (a, b)).collect();
        let w: Vec<_> = edges.iter().map(|&(_, _, x)| x).collect();
        Self::build(n, &pairs, Some(&w), BuildOptions::default())
    }

    fn assemble(
        n: usize,
        directed: bool,
        edges: Vec<(usize, usize)>,
        weights: Option<Vec<f64>>,
    ) -> Self {
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); if directed { n } else { 0 }];
        for (id, &(a, b)) in edges.iter().enumerate() {
            out_adj[a].push((b, id));
            if directed {
                in_adj[b].push((a, id));
            } else {
                out_adj[b].push((a, id));
            }
        }
        for list in out_adj.iter_mut().chain(in_adj.iter_mut()) {
            list.sort_unstable();
        }
        Topology {
            n,
            directed,
            edges,
            weights,
            out_adj,
            in_adj,
            coords: None,
            labels: None,
            node_weights: None,
        }
    }

    pub fn with_coords(mut self, kind: CoordKind, coords: Vec<[f64; 2]>) -> Result<Self> {
        if coords.len() != self.n {
            return Err(Error::param(format!(
                "{} coordinates for {} nodes",
                coords.len(),
                self.n
            )));
        }
        if coords
            .iter()
            .any(|c| !c[0].is_finite() || !c[1].is_finite())
        {
            return Err(Error::param("non-finite coordinate"));
        }
        self.coords = Some((kind, coords));
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::param(format!(
                "{} labels for {} nodes",
                labels.len(),
                self.n
            )));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_node_weights(mut self, w: Vec<f64>) -> Result<Self> {
        if w.len() != self.n {
            return Err(Error::param(format!(
                "{} node weights for {} nodes",
                w.len(),
                self.n
            )));
        }
        if let Some((i, &x)) = w
            .iter()
            .enumerate()
            .find(|(_, x)| !(**x > 0.0) || !x.is_finite())
        {
            return Err(Error::param(format!(
                "node weight {x} at node {i} is not strictly positive"
            )));
        }
        self.node_weights = Some(w);
        Ok(self)
    }

    pub(crate) fn check_node(&self, u: usize) -> Result<()> {
        if u >= self.node_count() {
            return Err(Error::param(format!(
                "node {u} out of range (v={})",
                self.node_count()
            )));
        }
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> (usize, usize) {
        self.edges[id]
    }

    /// Weight of edge `id`; unweighted topologies report 1.
    pub fn weight(&self, id: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[id])
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn coords(&self) -> Option<(CoordKind, &[[f64; 2]])> {
        self.coords.as_ref().map(|(k, c)| (*k, c.as_slice()))
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn node_weights(&self) -> Option<&[f64]> {
        self.node_weights.as_deref()
    }

    /// Out-neighbours as `(neighbour, edge id)`, sorted by neighbour. For
    /// undirected graphs this is the full neighbourhood.
    pub fn neighbors(&self, u: usize) -> &[(usize, usize)] {
        &self.out_adj[u]
    }

    /// In-neighbours; identical to [`Self::neighbors`] on undirected graphs.
    pub fn in_neighbors(&self, u: usize) -> &[(usize, usize)] {
        if self.directed {
            &self.in_adj[u]
        } else {
            &self.out_adj[u]
        }
    }

    /// Number of neighbours (undirected) or out-degree (directed).
    pub fn degree(&self, u: usize) -> usize {
        self.out_adj[u].len()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.out_adj[u].len()
    }

    pub fn in_degree(&self, u: usize) -> usize {
        self.in_neighbors(u).len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|u| self.degree(u)).collect()
    }

    /// Σ_j w_ij over out-edges.
    pub fn strength(&self, u: usize) -> f64 {
        self.out_adj[u].iter().map(|&(_, id)| self.weight(id)).sum()
    }

    pub fn edge_id(&self, u: usize, w: usize) -> Option<usize> {
        let list = &self.out_adj[u];
        list.binary_search_by(|&(x, _)| x.cmp(&w))
            .ok()
            .map(|i| list[i].1)
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.edge_id(u, w).is_some()
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|u| self.degree(u)).max().unwrap_or(0)
    }

    /// Undirected view of a directed graph; reciprocal edges merge and their
    /// weights are summed. Undirected input is returned unchanged.
    pub fn underlying_undirected(&self) -> Topology {
        if !self.directed {
            return self.clone();
        }
        let mut merged: std::collections::BTreeMap<(usize, usize), f64> = Default::default();
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            *merged.entry((a.min(b), a.max(b))).or_insert(0.0) += self.weight(id);
        }
        let edges: Vec<_> = merged.keys().copied().collect();
        let weights = self
            .weights
            .as_ref()
            .map(|_| merged.values().copied().collect());
        let mut t = Self::assemble(self.n, false, edges, weights);
        t.coords = self.coords.clone();
        t.labels = self.labels.clone();
        t.node_weights = self.node_weights.clone();
        t
    }

    /// Subgraph induced by the nodes with `keep[u]`, relabelled densely in
    /// increasing id order. Returns the subgraph and the new→old id map.
    pub fn induced(&self, keep: &[bool]) -> (Topology, Vec<usize>) {
        let old_of: Vec<usize> = (0..self.n).filter(|&u| keep[u]).collect();
        let mut new_of = vec![usize::MAX; self.n];
        for (i, &u) in old_of.iter().enumerate() {
            new_of[u] = i;
        }
        let mut edges = Vec::new();
        let mut weights = self.weights.as_ref().map(|_| Vec::new());
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            if keep[a] && keep[b] {
                edges.push((new_of[a], new_of[b]));
                if let Some(w) = weights.as_mut() {
                    w.push(self.weight(id));
                }
            }
        }
        // A topology needs at least one node; an empty selection yields an
        // empty edge set over zero nodes, which callers must special-case.
        let n = old_of.len();
        let mut t = Self::assemble(n, self.directed, edges, weights);
        fn pick<T: Clone>(v: &[T], ids: &[usize]) -> Vec<T> {
            ids.iter().map(|&u| v[u].clone()).collect()
        }
        t.coords = self.coords.as_ref().map(|(k, c)| (*k, pick(c, &old_of)));
        t.labels = self.labels.as_ref().map(|l| pick(l, &old_of));
        t.node_weights = self.node_weights.as_ref().map(|w| pick(w, &old_of));
        (t, old_of)
    }

    /// Same node set with the edges flagged in `removed` dropped. Returns the
    /// new topology and the new→old edge id map.
    pub fn without_edges(&self, removed: &[bool]) -> (Topology, Vec<usize>) {
        let old_of: Vec<usize> = (0..self.edges.len()).filter(|&i| !removed[i]).collect();
        let edges = old_of.iter().map(|&i| self.edges[i]).collect();
        let weights = self
            .weights
            .as_ref()
            .map(|w| old_of.iter().map(|&i| w[i]).collect());
        let mut t = Self::assemble(self.n, self.directed, edges, weights);
        t.coords = self.coords.clone();
        t.labels = self.labels.clone();
        t.node_weights = self.node_weights.clone();
        (t, old_of)
    }

    /// Copy with one extra edge; errors like [`Self::build`].
    pub fn with_edge(&self, u: usize, w: usize, weight: Option<f64>) -> Result<Topology> {
        let mut edges = self.edges.clone();
        edges.push((u, w));
        let weights = match (&self.weights, weight) {
            (Some(ws), x) => {
                let mut ws = ws.clone();
                ws.push(x.unwrap_or(1.0));
                Some(ws)
            }
            (None, Some(_)) => return Err(Error::param("weighted edge on unweighted topology")),
            (None, None) => None,
        };
        let mut t = Self::build(
            self.n,
            &edges,
            weights.as_deref(),
            BuildOptions {
                directed: self.directed,
                dedup: false,
            },
        )?;
        t.coords = self.coords.clone();
        t.labels = self.labels.clone();
        t.node_weights = self.node_weights.clone();
        Ok(t)
    }

    /// Sorted degree sum check helper: Σ k_i.
    pub fn degree_sum(&self) -> usize {
        self.out_adj.iter().map(Vec::len).sum()
    }

    /// Hex SHA-256 over a canonical serialisation of structure and weights.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        h.update([self.directed as u8]);
        for (id, &(a, b)) in self.edges.iter().enumerate() {
            h.update((a as u64).to_le_bytes());
            h.update((b as u64).to_le_bytes());
            if self.weights.is_some() {
                h.update(self.weight(id).to_bits().to_le_bytes());
            }
        }
        if let Some((kind, c)) = &self.coords {
            h.update([*kind as u8]);
            for p in c {
                h.update(p[0].to_bits().to_le_bytes());
                h.update(p[1].to_bits().to_le_bytes());
            }
        }
        if let Some(labels) = &self.labels {
            for l in labels {
                h.update((l.len() as u64).to_le_bytes());
                h.update(l.as_bytes());
            }
        }
        if let Some(w) = &self.node_weights {
            for x in w {
                h.update(x.to_bits().to_le_bytes());
            }
        }
        hex(&h.finalize())
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes
        .iter()
        .fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}
