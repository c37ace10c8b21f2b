use serde::{Deserialize, Serialize};

use super::Topology;

/// Connected-component decomposition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    /// Component id per node; ids are ordered by decreasing size, ties by
    /// smallest member.
    pub component_of: Vec<usize>,
    /// Component sizes, descending.
    pub sizes: Vec<usize>,
}

impl ComponentReport {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    /// |V_L|, the size of the largest component.
    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.component_of.len())
            .filter(|&u| self.component_of[u] == c)
            .collect()
    }

    fn from_raw(raw: Vec<usize>, k: usize) -> Self {
        let mut size = vec![0usize; k];
        let mut first = vec![usize::MAX; k];
        for (u, &c) in raw.iter().enumerate() {
            size[c] += 1;
            first[c] = first[c].min(u);
        }
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| size[b].cmp(&size[a]).then(first[a].cmp(&first[b])));
        let mut rank = vec![0; k];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        ComponentReport {
            component_of: raw.iter().map(|&c| rank[c]).collect(),
            sizes: order.iter().map(|&c| size[c]).collect(),
        }
    }
}

/// Weakly connected components (plain components for undirected graphs).
pub fn components(t: &Topology) -> ComponentReport {
    let n = t.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut k = 0;
    let mut stack = Vec::new();
    for s in 0..n {
        if comp[s] != usize::MAX {
            continue;
        }
        comp[s] = k;
        stack.push(s);
        while let Some(u) = stack.pop() {
            let ins = if t.is_directed() {
                t.in_neighbors(u)
            } else {
                &[][..]
            };
            for &(w, _) in t.neighbors(u).iter().chain(ins) {
                if comp[w] == usize::MAX {
                    comp[w] = k;
                    stack.push(w);
                }
            }
        }
        k += 1;
    }
    ComponentReport::from_raw(comp, k)
}

/// Components of the subgraph induced by `alive`; dead nodes are left out of
/// the report (their entry in `component_of` is `usize::MAX`).
pub fn components_masked(t: &Topology, alive: &[bool]) -> ComponentReport {
    let n = t.node_count();
    let mut comp = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut stack = Vec::new();
    for s in 0..n {
        if !alive[s] || comp[s] != usize::MAX {
            continue;
        }
        let k = sizes.len();
        let mut size = 0;
        comp[s] = k;
        stack.push(s);
        while let Some(u) = stack.pop() {
            size += 1;
            let ins = if t.is_directed() {
                t.in_neighbors(u)
            } else {
                &[][..]
            };
            for &(w, _) in t.neighbors(u).iter().chain(ins) {
                if alive[w] && comp[w] == usize::MAX {
                    comp[w] = k;
                    stack.push(w);
                }
            }
        }
        sizes.push(size);
    }
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    order.sort_by(|&a, &b| sizes[b].cmp(&sizes[a]).then(a.cmp(&b)));
    let mut rank = vec![0; sizes.len()];
    for (r, &c) in order.iter().enumerate() {
        rank[c] = r;
    }
    ComponentReport {
        component_of: comp
            .iter()
            .map(|&c| if c == usize::MAX { c } else { rank[c] })
            .collect(),
        sizes: order.iter().map(|&c| sizes[c]).collect(),
    }
}

/// Strongly connected components (Tarjan, iterative).
pub fn strong_components(t: &Topology) -> ComponentReport {
    if !t.is_directed() {
        return components(t);
    }
    let n = t.node_count();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut k = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let (u, i) = *top;
            let nb = t.neighbors(u);
            if i < nb.len() {
                top.1 += 1;
                let w = nb[i].0;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[u] = low[u].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[u]);
                }
                if low[u] == index[u] {
                    while let Some(w) = stack.pop() {
                        on_stack[w] = false;
                        comp[w] = k;
                        if w == u {
                            break;
                        }
                    }
                    k += 1;
                }
            }
        }
    }
    ComponentReport::from_raw(comp, k)
}

pub fn is_connected(t: &Topology) -> bool {
    components(t).count() == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let k3 = Topology::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = components(&k3);
        assert_eq!((r.count(), r.largest()), (1, 3));

        let t = Topology::undirected(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let r = components(&t);
        assert_eq!(r.sizes, vec![3, 1]);

        let t = Topology::undirected(4, &[]).unwrap();
        let r = components(&t);
        assert_eq!((r.count(), r.largest()), (4, 1));
    }

    #[test]
    fn strong_vs_weak() {
        let t = Topology::directed(4, &[(0, 1), (1, 2), (2, 0), (2, 3)]).unwrap();
        assert_eq!(components(&t).sizes, vec![4]);
        assert_eq!(strong_components(&t).sizes, vec![3, 1]);
    }

    #[test]
    fn masked() {
        let t = Topology::undirected(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let r = components_masked(&t, &[true, true, false, true, true]);
        assert_eq!(r.sizes, vec![2, 2]);
        assert_eq!(r.component_of[2], usize::MAX);
    }
}
