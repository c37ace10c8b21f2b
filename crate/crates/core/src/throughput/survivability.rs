//! Share of delivered flow under random link or node failures, with
//! min-hop rerouting and capacity throttling.

use std::collections::{BTreeMap, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Demand {
    pub source: usize,
    pub target: usize,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureEntity {
    Link,
    Node,
}

/// Independent failure probability per link (by edge id) or per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureModel {
    pub entity: FailureEntity,
    pub probability: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Evaluation {
    /// All failure states (at most 20 uncertain entities).
    Exact,
    /// States with at most `order` simultaneous failures.
    UpToOrder {
        order: usize,
    },
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Survivability {
    /// (x, S(x)) sorted by x.
    pub distribution: Vec<(f64, f64)>,
    /// E[X] = Σ x·S(x) over the evaluated states.
    pub expected: f64,
    /// Probability mass of states not evaluated (UpToOrder only).
    pub unenumerated_mass: f64,
    pub states: usize,
}

const EXACT_CAP: usize = 20;

/// Delivered share X for one failure state.
pub fn delivered_share(
    t: &Topology,
    demands: &[Demand],
    node_up: &[bool],
    link_up: &[bool],
) -> f64 {
    let (load, paths) = route(t, demands, node_up, link_up);
    let total: f64 = demands.iter().map(|d| d.amount).sum();
    if total == 0.0 {
        return 1.0;
    }
    let mut got = 0.0;
    for (d, p) in demands.iter().zip(&paths) {
        if let Some(edges) = p {
            let share = edges
                .iter()
                .map(|&id| (t.weight(id) / load[id]).min(1.0))
                .fold(1.0, f64::min);
            got += d.amount * share;
        }
    }
    got / total
}

/// Link loads with every node and link up.
pub fn baseline_load(t: &Topology, demands: &[Demand]) -> Vec<f64> {
    route(
        t,
        demands,
        &vec![true; t.node_count()],
        &vec![true; t.edge_count()],
    )
    .0
}

/// Min-hop path per demand (lowest-id parent) and the resulting link loads.
fn route(
    t: &Topology,
    demands: &[Demand],
    node_up: &[bool],
    link_up: &[bool],
) -> (Vec<f64>, Vec<Option<Vec<usize>>>) {
    let n = t.node_count();
    let mut load = vec![0.0; t.edge_count()];
    let mut trees: BTreeMap<usize, Vec<Option<(usize, usize)>>> = BTreeMap::new();
    let mut paths = Vec::with_capacity(demands.len());
    for d in demands {
        if !node_up[d.source] || !node_up[d.target] {
            paths.push(None);
            continue;
        }
        let parent = trees.entry(d.source).or_insert_with(|| {
            let mut parent = vec![None; n];
            let mut seen = vec![false; n];
            seen[d.source] = true;
            let mut q = VecDeque::from([d.source]);
            while let Some(u) = q.pop_front() {
                for &(w, id) in t.neighbors(u) {
                    if !seen[w] && node_up[w] && link_up[id] {
                        seen[w] = true;
                        parent[w] = Some((u, id));
                        q.push_back(w);
                    }
                }
            }
            parent
        });
        if d.source == d.target {
            paths.push(Some(Vec::new()));
            continue;
        }
        if parent[d.target].is_none() {
            paths.push(None);
            continue;
        }
        let mut edges = Vec::new();
        let mut x = d.target;
        while let Some((p, id)) = parent[x] {
            edges.push(id);
            x = p;
        }
        for &id in &edges {
            load[id] += d.amount;
        }
        paths.push(Some(edges));
    }
    (load, paths)
}

fn validate(t: &Topology, demands: &[Demand], model: &FailureModel) -> Result<()> {
    let n = t.node_count();
    let expect = match model.entity {
        FailureEntity::Link => t.edge_count(),
        FailureEntity::Node => n,
    };
    if model.probability.len() != expect {
        return Err(Error::param(format!(
            "expected {expect} failure probabilities, got {}",
            model.probability.len()
        )));
    }
    if model.probability.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::param("failure probabilities must lie in [0,1]"));
    }
    for d in demands {
        if d.source >= n || d.target >= n || !(d.amount >= 0.0) {
            return Err(Error::param(format!("invalid demand {d:?}")));
        }
    }
    let (load, _) = route(t, demands, &vec![true; n], &vec![true; t.edge_count()]);
    if let Some(id) = (0..load.len()).find(|&id| load[id] > t.weight(id) * (1.0 + 1e-12)) {
        return Err(Error::BaselineOverload(format!(
            "link {:?} carries {} with capacity {}",
            t.edge(id),
            load[id],
            t.weight(id)
        )));
    }
    Ok(())
}

/// Distribution of the delivered share X over failure states.
pub fn survivability_failures(
    t: &Topology,
    demands: &[Demand],
    model: &FailureModel,
    eval: Evaluation,
) -> Result<Survivability> {
    validate(t, demands, model)?;
    let n = t.node_count();
    let p = &model.probability;
    let always: Vec<usize> = (0..p.len()).filter(|&i| p[i] >= 1.0).collect();
    let uncertain: Vec<usize> = (0..p.len()).filter(|&i| p[i] > 0.0 && p[i] < 1.0).collect();
    let evaluate = |failed: &[usize]| -> f64 {
        let mut node_up = vec![true; n];
        let mut link_up = vec![true; t.edge_count()];
        for &i in always.iter().chain(failed) {
            match model.entity {
                FailureEntity::Link => link_up[i] = false,
                FailureEntity::Node => node_up[i] = false,
            }
        }
        delivered_share(t, demands, &node_up, &link_up)
    };
    let prob_of = |mask: &[bool]| -> f64 {
        uncertain
            .iter()
            .zip(mask)
            .map(|(&i, &f)| if f { p[i] } else { 1.0 - p[i] })
            .product()
    };
    let mut dist: BTreeMap<u64, (f64, f64)> = BTreeMap::new();
    let mut add = |x: f64, w: f64| {
        let key = (x * 1e12).round() as u64;
        let e = dist.entry(key).or_insert((x, 0.0));
        e.1 += w;
    };
    let mut states = 0;
    let mut covered = 0.0;
    match eval {
        Evaluation::Exact | Evaluation::UpToOrder { .. } => {
            let k = uncertain.len();
            let order = match eval {
                Evaluation::UpToOrder { order } => order.min(k),
                _ => {
                    if k > EXACT_CAP {
                        return Err(Error::TooLarge {
                            what: "uncertain failure entities",
                            actual: k,
                            cap: EXACT_CAP,
                        });
                    }
                    k
                }
            };
            let mut mask = vec![false; k];
            for size in 0..=order {
                for combo in Combinations::new(k, size) {
                    mask.iter_mut().for_each(|m| *m = false);
                    combo.iter().for_each(|&c| mask[c] = true);
                    let failed: Vec<usize> = combo.iter().map(|&c| uncertain[c]).collect();
                    let w = prob_of(&mask);
                    add(evaluate(&failed), w);
                    covered += w;
                    states += 1;
                }
            }
        }
        Evaluation::MonteCarlo { samples, seed } => {
            if samples == 0 {
                return Err(Error::param("sample count must be positive"));
            }
            let mut r = rng(seed);
            let w = 1.0 / samples as f64;
            for _ in 0..samples {
                let failed: Vec<usize> = uncertain
                    .iter()
                    .copied()
                    .filter(|&i| r.gen::<f64>() < p[i])
                    .collect();
                add(evaluate(&failed), w);
            }
            covered = 1.0;
            states = samples;
        }
    }
    let distribution: Vec<(f64, f64)> = dist.into_values().collect();
    let expected = distribution.iter().map(|(x, s)| x * s).sum();
    Ok(Survivability {
        distribution,
        expected,
        unenumerated_mass: (1.0 - covered).max(0.0),
        states,
    })
}

/// Lexicographic k-subsets of 0..n.
struct Combinations {
    n: usize,
    cur: Option<Vec<usize>>,
}

impl Combinations {
    fn new(n: usize, k: usize) -> Self {
        Combinations {
            n,
            cur: (k <= n).then(|| (0..k).collect()),
        }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.cur.clone()?;
        let c = self.cur.as_mut().unwrap();
        let k = c.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.cur = None;
                break;
            }
            i -= 1;
            if c[i] < self.n - k + i {
                c[i] += 1;
                for j in i + 1..k {
                    c[j] = c[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::complete;

    fn one(s: usize, t: usize) -> Vec<Demand> {
        vec![Demand {
            source: s,
            target: t,
            amount: 1.0,
        }]
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(5, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn no_failures() {
        let t = complete(3).unwrap();
        let m = FailureModel {
            entity: FailureEntity::Link,
            probability: vec![0.0; 3],
        };
        let s = survivability_failures(&t, &one(0, 1), &m, Evaluation::Exact).unwrap();
        assert_eq!(s.distribution, vec![(1.0, 1.0)]);
        assert_eq!(s.expected, 1.0);
    }

    #[test]
    fn single_link() {
        let t = Topology::undirected(2, &[(0, 1)]).unwrap();
        let m = FailureModel {
            entity: FailureEntity::Link,
            probability: vec![0.3],
        };
        let s = survivability_failures(&t, &one(0, 1), &m, Evaluation::Exact).unwrap();
        assert!((s.expected - 0.7).abs() < 1e-12);
    }

    #[test]
    fn triangle_reroutes_single_failures() {
        let t = complete(3).unwrap();
        let m = FailureModel {
            entity: FailureEntity::Link,
            probability: vec![0.1; 3],
        };
        let s =
            survivability_failures(&t, &one(0, 1), &m, Evaluation::UpToOrder { order: 1 }).unwrap();
        assert_eq!(s.distribution.len(), 1);
        assert_eq!(s.distribution[0].0, 1.0);
        assert_eq!(s.states, 4);
        assert!(s.unenumerated_mass > 0.0);
    }

    #[test]
    fn throttled_when_rerouted_onto_shared_link() {
        // two unit demands share link 1-2 after 0-2 fails
        let t = Topology::undirected(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let d = vec![
            Demand {
                source: 0,
                target: 2,
                amount: 1.0,
            },
            Demand {
                source: 1,
                target: 2,
                amount: 1.0,
            },
        ];
        let x = delivered_share(&t, &d, &[true; 3], &[true, true, false]);
        assert!((x - 0.5).abs() < 1e-12);
        let m = FailureModel {
            entity: FailureEntity::Link,
            probability: vec![0.0; 3],
        };
        let heavy = vec![Demand {
            source: 0,
            target: 1,
            amount: 2.0,
        }];
        assert!(matches!(
            survivability_failures(&t, &heavy, &m, Evaluation::Exact),
            Err(Error::BaselineOverload(_))
        ));
    }

    #[test]
    fn monte_carlo_close_to_exact() {
        let t = Topology::undirected(2, &[(0, 1)]).unwrap();
        let m = FailureModel {
            entity: FailureEntity::Link,
            probability: vec![0.3],
        };
        let s = survivability_failures(
            &t,
            &one(0, 1),
            &m,
            Evaluation::MonteCarlo {
                samples: 20000,
                seed: 5,
            },
        )
        .unwrap();
        assert!((s.expected - 0.7).abs() < 0.02);
    }
}
