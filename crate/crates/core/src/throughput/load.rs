//! Effective load over sampled communicating pairs, and Motter–Lai
//! capacities.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::betweenness::{accumulate, node_betweenness, Masks};
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::rng;

/// Ordered communicating pairs grouped by source: `targets[s]` is sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSet {
    pub targets: Vec<Vec<usize>>,
}

impl PairSet {
    /// Every ordered pair.
    pub fn all(v: usize) -> Self {
        PairSet {
            targets: (0..v)
                .map(|s| (0..v).filter(|&t| t != s).collect())
                .collect(),
        }
    }

    /// A uniform sample of `round(a·v(v−1))` ordered pairs, at least one.
    pub fn sample(v: usize, a: f64, seed: u64) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(Error::param(format!(
                "communicating fraction {a} outside (0,1]"
            )));
        }
        if v < 2 {
            return Err(Error::param("need at least two nodes"));
        }
        let total = v * (v - 1);
        let m = ((a * total as f64).round() as usize).clamp(1, total);
        let mut targets = vec![Vec::new(); v];
        let mut r = rng(seed);
        let mut picked = index::sample(&mut r, total, m).into_vec();
        picked.sort_unstable();
        for p in picked {
            let s = p / (v - 1);
            let k = p % (v - 1);
            targets[s].push(if k >= s { k + 1 } else { k });
        }
        Ok(PairSet { targets })
    }

    pub fn len(&self) -> usize {
        self.targets.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// σ_Λ(u): transit load of every node for the pairs in `pairs`, flows split
/// equally over all shortest paths. Dead nodes carry nothing and pairs with a
/// dead endpoint are skipped.
pub fn pair_load(t: &Topology, pairs: &PairSet, alive: Option<&[bool]>) -> Vec<f64> {
    let n = t.node_count();
    let sources: Vec<usize> = (0..n)
        .filter(|&s| !pairs.targets[s].is_empty() && alive.is_none_or(|a| a[s]))
        .collect();
    let m = Masks {
        nodes: alive,
        edges: None,
    };
    let term = |s: usize, w: usize| -> f64 {
        if pairs.targets[s].binary_search(&w).is_ok() {
            1.0
        } else {
            0.0
        }
    };
    let (mut load, _) = accumulate(t, &sources, false, m, false, &term);
    for (u, l) in load.iter_mut().enumerate() {
        if alive.is_some_and(|a| !a[u]) {
            *l = 0.0;
        }
    }
    load
}

/// Effective-load statistics over an ensemble of pair samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveLoad {
    /// ⟨λ(u)⟩ per node.
    pub mean: Vec<f64>,
    /// Standard error of the mean per node.
    pub stderr: Vec<f64>,
    /// λ(u) per ensemble member: `samples[k][u]`.
    pub samples: Vec<Vec<f64>>,
}

/// Samples `ensemble_size` communicating sets of fraction `a` (seeds
/// `seed, seed+1, …`) and records node loads for each.
pub fn effective_load(
    t: &Topology,
    a: f64,
    ensemble_size: usize,
    seed: u64,
) -> Result<EffectiveLoad> {
    if ensemble_size == 0 {
        return Err(Error::param("ensemble size must be positive"));
    }
    let v = t.node_count();
    let mut samples = Vec::with_capacity(ensemble_size);
    for k in 0..ensemble_size {
        let pairs = PairSet::sample(v, a, seed.wrapping_add(k as u64))?;
        samples.push(pair_load(t, &pairs, None));
    }
    let kf = ensemble_size as f64;
    let mean: Vec<f64> = (0..v)
        .map(|u| samples.iter().map(|s| s[u]).sum::<f64>() / kf)
        .collect();
    let stderr = (0..v)
        .map(|u| {
            if ensemble_size < 2 {
                return 0.0;
            }
            let var = samples
                .iter()
                .map(|s| (s[u] - mean[u]).powi(2))
                .sum::<f64>()
                / (kf - 1.0);
            (var / kf).sqrt()
        })
        .collect();
    Ok(EffectiveLoad {
        mean,
        stderr,
        samples,
    })
}

/// C_u = (1 + α)·B_u from the intact-network betweenness.
pub fn motter_lai_capacities(t: &Topology, alpha: f64) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) {
        return Err(Error::param(format!("alpha {alpha} must be non-negative")));
    }
    Ok(node_betweenness(t, false)?
        .into_iter()
        .map(|b| (1.0 + alpha) * b)
        .collect())
}
