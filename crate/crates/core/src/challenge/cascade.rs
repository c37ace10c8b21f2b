//! Overload cascades: remove a trigger, recompute loads, drop every node over
//! capacity in one synchronous wave, repeat until stable.

use serde::{Deserialize, Serialize};

use super::{
    ChallengeScenario, ChallengeTrace, Entity, Recorder, State, Strategy, TrackedMetric,
    UndefinedPolicy,
};
use crate::error::{Error, Result};
use crate::graph::Topology;
use crate::throughput::{node_betweenness_masked, pair_load, Masks, PairSet};

/// Relative slack before a node counts as overloaded.
const OVERLOAD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum CapacityRule {
    /// C_u = (1 + α)·L_u(0).
    MotterLai {
        alpha: f64,
    },
    Explicit {
        capacities: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trigger {
    /// The node with the largest initial load (lowest id on ties).
    #[default]
    HighestLoad,
    Node(usize),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LoadMetric {
    /// Shortest-path node betweenness on the surviving graph.
    #[default]
    Betweenness,
    /// Load from a fixed sample of communicating ordered pairs.
    EffectiveLoad { fraction: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeConfig {
    pub capacity: CapacityRule,
    #[serde(default)]
    pub trigger: Trigger,
    #[serde(default)]
    pub load: LoadMetric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeOutcome {
    pub trace: ChallengeTrace,
    pub trigger: usize,
    /// Nodes lost beyond the trigger.
    pub avalanche: usize,
    /// Nodes removed in each wave after the trigger.
    pub waves: Vec<usize>,
}

/// Runs a cascade tracking |V_L|/v after every wave.
pub fn run_cascade(t: &Topology, cfg: &CascadeConfig) -> Result<CascadeOutcome> {
    let sc = ChallengeScenario::new(Strategy::Cascade(cfg.clone()));
    cascade_trace(t, cfg, &sc)
}

pub(crate) fn cascade_trace(
    t: &Topology,
    cfg: &CascadeConfig,
    sc: &ChallengeScenario,
) -> Result<CascadeOutcome> {
    let n = t.node_count();
    let pairs = match cfg.load {
        LoadMetric::Betweenness => None,
        LoadMetric::EffectiveLoad { fraction, seed } => Some(PairSet::sample(n, fraction, seed)?),
    };
    let loads = |alive: &[bool]| -> Vec<f64> {
        match &pairs {
            None => node_betweenness_masked(
                t,
                false,
                Masks {
                    nodes: Some(alive),
                    edges: None,
                },
            ),
            Some(p) => pair_load(t, p, Some(alive)),
        }
    };
    let all = vec![true; n];
    let l0 = loads(&all);
    let cap: Vec<f64> = match &cfg.capacity {
        CapacityRule::MotterLai { alpha } => {
            if !(*alpha >= 0.0 && alpha.is_finite()) {
                return Err(Error::param(format!("alpha {alpha} must be non-negative")));
            }
            l0.iter().map(|l| (1.0 + alpha) * l).collect()
        }
        CapacityRule::Explicit { capacities } => {
            if capacities.len() != n {
                return Err(Error::param(format!(
                    "{} capacities for {} nodes",
                    capacities.len(),
                    n
                )));
            }
            if capacities.iter().any(|c| !(*c >= 0.0)) {
                return Err(Error::param("capacities must be non-negative"));
            }
            capacities.clone()
        }
    };
    let over = |u: usize, l: f64| l > cap[u] * (1.0 + OVERLOAD_TOL) + OVERLOAD_TOL;
    if let Some(u) = (0..n).find(|&u| over(u, l0[u])) {
        return Err(Error::BaselineOverload(format!(
            "node {u} carries {} above capacity {}",
            l0[u], cap[u]
        )));
    }
    let trigger = match cfg.trigger {
        Trigger::HighestLoad => super::descending_order(&l0)[0],
        Trigger::Node(u) => {
            t.check_node(u)?;
            u
        }
    };
    let policy: UndefinedPolicy = sc.undefined;
    let mut rec = Recorder::new(t, &sc.tracked, &sc.schedule, policy, Entity::Node)?;
    let baseline = rec.snapshot(t)?;
    let mut state = State::new(t, Entity::Node);
    state.alive[trigger] = false;
    rec.record(vec![trigger], || state.view().0)?;
    let mut waves = Vec::new();
    loop {
        let l = loads(&state.alive);
        let wave: Vec<usize> = (0..n)
            .filter(|&u| state.alive[u] && over(u, l[u]))
            .collect();
        if wave.is_empty() {
            break;
        }
        wave.iter().for_each(|&u| state.alive[u] = false);
        waves.push(wave.len());
        rec.record(wave, || state.view().0)?;
    }
    let (final_view, _) = state.view();
    let trace = rec.finish(Entity::Node, baseline, &final_view, None)?;
    Ok(CascadeOutcome {
        avalanche: waves.iter().sum(),
        trigger,
        waves,
        trace,
    })
}

impl CascadeOutcome {
    /// |V_L|/v after the cascade settles, if tracked.
    pub fn final_giant_fraction(&self) -> Option<f64> {
        match self
            .trace
            .summary
            .metrics
            .get(TrackedMetric::GiantFraction.key())
        {
            Some(crate::metric::Scalar::Value(x)) => Some(*x),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn path_end_no_cascade() {
        let cfg = CascadeConfig {
            capacity: CapacityRule::MotterLai { alpha: 0.0 },
            trigger: Trigger::Node(0),
            load: LoadMetric::Betweenness,
        };
        let o = run_cascade(&path(3).unwrap(), &cfg).unwrap();
        assert_eq!(o.avalanche, 0);
        assert_eq!(o.trace.steps.len(), 1);
    }

    #[test]
    fn huge_alpha_no_avalanche() {
        let t = barabasi_albert(200, 2, 5).unwrap();
        let cfg = CascadeConfig {
            capacity: CapacityRule::MotterLai { alpha: 1e6 },
            trigger: Trigger::HighestLoad,
            load: LoadMetric::Betweenness,
        };
        let o = run_cascade(&t, &cfg).unwrap();
        assert_eq!(o.avalanche, 0);
        assert_eq!(
            o.trigger,
            crate::challenge::descending_order(
                &crate::throughput::node_betweenness(&t, false).unwrap()
            )[0]
        );
    }

    #[test]
    fn tight_capacity_cascades() {
        // C6 plus the chord 0–3: without node 0 all traffic runs along a path
        let t = Topology::undirected(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)])
            .unwrap();
        let cfg = CascadeConfig {
            capacity: CapacityRule::MotterLai { alpha: 0.0 },
            trigger: Trigger::Node(0),
            load: LoadMetric::Betweenness,
        };
        let o = run_cascade(&t, &cfg).unwrap();
        assert!(o.avalanche > 0);
        assert_eq!(o.waves.iter().sum::<usize>(), o.avalanche);
    }

    #[test]
    fn baseline_overload_rejected() {
        let cfg = CascadeConfig {
            capacity: CapacityRule::Explicit {
                capacities: vec![0.0; 3],
            },
            trigger: Trigger::HighestLoad,
            load: LoadMetric::Betweenness,
        };
        assert!(matches!(
            run_cascade(&path(3).unwrap(), &cfg),
            Err(Error::BaselineOverload(_))
        ));
    }

    #[test]
    fn effective_load_variant() {
        let t = barabasi_albert(80, 2, 1).unwrap();
        let cfg = CascadeConfig {
            capacity: CapacityRule::MotterLai { alpha: 0.2 },
            trigger: Trigger::HighestLoad,
            load: LoadMetric::EffectiveLoad {
                fraction: 0.3,
                seed: 4,
            },
        };
        let a = run_cascade(&t, &cfg).unwrap();
        let b = run_cascade(&t, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
