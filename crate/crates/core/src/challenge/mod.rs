//! Challenge engine: random failures, targeted attacks, geographic events and
//! overload cascades, each producing a degradation trace.
//!
//! All fractions use the original node (or edge) count.

mod cascade;
mod tracked;

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{nodes_in_region, GeoEvent};
use crate::graph::Topology;
use crate::metric::Scalar;
use crate::rng;

pub use cascade::{run_cascade, CapacityRule, CascadeConfig, CascadeOutcome, LoadMetric, Trigger};
pub use tracked::{descending_order, RankKey, TrackedMetric};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entity {
    #[default]
    Node,
    Edge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    /// Uniformly random removal order; stops after `count` entities or the
    /// given fraction (rounded).
    RandomFailure {
        #[serde(default)]
        entity: Entity,
        #[serde(default)]
        fraction: Option<f64>,
        #[serde(default)]
        count: Option<usize>,
    },
    /// Removal by decreasing `metric`. Adaptive attacks re-rank after every
    /// removal. Without a limit every entity is removed.
    Targeted {
        metric: String,
        #[serde(default = "default_true")]
        adaptive: bool,
        #[serde(default)]
        fraction: Option<f64>,
        #[serde(default)]
        count: Option<usize>,
    },
    /// Each event strikes independently with its probability; struck regions
    /// are removed as one batch, in input order.
    Geographic {
        events: Vec<GeoEvent>,
    },
    Cascade(CascadeConfig),
}

fn default_true() -> bool {
    true
}

/// What to do when a tracked metric is undefined mid-run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UndefinedPolicy {
    /// Store an explicit undefined marker.
    #[default]
    Record,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeScenario {
    pub strategy: Strategy,
    #[serde(default = "default_tracked")]
    pub tracked: Vec<String>,
    /// Removal fractions at which snapshots are taken; empty means every
    /// step.
    #[serde(default)]
    pub schedule: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub undefined: UndefinedPolicy,
}

fn default_tracked() -> Vec<String> {
    vec![TrackedMetric::GiantFraction.key().to_string()]
}

impl ChallengeScenario {
    pub fn new(strategy: Strategy) -> Self {
        ChallengeScenario {
            strategy,
            tracked: default_tracked(),
            schedule: Vec::new(),
            seed: 0,
            undefined: UndefinedPolicy::Record,
        }
    }

    pub fn tracking(mut self, keys: &[&str]) -> Self {
        self.tracked = keys.iter().map(|k| k.to_string()).collect();
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_schedule(mut self, schedule: Vec<f64>) -> Self {
        self.schedule = schedule;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    /// Entities removed in this step (a batch for geographic events and
    /// cascade waves).
    pub removed: Vec<usize>,
    /// Cumulative removed fraction of the original entity count.
    pub fraction: f64,
    /// Tracked metric values, present on scheduled steps.
    pub metrics: Option<BTreeMap<String, Scalar>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub removed: usize,
    pub fraction: f64,
    pub metrics: BTreeMap<String, Scalar>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChallengeTrace {
    pub entity: Entity,
    /// Original number of entities of the removed kind.
    pub total: usize,
    pub baseline: BTreeMap<String, Scalar>,
    pub steps: Vec<StepRecord>,
    /// Fixed removal ranking of a non-adaptive attack.
    pub initial_order: Option<Vec<usize>>,
    pub summary: TraceSummary,
}

impl ChallengeTrace {
    /// (fraction removed, value) points for one tracked metric, starting
    /// with the baseline at 0. Steps without a snapshot are skipped.
    pub fn curve(&self, key: &str) -> Vec<(f64, Scalar)> {
        let mut out = Vec::new();
        if let Some(x) = self.baseline.get(key) {
            out.push((0.0, x.clone()));
        }
        for s in &self.steps {
            if let Some(x) = s.metrics.as_ref().and_then(|m| m.get(key)) {
                out.push((s.fraction, x.clone()));
            }
        }
        out
    }

    /// Number of removals until `key` first drops to `threshold` or below.
    pub fn removals_until_below(&self, key: &str, threshold: f64) -> Option<usize> {
        let mut removed = 0;
        for s in &self.steps {
            removed += s.removed.len();
            if let Some(Scalar::Value(x)) = s.metrics.as_ref().and_then(|m| m.get(key)) {
                if *x <= threshold {
                    return Some(removed);
                }
            }
        }
        None
    }
}

/// Removal state over the original topology.
pub(crate) struct State<'a> {
    t: &'a Topology,
    entity: Entity,
    pub(crate) alive: Vec<bool>,
}

impl<'a> State<'a> {
    pub(crate) fn new(t: &'a Topology, entity: Entity) -> Self {
        let len = match entity {
            Entity::Node => t.node_count(),
            Entity::Edge => t.edge_count(),
        };
        State {
            t,
            entity,
            alive: vec![true; len],
        }
    }

    /// Surviving graph plus the map from its node or edge ids back to the
    /// original ones.
    pub(crate) fn view(&self) -> (Topology, Vec<usize>) {
        match self.entity {
            Entity::Node => self.t.induced(&self.alive),
            Entity::Edge => {
                let removed: Vec<bool> = self.alive.iter().map(|a| !a).collect();
                self.t.without_edges(&removed)
            }
        }
    }
}

pub(crate) struct Recorder<'a> {
    tracked: Vec<TrackedMetric>,
    schedule: &'a [f64],
    policy: UndefinedPolicy,
    v0: usize,
    e0: usize,
    total: usize,
    removed: usize,
    next_checkpoint: usize,
    steps: Vec<StepRecord>,
}

impl<'a> Recorder<'a> {
    pub(crate) fn new(
        t: &Topology,
        tracked: &[String],
        schedule: &'a [f64],
        policy: UndefinedPolicy,
        entity: Entity,
    ) -> Result<Self> {
        let tracked = tracked
            .iter()
            .map(|k| TrackedMetric::parse(k))
            .collect::<Result<Vec<_>>>()?;
        if schedule.iter().any(|f| !(*f > 0.0 && *f <= 1.0))
            || schedule.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(Error::param(
                "schedule fractions must be strictly increasing within (0, 1]",
            ));
        }
        let total = match entity {
            Entity::Node => t.node_count(),
            Entity::Edge => t.edge_count(),
        };
        Ok(Recorder {
            tracked,
            schedule,
            policy,
            v0: t.node_count(),
            e0: t.edge_count(),
            total,
            removed: 0,
            next_checkpoint: 0,
            steps: Vec::new(),
        })
    }

    pub(crate) fn snapshot(&self, view: &Topology) -> Result<BTreeMap<String, Scalar>> {
        let mut out = BTreeMap::new();
        for m in &self.tracked {
            let x = match m.evaluate(view, self.v0, self.e0) {
                Ok(x) => Scalar::Value(x),
                Err(Error::Undefined(why)) if self.policy == UndefinedPolicy::Record => {
                    Scalar::undefined(why)
                }
                Err(e) => return Err(e),
            };
            out.insert(m.key().to_string(), x);
        }
        Ok(out)
    }

    fn fraction(&self) -> f64 {
        self.removed as f64 / self.total as f64
    }

    /// Records one removal step; `view` is only built when a snapshot is due.
    pub(crate) fn record(
        &mut self,
        removed: Vec<usize>,
        view: impl FnOnce() -> Topology,
    ) -> Result<()> {
        self.removed += removed.len();
        let fraction = self.fraction();
        let due = if self.schedule.is_empty() {
            true
        } else {
            let mut hit = false;
            while self.next_checkpoint < self.schedule.len()
                && self.schedule[self.next_checkpoint] <= fraction + 1e-12
            {
                self.next_checkpoint += 1;
                hit = true;
            }
            hit
        };
        let metrics = if due {
            Some(self.snapshot(&view())?)
        } else {
            None
        };
        self.steps.push(StepRecord {
            step: self.steps.len() + 1,
            removed,
            fraction,
            metrics,
        });
        Ok(())
    }

    pub(crate) fn finish(
        self,
        entity: Entity,
        baseline: BTreeMap<String, Scalar>,
        final_view: &Topology,
        initial_order: Option<Vec<usize>>,
    ) -> Result<ChallengeTrace> {
        let metrics = self.snapshot(final_view)?;
        let fraction = if self.total == 0 {
            0.0
        } else {
            self.fraction()
        };
        Ok(ChallengeTrace {
            entity,
            total: self.total,
            baseline,
            summary: TraceSummary {
                removed: self.removed,
                fraction,
                metrics,
            },
            steps: self.steps,
            initial_order,
        })
    }
}

fn limit(
    total: usize,
    fraction: Option<f64>,
    count: Option<usize>,
    default: Option<usize>,
) -> Result<usize> {
    match (fraction, count) {
        (Some(_), Some(_)) => Err(Error::param("give either a fraction or a count, not both")),
        (Some(f), None) => {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::param(format!("fraction {f} outside [0, 1]")));
            }
            Ok(((f * total as f64).round() as usize).min(total))
        }
        (None, Some(c)) => Ok(c.min(total)),
        (None, None) => {
            default.ok_or_else(|| Error::param("random failure needs a fraction or a count"))
        }
    }
}

/// Runs `scenario` on `t`. Deterministic for a fixed seed.
pub fn run_challenge(t: &Topology, scenario: &ChallengeScenario) -> Result<ChallengeTrace> {
    if let Strategy::Cascade(cfg) = &scenario.strategy {
        return cascade::cascade_trace(t, cfg, scenario).map(|o| o.trace);
    }
    let entity = match &scenario.strategy {
        Strategy::RandomFailure { entity, .. } => *entity,
        Strategy::Targeted { metric, .. } => RankKey::parse(metric)?.entity(),
        _ => Entity::Node,
    };
    let mut rec = Recorder::new(
        t,
        &scenario.tracked,
        &scenario.schedule,
        scenario.undefined,
        entity,
    )?;
    let baseline = rec.snapshot(t)?;
    let mut state = State::new(t, entity);
    let total = state.alive.len();
    let mut initial_order = None;
    match &scenario.strategy {
        Strategy::RandomFailure {
            fraction, count, ..
        } => {
            let k = limit(total, *fraction, *count, None)?;
            let mut order: Vec<usize> = (0..total).collect();
            order.shuffle(&mut rng(scenario.seed));
            for &u in &order[..k] {
                state.alive[u] = false;
                rec.record(vec![u], || state.view().0)?;
            }
        }
        Strategy::Targeted {
            metric,
            adaptive,
            fraction,
            count,
        } => {
            let key = RankKey::parse(metric)?;
            let k = limit(total, *fraction, *count, Some(total))?;
            if *adaptive {
                for _ in 0..k {
                    let (view, old_of) = state.view();
                    let scores = key.scores(&view)?;
                    let Some(&best) = descending_order(&scores).first() else {
                        break;
                    };
                    let u = old_of[best];
                    state.alive[u] = false;
                    rec.record(vec![u], || state.view().0)?;
                }
            } else {
                let order = descending_order(&key.scores(t)?);
                for &u in &order[..k] {
                    state.alive[u] = false;
                    rec.record(vec![u], || state.view().0)?;
                }
                initial_order = Some(order);
            }
        }
        Strategy::Geographic { events } => {
            let mut r = rng(scenario.seed);
            for e in events {
                if !(0.0..=1.0).contains(&e.probability) {
                    return Err(Error::param("event probability outside [0, 1]"));
                }
                let hit = nodes_in_region(t, &e.region)?;
                if r.gen::<f64>() >= e.probability {
                    continue;
                }
                let batch: Vec<usize> = hit.into_iter().filter(|&u| state.alive[u]).collect();
                if batch.is_empty() {
                    continue;
                }
                batch.iter().for_each(|&u| state.alive[u] = false);
                rec.record(batch, || state.view().0)?;
            }
        }
        Strategy::Cascade(_) => unreachable!(),
    }
    let (final_view, _) = state.view();
    rec.finish(entity, baseline, &final_view, initial_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo::Region;
    use crate::graph::generate::*;
    use crate::graph::CoordKind;

    fn value(m: &Option<BTreeMap<String, Scalar>>, key: &str) -> f64 {
        match m.as_ref().unwrap()[key] {
            Scalar::Value(x) => x,
            _ => panic!("undefined"),
        }
    }

    #[test]
    fn adaptive_degree_on_star() {
        let sc = ChallengeScenario::new(Strategy::Targeted {
            metric: "degree".into(),
            adaptive: true,
            fraction: None,
            count: Some(1),
        });
        let tr = run_challenge(&star(5).unwrap(), &sc).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.steps[0].removed, vec![0]);
        assert_eq!(tr.steps[0].fraction, 0.2);
        assert_eq!(value(&tr.steps[0].metrics, "giant_fraction"), 0.2);
    }

    #[test]
    fn random_zero_is_empty() {
        let sc = ChallengeScenario::new(Strategy::RandomFailure {
            entity: Entity::Node,
            fraction: Some(0.0),
            count: None,
        });
        let tr = run_challenge(&complete(5).unwrap(), &sc).unwrap();
        assert!(tr.steps.is_empty());
        assert_eq!(tr.curve("giant_fraction"), vec![(0.0, Scalar::Value(1.0))]);
    }

    #[test]
    fn non_adaptive_order_is_initial_sort() {
        let t = barabasi_albert(60, 2, 1).unwrap();
        let sc = ChallengeScenario::new(Strategy::Targeted {
            metric: "degree".into(),
            adaptive: false,
            fraction: Some(0.5),
            count: None,
        });
        let tr = run_challenge(&t, &sc).unwrap();
        let order = tr.initial_order.clone().unwrap();
        let removed: Vec<usize> = tr.steps.iter().flat_map(|s| s.removed.clone()).collect();
        assert_eq!(removed, order[..30]);
        let deg: Vec<f64> = (0..60).map(|u| t.degree(u) as f64).collect();
        assert_eq!(order, descending_order(&deg));
    }

    #[test]
    fn edge_attack_and_schedule() {
        let t = cycle(6).unwrap();
        let sc = ChallengeScenario::new(Strategy::Targeted {
            metric: "edge_betweenness".into(),
            adaptive: true,
            fraction: None,
            count: None,
        })
        .tracking(&["giant_fraction", "edge_fraction"])
        .with_schedule(vec![0.5, 1.0]);
        let tr = run_challenge(&t, &sc).unwrap();
        assert_eq!(tr.entity, Entity::Edge);
        assert_eq!(tr.steps.len(), 6);
        let snaps: Vec<usize> = tr
            .steps
            .iter()
            .filter(|s| s.metrics.is_some())
            .map(|s| s.step)
            .collect();
        assert_eq!(snaps, vec![3, 6]);
        assert_eq!(value(&tr.steps[5].metrics, "edge_fraction"), 0.0);
        assert!(tr.steps.windows(2).all(|w| w[0].fraction < w[1].fraction));
    }

    #[test]
    fn geographic_batches() {
        let t = path(5)
            .unwrap()
            .with_coords(CoordKind::Planar, (0..5).map(|i| [i as f64, 0.0]).collect())
            .unwrap();
        let events = vec![
            GeoEvent {
                region: Region::Disk {
                    center: [2.0, 0.0],
                    radius: 0.5,
                },
                probability: 1.0,
            },
            GeoEvent {
                region: Region::Disk {
                    center: [2.0, 0.0],
                    radius: 1.0,
                },
                probability: 1.0,
            },
            GeoEvent {
                region: Region::Disk {
                    center: [9.0, 0.0],
                    radius: 0.5,
                },
                probability: 1.0,
            },
        ];
        let tr =
            run_challenge(&t, &ChallengeScenario::new(Strategy::Geographic { events })).unwrap();
        let removed: Vec<Vec<usize>> = tr.steps.iter().map(|s| s.removed.clone()).collect();
        assert_eq!(removed, vec![vec![2], vec![1, 3]]);
        assert_eq!(tr.summary.fraction, 0.6);
        assert_eq!(value(&Some(tr.summary.metrics), "giant_fraction"), 0.2);
    }

    #[test]
    fn unknown_keys_and_deterministic() {
        let bad = ChallengeScenario::new(Strategy::Targeted {
            metric: "nope".into(),
            adaptive: true,
            fraction: None,
            count: None,
        });
        assert!(matches!(
            run_challenge(&star(4).unwrap(), &bad),
            Err(Error::UnknownMetric(_))
        ));
        let t = erdos_renyi(50, 0.1, 2).unwrap();
        let sc = ChallengeScenario::new(Strategy::RandomFailure {
            entity: Entity::Node,
            fraction: Some(0.3),
            count: None,
        })
        .tracking(&["giant_fraction", "reachability", "aspl"])
        .with_seed(7);
        let a = serde_json::to_string(&run_challenge(&t, &sc).unwrap()).unwrap();
        let b = serde_json::to_string(&run_challenge(&t, &sc).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn reachability_non_increasing() {
        let t = watts_strogatz(40, 4, 0.2, 3).unwrap();
        let sc = ChallengeScenario::new(Strategy::Targeted {
            metric: "betweenness".into(),
            adaptive: true,
            fraction: None,
            count: None,
        })
        .tracking(&["reachability"]);
        let tr = run_challenge(&t, &sc).unwrap();
        let c: Vec<f64> = tr
            .curve("reachability")
            .into_iter()
            .map(|(_, x)| if let Scalar::Value(x) = x { x } else { 0.0 })
            .collect();
        assert!(c.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert_eq!(*c.last().unwrap(), 0.0);
    }
}
