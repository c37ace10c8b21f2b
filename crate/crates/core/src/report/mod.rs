//! File formats, metric orchestration and report emission.

pub mod catalog;
pub mod ingest;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::challenge::{run_challenge, ChallengeScenario, ChallengeTrace};
use crate::error::{Error, Result};
use crate::geo::{GeoEvent, GeoParams};
use crate::graph::Topology;
use crate::metric::{MetricResult, MetricValue, Scalar};

pub use catalog::{
    catalog, listing, listing_text, lookup, Listing, MetricSpec, Status, OUT_OF_SCOPE, ROWS,
};
pub use ingest::{Format, InputHash, Loaded};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "netrobust";

/// Parameters shared by the metric evaluators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeOptions {
    pub seed: u64,
    /// Use edge weights as lengths (distances) or strengths where supported.
    pub weighted: bool,
    /// Hop radius h for expansion and decay resilience.
    pub hops: u32,
    /// Restrict h-hop neighbourhoods to policy-compliant paths.
    pub policy: bool,
    pub eccentricity_ratio: f64,
    pub reliability_p: f64,
    pub hegemony_alpha: f64,
    /// Fraction of nodes in each communicating set for effective load.
    pub load_fraction: f64,
    pub ensemble: usize,
    pub impact_threshold: f64,
    /// Independent link failure probability for the failure survivability.
    pub failure_probability: f64,
    /// Monte Carlo samples for the failure survivability.
    pub samples: usize,
    pub null_samples: usize,
    pub partition_ratio: f64,
    pub partition_slack: f64,
    pub m: usize,
    pub conditional_min_size: usize,
    pub cluster_depth: usize,
    pub edge_betweenness_sample: Option<f64>,
    pub geo: GeoParams,
    pub geo_events: Vec<GeoEvent>,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        AnalyzeOptions {
            seed: 0,
            weighted: false,
            hops: 2,
            policy: false,
            eccentricity_ratio: 0.9,
            reliability_p: 0.9,
            hegemony_alpha: 0.1,
            load_fraction: 1.0,
            ensemble: 10,
            impact_threshold: 0.5,
            failure_probability: 0.01,
            samples: 2000,
            null_samples: 5,
            partition_ratio: 0.5,
            partition_slack: 0.5,
            m: 2,
            conditional_min_size: 2,
            cluster_depth: 2,
            edge_betweenness_sample: None,
            geo: GeoParams::default(),
            geo_events: Vec::new(),
        }
    }
}

/// Structural flags of the analysed topology.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digest {
    pub v: usize,
    pub e: usize,
    pub directed: bool,
    pub weighted: bool,
    pub geo: bool,
    pub labeled: bool,
    pub node_weighted: bool,
    /// SHA-256 over the canonical topology.
    pub fingerprint: String,
}

impl Digest {
    pub fn of(t: &Topology) -> Self {
        Digest {
            v: t.node_count(),
            e: t.edge_count(),
            directed: t.is_directed(),
            weighted: t.is_weighted(),
            geo: t.coords().is_some(),
            labeled: t.labels().is_some(),
            node_weighted: t.node_weights().is_some(),
            fingerprint: t.fingerprint(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub inputs: Vec<InputHash>,
    pub options: AnalyzeOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub scenario: ChallengeScenario,
    pub trace: ChallengeTrace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub digest: Digest,
    pub metrics: Vec<MetricResult>,
    pub traces: Vec<TraceEntry>,
    pub provenance: Provenance,
}

impl ReportDocument {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serialises");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: ReportDocument = serde_json::from_str(s).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if doc.schema_version != SCHEMA_VERSION {
            return Err(Error::param(format!(
                "unsupported schema version {}",
                doc.schema_version
            )));
        }
        Ok(doc)
    }

    pub fn metric(&self, key: &str) -> Option<&MetricResult> {
        self.metrics.iter().find(|m| m.key == key)
    }

    /// Keys whose value is undefined.
    pub fn undefined_keys(&self) -> Vec<&str> {
        self.metrics
            .iter()
            .filter(|m| m.value.is_undefined())
            .map(|m| m.key.as_str())
            .collect()
    }
}

/// Keys run when none are requested: everything in the catalog.
pub fn default_keys() -> Vec<String> {
    catalog().iter().map(|s| s.key.to_string()).collect()
}

/// Splits a comma-separated key list; `all` expands to every key.
pub fn parse_keys(list: &str) -> Result<Vec<String>> {
    let mut out: Vec<String> = Vec::new();
    for k in list.split(',').map(str::trim).filter(|k| !k.is_empty()) {
        if k == "all" {
            out.extend(default_keys());
        } else {
            lookup(k)?;
            out.push(k.to_string());
        }
    }
    let mut seen = std::collections::HashSet::new();
    out.retain(|k| seen.insert(k.clone()));
    Ok(out)
}

/// Evaluates one catalog entry; failures become an undefined value.
pub fn evaluate(spec: &MetricSpec, t: &Topology, o: &AnalyzeOptions) -> MetricResult {
    let value = spec
        .needs
        .check(t, o)
        .and_then(|_| (spec.eval)(t, o))
        .unwrap_or_else(|e| MetricValue::undefined(&e));
    MetricResult {
        key: spec.key.to_string(),
        name: spec.name.to_string(),
        scope: spec.scope,
        mode: spec.mode,
        codomain: (spec.codomain)(t, o),
        value,
    }
}

/// Runs the requested metrics (all when `keys` is empty) in key order.
pub fn analyze(loaded: &Loaded, keys: &[String], opts: &AnalyzeOptions) -> Result<ReportDocument> {
    let keys = if keys.is_empty() {
        default_keys()
    } else {
        keys.to_vec()
    };
    let specs = keys.iter().map(|k| lookup(k)).collect::<Result<Vec<_>>>()?;
    let t = &loaded.topology;
    let metrics: Vec<MetricResult> = specs.par_iter().map(|s| evaluate(s, t, opts)).collect();
    Ok(ReportDocument {
        schema_version: SCHEMA_VERSION,
        digest: Digest::of(t),
        metrics,
        traces: Vec::new(),
        provenance: Provenance {
            tool: TOOL.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: opts.seed,
            inputs: loaded.inputs.clone(),
            options: opts.clone(),
        },
    })
}

/// Runs `scenario` and appends its trace to the report.
pub fn add_trace(
    doc: &mut ReportDocument,
    t: &Topology,
    scenario: ChallengeScenario,
) -> Result<()> {
    let trace = run_challenge(t, &scenario)?;
    doc.traces.push(TraceEntry { scenario, trace });
    Ok(())
}

pub fn parse_scenario(text: &str) -> Result<ChallengeScenario> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })
}

/// Shortest decimal that parses back to the same float.
pub fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn fmt_scalar(s: &Scalar) -> String {
    match s {
        Scalar::Value(x) => fmt_num(*x),
        Scalar::Undefined { .. } => "undefined".to_string(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Degradation curve of one tracked metric: `fraction_removed,value`.
pub fn trace_csv(trace: &ChallengeTrace, key: &str) -> String {
    let mut out = String::from("fraction_removed,value\n");
    for (x, y) in trace.curve(key) {
        out.push_str(&format!("{},{}\n", fmt_num(x), fmt_scalar(&y)));
    }
    out
}

/// Removal log: `step,fraction_removed,removed` with names joined by `;`.
pub fn removals_csv(trace: &ChallengeTrace, names: &[String]) -> String {
    let mut out = String::from("step,fraction_removed,removed\n");
    for s in &trace.steps {
        let removed: Vec<String> = s
            .removed
            .iter()
            .map(|&i| match trace.entity {
                crate::challenge::Entity::Node => {
                    names.get(i).cloned().unwrap_or_else(|| i.to_string())
                }
                crate::challenge::Entity::Edge => i.to_string(),
            })
            .collect();
        out.push_str(&format!(
            "{},{},{}\n",
            s.step,
            fmt_num(s.fraction),
            csv_field(&removed.join(";"))
        ));
    }
    out
}

/// Long-format metric table: `key,item,value`. Items are node names, edge
/// endpoints `u-w`, distribution abscissae or `row:col` label pairs.
pub fn metrics_csv(metrics: &[MetricResult], names: &[String]) -> String {
    let name = |i: usize| names.get(i).cloned().unwrap_or_else(|| i.to_string());
    let mut out = String::from("key,item,value\n");
    let mut row = |k: &str, item: String, v: String| {
        out.push_str(&format!("{},{},{}\n", k, csv_field(&item), csv_field(&v)))
    };
    for m in metrics {
        let k = m.key.as_str();
        match &m.value {
            MetricValue::GlobalScalar { value } => row(k, String::new(), fmt_scalar(value)),
            MetricValue::PerNode { values } => values
                .iter()
                .enumerate()
                .for_each(|(i, x)| row(k, name(i), fmt_scalar(x))),
            MetricValue::PerEdge { values } => values.iter().for_each(|e| {
                row(
                    k,
                    format!("{}-{}", name(e.u), name(e.w)),
                    fmt_scalar(&e.value),
                )
            }),
            MetricValue::Distribution { points } => points
                .iter()
                .for_each(|p| row(k, fmt_num(p.x), fmt_scalar(&p.y))),
            MetricValue::Matrix { labels, values } => {
                for (i, r) in values.iter().enumerate() {
                    for (j, x) in r.iter().enumerate() {
                        row(k, format!("{}:{}", labels[i], labels[j]), fmt_scalar(x));
                    }
                }
            }
            MetricValue::Undefined { reason } => {
                row(k, String::new(), format!("undefined: {reason}"))
            }
        }
    }
    out
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected 'key = value'".into(),
        })?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                message: "empty key".into(),
            });
        }
        if out.insert(k.to_string(), v.trim().to_string()).is_some() {
            return Err(Error::Parse {
                line: i + 1,
                message: format!("key '{k}' repeated"),
            });
        }
    }
    Ok(out)
}

/// Overrides option fields from config entries. Values are read as JSON
/// when they parse as JSON and as plain strings otherwise.
pub fn apply_config(
    opts: &AnalyzeOptions,
    entries: &BTreeMap<String, String>,
) -> Result<AnalyzeOptions> {
    let mut value = serde_json::to_value(opts).expect("options serialise");
    let obj = value.as_object_mut().expect("options are an object");
    for (k, v) in entries {
        if !obj.contains_key(k) {
            return Err(Error::param(format!("unknown option '{k}'")));
        }
        let parsed =
            serde_json::from_str(v).unwrap_or_else(|_| serde_json::Value::String(v.clone()));
        obj.insert(k.clone(), parsed);
    }
    serde_json::from_value(value).map_err(|e| Error::param(format!("bad option value: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    fn keys(k: &[&str]) -> Vec<String> {
        k.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn triangle_distances() {
        let doc = analyze(
            &Loaded::from_topology(complete(3).unwrap()),
            &keys(&["aspl", "global_efficiency"]),
            &AnalyzeOptions::default(),
        )
        .unwrap();
        assert_eq!(doc.metric("aspl").unwrap().value.as_scalar(), Some(1.0));
        assert_eq!(
            doc.metric("global_efficiency").unwrap().value.as_scalar(),
            Some(1.0)
        );
    }

    #[test]
    fn directed_vulnerability_function_is_incompatible() {
        let t = Topology::directed(3, &[(0, 1), (1, 2)]).unwrap();
        let doc = analyze(
            &Loaded::from_topology(t),
            &keys(&["vulnerability_function"]),
            &AnalyzeOptions::default(),
        )
        .unwrap();
        match &doc.metrics[0].value {
            MetricValue::Undefined { reason } => {
                assert!(reason.starts_with("incompatible"), "{reason}");
                assert!(reason.contains("requires a simple graph"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_attributes_are_reported() {
        let doc = analyze(
            &Loaded::from_topology(path(4).unwrap()),
            &keys(&["distance_strength", "performance"]),
            &AnalyzeOptions::default(),
        )
        .unwrap();
        assert_eq!(doc.undefined_keys(), ["distance_strength", "performance"]);
    }

    #[test]
    fn json_round_trip() {
        let t = barabasi_albert(30, 2, 3).unwrap();
        let mut doc = analyze(
            &Loaded::from_topology(t.clone()),
            &keys(&["betweenness", "degree_distribution", "toughness", "aspl"]),
            &AnalyzeOptions::default(),
        )
        .unwrap();
        add_trace(
            &mut doc,
            &t,
            ChallengeScenario::new(crate::challenge::Strategy::RandomFailure {
                entity: Default::default(),
                fraction: Some(0.2),
                count: None,
            }),
        )
        .unwrap();
        let s = doc.to_json();
        assert_eq!(ReportDocument::from_json(&s).unwrap(), doc);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(matches!(
            parse_keys("aspl,nope"),
            Err(Error::UnknownMetric(_))
        ));
        assert_eq!(
            parse_keys("aspl, aspl ,diameter").unwrap(),
            ["aspl", "diameter"]
        );
        assert_eq!(parse_keys("all").unwrap().len(), catalog().len());
    }

    #[test]
    fn config_overrides() {
        let c = parse_config("# c\nseed = 7\nhops=3 # radius\ngeo = {\"lambda\": 2.0, \"omega\": 0.5, \"k\": 2, \"rho\": 0.1}\n").unwrap();
        let o = apply_config(&AnalyzeOptions::default(), &c).unwrap();
        assert_eq!((o.seed, o.hops, o.geo.k), (7, 3, 2));
        assert!(apply_config(&o, &parse_config("bogus = 1").unwrap()).is_err());
        assert!(parse_config("seed 1").is_err());
    }

    #[test]
    fn csv_uses_round_trip_numbers() {
        let m = MetricResult {
            key: "x".into(),
            name: "x".into(),
            scope: crate::metric::Scope::Global,
            mode: crate::metric::Mode::Static,
            codomain: crate::metric::Codomain::UNBOUNDED,
            value: MetricValue::per_node([Some(0.1), Some(1.0 / 3.0), None]),
        };
        let s = metrics_csv(&[m], &keys(&["a", "b", "c"]));
        assert_eq!(
            s,
            "key,item,value\nx,a,0.1\nx,b,0.3333333333333333\nx,c,undefined\n"
        );
        assert_eq!("0.3333333333333333".parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
