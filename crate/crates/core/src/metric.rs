//! Tagged metric values with their taxonomy flags.

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scope {
    Local,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Static,
    Dynamic,
    WorstCase,
    Failures,
}

/// Declared value range, evaluated for a concrete topology. `None` bounds
/// are unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Codomain {
    pub lo: Option<f64>,
    pub hi: Option<f64>,
}

impl Codomain {
    pub const UNBOUNDED: Codomain = Codomain { lo: None, hi: None };

    pub fn closed(lo: f64, hi: f64) -> Self {
        Codomain {
            lo: Some(lo),
            hi: Some(hi),
        }
    }

    pub fn at_least(lo: f64) -> Self {
        Codomain {
            lo: Some(lo),
            hi: None,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-9 * (1.0 + x.abs());
        self.lo.is_none_or(|lo| x >= lo - tol) && self.hi.is_none_or(|hi| x <= hi + tol)
    }
}

/// A number or an explicit undefined marker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Value(f64),
    Undefined { undefined: String },
}

impl Scalar {
    pub fn undefined(reason: impl Into<String>) -> Self {
        Scalar::Undefined {
            undefined: reason.into(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Scalar::Value(x) => Some(*x),
            Scalar::Undefined { .. } => None,
        }
    }

    /// Non-finite floats never reach a report.
    pub fn from_f64(x: f64, reason: &str) -> Self {
        if x.is_finite() {
            Scalar::Value(x)
        } else {
            Scalar::undefined(reason)
        }
    }
}

impl From<Option<f64>> for Scalar {
    fn from(x: Option<f64>) -> Self {
        match x {
            Some(v) if v.is_finite() => Scalar::Value(v),
            Some(_) => Scalar::undefined("non-finite"),
            None => Scalar::undefined("not defined for this entity"),
        }
    }
}

impl From<crate::error::Result<f64>> for Scalar {
    fn from(r: crate::error::Result<f64>) -> Self {
        match r {
            Ok(v) => Scalar::from_f64(v, "non-finite"),
            Err(e) => Scalar::undefined(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeValue {
    pub u: usize,
    pub w: usize,
    pub value: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistPoint {
    pub x: f64,
    pub y: Scalar,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MetricValue {
    GlobalScalar {
        value: Scalar,
    },
    PerNode {
        values: Vec<Scalar>,
    },
    PerEdge {
        values: Vec<EdgeValue>,
    },
    Distribution {
        points: Vec<DistPoint>,
    },
    /// Square table indexed by `labels` on both axes.
    Matrix {
        labels: Vec<String>,
        values: Vec<Vec<Scalar>>,
    },
    Undefined {
        reason: String,
    },
}

impl MetricValue {
    pub fn scalar(x: f64) -> Self {
        MetricValue::GlobalScalar {
            value: Scalar::from_f64(x, "non-finite"),
        }
    }

    pub fn per_node(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        MetricValue::PerNode {
            values: values.into_iter().map(Scalar::from).collect(),
        }
    }

    pub fn distribution(points: impl IntoIterator<Item = (f64, Option<f64>)>) -> Self {
        MetricValue::Distribution {
            points: points
                .into_iter()
                .map(|(x, y)| DistPoint { x, y: y.into() })
                .collect(),
        }
    }

    pub fn undefined(err: &Error) -> Self {
        let reason = match err {
            Error::Undefined(r) => r.clone(),
            Error::Incompatible(r) => format!("incompatible: {r}"),
            other => other.to_string(),
        };
        MetricValue::Undefined { reason }
    }

    /// All defined numbers carried by this value.
    pub fn numbers(&self) -> Vec<f64> {
        match self {
            MetricValue::GlobalScalar { value } => value.value().into_iter().collect(),
            MetricValue::PerNode { values } => values.iter().filter_map(Scalar::value).collect(),
            MetricValue::PerEdge { values } => {
                values.iter().filter_map(|e| e.value.value()).collect()
            }
            MetricValue::Distribution { points } => {
                points.iter().filter_map(|p| p.y.value()).collect()
            }
            MetricValue::Matrix { values, .. } => {
                values.iter().flatten().filter_map(Scalar::value).collect()
            }
            MetricValue::Undefined { .. } => Vec::new(),
        }
    }

    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            MetricValue::GlobalScalar { value } => value.value(),
            _ => None,
        }
    }

    pub fn is_undefined(&self) -> bool {
        matches!(self, MetricValue::Undefined { .. })
    }
}

/// A computed metric together with its taxonomy flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub key: String,
    pub name: String,
    pub scope: Scope,
    pub mode: Mode,
    pub codomain: Codomain,
    pub value: MetricValue,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn undefined_serialises_tagged() {
        let v = MetricValue::per_node([Some(1.0), None]);
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(
            s,
            r#"{"kind":"per_node","values":[1.0,{"undefined":"not defined for this entity"}]}"#
        );
        let back: MetricValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert_eq!(
            serde_json::to_string(&MetricValue::scalar(f64::NAN)).unwrap(),
            r#"{"kind":"global_scalar","value":{"undefined":"non-finite"}}"#
        );
    }
}
