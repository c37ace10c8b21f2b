//! Text formats for topologies and node attributes.
//!
//! Edge files name nodes by arbitrary tokens. Nodes are indexed in numeric
//! order when every name is an unsigned integer and in byte order otherwise,
//! so the same file always yields the same topology.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{BuildOptions, CoordKind, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    /// `u v [w]` per line, whitespace or comma separated. A line with a
    /// single name declares an isolated node.
    Edgelist,
    /// Like `edgelist` but every edge line must carry a weight.
    WeightedEdgelist,
    /// `a|b|rel`; rel −1 is provider a to customer b, 0 is peering.
    AsRel,
    /// `node,lat,lon` (or `node,x,y` for planar coordinates).
    Coords,
    /// `node,label`.
    Labels,
    /// `node,weight`.
    NodeWeights,
}

impl Format {
    pub const ALL: [Format; 6] = [
        Format::Edgelist,
        Format::WeightedEdgelist,
        Format::AsRel,
        Format::Coords,
        Format::Labels,
        Format::NodeWeights,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Format::Edgelist => "edgelist",
            Format::WeightedEdgelist => "weighted_edgelist",
            Format::AsRel => "as_rel",
            Format::Coords => "coords",
            Format::Labels => "labels",
            Format::NodeWeights => "node_weights",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.key() == s)
            .ok_or_else(|| Error::param(format!("unknown format '{s}'")))
    }

    pub fn is_edge_format(self) -> bool {
        matches!(
            self,
            Format::Edgelist | Format::WeightedEdgelist | Format::AsRel
        )
    }
}

/// SHA-256 of one input file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHash {
    pub path: String,
    pub format: Format,
    pub sha256: String,
}

/// A topology plus the original node names, index-aligned.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub topology: Topology,
    pub names: Vec<String>,
    pub inputs: Vec<InputHash>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Non-empty, non-comment lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn fields(line: &str) -> Vec<&str> {
    line.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .collect()
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn number(line: usize, s: &str, what: &str) -> Result<f64> {
    let x: f64 = s
        .parse()
        .map_err(|_| parse_err(line, format!("{what} '{s}' is not a number")))?;
    if !x.is_finite() {
        return Err(parse_err(line, format!("{what} '{s}' is not finite")));
    }
    Ok(x)
}

/// Sorted node names: numerically when all are unsigned integers.
fn order_names(names: HashSet<String>) -> Vec<String> {
    let mut v: Vec<String> = names.into_iter().collect();
    if v.iter().all(|s| s.parse::<u64>().is_ok()) {
        v.sort_by(|a, b| {
            a.parse::<u64>()
                .unwrap()
                .cmp(&b.parse::<u64>().unwrap())
                .then_with(|| a.cmp(b))
        });
    } else {
        v.sort();
    }
    v
}

struct RawEdge {
    line: usize,
    a: String,
    b: String,
    w: Option<f64>,
}

/// Parses an edge file held in memory.
pub fn parse_edges(text: &str, format: Format, directed: bool) -> Result<(Topology, Vec<String>)> {
    let mut names = HashSet::new();
    let mut raw = Vec::new();
    let directed = match format {
        Format::Edgelist | Format::WeightedEdgelist => {
            for (ln, l) in lines(text) {
                let f = fields(l);
                match f.len() {
                    1 => {
                        names.insert(f[0].to_string());
                    }
                    2 | 3 => {
                        let w = f.get(2).map(|s| number(ln, s, "weight")).transpose()?;
                        if format == Format::WeightedEdgelist && w.is_none() {
                            return Err(parse_err(ln, "missing weight"));
                        }
                        raw.push(RawEdge {
                            line: ln,
                            a: f[0].into(),
                            b: f[1].into(),
                            w,
                        });
                    }
                    n => {
                        return Err(parse_err(
                            ln,
                            format!("expected 'u v [w]', found {n} fields"),
                        ))
                    }
                }
            }
            directed
        }
        Format::AsRel => {
            for (ln, l) in lines(text) {
                let f: Vec<&str> = l.split('|').map(str::trim).collect();
                if f.len() < 3 || f[0].is_empty() || f[1].is_empty() {
                    return Err(parse_err(ln, "expected 'as1|as2|rel'"));
                }
                let (a, b) = (f[0].to_string(), f[1].to_string());
                match f[2] {
                    // customer b points to provider a
                    "-1" => raw.push(RawEdge {
                        line: ln,
                        a: b,
                        b: a,
                        w: None,
                    }),
                    "0" => {
                        raw.push(RawEdge {
                            line: ln,
                            a: a.clone(),
                            b: b.clone(),
                            w: None,
                        });
                        raw.push(RawEdge {
                            line: ln,
                            a: b,
                            b: a,
                            w: None,
                        });
                    }
                    r => return Err(parse_err(ln, format!("unknown relationship '{r}'"))),
                }
            }
            true
        }
        other => {
            return Err(Error::param(format!(
                "{} is not an edge format",
                other.key()
            )))
        }
    };
    let weighted = raw.iter().any(|e| e.w.is_some());
    if weighted {
        if let Some(e) = raw.iter().find(|e| e.w.is_none()) {
            return Err(parse_err(
                e.line,
                "missing weight (other lines are weighted)",
            ));
        }
    }
    for e in &raw {
        names.insert(e.a.clone());
        names.insert(e.b.clone());
    }
    let names = order_names(names);
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut seen = HashMap::new();
    let mut edges = Vec::with_capacity(raw.len());
    let mut weights = Vec::new();
    for e in &raw {
        let (u, w) = (index[e.a.as_str()], index[e.b.as_str()]);
        if u == w {
            return Err(parse_err(e.line, format!("self-loop on '{}'", e.a)));
        }
        let key = if directed {
            (u, w)
        } else {
            (u.min(w), u.max(w))
        };
        if let Some(first) = seen.insert(key, e.line) {
            if format == Format::AsRel {
                seen.insert(key, first);
                continue;
            }
            return Err(parse_err(
                e.line,
                format!("duplicate edge '{} {}' (first on line {first})", e.a, e.b),
            ));
        }
        edges.push((u, w));
        if let Some(x) = e.w {
            if !(x > 0.0) {
                return Err(parse_err(
                    e.line,
                    format!("weight {x} is not strictly positive"),
                ));
            }
            weights.push(x);
        }
    }
    if names.is_empty() {
        return Err(parse_err(0, "no nodes"));
    }
    let t = Topology::build(
        names.len(),
        &edges,
        weighted.then_some(&weights[..]),
        BuildOptions {
            directed,
            dedup: false,
        },
    )?;
    Ok((t, names))
}

/// Per-node attribute rows keyed by node name; every node must appear once.
fn attribute_rows<T>(
    text: &str,
    names: &[String],
    what: &str,
    mut parse: impl FnMut(usize, &[&str]) -> Result<T>,
) -> Result<Vec<T>> {
    let index: HashMap<&str, usize> = names
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let mut out: BTreeMap<usize, T> = BTreeMap::new();
    for (ln, l) in lines(text) {
        let f: Vec<&str> = l.split(',').map(str::trim).collect();
        let &u = index
            .get(f[0])
            .ok_or_else(|| parse_err(ln, format!("unknown node '{}'", f[0])))?;
        let v = parse(ln, &f[1..])?;
        if out.insert(u, v).is_some() {
            return Err(parse_err(ln, format!("node '{}' listed twice", f[0])));
        }
    }
    if let Some(u) = (0..names.len()).find(|u| !out.contains_key(u)) {
        return Err(Error::param(format!("node '{}' has no {what}", names[u])));
    }
    Ok(out.into_values().collect())
}

/// Attaches an attribute file held in memory.
pub fn apply_attributes(
    t: Topology,
    names: &[String],
    text: &str,
    format: Format,
    kind: CoordKind,
) -> Result<Topology> {
    match format {
        Format::Coords => {
            let c = attribute_rows(text, names, "coordinates", |ln, f| {
                if f.len() != 2 {
                    return Err(parse_err(ln, "expected 'node,lat,lon'"));
                }
                let p = [
                    number(ln, f[0], "coordinate")?,
                    number(ln, f[1], "coordinate")?,
                ];
                if kind == CoordKind::LatLon && (p[0].abs() > 90.0 || p[1].abs() > 180.0) {
                    return Err(parse_err(ln, "latitude/longitude out of range"));
                }
                Ok(p)
            })?;
            t.with_coords(kind, c)
        }
        Format::Labels => {
            let l = attribute_rows(text, names, "label", |ln, f| match f {
                [l] if !l.is_empty() => Ok(l.to_string()),
                _ => Err(parse_err(ln, "expected 'node,label'")),
            })?;
            t.with_labels(l)
        }
        Format::NodeWeights => {
            let w = attribute_rows(text, names, "weight", |ln, f| match f {
                [w] => {
                    let x = number(ln, w, "weight")?;
                    if x > 0.0 {
                        Ok(x)
                    } else {
                        Err(parse_err(ln, "node weight must be positive"))
                    }
                }
                _ => Err(parse_err(ln, "expected 'node,weight'")),
            })?;
            t.with_node_weights(w)
        }
        other => Err(Error::param(format!(
            "{} is not an attribute format",
            other.key()
        ))),
    }
}

impl Loaded {
    /// Reads an edge file from disk.
    pub fn open(path: &Path, format: Format, directed: bool) -> Result<Self> {
        let text = read(path)?;
        let (topology, names) = parse_edges(&text, format, directed)?;
        let inputs = vec![InputHash {
            path: path.display().to_string(),
            format,
            sha256: sha256_hex(text.as_bytes()),
        }];
        Ok(Loaded {
            topology,
            names,
            inputs,
        })
    }

    /// Wraps an in-memory topology; nodes are named by index.
    pub fn from_topology(topology: Topology) -> Self {
        let names = (0..topology.node_count()).map(|i| i.to_string()).collect();
        Loaded {
            topology,
            names,
            inputs: Vec::new(),
        }
    }

    /// Reads an attribute file from disk and attaches it.
    pub fn attach(mut self, path: &Path, format: Format, kind: CoordKind) -> Result<Self> {
        let text = read(path)?;
        self.topology = apply_attributes(self.topology, &self.names, &text, format, kind)?;
        self.inputs.push(InputHash {
            path: path.display().to_string(),
            format,
            sha256: sha256_hex(text.as_bytes()),
        });
        Ok(self)
    }
}

/// Serialises `t` as an edge list (weights included when present). Isolated
/// nodes are written as single-name lines so that re-reading is lossless.
pub fn write_edgelist(t: &Topology, names: &[String]) -> String {
    let mut out = String::new();
    let mut touched = vec![false; t.node_count()];
    for (id, &(u, w)) in t.edges().iter().enumerate() {
        touched[u] = true;
        touched[w] = true;
        out.push_str(&names[u]);
        out.push(' ');
        out.push_str(&names[w]);
        if t.is_weighted() {
            out.push(' ');
            out.push_str(&t.weight(id).to_string());
        }
        out.push('\n');
    }
    for (u, _) in touched.iter().enumerate().filter(|(_, &b)| !b) {
        out.push_str(&names[u]);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_from_edgelist() {
        let (t, names) = parse_edges("0 1\n1 2\n", Format::Edgelist, false).unwrap();
        assert_eq!(t, Topology::undirected(3, &[(0, 1), (1, 2)]).unwrap());
        assert_eq!(names, ["0", "1", "2"]);
    }

    #[test]
    fn comments_blank_lines_and_isolated_nodes() {
        let (t, names) = parse_edges("# header\n\na b\nc\n", Format::Edgelist, false).unwrap();
        assert_eq!(names, ["a", "b", "c"]);
        assert_eq!(t.node_count(), 3);
        assert_eq!(t.degree(2), 0);
    }

    #[test]
    fn numeric_names_sort_by_value() {
        let (t, names) = parse_edges("10,2\n2 9\n", Format::Edgelist, false).unwrap();
        assert_eq!(names, ["2", "9", "10"]);
        assert_eq!(t.edges(), &[(0, 2), (0, 1)]);
    }

    #[test]
    fn peer_gives_two_links() {
        let (t, names) = parse_edges("7018|3356|0\n", Format::AsRel, false).unwrap();
        assert!(t.is_directed());
        assert_eq!(names, ["3356", "7018"]);
        assert_eq!(t.edge_count(), 2);
        assert!(t.has_edge(0, 1) && t.has_edge(1, 0));
    }

    #[test]
    fn customer_points_to_provider() {
        let (t, names) = parse_edges("1|2|-1\n", Format::AsRel, false).unwrap();
        assert_eq!(names, ["1", "2"]);
        assert_eq!(t.edges(), &[(1, 0)]);
    }

    #[test]
    fn as_rel_extra_fields_and_repeats() {
        let (t, _) = parse_edges("# c\n1|2|-1|bgp\n1|2|-1|mlp\n", Format::AsRel, false).unwrap();
        assert_eq!(t.edge_count(), 1);
        assert!(matches!(
            parse_edges("1|2|7\n", Format::AsRel, false),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert!(matches!(
            parse_edges("0 1\n1 1\n", Format::Edgelist, false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edges("0 1\n1 0\n", Format::Edgelist, false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edges("0 1 x\n", Format::Edgelist, false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edges("0 1 2\n1 2\n", Format::Edgelist, false),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_edges("0 1\n", Format::WeightedEdgelist, false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edges("0 1 -2\n", Format::Edgelist, false),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_edges("0 1 2 3\n", Format::Edgelist, false),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn attributes_attach_by_name() {
        let (t, names) = parse_edges("a b\nb c\n", Format::Edgelist, false).unwrap();
        let t = apply_attributes(
            t,
            &names,
            "c,1,2\na,0,0\nb,0.5,0.5\n",
            Format::Coords,
            CoordKind::Planar,
        )
        .unwrap();
        assert_eq!(t.coords().unwrap().1[2], [1.0, 2.0]);
        let t = apply_attributes(
            t,
            &names,
            "a,x\nb,y\nc,x\n",
            Format::Labels,
            CoordKind::LatLon,
        )
        .unwrap();
        assert_eq!(t.labels().unwrap()[1], "y");
        let dangling = apply_attributes(
            t.clone(),
            &names,
            "a,x\nzz,y\n",
            Format::Labels,
            CoordKind::LatLon,
        );
        assert!(matches!(dangling, Err(Error::Parse { line: 2, .. })));
        assert!(apply_attributes(
            t.clone(),
            &names,
            "a,x\n",
            Format::Labels,
            CoordKind::LatLon
        )
        .is_err());
        assert!(apply_attributes(
            t,
            &names,
            "a,91,0\nb,0,0\nc,0,0\n",
            Format::Coords,
            CoordKind::LatLon
        )
        .is_err());
    }

    #[test]
    fn write_then_read_is_identity() {
        let t = Topology::weighted(5, &[(0, 1, 0.1), (3, 1, 2.5), (2, 3, 1e-7)]).unwrap();
        let names: Vec<String> = (0..5).map(|i| i.to_string()).collect();
        let text = write_edgelist(&t, &names);
        let (back, back_names) = parse_edges(&text, Format::Edgelist, false).unwrap();
        assert_eq!(back, t);
        assert_eq!(back_names, names);
    }
}
