mod common;

use proptest::prelude::*;

use common::hops;
use netrobust::clustering::{local_clustering, transitivity};
use netrobust::connectivity::reliability_polynomial;
use netrobust::distance::{aspl, global_efficiency, AsplMode};
use netrobust::graph::generate::*;
use netrobust::graph::{
    all_pairs, brute_force_oracle, components, edge_connectivity, is_connected,
    vertex_connectivity, CoordKind, OracleProblem,
};
use netrobust::report::ingest::{parse_edges, write_edgelist};
use netrobust::report::{analyze, catalog, AnalyzeOptions, Format, Loaded, ReportDocument};
use netrobust::spectral::natural_connectivity;
use netrobust::throughput::node_betweenness;
use netrobust::Topology;

/// Simple undirected graph on `n` nodes from a bit per unordered pair.
fn graph(max_n: usize) -> impl Strategy<Value = Topology> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            Topology::undirected(n, &edges).unwrap()
        })
    })
}

fn weighted_graph(max_n: usize) -> impl Strategy<Value = Topology> {
    graph(max_n).prop_flat_map(|t| {
        let e = t.edge_count();
        proptest::collection::vec(1u32..20, e).prop_map(move |w| {
            let edges: Vec<(usize, usize, f64)> = t
                .edges()
                .iter()
                .zip(&w)
                .map(|(&(a, b), &w)| (a, b, w as f64 / 4.0))
                .collect();
            Topology::weighted(t.node_count(), &edges).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn degree_sum_and_components(t in graph(16)) {
        prop_assert_eq!(t.degrees().iter().sum::<usize>(), 2 * t.edge_count());
        let c = components(&t);
        prop_assert_eq!(c.sizes.iter().sum::<usize>(), t.node_count());
        prop_assert!(c.count() >= 1);
        for u in 0..t.node_count() {
            for &(w, _) in t.neighbors(u) {
                prop_assert_eq!(c.component_of[u], c.component_of[w]);
                prop_assert!(t.has_edge(w, u));
            }
        }
    }

    #[test]
    fn betweenness_sums_inner_path_nodes(t in graph(14)) {
        let b = node_betweenness(&t, false).unwrap();
        let d = hops(&t);
        let n = t.node_count();
        let mut want = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                if d[i][j] != usize::MAX {
                    want += d[i][j] as f64 - 1.0;
                }
            }
        }
        let got: f64 = b.iter().sum();
        prop_assert!((got - want).abs() < 1e-9 * want.max(1.0));
    }

    #[test]
    fn weighted_distances_obey_triangle_inequality(t in weighted_graph(12)) {
        let d = all_pairs(&t, true);
        let n = t.node_count();
        for i in 0..n {
            prop_assert_eq!(d[i][i], Some(0.0));
            for j in 0..n {
                for k in 0..n {
                    if let (Some(a), Some(b), Some(c)) = (d[i][j], d[j][k], d[i][k]) {
                        prop_assert!(c <= a + b + 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn clustering_in_unit_interval(t in graph(14)) {
        for c in local_clustering(&t).into_iter().flatten() {
            prop_assert!((0.0..=1.0).contains(&c));
        }
        if let Ok(x) = transitivity(&t) {
            prop_assert!((0.0..=1.0).contains(&x));
        }
    }

    #[test]
    fn efficiency_at_least_inverse_aspl(t in graph(14)) {
        prop_assume!(is_connected(&t));
        let e = global_efficiency(&t, false).unwrap().global;
        let d = aspl(&t, AsplMode::FiniteOnly, false).unwrap();
        prop_assert!(e >= 1.0 / d - 1e-12);
    }

    #[test]
    fn connectivity_matches_enumeration(t in graph(9)) {
        let kv = brute_force_oracle(&t, OracleProblem::MinVertexCut).unwrap();
        let ke = brute_force_oracle(&t, OracleProblem::MinEdgeCut).unwrap();
        prop_assert_eq!(vertex_connectivity(&t) as f64, kv);
        prop_assert_eq!(edge_connectivity(&t) as f64, ke);
    }

    #[test]
    fn reliability_matches_enumeration(t in graph(7), p in 0.0f64..=1.0) {
        prop_assume!(t.edge_count() <= 14);
        let exact = brute_force_oracle(&t, OracleProblem::ReliabilityAllTerminal { p }).unwrap();
        let r = reliability_polynomial(&t, &[], p, 0).unwrap().value;
        prop_assert!((r - exact).abs() < 1e-9);
    }

    #[test]
    fn natural_connectivity_grows_with_edges(t in graph(12), a in 0usize..12, b in 0usize..12) {
        let n = t.node_count();
        let (a, b) = (a % n, b % n);
        prop_assume!(a != b && !t.has_edge(a, b));
        let before = natural_connectivity(&t).unwrap().value;
        let after = natural_connectivity(&t.with_edge(a, b, None).unwrap()).unwrap().value;
        prop_assert!(after > before);
    }

    #[test]
    fn edgelist_round_trip(t in weighted_graph(12)) {
        let names: Vec<String> = (0..t.node_count()).map(|i| format!("n{i}")).collect();
        let text = write_edgelist(&t, &names);
        let (back, back_names) = parse_edges(&text, Format::WeightedEdgelist, false).unwrap();
        prop_assert_eq!(back.node_count(), t.node_count());
        prop_assert_eq!(back.edge_count(), t.edge_count());
        for (id, &(a, b)) in back.edges().iter().enumerate() {
            let (a, b) = (&back_names[a], &back_names[b]);
            let (a, b): (usize, usize) = (a[1..].parse().unwrap(), b[1..].parse().unwrap());
            let orig = t.edge_id(a, b).unwrap();
            prop_assert_eq!(t.weight(orig), back.weight(id));
        }
    }
}

fn decorate(t: Topology, seed: u64) -> Topology {
    let n = t.node_count();
    let coords: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            [
                (i as f64 * 7.3 + seed as f64).sin() * 50.0,
                (i as f64 * 3.1).cos() * 50.0,
            ]
        })
        .collect();
    let labels: Vec<String> = (0..n).map(|i| ["a", "b", "c"][i % 3].to_string()).collect();
    let weights: Vec<f64> = (0..n).map(|i| 1.0 + (i % 4) as f64).collect();
    t.with_coords(CoordKind::Planar, coords)
        .unwrap()
        .with_labels(labels)
        .unwrap()
        .with_node_weights(weights)
        .unwrap()
}

fn families() -> Vec<(&'static str, Topology)> {
    vec![
        ("path", path(9).unwrap()),
        ("star", star(10).unwrap()),
        ("complete", complete(7).unwrap()),
        ("cycle", cycle(11).unwrap()),
        ("ba", barabasi_albert(40, 2, 1).unwrap()),
        ("er", erdos_renyi(30, 0.12, 2).unwrap()),
        ("ws", watts_strogatz(30, 4, 0.2, 3).unwrap()),
        ("tree", random_tree(25, 4).unwrap()),
        ("cliques", two_cliques_bridge(5, 6).unwrap()),
        (
            "split",
            Topology::undirected(8, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (6, 7)]).unwrap(),
        ),
        (
            "weighted",
            Topology::weighted(
                6,
                &[
                    (0, 1, 2.0),
                    (1, 2, 1.0),
                    (2, 3, 4.0),
                    (3, 4, 0.5),
                    (4, 5, 1.5),
                    (5, 0, 3.0),
                    (0, 3, 1.0),
                ],
            )
            .unwrap(),
        ),
        (
            "directed",
            Topology::directed(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])
                .unwrap(),
        ),
    ]
}

#[test]
fn emitted_values_stay_in_declared_codomain() {
    let opts = AnalyzeOptions {
        samples: 200,
        ..AnalyzeOptions::default()
    };
    let mut checked = 0;
    let mut bad = Vec::new();
    for (i, (name, t)) in families().into_iter().enumerate() {
        for t in [t.clone(), decorate(t, i as u64)] {
            let mut o = opts.clone();
            o.weighted = t.is_weighted();
            let doc = analyze(&Loaded::from_topology(t), &[], &o).unwrap();
            for m in &doc.metrics {
                for x in m.value.numbers() {
                    if !x.is_finite() || !m.codomain.contains(x) {
                        bad.push(format!("{name} {}: {x} outside {:?}", m.key, m.codomain));
                    }
                    checked += 1;
                }
            }
        }
    }
    bad.dedup();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
    assert!(checked > 1000);
}

#[test]
fn catalog_keys_unique_and_listed() {
    let mut keys: Vec<&str> = catalog().iter().map(|s| s.key).collect();
    let n = keys.len();
    keys.sort();
    keys.dedup();
    assert_eq!(keys.len(), n);
    for s in catalog() {
        assert!(
            netrobust::report::ROWS.contains(&s.row),
            "{} has unknown row",
            s.key
        );
    }
    for row in netrobust::report::ROWS {
        assert!(
            catalog().iter().any(|s| s.row == row),
            "row {row} has no metric"
        );
    }
}

#[test]
fn report_is_seed_deterministic_and_round_trips() {
    let loaded = Loaded::from_topology(barabasi_albert(60, 2, 8).unwrap());
    let o = AnalyzeOptions {
        seed: 5,
        samples: 300,
        ..AnalyzeOptions::default()
    };
    let a = analyze(&loaded, &[], &o).unwrap().to_json();
    let b = analyze(&loaded, &[], &o).unwrap().to_json();
    assert_eq!(a, b);
    let back = ReportDocument::from_json(&a).unwrap();
    assert_eq!(back.to_json(), a);
}
