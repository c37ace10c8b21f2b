//! Hand-computed reference values on tiny fixtures.

use netrobust::clustering::participation_coefficient;
use netrobust::connectivity::local_delay_resilience;
use netrobust::distance::{diameter, effective_eccentricity, expansion};
use netrobust::graph::generate::*;
use netrobust::spectral::{similarity_matrix, spectral_clusters};
use netrobust::Topology;

#[test]
fn participation_split_degrees() {
    // node 0 has one edge into each of two communities
    let t = Topology::undirected(3, &[(0, 1), (0, 2)]).unwrap();
    let p = participation_coefficient(&t, &[0, 1, 2]).unwrap();
    assert!((p[0].unwrap() - 0.5).abs() < 1e-12);

    // degree 4 spread over four communities
    let t = star(5).unwrap();
    let p = participation_coefficient(&t, &[0, 1, 2, 3, 4]).unwrap();
    assert!((p[0].unwrap() - 0.75).abs() < 1e-12);

    let p = participation_coefficient(&t, &[0, 0, 0, 0, 0]).unwrap();
    assert_eq!(p[0], Some(0.0));
}

#[test]
fn decay_resilience_small() {
    assert_eq!(
        local_delay_resilience(&complete(4).unwrap(), 2, 1, false, 0).unwrap(),
        Some(4.0)
    );
    assert_eq!(
        local_delay_resilience(&path(5).unwrap(), 2, 1, false, 0).unwrap(),
        Some(1.0)
    );
    assert_eq!(
        local_delay_resilience(&star(5).unwrap(), 0, 1, false, 0).unwrap(),
        Some(2.0)
    );
}

#[test]
fn diameters() {
    assert_eq!(diameter(&path(4).unwrap()).unwrap(), 3.0);
    assert_eq!(diameter(&complete(5).unwrap()).unwrap(), 1.0);
    assert_eq!(diameter(&cycle(6).unwrap()).unwrap(), 3.0);
}

#[test]
fn expansion_values() {
    for n in 3..8 {
        let e = expansion(&complete(n).unwrap(), 1, false).unwrap();
        for x in e.per_node {
            assert!((x - (n as f64 - 1.0) / n as f64).abs() < 1e-12);
        }
    }
    let e = expansion(&path(5).unwrap(), 2, false).unwrap();
    assert!((e.per_node[0] - 0.4).abs() < 1e-12);
    // saturation: every other node of the component
    let e = expansion(&path(5).unwrap(), 10, false).unwrap();
    assert!((e.per_node[0] - 0.8).abs() < 1e-12);
}

#[test]
fn eccentricity_on_star() {
    let ecc = effective_eccentricity(&star(6).unwrap(), 1.0).unwrap();
    assert_eq!(ecc[0], 1);
    assert!(ecc[1..].iter().all(|&x| x == 2));
}

#[test]
fn clusters_on_clique_and_bridge() {
    let c = spectral_clusters(&complete(6).unwrap(), 2).unwrap();
    assert!(c.leaf_of.iter().all(|&x| x == c.leaf_of[0]));

    let c = spectral_clusters(&two_cliques_bridge(5, 5).unwrap(), 1).unwrap();
    assert!(c.leaf_of[..5].iter().all(|&x| x == c.leaf_of[0]));
    assert!(c.leaf_of[5..].iter().all(|&x| x == c.leaf_of[5]));
    assert_ne!(c.leaf_of[0], c.leaf_of[5]);
}

#[test]
fn shared_providers() {
    // customers 0 and 1 both point at providers 2 and 3; 4 only at 3
    let t = Topology::directed(5, &[(0, 2), (0, 3), (1, 2), (1, 3), (4, 3)]).unwrap();
    let s = similarity_matrix(&t).unwrap();
    assert_eq!(s[(0, 1)], 2.0);
    assert_eq!(s[(0, 4)], 1.0);
    assert_eq!(s[(2, 3)], 0.0);
    assert_eq!(s[(0, 0)], 0.0);
}
