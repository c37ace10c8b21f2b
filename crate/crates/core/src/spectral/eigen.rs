//! Metrics read off the adjacency and Laplacian spectra.

use nalgebra::{Cholesky, DMatrix, DVector};
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::cache::{lanczos, sparse_apply, SpectralCache, DENSE_CAP};
use crate::distance::diameter;
use crate::error::{Error, Result};
use crate::graph::{components, Topology};

fn undirected_only(t: &Topology, what: &str) -> Result<()> {
    if t.is_directed() {
        return Err(Error::incompatible(format!(
            "{what} is defined for undirected graphs"
        )));
    }
    Ok(())
}

/// Power iteration with L1 normalisation from the all-ones start. Directed
/// graphs are read as undirected. A bipartite oscillation triggers a retry
/// on A + I.
pub fn eigenvector_centrality(t: &Topology, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let g = t.underlying_undirected();
    let n = g.node_count();
    if g.edge_count() == 0 {
        return Err(Error::undefined(
            "eigenvector centrality needs at least one edge",
        ));
    }
    for shift in [0.0, 1.0] {
        let mut x = DVector::from_element(n, 1.0 / n as f64);
        for _ in 0..max_iter {
            let mut y = sparse_apply(&g, false, &x) + &x * shift;
            y /= y.sum();
            let diff = (&y - &x).abs().sum();
            x = y;
            if diff < tol {
                return Ok(x.iter().copied().collect());
            }
        }
    }
    Err(Error::NoConvergence(format!(
        "eigenvector centrality after {max_iter} iterations"
    )))
}

/// SR = #distinct eigenvalues of A / (D + 1), distinct beyond 1e−8·max|λ|.
pub fn symmetry_ratio(t: &Topology) -> Result<f64> {
    undirected_only(t, "symmetry ratio")?;
    let d = diameter(t)?;
    let cache = SpectralCache::new(t, false);
    let vals = &cache.adjacency_eigen()?.values;
    let tol = 1e-8 * vals.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let mut distinct = 1;
    for k in 1..vals.len() {
        if vals[k] - vals[k - 1] > tol {
            distinct += 1;
        }
    }
    Ok(distinct as f64 / (d + 1.0))
}

/// λ₂ of the Laplacian; dense up to the cap, Lanczos on 2k_max·I − L with
/// the constant vector deflated above it.
pub fn algebraic_connectivity(t: &Topology) -> Result<f64> {
    undirected_only(t, "algebraic connectivity")?;
    let n = t.node_count();
    if n < 2 {
        return Err(Error::undefined("algebraic connectivity needs v >= 2"));
    }
    if components(t).count() > 1 {
        return Ok(0.0);
    }
    if n <= DENSE_CAP {
        let cache = SpectralCache::new(t, false);
        return Ok(cache.laplacian_eigen()?.values[1].max(0.0));
    }
    let c = 2.0 * t.max_degree() as f64;
    let ones = DVector::from_element(n, 1.0);
    let deg = DVector::from_iterator(n, (0..n).map(|u| t.degree(u) as f64));
    let ritz = lanczos(
        n,
        |x| x * c - (deg.component_mul(x) - sparse_apply(t, false, x)),
        400,
        Some(&ones),
        7,
    );
    Ok((c - ritz.last().unwrap()).max(0.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodExpansion {
    /// Least-squares fit of log u_v(i) on log SC_odd(i); `None` when all
    /// nodes share one point.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// log(sinh(λ_v)^{−1/2}), the intercept of an ideal expander.
    pub expected_intercept: f64,
    /// Residuals from the fitted line (zero when the fit is degenerate).
    pub residuals: Vec<f64>,
    /// Deviation from the ideal line with slope 1/2 and the expected intercept.
    pub deviations: Vec<f64>,
    /// Nodes more than two RMS deviations below the ideal line.
    pub flagged: Vec<usize>,
    /// Nodes whose SC_odd was clamped away from zero.
    pub clamped: Vec<usize>,
    pub spectral_gap: f64,
    pub is_good_expansion: bool,
}

const GE_SLOPE_TOL: f64 = 0.05;

/// Expansion test on the principal eigenvector against odd subgraph
/// centrality. Logs are taken in a shifted form so large λ cannot overflow.
pub fn good_expansion_test(t: &Topology, weighted: bool) -> Result<GoodExpansion> {
    undirected_only(t, "the good expansion test")?;
    if weighted && !t.is_weighted() {
        return Err(Error::incompatible(
            "weighted good expansion needs edge weights",
        ));
    }
    if t.node_count() < 2 || components(t).count() > 1 {
        return Err(Error::undefined(
            "good expansion needs a connected graph with v >= 2",
        ));
    }
    let cache = SpectralCache::new(t, weighted);
    let e = cache.adjacency_eigen()?;
    let n = e.len();
    let (lmax, mut u) = e.top();
    if u.sum() < 0.0 {
        u = -u;
    }
    // log sinh(λ) = λ − ln 2 + ln(1 − e^{−2λ})
    let log_sinh_max = lmax - std::f64::consts::LN_2 + (-(-2.0 * lmax).exp()).ln_1p();
    let mut clamped = Vec::new();
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for i in 0..n {
        let scaled: f64 = (0..n)
            .map(|j| {
                let l = e.values[j];
                e.vectors[(i, j)].powi(2) * 0.5 * ((l - lmax).exp() - (-l - lmax).exp())
            })
            .sum();
        let scaled = if scaled <= 1e-300 {
            clamped.push(i);
            1e-300
        } else {
            scaled
        };
        xs.push(lmax + scaled.ln());
        ys.push(u[i].abs().max(1e-300).ln());
    }
    let expected_intercept = -0.5 * log_sinh_max;
    let deviations: Vec<f64> = (0..n)
        .map(|i| ys[i] - (expected_intercept + 0.5 * xs[i]))
        .collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let (slope, intercept) = if sxx > 1e-18 * n as f64 {
        let b = sxy / sxx;
        (Some(b), Some(my - b * mx))
    } else {
        (None, None)
    };
    let residuals: Vec<f64> = match (slope, intercept) {
        (Some(b), Some(a)) => (0..n).map(|i| ys[i] - (a + b * xs[i])).collect(),
        _ => vec![0.0; n],
    };
    let sd = (deviations.iter().map(|r| r * r).sum::<f64>() / n as f64).sqrt();
    let flagged = if sd > 1e-9 {
        (0..n).filter(|&i| deviations[i] < -2.0 * sd).collect()
    } else {
        Vec::new()
    };
    let is_good_expansion = match slope {
        Some(b) => (b - 0.5).abs() <= GE_SLOPE_TOL,
        None => true,
    };
    Ok(GoodExpansion {
        slope,
        intercept,
        expected_intercept,
        residuals,
        deviations,
        flagged,
        clamped,
        spectral_gap: cache.spectral_gap()?,
        is_good_expansion,
    })
}

/// Exact determinant is computed up to this many nodes.
pub const SPANNING_EXACT_CAP: usize = 50;

#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTrees {
    /// ln N_ST; `None` when N_ST = 0.
    pub ln_count: Option<f64>,
    pub exact: Option<BigUint>,
}

/// N_ST = det of L with row and column 0 deleted.
pub fn spanning_tree_count(t: &Topology) -> Result<SpanningTrees> {
    spanning_tree_count_deleting(t, 0)
}

pub fn spanning_tree_count_deleting(t: &Topology, deleted: usize) -> Result<SpanningTrees> {
    undirected_only(t, "spanning tree count")?;
    t.check_node(deleted)?;
    let n = t.node_count();
    if n > DENSE_CAP {
        return Err(Error::TooLarge {
            what: "nodes for the Laplacian determinant",
            actual: n,
            cap: DENSE_CAP,
        });
    }
    if components(t).count() > 1 {
        return Ok(SpanningTrees {
            ln_count: None,
            exact: (n <= SPANNING_EXACT_CAP).then(BigUint::zero),
        });
    }
    if n == 1 {
        return Ok(SpanningTrees {
            ln_count: Some(0.0),
            exact: Some(BigUint::from(1u8)),
        });
    }
    let keep: Vec<usize> = (0..n).filter(|&u| u != deleted).collect();
    let full = SpectralCache::new(t, false).laplacian();
    let reduced = DMatrix::from_fn(n - 1, n - 1, |i, j| full[(keep[i], keep[j])]);
    let exact = (n <= SPANNING_EXACT_CAP).then(|| bareiss(&reduced));
    let ln_count = Cholesky::new(reduced)
        .map(|c| 2.0 * c.l().diagonal().iter().map(|x| x.ln()).sum::<f64>())
        .ok_or_else(|| Error::NoConvergence("reduced Laplacian is not positive definite".into()))?;
    Ok(SpanningTrees {
        ln_count: Some(ln_count),
        exact,
    })
}

/// Fraction-free Gaussian elimination on an integer matrix.
fn bareiss(m: &DMatrix<f64>) -> BigUint {
    let n = m.nrows();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| BigInt::from(m[(i, j)].round() as i64))
                .collect()
        })
        .collect();
    let mut prev = BigInt::from(1);
    let mut sign = 1;
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigUint::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let det: BigInt = &a[n - 1][n - 1] * BigInt::from(sign);
    det.abs().to_biguint().unwrap()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaturalConnectivity {
    pub value: f64,
    /// Bounds when only the top of the spectrum was computed.
    pub bounds: Option<(f64, f64)>,
    pub exact: bool,
}

/// Eigenvalues used by the approximation above the dense cap.
const NATURAL_TOP_K: usize = 30;

/// λ̄ = ln(Σ e^{λ_i}/v) via log-sum-exp. Above the dense cap the top
/// eigenvalues come from Lanczos; the rest are bounded using trace(A) = 0
/// (Jensen) from below and by the smallest kept eigenvalue from above.
pub fn natural_connectivity(t: &Topology) -> Result<NaturalConnectivity> {
    undirected_only(t, "natural connectivity")?;
    let n = t.node_count();
    if n == 0 {
        return Err(Error::undefined("empty graph"));
    }
    if n <= DENSE_CAP {
        let cache = SpectralCache::new(t, false);
        let vals = &cache.adjacency_eigen()?.values;
        return Ok(NaturalConnectivity {
            value: log_sum_exp(vals.iter().copied()) - (n as f64).ln(),
            bounds: None,
            exact: true,
        });
    }
    let ritz = lanczos(n, |x| sparse_apply(t, false, x), 300, None, 11);
    let top: Vec<f64> = ritz.iter().rev().take(NATURAL_TOP_K).copied().collect();
    let rest = (n - top.len()) as f64;
    let mean_rest = -top.iter().sum::<f64>() / rest;
    let kth = *top.last().unwrap();
    let lo = log_sum_exp(top.iter().copied().chain([mean_rest + rest.ln()])) - (n as f64).ln();
    let hi = log_sum_exp(top.iter().copied().chain([kth + rest.ln()])) - (n as f64).ln();
    Ok(NaturalConnectivity {
        value: lo,
        bounds: Some((lo, hi)),
        exact: false,
    })
}

fn log_sum_exp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let m = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    m + xs.map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn eigenvector_examples() {
        let c = eigenvector_centrality(&cycle(6).unwrap(), 1e-12, 10000).unwrap();
        assert!(c.iter().all(|x| (x - 1.0 / 6.0).abs() < 1e-9));
        let s = eigenvector_centrality(&star(4).unwrap(), 1e-13, 10000).unwrap();
        assert!((s[0] / s[1] - 3f64.sqrt()).abs() < 1e-8);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetry_ratio_examples() {
        assert!((symmetry_ratio(&complete(5).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((symmetry_ratio(&path(3).unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!(symmetry_ratio(&Topology::undirected(4, &[(0, 1), (2, 3)]).unwrap()).is_err());
    }

    #[test]
    fn algebraic_connectivity_examples() {
        for v in 2..8 {
            assert!(
                (algebraic_connectivity(&complete(v).unwrap()).unwrap() - v as f64).abs() < 1e-9
            );
        }
        assert_eq!(
            algebraic_connectivity(&Topology::undirected(3, &[(0, 1)]).unwrap()).unwrap(),
            0.0
        );
        assert!((algebraic_connectivity(&path(2).unwrap()).unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn spanning_tree_examples() {
        let k4 = spanning_tree_count(&complete(4).unwrap()).unwrap();
        assert_eq!(k4.exact, Some(BigUint::from(16u8)));
        assert!((k4.ln_count.unwrap() - 16f64.ln()).abs() < 1e-9);
        for n in 3..9 {
            let c = spanning_tree_count(&cycle(n).unwrap()).unwrap();
            assert_eq!(c.exact, Some(BigUint::from(n)));
        }
        let tree = random_tree(20, 3).unwrap();
        assert_eq!(
            spanning_tree_count(&tree).unwrap().exact,
            Some(BigUint::from(1u8))
        );
        let t = erdos_renyi(9, 0.5, 2).unwrap();
        let a = spanning_tree_count_deleting(&t, 0).unwrap().exact;
        assert_eq!(a, spanning_tree_count_deleting(&t, 5).unwrap().exact);
        let dis = spanning_tree_count(&Topology::undirected(3, &[(0, 1)]).unwrap()).unwrap();
        assert_eq!((dis.ln_count, dis.exact), (None, Some(BigUint::zero())));
    }

    #[test]
    fn natural_connectivity_examples() {
        assert_eq!(
            natural_connectivity(&Topology::undirected(1, &[]).unwrap())
                .unwrap()
                .value,
            0.0
        );
        let k2 = natural_connectivity(&path(2).unwrap()).unwrap().value;
        assert!((k2 - 1f64.cosh().ln()).abs() < 1e-12);
    }

    #[test]
    fn good_expansion_homogeneous_and_bottleneck() {
        let k = good_expansion_test(&complete(7).unwrap(), false).unwrap();
        assert!(k.residuals.iter().all(|r| r.abs() < 1e-9));
        assert!(k.flagged.is_empty());
        let mut edges = Vec::new();
        for x in 0..10 {
            for y in x + 1..10 {
                edges.push((x, y));
            }
        }
        for x in 13..17 {
            for y in x + 1..17 {
                edges.push((x, y));
            }
        }
        edges.extend([(9, 10), (10, 11), (11, 12), (12, 13)]);
        let b = Topology::undirected(17, &edges).unwrap();
        let ge = good_expansion_test(&b, false).unwrap();
        assert!(!ge.flagged.is_empty());
        assert!(ge.flagged.iter().all(|&i| i >= 12), "{:?}", ge.flagged);
    }
}
