//! Dense spectral machinery shared by the spectral metrics.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Topology;

/// Full dense eigendecomposition is refused above this many nodes.
pub const DENSE_CAP: usize = 2000;

/// Eigenpairs sorted by ascending eigenvalue; column i of `vectors` belongs
/// to `values[i]`.
#[derive(Debug, Clone)]
pub struct Eigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Eigen {
    pub fn of_symmetric(m: DMatrix<f64>) -> Self {
        let e = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
        let values = DVector::from_iterator(order.len(), order.iter().map(|&i| e.eigenvalues[i]));
        let vectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&i| e.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        Eigen { values, vectors }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Largest eigenpair.
    pub fn top(&self) -> (f64, DVector<f64>) {
        let k = self.len() - 1;
        (self.values[k], self.vectors.column(k).into_owned())
    }
}

/// Per-topology spectral data, computed on first use.
pub struct SpectralCache<'a> {
    t: &'a Topology,
    weighted: bool,
    adjacency_eigen: OnceLock<Eigen>,
    laplacian_eigen: OnceLock<Eigen>,
    pinv: OnceLock<DMatrix<f64>>,
}

impl<'a> SpectralCache<'a> {
    /// `weighted` uses edge weights as matrix entries (only meaningful for
    /// weighted topologies).
    pub fn new(t: &'a Topology, weighted: bool) -> Self {
        SpectralCache {
            t,
            weighted: weighted && t.is_weighted(),
            adjacency_eigen: OnceLock::new(),
            laplacian_eigen: OnceLock::new(),
            pinv: OnceLock::new(),
        }
    }

    pub fn topology(&self) -> &Topology {
        self.t
    }

    pub fn is_weighted(&self) -> bool {
        self.weighted
    }

    fn dense_ok(&self) -> Result<()> {
        let v = self.t.node_count();
        if v > DENSE_CAP {
            return Err(Error::TooLarge {
                what: "nodes for dense eigendecomposition",
                actual: v,
                cap: DENSE_CAP,
            });
        }
        if v == 0 {
            return Err(Error::undefined("empty graph"));
        }
        Ok(())
    }

    /// A of the underlying undirected graph (weights if weighted).
    pub fn adjacency(&self) -> DMatrix<f64> {
        symmetric_adjacency(self.t, self.weighted)
    }

    /// L = D − A of the underlying undirected graph.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let a = self.adjacency();
        let mut l = -a.clone();
        for i in 0..a.nrows() {
            l[(i, i)] = a.row(i).sum();
        }
        l
    }

    pub fn adjacency_eigen(&self) -> Result<&Eigen> {
        self.dense_ok()?;
        Ok(self
            .adjacency_eigen
            .get_or_init(|| Eigen::of_symmetric(self.adjacency())))
    }

    pub fn laplacian_eigen(&self) -> Result<&Eigen> {
        self.dense_ok()?;
        Ok(self
            .laplacian_eigen
            .get_or_init(|| Eigen::of_symmetric(self.laplacian())))
    }

    /// Moore–Penrose pseudoinverse L⁺; eigenvalues below 1e−10·λ_max are
    /// treated as zero.
    pub fn laplacian_pinv(&self) -> Result<&DMatrix<f64>> {
        let e = self.laplacian_eigen()?;
        Ok(self.pinv.get_or_init(|| {
            let cut = 1e-10
                * e.values
                    .iter()
                    .fold(0.0f64, |m, x| m.max(x.abs()))
                    .max(1e-300);
            let n = e.len();
            let mut p = DMatrix::zeros(n, n);
            for k in 0..n {
                if e.values[k].abs() > cut {
                    let u = e.vectors.column(k);
                    p += (u * u.transpose()) / e.values[k];
                }
            }
            p
        }))
    }

    /// Δλ = λ_v − λ_{v−1} of A.
    pub fn spectral_gap(&self) -> Result<f64> {
        let e = self.adjacency_eigen()?;
        if e.len() < 2 {
            return Err(Error::undefined("spectral gap needs v >= 2"));
        }
        Ok(e.values[e.len() - 1] - e.values[e.len() - 2])
    }

    /// N(A): rows of A divided by twice their sum, diagonal set to 1/2.
    pub fn normalized(&self) -> DMatrix<f64> {
        normalized_of(&self.adjacency())
    }

    /// R(A) = D⁻¹A with out-degrees (rows of isolated nodes stay zero).
    pub fn random_walk_matrix(&self) -> DMatrix<f64> {
        let a = directed_adjacency(self.t, self.weighted);
        row_normalized(&a)
    }
}

pub(crate) fn symmetric_adjacency(t: &Topology, weighted: bool) -> DMatrix<f64> {
    let n = t.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (id, &(u, w)) in t.edges().iter().enumerate() {
        let x = if weighted { t.weight(id) } else { 1.0 };
        a[(u, w)] = x;
        a[(w, u)] = x;
    }
    a
}

pub(crate) fn directed_adjacency(t: &Topology, weighted: bool) -> DMatrix<f64> {
    if !t.is_directed() {
        return symmetric_adjacency(t, weighted);
    }
    let n = t.node_count();
    let mut a = DMatrix::zeros(n, n);
    for (id, &(u, w)) in t.edges().iter().enumerate() {
        a[(u, w)] = if weighted { t.weight(id) } else { 1.0 };
    }
    a
}

pub(crate) fn row_normalized(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut r = a.clone();
    for i in 0..a.nrows() {
        let s = a.row(i).sum();
        if s > 0.0 {
            r.row_mut(i).scale_mut(1.0 / s);
        }
    }
    r
}

pub(crate) fn normalized_of(a: &DMatrix<f64>) -> DMatrix<f64> {
    let mut m = a.clone();
    for i in 0..a.nrows() {
        let s = a.row(i).sum();
        if s > 0.0 {
            m.row_mut(i).scale_mut(0.5 / s);
        }
        m[(i, i)] = 0.5;
    }
    m
}

/// Extremal eigenvalues of a symmetric operator by Lanczos with full
/// reorthogonalisation. Returns the Ritz values ascending.
pub(crate) fn lanczos(
    n: usize,
    apply: impl Fn(&DVector<f64>) -> DVector<f64>,
    steps: usize,
    deflate: Option<&DVector<f64>>,
    seed: u64,
) -> Vec<f64> {
    use rand::Rng;
    let mut r = crate::rng(seed);
    let project = |x: &mut DVector<f64>| {
        if let Some(d) = deflate {
            let c = d.dot(x) / d.dot(d);
            *x -= d * c;
        }
    };
    let mut q = DVector::from_fn(n, |_, _| r.gen::<f64>() - 0.5);
    project(&mut q);
    q /= q.norm();
    let m = steps.min(n);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(m);
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    for j in 0..m {
        basis.push(q.clone());
        let mut w = apply(&q);
        project(&mut w);
        let a = q.dot(&w);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&w);
                w -= b * c;
            }
        }
        let b = w.norm();
        if b < 1e-10 || j + 1 == m {
            break;
        }
        beta.push(b);
        q = w / b;
    }
    let k = alpha.len();
    let mut tri = DMatrix::zeros(k, k);
    for i in 0..k {
        tri[(i, i)] = alpha[i];
        if i + 1 < k {
            tri[(i, i + 1)] = beta[i];
            tri[(i + 1, i)] = beta[i];
        }
    }
    let mut vals: Vec<f64> = SymmetricEigen::new(tri)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// y = A·x for the underlying undirected adjacency without forming A.
pub(crate) fn sparse_apply(t: &Topology, weighted: bool, x: &DVector<f64>) -> DVector<f64> {
    let g = t.underlying_undirected();
    let mut y = DVector::zeros(x.len());
    for u in 0..g.node_count() {
        y[u] = g
            .neighbors(u)
            .iter()
            .map(|&(w, id)| if weighted && g.is_weighted() { g.weight(id) } else { 1.0 } * x[w])
            .sum();
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate::*;

    #[test]
    fn eigen_residuals_small() {
        for seed in 0..3 {
            let t = erdos_renyi(40, 0.15, seed).unwrap();
            let c = SpectralCache::new(&t, false);
            let a = c.adjacency();
            let e = c.adjacency_eigen().unwrap();
            for k in 0..e.len() {
                let u = e.vectors.column(k);
                assert!((&a * u - u * e.values[k]).norm() < 1e-8);
            }
            assert!(e.values.sum().abs() < 1e-9);
        }
    }

    #[test]
    fn pseudoinverse_identity() {
        let t = Topology::undirected(5, &[(0, 1), (1, 2), (3, 4)]).unwrap();
        let c = SpectralCache::new(&t, false);
        let p = c.laplacian_pinv().unwrap();
        let l = c.laplacian();
        assert!((p * &l * p - p).norm() < 1e-10);
        let zeros = c
            .laplacian_eigen()
            .unwrap()
            .values
            .iter()
            .filter(|x| x.abs() < 1e-9)
            .count();
        assert_eq!(zeros, 2);
    }

    #[test]
    fn normalized_rows() {
        let t = star(4).unwrap();
        let n = SpectralCache::new(&t, false).normalized();
        for i in 0..4 {
            assert!((n.row(i).sum() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lanczos_extremes() {
        let t = erdos_renyi(60, 0.1, 4).unwrap();
        let c = SpectralCache::new(&t, false);
        let exact = c.adjacency_eigen().unwrap().values.clone();
        let ritz = lanczos(60, |x| sparse_apply(&t, false, x), 60, None, 1);
        assert!((ritz.last().unwrap() - exact[59]).abs() < 1e-8);
        assert!((ritz[0] - exact[0]).abs() < 1e-8);
    }
}
