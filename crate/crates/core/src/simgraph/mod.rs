//! Cosine similarity graphs: construction, sparsification, symmetric
//! normalization, feature diffusion and Laplacian spectra.

mod eigen;
mod export;

pub use eigen::{symmetric_eigenvalues, MAX_QL_ITERATIONS};
pub use export::{to_dot, to_edge_list};

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureSet;

/// Eigenvalues within this distance below zero are clamped to zero.
pub const EIGEN_CLAMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphMode {
    /// Per-row top-k, symmetrized by elementwise max.
    RowTopK { k: usize },
    /// The `k * |V|` globally heaviest edges.
    GlobalTopEdges { k_per_vertex: usize, edges: usize },
    Dense,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Construction {
    pub mode: GraphMode,
    pub symmetrized: bool,
}

/// Undirected weighted graph stored as a dense symmetric adjacency matrix
/// with zero diagonal and weights in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityGraph {
    weights: Array2<f64>,
    construction: Construction,
}

impl SimilarityGraph {
    /// Wrap an explicit adjacency matrix, checking the graph invariants.
    pub fn from_weights(weights: Array2<f64>) -> Result<Self> {
        let n = weights.nrows();
        if weights.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: weights.ncols(),
            });
        }
        for i in 0..n {
            if weights[[i, i]] != 0.0 {
                return Err(Error::InvalidArgument(format!("self-loop on vertex {i}")));
            }
            for j in 0..n {
                let w = weights[[i, j]];
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidArgument(format!("weight {w} at ({i},{j}) outside [0,1]")));
                }
                if w != weights[[j, i]] {
                    return Err(Error::InvalidArgument(format!("asymmetric weight at ({i},{j})")));
                }
            }
        }
        Ok(Self {
            weights,
            construction: Construction {
                mode: GraphMode::Dense,
                symmetrized: false,
            },
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.nrows()
    }

    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn degrees(&self) -> Vec<f64> {
        self.weights.sum_axis(Axis(1)).to_vec()
    }

    /// Upper-triangle edges `(i, j, w)` with `i < j` and `w > 0`.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let n = self.num_vertices();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weights[[i, j]];
                if w > 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    pub fn num_edges(&self) -> usize {
        self.edges().len()
    }
}

/// Pairwise cosine similarities of the rows of `features`. The diagonal is
/// exactly 1.
pub fn cosine_matrix(features: ArrayView2<'_, f64>) -> Result<Array2<f64>> {
    let n = features.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("cosine matrix of zero rows".into()));
    }
    let norms: Vec<f64> = features.outer_iter().map(|r| r.dot(&r).sqrt()).collect();
    if let Some(row) = norms.iter().position(|&x| x == 0.0) {
        return Err(Error::ZeroNorm { row });
    }
    let gram = features.dot(&features.t());
    let mut out = Array2::zeros((n, n));
    for i in 0..n {
        out[[i, i]] = 1.0;
        for j in i + 1..n {
            let c = (gram[[i, j]] / (norms[i] * norms[j])).clamp(-1.0, 1.0);
            out[[i, j]] = c;
            out[[j, i]] = c;
        }
    }
    Ok(out)
}

/// Cosine matrix over selected rows of a feature set.
pub fn cosine_matrix_rows(fs: &FeatureSet, rows: &[usize]) -> Result<Array2<f64>> {
    cosine_matrix(fs.gather(rows).view())
}

/// Keep the `k` largest off-diagonal entries of each row (ties go to the
/// lower column index), then symmetrize with the elementwise max. Negative
/// similarities are dropped. `k >= n - 1` keeps every entry and is recorded
/// as [`GraphMode::Dense`].
pub fn knn_sparsify(m: &Array2<f64>, k: usize) -> Result<SimilarityGraph> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let mut w = Array2::zeros((n, n));
    let dense = k + 1 >= n;
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        if !dense {
            order.sort_by(|&a, &b| m[[i, b]].total_cmp(&m[[i, a]]).then(a.cmp(&b)));
            order.truncate(k);
        }
        for &j in &order {
            let v = m[[i, j]].max(0.0);
            if v > w[[i, j]] {
                w[[i, j]] = v;
            }
            if v > w[[j, i]] {
                w[[j, i]] = v;
            }
        }
    }
    Ok(SimilarityGraph {
        weights: w,
        construction: Construction {
            mode: if dense { GraphMode::Dense } else { GraphMode::RowTopK { k } },
            symmetrized: !dense,
        },
    })
}

/// Keep the `k * n` globally heaviest upper-triangle entries.
pub fn heavier_edges_graph(m: &Array2<f64>, k: usize) -> Result<SimilarityGraph> {
    let budget = k
        .checked_mul(m.nrows())
        .ok_or_else(|| Error::InvalidArgument("edge budget overflows".into()))?;
    let mut g = heavier_edges_budget(m, budget)?;
    g.construction.mode = GraphMode::GlobalTopEdges { k_per_vertex: k, edges: budget };
    Ok(g)
}

/// Keep the `edges` globally heaviest upper-triangle entries; ties go to the
/// lexicographically smaller pair.
pub fn heavier_edges_budget(m: &Array2<f64>, edges: usize) -> Result<SimilarityGraph> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    let available = n * n.saturating_sub(1) / 2;
    if edges > available {
        return Err(Error::InvalidArgument(format!(
            "edge budget {edges} exceeds the {available} available pairs"
        )));
    }
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(available);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j));
        }
    }
    pairs.sort_by(|&(a, b), &(c, d)| m[[c, d]].total_cmp(&m[[a, b]]).then((a, b).cmp(&(c, d))));
    let mut w = Array2::zeros((n, n));
    for &(i, j) in pairs.iter().take(edges) {
        let v = m[[i, j]].max(0.0);
        w[[i, j]] = v;
        w[[j, i]] = v;
    }
    Ok(SimilarityGraph {
        weights: w,
        construction: Construction {
            mode: GraphMode::GlobalTopEdges { k_per_vertex: 0, edges },
            symmetrized: false,
        },
    })
}

/// `D^{-1/2} W D^{-1/2}` with `D^{-1/2} = 0` on isolated vertices.
pub fn normalize_adjacency(g: &SimilarityGraph) -> Array2<f64> {
    let deg = g.degrees();
    let mut e = g.weights.clone();
    for ((i, j), v) in e.indexed_iter_mut() {
        // one square root of the product rounds better than two
        let d = deg[i] * deg[j];
        *v = if d > 0.0 { *v / d.sqrt() } else { 0.0 };
    }
    e
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub alpha: f64,
    pub kappa: usize,
    pub k_neighbors: usize,
}

impl Default for DiffusionParams {
    fn default() -> Self {
        Self {
            alpha: 0.75,
            kappa: 1,
            k_neighbors: 15,
        }
    }
}

/// `(alpha I + E)^kappa F`, applied as `kappa` successive products.
pub fn diffuse(features: &Array2<f64>, g: &SimilarityGraph, params: &DiffusionParams) -> Result<Array2<f64>> {
    if features.nrows() != g.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: g.num_vertices(),
            got: features.nrows(),
        });
    }
    let e = normalize_adjacency(g);
    let mut out = features.clone();
    for _ in 0..params.kappa {
        let propagated = e.dot(&out);
        out = propagated + &(out * params.alpha);
    }
    Ok(out)
}

/// Build the k-NN cosine graph of `features` and diffuse them over it.
pub fn diffuse_features(features: &Array2<f64>, params: &DiffusionParams) -> Result<Array2<f64>> {
    if params.k_neighbors == 0 {
        return Err(Error::InvalidArgument("k_neighbors must be >= 1".into()));
    }
    let g = knn_sparsify(&cosine_matrix(features.view())?, params.k_neighbors)?;
    diffuse(features, &g, params)
}

/// Combinatorial Laplacian `L = D - W`.
pub fn laplacian(g: &SimilarityGraph) -> Array2<f64> {
    let mut l = -&g.weights;
    for (i, d) in g.degrees().into_iter().enumerate() {
        l[[i, i]] = d;
    }
    l
}

/// Laplacian spectrum, ascending. Values within [`EIGEN_CLAMP_TOL`] of zero
/// are reported as exactly zero.
pub fn laplacian_eigenvalues(g: &SimilarityGraph) -> Result<Vec<f64>> {
    let mut ev = symmetric_eigenvalues(&laplacian(g))?;
    for v in ev.iter_mut() {
        if v.abs() <= EIGEN_CLAMP_TOL {
            *v = 0.0;
        }
    }
    Ok(ev)
}
