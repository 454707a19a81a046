//! N-means clustering: greedy k-means++ seeding, Lloyd iterations, and
//! several restarts keeping the lowest inertia. Defaults follow the
//! scikit-learn estimator (10 restarts, 300 iterations, tolerance 1e-4
//! relative to the mean feature variance).

use ndarray::{Array2, ArrayView1, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KMeansConfig {
    pub n_init: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        Self {
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clustering {
    pub assignments: Vec<usize>,
    /// `n_clusters x dim`.
    pub centroids: Array2<f64>,
    pub inertia: f64,
    /// Lloyd iterations used by the retained restart.
    pub n_iter: usize,
    /// Empty clusters repaired during the retained restart.
    pub empty_cluster_repairs: usize,
}

pub fn n_means(features: &Array2<f64>, n_clusters: usize, seed: u64) -> Result<Clustering> {
    n_means_with(features, n_clusters, seed, &KMeansConfig::default())
}

pub fn n_means_with(features: &Array2<f64>, n_clusters: usize, seed: u64, config: &KMeansConfig) -> Result<Clustering> {
    let n = features.nrows();
    if n_clusters == 0 {
        return Err(Error::InvalidArgument("n_clusters must be >= 1".into()));
    }
    if n < n_clusters {
        return Err(Error::InvalidArgument(format!(
            "{n} rows cannot form {n_clusters} clusters"
        )));
    }
    let tol = config.tol * mean_variance(features);
    let mut best: Option<Clustering> = None;
    for restart in 0..config.n_init.max(1) {
        let mut rng = seed::rng_at(seed, &[seed::STREAM_KMEANS, restart as u64]);
        let init = kmeans_plus_plus(features, n_clusters, &mut rng);
        let (run, _) = lloyd(features, init, config.max_iter, tol);
        // strict comparison keeps the earliest restart on ties
        if best.as_ref().is_none_or(|b| run.inertia < b.inertia) {
            best = Some(run);
        }
    }
    Ok(best.expect("at least one restart"))
}

fn mean_variance(x: &Array2<f64>) -> f64 {
    let n = x.nrows() as f64;
    let mean = x.mean_axis(Axis(0)).expect("nonempty");
    x.axis_iter(Axis(1))
        .zip(mean.iter())
        .map(|(col, &m)| col.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n)
        .sum::<f64>()
        / x.ncols().max(1) as f64
}

fn sq_dist(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Greedy k-means++: each new center is the best of `2 + ln k` candidates
/// sampled proportionally to the squared distance to the chosen centers.
fn kmeans_plus_plus<R: Rng>(x: &Array2<f64>, k: usize, rng: &mut R) -> Array2<f64> {
    let n = x.nrows();
    let trials = 2 + (k as f64).ln().floor() as usize;
    let mut centers = Array2::zeros((k, x.ncols()));
    let first = rng.random_range(0..n);
    centers.row_mut(0).assign(&x.row(first));
    let mut closest: Vec<f64> = (0..n).map(|i| sq_dist(x.row(i), x.row(first))).collect();
    let mut potential: f64 = closest.iter().sum();

    for c in 1..k {
        let mut best_cand = None;
        let mut best_pot = f64::INFINITY;
        let mut best_dist = Vec::new();
        for _ in 0..trials {
            let cand = if potential > 0.0 {
                let target = rng.random::<f64>() * potential;
                let mut acc = 0.0;
                let mut pick = n - 1;
                for (i, &d) in closest.iter().enumerate() {
                    acc += d;
                    if acc > target {
                        pick = i;
                        break;
                    }
                }
                pick
            } else {
                rng.random_range(0..n)
            };
            let dist: Vec<f64> = (0..n)
                .map(|i| closest[i].min(sq_dist(x.row(i), x.row(cand))))
                .collect();
            let pot: f64 = dist.iter().sum();
            if pot < best_pot {
                best_pot = pot;
                best_cand = Some(cand);
                best_dist = dist;
            }
        }
        let cand = best_cand.expect("trials >= 1");
        centers.row_mut(c).assign(&x.row(cand));
        closest = best_dist;
        potential = best_pot;
    }
    centers
}

fn assign(x: &Array2<f64>, centers: &Array2<f64>, labels: &mut [usize], dist: &mut [f64]) -> f64 {
    let mut inertia = 0.0;
    for (i, row) in x.outer_iter().enumerate() {
        // a point keeps its cluster on ties
        let mut best = labels[i];
        let mut best_d = sq_dist(row, centers.row(best));
        for (c, center) in centers.outer_iter().enumerate() {
            let d = sq_dist(row, center);
            if d < best_d {
                best_d = d;
                best = c;
            }
        }
        labels[i] = best;
        dist[i] = best_d;
        inertia += best_d;
    }
    inertia
}

/// Recompute centers as member means. An empty cluster takes the point
/// farthest from its current center (lowest index on ties), drawn from a
/// cluster with more than one member. Returns the number of repairs.
fn update_centers(x: &Array2<f64>, labels: &mut [usize], dist: &mut [f64], centers: &mut Array2<f64>) -> usize {
    let k = centers.nrows();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    let mut repairs = 0;
    for c in 0..k {
        if counts[c] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = f64::NEG_INFINITY;
        for (i, &d) in dist.iter().enumerate() {
            if counts[labels[i]] > 1 && d > far_d {
                far_d = d;
                far = Some(i);
            }
        }
        let i = far.expect("n >= k guarantees a donor cluster");
        counts[labels[i]] -= 1;
        labels[i] = c;
        counts[c] = 1;
        dist[i] = 0.0;
        repairs += 1;
    }
    centers.fill(0.0);
    for (i, row) in x.outer_iter().enumerate() {
        let mut c = centers.row_mut(labels[i]);
        c += &row;
    }
    for (c, mut row) in centers.outer_iter_mut().enumerate() {
        row /= counts[c] as f64;
    }
    repairs
}

/// One Lloyd run. The second return value is the inertia recorded after
/// each assignment step.
fn lloyd(x: &Array2<f64>, mut centers: Array2<f64>, max_iter: usize, tol: f64) -> (Clustering, Vec<f64>) {
    let n = x.nrows();
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0; n];
    let mut trace = Vec::new();
    let mut repairs = 0;
    let mut iters = 0;
    for _ in 0..max_iter.max(1) {
        iters += 1;
        trace.push(assign(x, &centers, &mut labels, &mut dist));
        let old = centers.clone();
        repairs += update_centers(x, &mut labels, &mut dist, &mut centers);
        let shift: f64 = (&centers - &old).iter().map(|v| v * v).sum();
        if shift <= tol {
            break;
        }
    }
    assign(x, &centers, &mut labels, &mut dist);
    repairs += update_centers(x, &mut labels, &mut dist, &mut centers);
    let inertia = x
        .outer_iter()
        .zip(&labels)
        .map(|(row, &l)| sq_dist(row, centers.row(l)))
        .sum();
    (
        Clustering {
            assignments: labels,
            centroids: centers,
            inertia,
            n_iter: iters,
            empty_cluster_repairs: repairs,
        },
        trace,
    )
}
