//! The five validation-free gauges. Each one is a pure function of the rows a
//! learner sees during training.

use ndarray::{Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simgraph::{cosine_matrix, knn_sparsify, laplacian_eigenvalues};

pub const DEFAULT_K_NEIGHBORS: usize = 15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    LrLoss,
    Similarity,
    DbScore,
    NthEgv,
    LrConfLog,
    LrConfMmp,
}

impl Gauge {
    pub const ALL: [Gauge; 6] = [
        Gauge::LrLoss,
        Gauge::Similarity,
        Gauge::DbScore,
        Gauge::NthEgv,
        Gauge::LrConfLog,
        Gauge::LrConfMmp,
    ];

    /// Column name used in CSV outputs and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            Gauge::LrLoss => "lr_loss",
            Gauge::Similarity => "similarity",
            Gauge::DbScore => "db_score",
            Gauge::NthEgv => "nth_egv",
            Gauge::LrConfLog => "lr_conf_log",
            Gauge::LrConfMmp => "lr_conf_mmp",
        }
    }

    pub fn parse(s: &str) -> Result<Gauge> {
        Gauge::ALL
            .into_iter()
            .find(|g| g.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown gauge `{s}`")))
    }

    /// True when a larger value signals an easier task. A small N-th
    /// eigenvalue means the graph nearly splits into N components, so that
    /// gauge points the other way.
    pub fn higher_is_easier(self) -> bool {
        matches!(self, Gauge::Similarity | Gauge::LrConfMmp)
    }
}

impl std::fmt::Display for Gauge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Mean natural-log cross-entropy of the true class.
pub fn lr_training_loss(probs: &Array2<f64>, labels: &[usize]) -> Result<f64> {
    if probs.nrows() != labels.len() {
        return Err(Error::DimensionMismatch { expected: probs.nrows(), got: labels.len() });
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("loss over zero rows".into()));
    }
    let mut total = 0.0;
    for (i, &y) in labels.iter().enumerate() {
        let p = *probs
            .get([i, y])
            .ok_or_else(|| Error::InvalidArgument(format!("label {y} out of range")))?;
        if p <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "row {i}: true-class probability is 0; clamp probabilities upstream"
            )));
        }
        total -= p.ln();
    }
    Ok(total / labels.len() as f64)
}

/// Mean intra-class cosine minus the largest inter-class cosine, averaged
/// over classes. A class with a single shot has intra = 1.
pub fn similarity_metric(features: ArrayView2<'_, f64>, labels: &[usize], n_classes: usize) -> Result<f64> {
    if n_classes < 2 {
        return Err(Error::InvalidArgument("similarity needs at least 2 classes".into()));
    }
    if features.nrows() != labels.len() {
        return Err(Error::DimensionMismatch { expected: features.nrows(), got: labels.len() });
    }
    let mut members = vec![Vec::new(); n_classes];
    for (i, &y) in labels.iter().enumerate() {
        members
            .get_mut(y)
            .ok_or_else(|| Error::InvalidArgument(format!("label {y} >= {n_classes}")))?
            .push(i);
    }
    if let Some(c) = members.iter().position(Vec::is_empty) {
        return Err(Error::InvalidArgument(format!("class {c} has no shots")));
    }
    let cos = cosine_matrix(features)?;
    let intra: Vec<f64> = members
        .iter()
        .map(|m| {
            if m.len() < 2 {
                return 1.0;
            }
            let mut s = 0.0;
            for (a, &i) in m.iter().enumerate() {
                for &j in &m[a + 1..] {
                    s += cos[[i, j]];
                }
            }
            s / (m.len() * (m.len() - 1) / 2) as f64
        })
        .collect();
    let inter = |a: &[usize], b: &[usize]| {
        let s: f64 = a.iter().flat_map(|&i| b.iter().map(move |&j| (i, j))).map(|(i, j)| cos[[i, j]]).sum();
        s / (a.len() * b.len()) as f64
    };
    let mut total = 0.0;
    for c in 0..n_classes {
        let worst = (0..n_classes)
            .filter(|&o| o != c)
            .map(|o| inter(&members[c], &members[o]))
            .fold(f64::NEG_INFINITY, f64::max);
        total += intra[c] - worst;
    }
    Ok(total / n_classes as f64)
}

/// Davies-Bouldin score of a partition of `features` into `n_clusters`
/// non-empty groups.
pub fn db_score(features: ArrayView2<'_, f64>, assignments: &[usize], n_clusters: usize) -> Result<f64> {
    if n_clusters < 2 {
        return Err(Error::InvalidArgument("DB score needs at least 2 clusters".into()));
    }
    if features.nrows() != assignments.len() {
        return Err(Error::DimensionMismatch { expected: features.nrows(), got: assignments.len() });
    }
    let dim = features.ncols();
    let mut centroids = Array2::<f64>::zeros((n_clusters, dim));
    let mut counts = vec![0usize; n_clusters];
    for (row, &c) in features.outer_iter().zip(assignments) {
        if c >= n_clusters {
            return Err(Error::InvalidArgument(format!("cluster {c} >= {n_clusters}")));
        }
        let mut mu = centroids.row_mut(c);
        mu += &row;
        counts[c] += 1;
    }
    if let Some(c) = counts.iter().position(|&n| n == 0) {
        return Err(Error::InvalidArgument(format!("cluster {c} is empty")));
    }
    for (mut mu, &n) in centroids.outer_iter_mut().zip(&counts) {
        mu /= n as f64;
    }
    let mut delta = vec![0.0; n_clusters];
    for (row, &c) in features.outer_iter().zip(assignments) {
        delta[c] += (&row - &centroids.row(c)).mapv(|v| v * v).sum().sqrt();
    }
    for (d, &n) in delta.iter_mut().zip(&counts) {
        *d /= n as f64;
    }
    let mut total = 0.0;
    for c in 0..n_clusters {
        let mut worst = f64::NEG_INFINITY;
        for o in (0..n_clusters).filter(|&o| o != c) {
            let sep = (&centroids.row(c) - &centroids.row(o)).mapv(|v| v * v).sum().sqrt();
            if sep == 0.0 {
                return Err(Error::Degenerate("degenerate centroids".into()));
            }
            worst = worst.max((delta[c] + delta[o]) / sep);
        }
        total += worst;
    }
    Ok(total / n_clusters as f64)
}

/// `lambda_n` (1-based, ascending) of the Laplacian of the k-NN cosine graph
/// over the rows of `features`.
pub fn nth_eigenvalue_gauge(features: ArrayView2<'_, f64>, n: usize, k_neighbors: usize) -> Result<f64> {
    if n == 0 || features.nrows() < n {
        return Err(Error::InvalidArgument(format!(
            "need at least {n} vertices, got {}",
            features.nrows()
        )));
    }
    let g = knn_sparsify(&cosine_matrix(features)?, k_neighbors)?;
    Ok(laplacian_eigenvalues(&g)?[n - 1])
}

/// Confidence on unlabeled rows: `(-mean ln max_c p, mean max_c p)`.
pub fn lr_confidence(probs: &Array2<f64>) -> Result<(f64, f64)> {
    if probs.nrows() == 0 || probs.ncols() == 0 {
        return Err(Error::InvalidArgument("confidence over zero rows".into()));
    }
    let maxes: Vec<f64> = probs
        .axis_iter(Axis(0))
        .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let n = maxes.len() as f64;
    let log_form = -maxes.iter().map(|p| p.ln()).sum::<f64>() / n;
    let mmp = maxes.iter().sum::<f64>() / n;
    Ok((log_form, mmp))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Setting {
    Supervised,
    SemiSupervised,
    Unsupervised,
}

impl Setting {
    pub fn name(self) -> &'static str {
        match self {
            Setting::Supervised => "supervised",
            Setting::SemiSupervised => "semi-supervised",
            Setting::Unsupervised => "unsupervised",
        }
    }

    pub fn parse(s: &str) -> Result<Setting> {
        match s {
            "supervised" => Ok(Setting::Supervised),
            "semi-supervised" | "semi_supervised" | "semi" => Ok(Setting::SemiSupervised),
            "unsupervised" => Ok(Setting::Unsupervised),
            _ => Err(Error::InvalidArgument(format!("unknown setting `{s}`"))),
        }
    }

    /// Gauges that the setting makes computable.
    pub fn gauges(self) -> &'static [Gauge] {
        match self {
            Setting::Supervised => &[Gauge::LrLoss, Gauge::Similarity, Gauge::DbScore, Gauge::NthEgv],
            Setting::SemiSupervised => &Gauge::ALL,
            Setting::Unsupervised => &[Gauge::DbScore, Gauge::NthEgv],
        }
    }
}

impl std::fmt::Display for Setting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Per-episode gauge values and realized performance (accuracy, or ARI in
/// the unsupervised setting). Unavailable gauges are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeReport {
    pub episode_id: u64,
    pub setting: Setting,
    pub n_way: usize,
    pub k_shot: usize,
    pub q_query: usize,
    pub lr_training_loss: Option<f64>,
    pub similarity: Option<f64>,
    pub db_score: Option<f64>,
    pub nth_eigenvalue: Option<f64>,
    pub lr_confidence_log: Option<f64>,
    pub lr_confidence_mean_max_prob: Option<f64>,
    pub realized_performance: f64,
}

impl GaugeReport {
    pub const CSV_HEADER: &'static str =
        "episode_id,setting,N,K,Q,lr_loss,similarity,db_score,nth_egv,lr_conf_log,lr_conf_mmp,performance";

    pub fn get(&self, g: Gauge) -> Option<f64> {
        match g {
            Gauge::LrLoss => self.lr_training_loss,
            Gauge::Similarity => self.similarity,
            Gauge::DbScore => self.db_score,
            Gauge::NthEgv => self.nth_eigenvalue,
            Gauge::LrConfLog => self.lr_confidence_log,
            Gauge::LrConfMmp => self.lr_confidence_mean_max_prob,
        }
    }

    /// One CSV line (no trailing newline); missing gauges are empty cells.
    pub fn csv_row(&self) -> String {
        let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.episode_id,
            self.setting,
            self.n_way,
            self.k_shot,
            self.q_query,
            cell(self.lr_training_loss),
            cell(self.similarity),
            cell(self.db_score),
            cell(self.nth_eigenvalue),
            cell(self.lr_confidence_log),
            cell(self.lr_confidence_mean_max_prob),
            self.realized_performance
        )
    }
}
