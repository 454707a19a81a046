//! Per-episode evaluation: train the setting's learner, compute the gauges it
//! makes available, and score realized performance.

use ndarray::{concatenate, s, Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::episode::Episode;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::{
    db_score, lr_confidence, lr_training_loss, similarity_metric, GaugeReport, Setting,
};
use crate::learners::{
    adjusted_rand_index, argmax_rows, n_means_with, predict_proba, train_logreg, KMeansConfig, LogRegConfig,
};
use crate::seed;
use crate::simgraph::{cosine_matrix, diffuse_features, knn_sparsify, laplacian_eigenvalues, DiffusionParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct TaskOptions {
    pub logreg: LogRegConfig,
    /// Also sets the neighbor count of the eigenvalue gauge's graph.
    pub diffusion: DiffusionParams,
    pub kmeans: KMeansConfig,
}

/// Learner inputs after the setting's preprocessing.
struct Prepared {
    /// Rows the label-free gauges look at.
    unlabeled: Array2<f64>,
    unlabeled_truth: Vec<usize>,
    train: Option<(Array2<f64>, Vec<usize>)>,
    eval: (Array2<f64>, Vec<usize>),
}

fn prepare(fs: &FeatureSet, ep: &Episode, setting: Setting, opts: &TaskOptions) -> Result<Prepared> {
    let (s_rows, s_lab) = ep.support_rows();
    let (q_rows, q_lab) = ep.query_rows();
    match setting {
        Setting::Supervised => {
            let (t_rows, t_lab) = ep.test_rows();
            if t_rows.is_empty() {
                return Err(Error::Sampling("supervised task without test rows".into()));
            }
            let support = fs.gather(&s_rows);
            Ok(Prepared {
                unlabeled: support.clone(),
                unlabeled_truth: s_lab.clone(),
                train: Some((support, s_lab)),
                eval: (fs.gather(&t_rows), t_lab),
            })
        }
        Setting::SemiSupervised => {
            if q_rows.is_empty() {
                return Err(Error::Sampling("semi-supervised task without queries".into()));
            }
            let all: Vec<usize> = s_rows.iter().chain(&q_rows).copied().collect();
            let diffused = diffuse_features(&fs.gather(&all), &opts.diffusion)?;
            let ns = s_rows.len();
            let truth = s_lab.iter().chain(&q_lab).copied().collect();
            Ok(Prepared {
                train: Some((diffused.slice(s![..ns, ..]).to_owned(), s_lab)),
                eval: (diffused.slice(s![ns.., ..]).to_owned(), q_lab),
                unlabeled: diffused,
                unlabeled_truth: truth,
            })
        }
        Setting::Unsupervised => {
            if q_rows.is_empty() {
                return Err(Error::Sampling("unsupervised task without queries".into()));
            }
            let diffused = diffuse_features(&fs.gather(&q_rows), &opts.diffusion)?;
            Ok(Prepared {
                unlabeled: diffused.clone(),
                unlabeled_truth: q_lab.clone(),
                train: None,
                eval: (diffused, q_lab),
            })
        }
    }
}

/// Full evaluation of one episode. `task_seed` drives N-means restarts.
pub fn evaluate_task(
    fs: &FeatureSet,
    ep: &Episode,
    setting: Setting,
    opts: &TaskOptions,
    episode_id: u64,
    task_seed: u64,
) -> Result<GaugeReport> {
    evaluate_inner(fs, ep, setting, opts, episode_id, task_seed, false).map(|(r, _)| r)
}

/// As [`evaluate_task`], also returning the whole Laplacian spectrum of the
/// gauge graph.
pub fn evaluate_task_with_spectrum(
    fs: &FeatureSet,
    ep: &Episode,
    setting: Setting,
    opts: &TaskOptions,
    episode_id: u64,
    task_seed: u64,
) -> Result<(GaugeReport, Vec<f64>)> {
    evaluate_inner(fs, ep, setting, opts, episode_id, task_seed, true)
        .map(|(r, s)| (r, s.expect("spectrum requested")))
}

fn evaluate_inner(
    fs: &FeatureSet,
    ep: &Episode,
    setting: Setting,
    opts: &TaskOptions,
    episode_id: u64,
    task_seed: u64,
    want_spectrum: bool,
) -> Result<(GaugeReport, Option<Vec<f64>>)> {
    let n = ep.n_way();
    let p = prepare(fs, ep, setting, opts)?;
    let mut report = GaugeReport {
        episode_id,
        setting,
        n_way: n,
        k_shot: ep.support.first().map_or(0, Vec::len),
        q_query: ep.query.first().map_or(0, Vec::len),
        lr_training_loss: None,
        similarity: None,
        db_score: None,
        nth_eigenvalue: None,
        lr_confidence_log: None,
        lr_confidence_mean_max_prob: None,
        realized_performance: 0.0,
    };

    let clustering = if p.unlabeled.nrows() > n {
        Some(n_means_with(
            &p.unlabeled,
            n,
            seed::derive(task_seed, &[seed::STREAM_KMEANS]),
            &opts.kmeans,
        )?)
    } else {
        None
    };
    if let Some(c) = &clustering {
        report.db_score = match db_score(p.unlabeled.view(), &c.assignments, n) {
            Ok(v) => Some(v),
            Err(Error::Degenerate(_)) => None,
            Err(e) => return Err(e),
        };
    }

    let graph = knn_sparsify(&cosine_matrix(p.unlabeled.view())?, opts.diffusion.k_neighbors)?;
    let spectrum = laplacian_eigenvalues(&graph)?;
    report.nth_eigenvalue = spectrum.get(n - 1).copied();

    match (&p.train, setting) {
        (Some((train_x, train_y)), _) => {
            let model = train_logreg(train_x, train_y, n, &opts.logreg)?;
            let train_probs = predict_proba(&model, train_x)?;
            report.lr_training_loss = Some(lr_training_loss(&train_probs, train_y)?);
            report.similarity = Some(similarity_metric(train_x.view(), train_y, n)?);
            let probs = predict_proba(&model, &p.eval.0)?;
            if setting == Setting::SemiSupervised {
                let (log_form, mmp) = lr_confidence(&probs)?;
                report.lr_confidence_log = Some(log_form);
                report.lr_confidence_mean_max_prob = Some(mmp);
            }
            report.realized_performance = hit_rate(&argmax_rows(&probs), &p.eval.1);
        }
        (None, _) => {
            let c = clustering
                .as_ref()
                .ok_or_else(|| Error::Sampling("clustering needs more rows than classes".into()))?;
            report.realized_performance = adjusted_rand_index(&c.assignments, &p.unlabeled_truth)?;
        }
    }
    Ok((report, want_spectrum.then_some(spectrum)))
}

fn hit_rate(pred: &[usize], truth: &[usize]) -> f64 {
    pred.iter().zip(truth).filter(|(a, b)| a == b).count() as f64 / truth.len() as f64
}

/// Supervised LR accuracy on the episode's test rows, raw features.
pub fn supervised_accuracy(fs: &FeatureSet, ep: &Episode, config: &LogRegConfig) -> Result<f64> {
    let (s_rows, s_lab) = ep.support_rows();
    let (t_rows, t_lab) = ep.test_rows();
    let model = train_logreg(&fs.gather(&s_rows), &s_lab, ep.n_way(), config)?;
    crate::learners::accuracy(&model, &fs.gather(&t_rows), &t_lab)
}

/// Semi-supervised pass used by the active-labeling protocol: diffuse the
/// support and all queries together once, then train on the support plus the
/// `moved` queries (given by position in the flattened query list) and
/// report accuracy on the queries left unlabeled, together with per-query
/// max-probability confidences from the initial model.
pub(crate) struct DiffusedTask {
    pub support: Array2<f64>,
    pub support_labels: Vec<usize>,
    pub queries: Array2<f64>,
    pub query_labels: Vec<usize>,
}

pub(crate) fn diffused_task(fs: &FeatureSet, ep: &Episode, diffusion: &DiffusionParams) -> Result<DiffusedTask> {
    let (s_rows, s_lab) = ep.support_rows();
    let (q_rows, q_lab) = ep.query_rows();
    let all: Vec<usize> = s_rows.iter().chain(&q_rows).copied().collect();
    let d = diffuse_features(&fs.gather(&all), diffusion)?;
    let ns = s_rows.len();
    Ok(DiffusedTask {
        support: d.slice(s![..ns, ..]).to_owned(),
        support_labels: s_lab,
        queries: d.slice(s![ns.., ..]).to_owned(),
        query_labels: q_lab,
    })
}

impl DiffusedTask {
    /// Train on support plus the queries at positions `moved`, evaluate on
    /// the rest. Returns (accuracy, per-query max probability).
    pub(crate) fn train_and_score(&self, moved: &[usize], n_way: usize, config: &LogRegConfig) -> Result<(f64, Vec<f64>)> {
        let nq = self.queries.nrows();
        let mut is_moved = vec![false; nq];
        for &m in moved {
            is_moved[m] = true;
        }
        let keep: Vec<usize> = (0..nq).filter(|&i| !is_moved[i]).collect();
        if keep.is_empty() {
            return Err(Error::InvalidArgument("labeling budget leaves no query to evaluate".into()));
        }
        let x = concatenate(Axis(0), &[self.support.view(), self.queries.select(Axis(0), moved).view()])
            .expect("same width");
        let y: Vec<usize> = self
            .support_labels
            .iter()
            .copied()
            .chain(moved.iter().map(|&m| self.query_labels[m]))
            .collect();
        let model = train_logreg(&x, &y, n_way, config)?;
        let probs = predict_proba(&model, &self.queries)?;
        let conf: Vec<f64> = probs
            .axis_iter(Axis(0))
            .map(|r| r.iter().copied().fold(f64::NEG_INFINITY, f64::max))
            .collect();
        let pred = argmax_rows(&probs);
        let hits = keep.iter().filter(|&&i| pred[i] == self.query_labels[i]).count();
        Ok((hits as f64 / keep.len() as f64, conf))
    }
}
