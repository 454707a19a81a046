//! Class overlap measured through community structure: the two-class
//! heavier-edges graph is split by Louvain, and the label entropy left inside
//! communities lower-bounds the cross-entropy any neighborhood-based
//! classifier can reach.

mod export;
mod louvain;

pub use export::{bipartite_to_dot, bipartite_to_text, overlap_to_dot, overlap_to_text};
pub use louvain::{louvain, louvain_traced, modularity, CommunityPartition};

use ndarray::{concatenate, Array2, ArrayView2, Axis};
use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::episode::{sample_episode, EpisodeSpec};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::harness::supervised_accuracy;
use crate::learners::LogRegConfig;
use crate::seed;
use crate::simgraph::{cosine_matrix, heavier_edges_graph};
use crate::stats::pearson;

/// Binary entropy in bits, with `0 log 0 = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("probability {p} outside [0, 1]")));
    }
    let h = |q: f64| if q == 0.0 { 0.0 } else { -q * q.log2() };
    Ok(h(p) + h(1.0 - p))
}

/// `sum_C |C|/|V| * H(p_A(C))` for binary labels (0/1).
pub fn conditional_entropy_bound(community_of: &[usize], labels: &[usize]) -> Result<f64> {
    if community_of.len() != labels.len() {
        return Err(Error::DimensionMismatch { expected: community_of.len(), got: labels.len() });
    }
    if community_of.is_empty() {
        return Err(Error::InvalidArgument("entropy of an empty vertex set".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y > 1) {
        return Err(Error::InvalidArgument(format!("label {bad} is not binary")));
    }
    let k = community_of.iter().max().map_or(0, |m| m + 1);
    let mut size = vec![0usize; k];
    let mut ones = vec![0usize; k];
    for (&c, &y) in community_of.iter().zip(labels) {
        size[c] += 1;
        ones[c] += y;
    }
    let n = labels.len() as f64;
    let mut total = 0.0;
    for (&s, &a) in size.iter().zip(&ones) {
        if s > 0 {
            total += s as f64 / n * binary_entropy(a as f64 / s as f64)?;
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapParams {
    /// Edges kept per vertex: the graph keeps the `k |V|` heaviest pairs.
    pub k: usize,
    pub runs: usize,
}

impl Default for OverlapParams {
    fn default() -> Self {
        Self { k: 20, runs: 5 }
    }
}

/// Overlap between two sample sets: mean conditional-entropy bound over
/// `params.runs` Louvain runs on their joint heavier-edges graph.
pub fn overlap_of_samples(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>, params: &OverlapParams, seed: u64) -> Result<f64> {
    if a.nrows() < 2 || b.nrows() < 2 {
        return Err(Error::InvalidArgument("each class needs at least 2 samples".into()));
    }
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch { expected: a.ncols(), got: b.ncols() });
    }
    if params.runs == 0 {
        return Err(Error::InvalidArgument("runs must be >= 1".into()));
    }
    let x = concatenate(Axis(0), &[a, b]).expect("same width");
    let labels: Vec<usize> = (0..x.nrows()).map(|i| usize::from(i >= a.nrows())).collect();
    let g = heavier_edges_graph(&cosine_matrix(x.view())?, params.k)?;
    let mut total = 0.0;
    for r in 0..params.runs {
        let p = louvain(&g, seed::derive(seed, &[seed::STREAM_LOUVAIN, r as u64]))?;
        total += conditional_entropy_bound(&p.community_of, &labels)?;
    }
    Ok(total / params.runs as f64)
}

/// Overlap score of two classes of one feature set. Samples are laid out
/// lower class id first, so the score is symmetric in its arguments.
pub fn overlap_score(fs: &FeatureSet, class_a: usize, class_b: usize, params: &OverlapParams, seed: u64) -> Result<f64> {
    if class_a == class_b {
        return Err(Error::InvalidArgument("overlap of a class with itself".into()));
    }
    for c in [class_a, class_b] {
        if c >= fs.num_classes() {
            return Err(Error::InvalidArgument(format!("unknown class {c}")));
        }
    }
    let (lo, hi) = (class_a.min(class_b), class_a.max(class_b));
    overlap_of_samples(
        fs.gather(fs.rows_of_class(lo)).view(),
        fs.gather(fs.rows_of_class(hi)).view(),
        params,
        seed,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapMatrix {
    pub class_ids: Vec<usize>,
    pub class_names: Vec<String>,
    /// Symmetric, zero diagonal.
    pub scores: Array2<f64>,
}

impl OverlapMatrix {
    /// Upper-triangle pairs `(i, j, score)` with `i < j`, by position.
    pub fn pairs(&self) -> Vec<(usize, usize, f64)> {
        let n = self.class_ids.len();
        (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, self.scores[[i, j]]))
            .collect()
    }
}

/// Pairwise overlap scores over `class_list`, all pairs sharing `seed`.
pub fn overlap_matrix(fs: &FeatureSet, class_list: &[usize], params: &OverlapParams, seed: u64) -> Result<OverlapMatrix> {
    let n = class_list.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| overlap_score(fs, class_list[i], class_list[j], params, seed))
        .collect::<Result<_>>()?;
    let mut m = Array2::zeros((n, n));
    for (&(i, j), &s) in pairs.iter().zip(&scores) {
        m[[i, j]] = s;
        m[[j, i]] = s;
    }
    Ok(OverlapMatrix {
        class_ids: class_list.to_vec(),
        class_names: class_list.iter().map(|&c| fs.class_names()[c].clone()).collect(),
        scores: m,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BipartiteConfusion {
    pub base_names: Vec<String>,
    pub novel_names: Vec<String>,
    /// `base x novel` overlap scores.
    pub scores: Array2<f64>,
    /// Retained `(base, novel, score)` edges, heaviest first.
    pub edges: Vec<(usize, usize, f64)>,
}

/// Overlap of every (base, novel) class pair. `edge_budget` defaults to twice
/// the number of novel classes.
pub fn bipartite_confusion(
    fs_base: &FeatureSet,
    fs_novel: &FeatureSet,
    params: &OverlapParams,
    edge_budget: Option<usize>,
    seed: u64,
) -> Result<BipartiteConfusion> {
    if let Some(shared) = fs_base.class_names().iter().find(|n| fs_novel.class_names().contains(n)) {
        return Err(Error::InvalidArgument(format!("class `{shared}` is both base and novel")));
    }
    let (nb, nn) = (fs_base.num_classes(), fs_novel.num_classes());
    let pairs: Vec<(usize, usize)> = (0..nb).flat_map(|b| (0..nn).map(move |n| (b, n))).collect();
    let scores: Vec<f64> = pairs
        .par_iter()
        .map(|&(b, n)| {
            overlap_of_samples(
                fs_base.gather(fs_base.rows_of_class(b)).view(),
                fs_novel.gather(fs_novel.rows_of_class(n)).view(),
                params,
                seed,
            )
        })
        .collect::<Result<_>>()?;
    let mut m = Array2::zeros((nb, nn));
    let mut edges = Vec::with_capacity(pairs.len());
    for (&(b, n), &s) in pairs.iter().zip(&scores) {
        m[[b, n]] = s;
        edges.push((b, n, s));
    }
    edges.sort_by(|x, y| y.2.total_cmp(&x.2).then((x.0, x.1).cmp(&(y.0, y.1))));
    edges.truncate(edge_budget.unwrap_or(2 * nn));
    Ok(BipartiteConfusion {
        base_names: fs_base.class_names().to_vec(),
        novel_names: fs_novel.class_names().to_vec(),
        scores: m,
        edges,
    })
}

/// Edgewise Pearson correlation of two overlap matrices over the same
/// classes (complete graphs, no edge cut).
pub fn compare_overlap(a: &OverlapMatrix, b: &OverlapMatrix) -> Result<f64> {
    if a.class_names != b.class_names {
        return Err(Error::InvalidArgument("overlap matrices cover different classes".into()));
    }
    let x: Vec<f64> = a.pairs().iter().map(|p| p.2).collect();
    let y: Vec<f64> = b.pairs().iter().map(|p| p.2).collect();
    pearson(&x, &y)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreVsError {
    pub pearson: f64,
    /// `(sum of pairwise overlap, LR test error)` per task.
    pub points: Vec<(f64, f64)>,
}

/// Sample `n_tasks` supervised `n_way`-way `k_shot`-shot tasks, test on every
/// remaining row of their classes, and correlate the summed pairwise overlap
/// of the task's classes with the LR error.
pub fn score_vs_error_correlation(
    fs: &FeatureSet,
    overlap: &OverlapMatrix,
    n_way: usize,
    k_shot: usize,
    n_tasks: usize,
    logreg: &LogRegConfig,
    seed: u64,
) -> Result<ScoreVsError> {
    if n_tasks < 2 {
        return Err(Error::InvalidArgument("correlation needs at least 2 tasks".into()));
    }
    let pos: Vec<usize> = (0..fs.num_classes())
        .map(|c| overlap.class_ids.iter().position(|&x| x == c).unwrap_or(usize::MAX))
        .collect();
    if pos.iter().any(|&p| p == usize::MAX) {
        return Err(Error::InvalidArgument("overlap matrix must cover every class".into()));
    }
    let points: Vec<(f64, f64)> = (0..n_tasks)
        .into_par_iter()
        .map(|t| {
            let spec = EpisodeSpec::new(n_way, k_shot, 0)
                .with_test(0)
                .with_seed(seed::derive(seed, &[t as u64]));
            let ep = sample_episode(fs, &spec)?.with_remaining_as_test(fs);
            let mut sum = 0.0;
            for (i, &a) in ep.class_ids.iter().enumerate() {
                for &b in &ep.class_ids[i + 1..] {
                    sum += overlap.scores[[pos[a], pos[b]]];
                }
            }
            Ok((sum, 1.0 - supervised_accuracy(fs, &ep, logreg)?))
        })
        .collect::<Result<_>>()?;
    let (x, y): (Vec<f64>, Vec<f64>) = points.iter().copied().unzip();
    let r = pearson(&x, &y)?;
    Ok(ScoreVsError { pearson: r, points })
}

/// Draw `n` distinct class ids, for callers that want a random subset.
pub fn random_classes(fs: &FeatureSet, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n > fs.num_classes() {
        return Err(Error::InvalidArgument(format!("{n} classes requested, set has {}", fs.num_classes())));
    }
    let mut rng = seed::rng_at(seed, &[seed::STREAM_AUX]);
    let mut v = index::sample(&mut rng, fs.num_classes(), n).into_vec();
    v.sort_unstable();
    Ok(v)
}
