use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::{correlate_reports, run_tasks, GaugeCorrelation, GridPoint};
use super::task::{evaluate_task_with_spectrum, TaskOptions};
use crate::episode::sample_episode;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::Setting;
use crate::seed;
use crate::stats::pearson;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSweepRow {
    pub n_way: usize,
    /// |r| of lambda_N against performance.
    pub r_at_n: Option<f64>,
    /// 1-based index with the largest |r|.
    pub best_index: usize,
    pub r_at_best: f64,
    /// |r| per eigenvalue index (1-based position `i + 1`); `None` where the
    /// eigenvalue is constant over tasks.
    pub per_index: Vec<Option<f64>>,
}

/// For each way count, correlate every Laplacian eigenvalue index with
/// realized performance.
pub fn run_eigenindex_sweep(
    fs: &FeatureSet,
    setting: Setting,
    way_grid: &[usize],
    k_shot: usize,
    q_query: usize,
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<Vec<EigenSweepRow>> {
    if n_tasks < 2 {
        return Err(Error::InvalidArgument("a correlation needs at least 2 tasks".into()));
    }
    way_grid
        .iter()
        .enumerate()
        .map(|(wi, &n)| {
            let point = GridPoint::new(n, k_shot, q_query);
            let point_seed = seed::derive(seed, &[wi as u64]);
            let runs: Vec<(f64, Vec<f64>)> = (0..n_tasks)
                .into_par_iter()
                .map(|t| {
                    let ep_seed = seed::derive(point_seed, &[t as u64]);
                    let ep = sample_episode(fs, &point.spec(setting, ep_seed))?;
                    let (r, spec) =
                        evaluate_task_with_spectrum(fs, &ep, setting, opts, t as u64, seed::derive(ep_seed, &[1]))?;
                    Ok((r.realized_performance, spec))
                })
                .collect::<Result<_>>()?;
            let perf: Vec<f64> = runs.iter().map(|r| r.0).collect();
            let n_vertices = runs.iter().map(|r| r.1.len()).min().unwrap_or(0);
            let per_index: Vec<Option<f64>> = (0..n_vertices)
                .map(|i| {
                    let x: Vec<f64> = runs.iter().map(|r| r.1[i]).collect();
                    pearson(&x, &perf).ok().map(f64::abs)
                })
                .collect();
            let (best, r_best) = per_index
                .iter()
                .enumerate()
                .filter_map(|(i, r)| r.map(|r| (i, r)))
                .fold(None, |acc: Option<(usize, f64)>, (i, r)| match acc {
                    Some((_, br)) if br >= r => acc,
                    _ => Some((i, r)),
                })
                .ok_or_else(|| Error::Degenerate("every eigenvalue is constant over tasks".into()))?;
            Ok(EigenSweepRow {
                n_way: n,
                r_at_n: per_index.get(n - 1).copied().flatten(),
                best_index: best + 1,
                r_at_best: r_best,
                per_index,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnSweepRow {
    pub k: usize,
    pub correlations: Vec<GaugeCorrelation>,
}

/// Repeat one correlation point for each neighbor count. The same episodes
/// are drawn for every k.
pub fn run_knn_sweep(
    fs: &FeatureSet,
    setting: Setting,
    point: &GridPoint,
    k_grid: &[usize],
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<Vec<KnnSweepRow>> {
    if n_tasks < 2 {
        return Err(Error::InvalidArgument("a correlation needs at least 2 tasks".into()));
    }
    k_grid
        .iter()
        .map(|&k| {
            let mut o = *opts;
            o.diffusion.k_neighbors = k;
            let reports = run_tasks(fs, setting, point, n_tasks, &o, seed)?;
            Ok(KnnSweepRow { k, correlations: correlate_reports(&reports, setting.gauges()).0 })
        })
        .collect()
}

pub fn eigen_sweep_csv(rows: &[EigenSweepRow]) -> String {
    let mut out = String::from("N,r_at_N,best_index,r_at_best\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.n_way,
            r.r_at_n.map(|v| v.to_string()).unwrap_or_default(),
            r.best_index,
            r.r_at_best
        ));
    }
    out
}

pub fn knn_sweep_csv(setting: Setting, rows: &[KnnSweepRow]) -> String {
    let mut out = String::from("setting,k,gauge,pearson_signed,pearson_abs,n_tasks\n");
    for r in rows {
        for c in &r.correlations {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                setting, r.k, c.gauge, c.pearson_signed, c.pearson_abs, c.n_tasks
            ));
        }
    }
    out
}
