use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::correlation::GridPoint;
use super::task::{diffused_task, TaskOptions};
use crate::episode::sample_episode;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::Setting;
use crate::seed;
use crate::stats::mean;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelPolicy {
    LowestConfidence,
    Random,
}

impl LabelPolicy {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "lowest-confidence" | "lowest_confidence" => Ok(LabelPolicy::LowestConfidence),
            "random" => Ok(LabelPolicy::Random),
            _ => Err(Error::InvalidArgument(format!("unknown labeling policy `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActiveRow {
    pub budget: usize,
    pub mean_accuracy: f64,
    pub n_tasks: usize,
}

/// Per budget: label `budget` queries chosen by `policy`, retrain on the
/// enlarged support, and score the queries that stay unlabeled.
pub fn run_active_labeling(
    fs: &FeatureSet,
    point: &GridPoint,
    budgets: &[usize],
    policy: LabelPolicy,
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<Vec<ActiveRow>> {
    if n_tasks == 0 {
        return Err(Error::InvalidArgument("no tasks".into()));
    }
    let per_task: Vec<Vec<f64>> = (0..n_tasks)
        .into_par_iter()
        .map(|t| {
            let ep_seed = seed::derive(seed, &[t as u64]);
            let ep = sample_episode(fs, &point.spec(Setting::SemiSupervised, ep_seed))?;
            let task = diffused_task(fs, &ep, &opts.diffusion)?;
            let nq = task.queries.nrows();
            let n = ep.n_way();
            let (_, conf) = task.train_and_score(&[], n, &opts.logreg)?;
            let mut by_conf: Vec<usize> = (0..nq).collect();
            by_conf.sort_by(|&a, &b| conf[a].total_cmp(&conf[b]).then(a.cmp(&b)));
            budgets
                .iter()
                .map(|&b| {
                    if b >= nq {
                        return Err(Error::InvalidArgument(format!(
                            "budget {b} leaves none of the {nq} queries to evaluate"
                        )));
                    }
                    let moved: Vec<usize> = match policy {
                        LabelPolicy::LowestConfidence => by_conf[..b].to_vec(),
                        LabelPolicy::Random => {
                            let mut rng = seed::rng_at(ep_seed, &[seed::STREAM_AUX, b as u64]);
                            index::sample(&mut rng, nq, b).into_vec()
                        }
                    };
                    task.train_and_score(&moved, n, &opts.logreg).map(|r| r.0)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(budgets
        .iter()
        .enumerate()
        .map(|(i, &b)| ActiveRow {
            budget: b,
            mean_accuracy: mean(&per_task.iter().map(|v| v[i]).collect::<Vec<_>>()),
            n_tasks,
        })
        .collect())
}

pub fn active_csv(policy: LabelPolicy, rows: &[ActiveRow]) -> String {
    let name = match policy {
        LabelPolicy::LowestConfidence => "lowest-confidence",
        LabelPolicy::Random => "random",
    };
    let mut out = String::from("policy,budget,mean_accuracy,n_tasks\n");
    for r in rows {
        out.push_str(&format!("{name},{},{},{}\n", r.budget, r.mean_accuracy, r.n_tasks));
    }
    out
}
