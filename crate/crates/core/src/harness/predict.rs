use serde::{Deserialize, Serialize};

use super::correlation::{run_tasks, GridPoint};
use super::task::TaskOptions;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::Setting;
use crate::stats::{mean, mean_abs_deviation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AccuracyPrediction {
    /// Mean |predicted - realized|.
    pub mae: f64,
    /// Mean |realized - mean(realized)|: the error of always predicting the
    /// average accuracy.
    pub mad_baseline: f64,
    /// `(predicted, realized)` per task.
    pub pairs: Vec<(f64, f64)>,
}

pub fn prediction_errors(pairs: &[(f64, f64)]) -> Result<AccuracyPrediction> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("no tasks to score".into()));
    }
    let err: Vec<f64> = pairs.iter().map(|(p, r)| (p - r).abs()).collect();
    let realized: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(AccuracyPrediction {
        mae: mean(&err),
        mad_baseline: mean_abs_deviation(&realized),
        pairs: pairs.to_vec(),
    })
}

/// Predict each semi-supervised task's query accuracy by the mean
/// max-probability of the LR on those queries.
pub fn run_accuracy_prediction(
    fs: &FeatureSet,
    point: &GridPoint,
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<AccuracyPrediction> {
    let reports = run_tasks(fs, Setting::SemiSupervised, point, n_tasks, opts, seed)?;
    let pairs: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| (r.lr_confidence_mean_max_prob.expect("semi-supervised"), r.realized_performance))
        .collect();
    prediction_errors(&pairs)
}
