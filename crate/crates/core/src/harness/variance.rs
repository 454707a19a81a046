//! Where does accuracy variance come from: the classes drawn, or the shots
//! drawn inside them?

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::task::supervised_accuracy;
use crate::episode::{draw_fixed_shots, sample_episode, sample_episode_fixed_classes, sample_episode_fixed_shots, EpisodeSpec};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::learners::LogRegConfig;
use crate::seed;
use crate::stats::{mean, std_dev};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

impl MeanStd {
    fn of(x: &[f64]) -> Self {
        Self { mean: mean(x), std: std_dev(x) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceAttribution {
    /// Std of accuracy over fully random tasks.
    pub std_random: f64,
    /// Mean (and spread) of the per-class-draw std when only shots vary.
    pub fixed_classes: MeanStd,
    /// Mean (and spread) of the per-shot-draw std when only classes vary.
    pub fixed_shots: MeanStd,
    pub outer: usize,
    pub inner: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceParams {
    pub outer: usize,
    pub inner: usize,
    /// Classes given pre-fixed shots in the fixed-shot protocol; `None`
    /// means every class.
    pub shot_pool: Option<usize>,
    pub logreg: LogRegConfig,
}

impl Default for VarianceParams {
    fn default() -> Self {
        Self { outer: 500, inner: 500, shot_pool: None, logreg: LogRegConfig::default() }
    }
}

/// Runs the three nested protocols with supervised LR on raw features.
/// `spec` supplies N, K and the test-set size; its seed is ignored. The
/// fully random protocol draws `inner` tasks, the same sample size as each
/// inner loop.
pub fn run_variance_attribution(
    fs: &FeatureSet,
    spec: &EpisodeSpec,
    params: &VarianceParams,
    seed: u64,
) -> Result<VarianceAttribution> {
    spec.validate()?;
    if params.outer == 0 || params.inner < 2 {
        return Err(Error::InvalidArgument("need outer >= 1 and inner >= 2".into()));
    }
    let spec = EpisodeSpec { q_query: 0, ..spec.clone() };
    let lr = &params.logreg;

    let random: Vec<f64> = (0..params.inner)
        .into_par_iter()
        .map(|t| {
            let s = spec.clone().with_seed(seed::derive(seed, &[0, t as u64]));
            supervised_accuracy(fs, &sample_episode(fs, &s)?, lr)
        })
        .collect::<Result<_>>()?;

    let fixed_class_stds: Vec<f64> = (0..params.outer)
        .into_par_iter()
        .map(|o| {
            let outer_seed = seed::derive(seed, &[1, o as u64]);
            let mut rng = seed::rng(outer_seed);
            let classes = index::sample(&mut rng, fs.num_classes(), spec.n_way).into_vec();
            if classes.len() < spec.n_way {
                return Err(Error::Sampling("not enough classes".into()));
            }
            let accs: Vec<f64> = (0..params.inner)
                .map(|i| {
                    let s = spec.clone().with_seed(seed::derive(outer_seed, &[i as u64]));
                    supervised_accuracy(fs, &sample_episode_fixed_classes(fs, &s, &classes)?, lr)
                })
                .collect::<Result<_>>()?;
            Ok(std_dev(&accs))
        })
        .collect::<Result<_>>()?;

    let pool_size = params.shot_pool.unwrap_or(fs.num_classes());
    if pool_size < spec.n_way || pool_size > fs.num_classes() {
        return Err(Error::InvalidArgument(format!(
            "shot pool of {pool_size} classes for a {}-way protocol",
            spec.n_way
        )));
    }
    let fixed_shot_stds: Vec<f64> = (0..params.outer)
        .into_par_iter()
        .map(|o| {
            let outer_seed = seed::derive(seed, &[2, o as u64]);
            let mut rng = seed::rng(outer_seed);
            let mut pool = index::sample(&mut rng, fs.num_classes(), pool_size).into_vec();
            pool.sort_unstable();
            let shots = draw_fixed_shots(fs, &pool, spec.k_shot, outer_seed)?;
            let accs: Vec<f64> = (0..params.inner)
                .map(|i| {
                    let s = spec.clone().with_seed(seed::derive(outer_seed, &[i as u64]));
                    supervised_accuracy(fs, &sample_episode_fixed_shots(fs, &s, &shots)?, lr)
                })
                .collect::<Result<_>>()?;
            Ok(std_dev(&accs))
        })
        .collect::<Result<_>>()?;

    Ok(VarianceAttribution {
        std_random: std_dev(&random),
        fixed_classes: MeanStd::of(&fixed_class_stds),
        fixed_shots: MeanStd::of(&fixed_shot_stds),
        outer: params.outer,
        inner: params.inner,
    })
}
