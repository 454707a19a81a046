use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::task::{evaluate_task, TaskOptions};
use crate::episode::{sample_episode, Balance, Episode, EpisodeSpec, DEFAULT_TEST_PER_CLASS};
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::{Gauge, GaugeReport, Setting};
use crate::seed;
use crate::stats::pearson;

/// One `(N, K, Q)` point of a study grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub n_way: usize,
    pub k_shot: usize,
    pub q_query: usize,
    #[serde(default = "balanced")]
    pub balance: Balance,
}

fn balanced() -> Balance {
    Balance::Balanced
}

impl GridPoint {
    pub fn new(n_way: usize, k_shot: usize, q_query: usize) -> Self {
        Self { n_way, k_shot, q_query, balance: Balance::Balanced }
    }

    /// Episode spec for `setting`: supervised tasks carry a test set, the
    /// others are scored on their queries, and unsupervised tasks have no
    /// shots.
    pub fn spec(&self, setting: Setting, seed: u64) -> EpisodeSpec {
        let k = if setting == Setting::Unsupervised { 0 } else { self.k_shot };
        let q = if setting == Setting::Supervised { 0 } else { self.q_query };
        let test = if setting == Setting::Supervised { DEFAULT_TEST_PER_CLASS } else { 0 };
        EpisodeSpec::new(self.n_way, k, q)
            .with_test(test)
            .with_balance(self.balance)
            .with_seed(seed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeCorrelation {
    pub gauge: Gauge,
    pub pearson_signed: f64,
    pub pearson_abs: f64,
    /// Tasks that contributed (the gauge was defined on them).
    pub n_tasks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub point: GridPoint,
    pub tasks: Vec<GaugeReport>,
    pub correlations: Vec<GaugeCorrelation>,
    /// Gauges without a reported correlation and why (undefined on every
    /// task, or constant).
    pub flagged: Vec<(Gauge, String)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationStudy {
    pub setting: Setting,
    pub points: Vec<PointResult>,
}

impl CorrelationStudy {
    pub fn correlation(&self, point: usize, gauge: Gauge) -> Option<&GaugeCorrelation> {
        self.points.get(point)?.correlations.iter().find(|c| c.gauge == gauge)
    }
}

/// Sample and evaluate `n_tasks` episodes. Episode `t` uses seed
/// `derive(seed, [t])`, so results do not depend on scheduling.
pub fn run_tasks(
    fs: &FeatureSet,
    setting: Setting,
    point: &GridPoint,
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<Vec<GaugeReport>> {
    (0..n_tasks)
        .into_par_iter()
        .map(|t| {
            let ep_seed = seed::derive(seed, &[t as u64]);
            let ep = sample_episode(fs, &point.spec(setting, ep_seed))?;
            evaluate_task(fs, &ep, setting, opts, t as u64, seed::derive(ep_seed, &[1]))
        })
        .collect()
}

/// Episodes only, for callers that need the raw draws.
pub fn sample_tasks(fs: &FeatureSet, setting: Setting, point: &GridPoint, n_tasks: usize, seed: u64) -> Result<Vec<Episode>> {
    (0..n_tasks)
        .map(|t| sample_episode(fs, &point.spec(setting, seed::derive(seed, &[t as u64]))))
        .collect()
}

/// Pearson correlation of every available gauge with realized performance.
pub fn correlate_reports(reports: &[GaugeReport], gauges: &[Gauge]) -> (Vec<GaugeCorrelation>, Vec<(Gauge, String)>) {
    let mut out = Vec::new();
    let mut flagged = Vec::new();
    for &g in gauges {
        let (x, y): (Vec<f64>, Vec<f64>) = reports
            .iter()
            .filter_map(|r| r.get(g).map(|v| (v, r.realized_performance)))
            .unzip();
        if x.is_empty() {
            flagged.push((g, "undefined on every task".to_string()));
            continue;
        }
        match pearson(&x, &y) {
            Ok(r) => out.push(GaugeCorrelation {
                gauge: g,
                pearson_signed: r,
                pearson_abs: r.abs(),
                n_tasks: x.len(),
            }),
            Err(e) => flagged.push((g, e.to_string())),
        }
    }
    (out, flagged)
}

pub fn run_correlation_study(
    fs: &FeatureSet,
    setting: Setting,
    grid: &[GridPoint],
    n_tasks: usize,
    opts: &TaskOptions,
    seed: u64,
) -> Result<CorrelationStudy> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("empty study grid".into()));
    }
    if n_tasks < 2 {
        return Err(Error::InvalidArgument("a correlation needs at least 2 tasks".into()));
    }
    let mut points = Vec::with_capacity(grid.len());
    for (i, point) in grid.iter().enumerate() {
        let tasks = run_tasks(fs, setting, point, n_tasks, opts, seed::derive(seed, &[i as u64]))?;
        let (correlations, flagged) = correlate_reports(&tasks, setting.gauges());
        points.push(PointResult { point: *point, tasks, correlations, flagged });
    }
    Ok(CorrelationStudy { setting, points })
}

pub const CORRELATION_CSV_HEADER: &str = "setting,N,K,Q,gauge,pearson_signed,pearson_abs,n_tasks";

pub fn correlation_csv(study: &CorrelationStudy) -> String {
    let mut out = String::from(CORRELATION_CSV_HEADER);
    out.push('\n');
    for p in &study.points {
        for c in &p.correlations {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                study.setting,
                p.point.n_way,
                p.point.k_shot,
                p.point.q_query,
                c.gauge,
                c.pearson_signed,
                c.pearson_abs,
                c.n_tasks
            ));
        }
    }
    out
}

pub fn tasks_csv<'a>(reports: impl IntoIterator<Item = &'a GaugeReport>) -> String {
    let mut out = String::from(GaugeReport::CSV_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}
