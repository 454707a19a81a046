//! Hard/easy task prediction by thresholding a gauge.

use serde::{Deserialize, Serialize};

use super::correlation::{run_tasks, GridPoint};
use super::task::TaskOptions;
use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::gauges::{Gauge, Setting};

pub const DEFAULT_ACCURACY_CUT: f64 = 0.80;
pub const TARGET_SENSIBILITY: f64 = 0.8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Small gauge values flag hard tasks.
    HigherIsEasier,
    /// Large gauge values flag hard tasks.
    HigherIsHarder,
}

impl Orientation {
    pub fn of(g: Gauge) -> Self {
        if g.higher_is_easier() {
            Orientation::HigherIsEasier
        } else {
            Orientation::HigherIsHarder
        }
    }

    /// Whether `value` is predicted hard at `threshold`.
    pub fn predicts_hard(self, value: f64, threshold: f64) -> bool {
        match self {
            Orientation::HigherIsEasier => value <= threshold,
            Orientation::HigherIsHarder => value >= threshold,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    pub threshold: f64,
    pub one_minus_specificity: f64,
    pub sensibility: f64,
}

/// Hard is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fn_: usize,
    pub fp: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn tally(tasks: &[(f64, f64)], orientation: Orientation, threshold: f64, cut: f64) -> Self {
        let mut c = Confusion { tp: 0, fn_: 0, fp: 0, tn: 0 };
        for &(g, acc) in tasks {
            match (acc < cut, orientation.predicts_hard(g, threshold)) {
                (true, true) => c.tp += 1,
                (true, false) => c.fn_ += 1,
                (false, true) => c.fp += 1,
                (false, false) => c.tn += 1,
            }
        }
        c
    }

    pub fn sensibility(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn one_minus_specificity(&self) -> f64 {
        ratio(self.fp, self.tn + self.fp)
    }

    /// Row-normalized percentages `[[hard->hard, hard->easy], [easy->hard,
    /// easy->easy]]`; a row without tasks is all zero.
    pub fn percentages(&self) -> [[f64; 2]; 2] {
        let row = |a: usize, b: usize| {
            let n = a + b;
            if n == 0 {
                [0.0, 0.0]
            } else {
                [100.0 * a as f64 / n as f64, 100.0 * b as f64 / n as f64]
            }
        };
        [row(self.tp, self.fn_), row(self.fp, self.tn)]
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// From nothing predicted hard to everything predicted hard.
    pub points: Vec<RocPoint>,
    pub auc: f64,
}

/// ROC over every distinct gauge value as a threshold. `tasks` holds
/// `(gauge, accuracy)`; a task is hard when its accuracy is below `cut`.
pub fn roc_curve(tasks: &[(f64, f64)], orientation: Orientation, cut: f64) -> Result<RocCurve> {
    let hard = tasks.iter().filter(|t| t.1 < cut).count();
    if hard == 0 || hard == tasks.len() {
        return Err(Error::Degenerate("single-class calibration".into()));
    }
    let mut values: Vec<f64> = tasks.iter().map(|t| t.0).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite gauge value".into()));
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    if values.len() < 2 {
        return Err(Error::Degenerate("fewer than 2 distinct gauge values".into()));
    }
    // strictest threshold first: nothing flagged hard
    let mut thresholds = Vec::with_capacity(values.len() + 1);
    match orientation {
        Orientation::HigherIsEasier => {
            thresholds.push(f64::NEG_INFINITY);
            thresholds.extend(values.iter().copied());
        }
        Orientation::HigherIsHarder => {
            thresholds.push(f64::INFINITY);
            thresholds.extend(values.iter().rev().copied());
        }
    }
    let points: Vec<RocPoint> = thresholds
        .into_iter()
        .map(|t| {
            let c = Confusion::tally(tasks, orientation, t, cut);
            RocPoint { threshold: t, one_minus_specificity: c.one_minus_specificity(), sensibility: c.sensibility() }
        })
        .collect();
    let auc = points
        .windows(2)
        .map(|w| (w[1].one_minus_specificity - w[0].one_minus_specificity) * (w[1].sensibility + w[0].sensibility) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

/// Lowest false-positive rate reaching `target` sensibility; among points at
/// that rate the highest sensibility wins.
pub fn operating_point(curve: &RocCurve, target: f64) -> RocPoint {
    let mut best: Option<RocPoint> = None;
    for &p in curve.points.iter().filter(|p| p.sensibility >= target) {
        best = match best {
            Some(b)
                if b.one_minus_specificity < p.one_minus_specificity
                    || (b.one_minus_specificity == p.one_minus_specificity && b.sensibility >= p.sensibility) =>
            {
                Some(b)
            }
            _ => Some(p),
        };
    }
    // the last point flags everything, so some point always qualifies
    best.unwrap_or(*curve.points.last().expect("non-empty curve"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocResult {
    pub gauge: Option<Gauge>,
    pub orientation: Orientation,
    pub accuracy_cut: f64,
    pub curve: RocCurve,
    pub operating_point: RocPoint,
    pub holdout: Confusion,
}

impl RocResult {
    pub fn holdout_percentages(&self) -> [[f64; 2]; 2] {
        self.holdout.percentages()
    }
}

/// Calibrate a threshold on one task list and apply it, frozen, to another.
pub fn roc_from_tasks(
    calibration: &[(f64, f64)],
    holdout: &[(f64, f64)],
    orientation: Orientation,
    cut: f64,
) -> Result<RocResult> {
    let curve = roc_curve(calibration, orientation, cut)?;
    let op = operating_point(&curve, TARGET_SENSIBILITY);
    Ok(RocResult {
        gauge: None,
        orientation,
        accuracy_cut: cut,
        holdout: Confusion::tally(holdout, orientation, op.threshold, cut),
        operating_point: op,
        curve,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocParams {
    pub setting: Setting,
    pub gauge: Gauge,
    pub point: GridPoint,
    pub n_tasks: usize,
    pub accuracy_cut: f64,
}

/// Generate tasks on both class pools, calibrate on the first, apply to the
/// second.
pub fn run_roc_prediction(
    fs_calibrate: &FeatureSet,
    fs_holdout: &FeatureSet,
    params: &RocParams,
    opts: &TaskOptions,
    seed: u64,
) -> Result<RocResult> {
    if let Some(shared) = fs_calibrate
        .class_names()
        .iter()
        .find(|n| fs_holdout.class_names().contains(n))
    {
        return Err(Error::InvalidArgument(format!(
            "class `{shared}` is in both calibration and holdout pools"
        )));
    }
    if !params.setting.gauges().contains(&params.gauge) {
        return Err(Error::InvalidArgument(format!(
            "gauge {} is not available in the {} setting",
            params.gauge, params.setting
        )));
    }
    let collect = |fs: &FeatureSet, stream: u64| -> Result<Vec<(f64, f64)>> {
        let reports = run_tasks(fs, params.setting, &params.point, params.n_tasks, opts, crate::seed::derive(seed, &[stream]))?;
        Ok(reports
            .iter()
            .filter_map(|r| r.get(params.gauge).map(|g| (g, r.realized_performance)))
            .collect())
    };
    let cal = collect(fs_calibrate, 0)?;
    let hold = collect(fs_holdout, 1)?;
    let mut res = roc_from_tasks(&cal, &hold, Orientation::of(params.gauge), params.accuracy_cut)?;
    res.gauge = Some(params.gauge);
    Ok(res)
}

pub const ROC_CSV_HEADER: &str = "threshold,one_minus_specificity,sensibility";

pub fn roc_csv(curve: &RocCurve) -> String {
    let mut out = String::from(ROC_CSV_HEADER);
    out.push('\n');
    for p in &curve.points {
        out.push_str(&format!("{},{},{}\n", p.threshold, p.one_minus_specificity, p.sensibility));
    }
    out
}

/// Holdout confusion matrix and operating point as TOML.
pub fn confusion_toml(res: &RocResult) -> String {
    let pct = res.holdout_percentages();
    let gauge = res.gauge.map_or("custom".to_string(), |g| g.to_string());
    format!(
        "gauge = \"{gauge}\"\naccuracy_cut = {}\nauc = {}\n\n[operating_point]\nthreshold = {}\none_minus_specificity = {}\nsensibility = {}\n\n[holdout]\ntp = {}\nfn = {}\nfp = {}\ntn = {}\n# rows: reality (hard, easy); columns: prediction (hard, easy); percent\nhard = [{}, {}]\neasy = [{}, {}]\n",
        res.accuracy_cut,
        res.curve.auc,
        res.operating_point.threshold,
        res.operating_point.one_minus_specificity,
        res.operating_point.sensibility,
        res.holdout.tp,
        res.holdout.fn_,
        res.holdout.fp,
        res.holdout.tn,
        pct[0][0],
        pct[0][1],
        pct[1][0],
        pct[1][1],
    )
}
