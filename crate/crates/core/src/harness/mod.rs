//! Experiment protocols built on top of the gauges. Every protocol derives
//! per-episode seeds from its top-level seed, so outputs are identical for
//! any thread count.

mod active;
mod correlation;
mod plot;
mod predict;
mod roc;
mod sweeps;
mod task;
mod variance;

pub use active::{active_csv, run_active_labeling, ActiveRow, LabelPolicy};
pub use correlation::{
    correlate_reports, correlation_csv, run_correlation_study, run_tasks, sample_tasks, tasks_csv, CorrelationStudy,
    GaugeCorrelation, GridPoint, PointResult, CORRELATION_CSV_HEADER,
};
pub use crate::stats::pearson;
pub use plot::scatter_svg;
pub use predict::{prediction_errors, run_accuracy_prediction, AccuracyPrediction};
pub use roc::{
    confusion_toml, operating_point, roc_csv, roc_curve, roc_from_tasks, run_roc_prediction, Confusion, Orientation,
    RocCurve, RocParams, RocPoint, RocResult, DEFAULT_ACCURACY_CUT, ROC_CSV_HEADER, TARGET_SENSIBILITY,
};
pub use sweeps::{eigen_sweep_csv, knn_sweep_csv, run_eigenindex_sweep, run_knn_sweep, EigenSweepRow, KnnSweepRow};
pub use task::{evaluate_task, evaluate_task_with_spectrum, supervised_accuracy, TaskOptions};
pub use variance::{run_variance_attribution, MeanStd, VarianceAttribution, VarianceParams};
