//! Validation-free generalization gauges for transfer-based few-shot
//! classification.
//!
//! The crate works on pre-extracted, nonnegative feature vectors (the output
//! of a frozen backbone after its last ReLU). From those it samples few-shot
//! episodes, trains the task learners (logistic regression, N-means), and
//! computes five gauges that track how well the learner generalizes without
//! touching a labeled validation set:
//!
//! * the final logistic-regression training loss,
//! * an intra/inter-class cosine similarity margin on the labeled shots,
//! * the Davies-Bouldin score of an N-means clustering,
//! * the N-th smallest eigenvalue of a k-NN cosine graph Laplacian,
//! * the logistic-regression confidence on unlabeled queries.
//!
//! The [`confusion`] module measures pairwise class overlap through Louvain
//! communities, and [`harness`] hosts the experiment protocols (correlation
//! studies, variance attribution, ROC threshold prediction and friends).

pub mod confusion;
pub mod episode;
pub mod error;
pub mod features;
pub mod gauges;
pub mod harness;
pub mod learners;
pub mod seed;
pub mod simgraph;
pub mod stats;

pub use error::{Error, Result};
pub use episode::{Balance, Episode, EpisodeSpec};
pub use features::FeatureSet;
