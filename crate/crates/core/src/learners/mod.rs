//! Task learners: logistic regression trained with Adam, N-means clustering
//! and the Adjusted Rand Index used to score clusterings.

mod ari;
mod kmeans;
mod logreg;

pub use ari::adjusted_rand_index;
pub use kmeans::{n_means, n_means_with, Clustering, KMeansConfig};
pub use logreg::{
    accuracy, argmax_rows, cross_entropy, logreg_gradient, logreg_objective, predict_proba, softmax_rows,
    train_logreg, LogRegConfig, LogRegModel,
};
