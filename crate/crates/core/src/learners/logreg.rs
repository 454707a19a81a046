use ndarray::{Array2, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest probability `predict_proba` will emit.
const PROB_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            learning_rate: 0.01,
            weight_decay: 5e-6,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Multinomial logistic regression without bias: `P = softmax(F W)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    /// `dim x n_classes`.
    pub weights: Array2<f64>,
    pub n_classes: usize,
    pub config: LogRegConfig,
    /// Mean cross-entropy (nats) of the final weights on the training rows.
    pub final_training_loss: f64,
}

/// Row-wise softmax, shifted by the row max for stability.
pub fn softmax_rows(logits: &Array2<f64>) -> Array2<f64> {
    let mut p = logits.clone();
    for mut row in p.outer_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.mapv_inplace(|z| (z - max).exp());
        let s = row.sum();
        // NaN must survive the floor so divergence is detectable
        row.mapv_inplace(|z| {
            let q = z / s;
            if q < PROB_FLOOR { PROB_FLOOR } else { q }
        });
    }
    p
}

/// Mean negative log-probability of the true class, natural log.
pub fn cross_entropy(probs: &Array2<f64>, labels: &[usize]) -> f64 {
    let n = labels.len() as f64;
    -labels
        .iter()
        .enumerate()
        .map(|(i, &y)| probs[[i, y]].ln())
        .sum::<f64>()
        / n
}

fn check_inputs(features: &Array2<f64>, labels: &[usize], n_classes: usize) -> Result<()> {
    if features.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.nrows(),
            got: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("no training rows".into()));
    }
    if let Some(&bad) = labels.iter().find(|&&y| y >= n_classes) {
        return Err(Error::InvalidArgument(format!("label {bad} >= n_classes {n_classes}")));
    }
    Ok(())
}

/// Regularized objective `CE(softmax(F W), y) + wd/2 * ||W||^2`.
pub fn logreg_objective(features: &Array2<f64>, labels: &[usize], weights: &Array2<f64>, weight_decay: f64) -> f64 {
    let probs = softmax_rows(&features.dot(weights));
    cross_entropy(&probs, labels) + 0.5 * weight_decay * weights.iter().map(|w| w * w).sum::<f64>()
}

/// Analytic gradient of [`logreg_objective`] with respect to `W`:
/// `F^T (P - Y) / n + wd * W`.
pub fn logreg_gradient(
    features: &Array2<f64>,
    labels: &[usize],
    weights: &Array2<f64>,
    weight_decay: f64,
) -> Array2<f64> {
    let probs = softmax_rows(&features.dot(weights));
    gradient_from_probs(features, labels, &probs, weights, weight_decay)
}

fn gradient_from_probs(
    features: &Array2<f64>,
    labels: &[usize],
    probs: &Array2<f64>,
    weights: &Array2<f64>,
    weight_decay: f64,
) -> Array2<f64> {
    let mut residual = probs.clone();
    for (i, &y) in labels.iter().enumerate() {
        residual[[i, y]] -= 1.0;
    }
    let n = labels.len() as f64;
    features.t().dot(&residual) / n + &(weights * weight_decay)
}

/// Full-batch Adam from zero weights, one step per epoch.
pub fn train_logreg(
    features: &Array2<f64>,
    labels: &[usize],
    n_classes: usize,
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    check_inputs(features, labels, n_classes)?;
    let mut present = vec![false; n_classes];
    for &y in labels {
        present[y] = true;
    }
    if let Some(c) = present.iter().position(|p| !p) {
        return Err(Error::InvalidArgument(format!("class {c} has no training rows")));
    }

    let dim = features.ncols();
    let mut w = Array2::<f64>::zeros((dim, n_classes));
    let mut m = Array2::<f64>::zeros((dim, n_classes));
    let mut v = Array2::<f64>::zeros((dim, n_classes));
    let (b1, b2) = (config.beta1, config.beta2);
    for epoch in 0..config.epochs {
        let probs = softmax_rows(&features.dot(&w));
        let loss = cross_entropy(&probs, labels);
        if !loss.is_finite() {
            return Err(Error::Divergence { epoch });
        }
        let g = gradient_from_probs(features, labels, &probs, &w, config.weight_decay);
        let t = (epoch + 1) as i32;
        let bc1 = 1.0 - b1.powi(t);
        let bc2 = 1.0 - b2.powi(t);
        ndarray::Zip::from(&mut w)
            .and(&mut m)
            .and(&mut v)
            .and(&g)
            .for_each(|w, m, v, &g| {
                *m = b1 * *m + (1.0 - b1) * g;
                *v = b2 * *v + (1.0 - b2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *w -= config.learning_rate * m_hat / (v_hat.sqrt() + config.eps);
            });
    }
    let final_loss = cross_entropy(&softmax_rows(&features.dot(&w)), labels);
    if !final_loss.is_finite() || w.iter().any(|x| !x.is_finite()) {
        return Err(Error::Divergence { epoch: config.epochs });
    }
    Ok(LogRegModel {
        weights: w,
        n_classes,
        config: *config,
        final_training_loss: final_loss,
    })
}

pub fn predict_proba(model: &LogRegModel, features: &Array2<f64>) -> Result<Array2<f64>> {
    if features.ncols() != model.weights.nrows() {
        return Err(Error::DimensionMismatch {
            expected: model.weights.nrows(),
            got: features.ncols(),
        });
    }
    Ok(softmax_rows(&features.dot(&model.weights)))
}

/// Index of the largest entry per row; ties go to the lowest index.
pub fn argmax_rows(probs: &Array2<f64>) -> Vec<usize> {
    probs
        .axis_iter(Axis(0))
        .map(|row| {
            let mut best = 0;
            for (j, &p) in row.iter().enumerate() {
                if p > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

pub fn accuracy(model: &LogRegModel, features: &Array2<f64>, labels: &[usize]) -> Result<f64> {
    if labels.is_empty() {
        return Err(Error::InvalidArgument("accuracy of an empty evaluation set".into()));
    }
    if features.nrows() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: features.nrows(),
            got: labels.len(),
        });
    }
    let pred = argmax_rows(&predict_proba(model, features)?);
    let hits = pred.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / labels.len() as f64)
}
