//! Small descriptive statistics shared by the harness and the confusion
//! analysis.

use crate::error::{Error, Result};

pub fn mean(x: &[f64]) -> f64 {
    if x.is_empty() {
        return f64::NAN;
    }
    x.iter().sum::<f64>() / x.len() as f64
}

/// Population standard deviation (divides by `n`).
pub fn std_dev(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / x.len() as f64).sqrt()
}

/// Mean absolute deviation around the mean.
pub fn mean_abs_deviation(x: &[f64]) -> f64 {
    // a constant input must give exactly 0, which rounding in the mean can
    // otherwise spoil
    if x.windows(2).all(|w| w[0] == w[1]) {
        return if x.is_empty() { f64::NAN } else { 0.0 };
    }
    let m = mean(x);
    mean(&x.iter().map(|v| (v - m).abs()).collect::<Vec<_>>())
}

/// Sample Pearson correlation. Errors on fewer than two points or on a
/// constant input.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), got: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InvalidArgument("correlation needs at least 2 points".into()));
    }
    let (mx, my) = (mean(x), mean(y));
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::Degenerate("zero variance input to correlation".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}
