//! Synthetic stand-ins for backbone features.
//!
//! Each class has a centroid `base + s_c * u_c`, where `base` is a shared
//! positive direction, `u_c` a random unit direction and `s_c` the class
//! separation. Samples add isotropic Gaussian noise of total scale `spread`,
//! are clamped at zero (mimicking a ReLU) and L2-normalized. Classes with a
//! small separation all sit near `base` and are confusable with each other;
//! classes with a large separation are easy.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{l2_normalize, FeatureSet};
use crate::error::{Error, Result};
use crate::seed;

const MAX_RESAMPLES: usize = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub per_class: usize,
    pub dim: usize,
    /// Separation of the first class.
    pub separation: f64,
    /// When set, separations are spaced linearly from `separation` (first
    /// class) to this value (last class).
    pub separation_max: Option<f64>,
    pub spread: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn separations(&self) -> Vec<f64> {
        let n = self.num_classes;
        match self.separation_max {
            Some(hi) if n > 1 => (0..n)
                .map(|c| self.separation + (hi - self.separation) * c as f64 / (n - 1) as f64)
                .collect(),
            _ => vec![self.separation; n],
        }
    }

    pub fn generate(&self) -> Result<FeatureSet> {
        synth_generate_graded(self.per_class, self.dim, &self.separations(), self.spread, self.seed)
    }
}

/// Uniform-separation generator.
pub fn synth_generate(
    num_classes: usize,
    per_class: usize,
    dim: usize,
    separation: f64,
    spread: f64,
    seed: u64,
) -> Result<FeatureSet> {
    if num_classes < 2 {
        return Err(Error::InvalidArgument("synthetic sets need at least 2 classes".into()));
    }
    synth_generate_graded(per_class, dim, &vec![separation; num_classes], spread, seed)
}

/// Generator with one separation per class.
pub fn synth_generate_graded(
    per_class: usize,
    dim: usize,
    separations: &[f64],
    spread: f64,
    seed: u64,
) -> Result<FeatureSet> {
    let num_classes = separations.len();
    if num_classes < 2 || per_class < 1 || dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "need num_classes >= 2, per_class >= 1, dim >= 2 (got {num_classes}, {per_class}, {dim})"
        )));
    }
    if separations.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
        return Err(Error::InvalidArgument("separations must be finite and >= 0".into()));
    }
    if !(spread.is_finite() && spread > 0.0) {
        return Err(Error::InvalidArgument("spread must be finite and > 0".into()));
    }

    let mut rng = seed::rng_at(seed, &[seed::STREAM_SYNTH]);
    let base = Array1::from_elem(dim, 1.0 / (dim as f64).sqrt());
    let noise_scale = spread / (dim as f64).sqrt();

    let mut features = Array2::<f32>::zeros((num_classes * per_class, dim));
    let mut labels = Vec::with_capacity(num_classes * per_class);
    let mut row = 0;
    for (c, &sep) in separations.iter().enumerate() {
        let dir = unit_gaussian(&mut rng, dim);
        let centroid = &base + &(dir * sep);
        for _ in 0..per_class {
            let mut attempts = 0;
            loop {
                let mut sample = centroid.clone();
                for x in sample.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *x = (*x + noise_scale * z).max(0.0);
                }
                if sample.iter().any(|&x| x > 0.0) {
                    for (dst, src) in features.row_mut(row).iter_mut().zip(sample.iter()) {
                        *dst = *src as f32;
                    }
                    break;
                }
                attempts += 1;
                if attempts >= MAX_RESAMPLES {
                    return Err(Error::Degenerate(format!(
                        "class {c}: every sample clamped to zero after {MAX_RESAMPLES} draws"
                    )));
                }
            }
            labels.push(c);
            row += 1;
        }
    }
    let names = (0..num_classes).map(|c| format!("class{c:03}")).collect();
    let raw = FeatureSet::new(features, labels, names)?;
    l2_normalize(&raw)
}

fn unit_gaussian<R: Rng>(rng: &mut R, dim: usize) -> Array1<f64> {
    loop {
        let v: Array1<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = v.dot(&v).sqrt();
        if n > 1e-12 {
            return v / n;
        }
    }
}
