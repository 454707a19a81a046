//! Feature sets: a row-major matrix of nonnegative backbone features, one
//! class label per row, and the class names those labels index.

mod format;
mod synth;

pub use format::{
    load_feature_set, manifest_path, save_feature_set, save_feature_set_csv,
    save_feature_set_with, ClassCount, SplitManifest, FSF1_MAGIC,
};
pub use synth::{synth_generate, synth_generate_graded, SynthConfig};

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Tolerance on the unit norm of a normalized row.
pub const UNIT_NORM_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureSet {
    features: Array2<f32>,
    labels: Vec<usize>,
    class_names: Vec<String>,
    normalized: bool,
    by_class: Vec<Vec<usize>>,
}

impl FeatureSet {
    /// Build and validate a feature set. Entries must be finite and
    /// nonnegative, labels must index `class_names`, and every class must own
    /// at least one row. A set with zero rows and zero classes is accepted so
    /// callers can report the empty case themselves.
    pub fn new(features: Array2<f32>, labels: Vec<usize>, class_names: Vec<String>) -> Result<Self> {
        if features.nrows() != labels.len() {
            return Err(Error::InvalidFeatures(format!(
                "{} feature rows but {} labels",
                features.nrows(),
                labels.len()
            )));
        }
        for (row, r) in features.outer_iter().enumerate() {
            for &x in r.iter() {
                if !x.is_finite() {
                    return Err(Error::InvalidFeatures(format!("non-finite entry in row {row}")));
                }
                if x < 0.0 {
                    return Err(Error::InvalidFeatures(format!(
                        "negative entry {x} in row {row}; features must come after a ReLU"
                    )));
                }
            }
        }
        let mut by_class = vec![Vec::new(); class_names.len()];
        for (row, &label) in labels.iter().enumerate() {
            let slot = by_class.get_mut(label).ok_or_else(|| {
                Error::InvalidFeatures(format!(
                    "label {label} on row {row} but only {} classes",
                    class_names.len()
                ))
            })?;
            slot.push(row);
        }
        if let Some(c) = by_class.iter().position(Vec::is_empty) {
            return Err(Error::InvalidFeatures(format!(
                "class {} ({}) has no rows",
                c, class_names[c]
            )));
        }
        Ok(Self {
            features,
            labels,
            class_names,
            normalized: false,
            by_class,
        })
    }

    pub fn features(&self) -> ArrayView2<'_, f32> {
        self.features.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f32> {
        self.features.row(i)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn num_rows(&self) -> usize {
        self.features.nrows()
    }

    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.num_rows() == 0
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// Row indices of class `c`, in file order.
    pub fn rows_of_class(&self, c: usize) -> &[usize] {
        &self.by_class[c]
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.by_class.iter().map(Vec::len).collect()
    }

    /// Gather `rows` into an f64 matrix for numerical work.
    pub fn gather(&self, rows: &[usize]) -> Array2<f64> {
        let mut out = Array2::zeros((rows.len(), self.dim()));
        for (dst, &src) in out.outer_iter_mut().zip(rows) {
            let src = self.features.row(src);
            for (d, s) in dst.into_iter().zip(src.iter()) {
                *d = f64::from(*s);
            }
        }
        out
    }

    /// Restrict the set to `classes`, relabeled `0..classes.len()` in the
    /// given order.
    pub fn subset_classes(&self, classes: &[usize]) -> Result<FeatureSet> {
        let mut seen = vec![false; self.num_classes()];
        for &c in classes {
            if c >= self.num_classes() || std::mem::replace(&mut seen[c], true) {
                return Err(Error::InvalidArgument(format!("bad or repeated class id {c}")));
            }
        }
        let rows: Vec<usize> = classes.iter().flat_map(|&c| self.by_class[c].iter().copied()).collect();
        let features = self.features.select(Axis(0), &rows);
        let labels = classes
            .iter()
            .enumerate()
            .flat_map(|(new, &c)| std::iter::repeat_n(new, self.by_class[c].len()))
            .collect();
        let names = classes.iter().map(|&c| self.class_names[c].clone()).collect();
        let mut out = FeatureSet::new(features, labels, names)?;
        out.normalized = self.normalized;
        Ok(out)
    }
}

/// Scale every row to unit L2 norm.
pub fn l2_normalize(fs: &FeatureSet) -> Result<FeatureSet> {
    let mut features = fs.features.clone();
    for (row, mut r) in features.outer_iter_mut().enumerate() {
        let norm = r.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroNorm { row });
        }
        r.mapv_inplace(|x| (f64::from(x) / norm) as f32);
    }
    Ok(FeatureSet {
        features,
        labels: fs.labels.clone(),
        class_names: fs.class_names.clone(),
        normalized: true,
        by_class: fs.by_class.clone(),
    })
}
