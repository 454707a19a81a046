//! On-disk formats.
//!
//! FSF1 binary layout, all integers and floats little-endian:
//!
//! ```text
//! "FSF1"            4 bytes magic
//! rows: u32
//! dim:  u32
//! rows * dim f32    row-major features
//! rows u32          class labels
//! ```
//!
//! Class names and split metadata live in a TOML sidecar next to the data
//! file (`features.fsf1` -> `features.manifest.toml`). A CSV variant with a
//! `class,f0,...,f{d-1}` header is accepted for hand-built fixtures.

use std::fs;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::FeatureSet;
use crate::error::{Error, Result};

pub const FSF1_MAGIC: &[u8; 4] = b"FSF1";
const HEADER_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassCount {
    pub name: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitManifest {
    pub dataset_name: String,
    pub split_name: String,
    pub dtype: String,
    pub order: String,
    pub num_rows: usize,
    pub dim: usize,
    pub classes: Vec<ClassCount>,
}

impl SplitManifest {
    pub const DTYPE: &'static str = "f32-le";
    pub const ORDER: &'static str = "row-major";

    fn describe(fs: &FeatureSet, dataset_name: &str, split_name: &str) -> Self {
        SplitManifest {
            dataset_name: dataset_name.to_string(),
            split_name: split_name.to_string(),
            dtype: Self::DTYPE.to_string(),
            order: Self::ORDER.to_string(),
            num_rows: fs.num_rows(),
            dim: fs.dim(),
            classes: fs
                .class_names()
                .iter()
                .zip(fs.class_sizes())
                .map(|(name, count)| ClassCount {
                    name: name.clone(),
                    count,
                })
                .collect(),
        }
    }
}

/// Sidecar manifest path for an FSF1 data file.
pub fn manifest_path(path: &Path) -> PathBuf {
    path.with_extension("manifest.toml")
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Load a feature set from an FSF1 file (plus manifest) or a `.csv` file.
/// The result is never marked normalized, even if the rows happen to be unit
/// norm.
pub fn load_feature_set(path: impl AsRef<Path>) -> Result<FeatureSet> {
    let path = path.as_ref();
    if is_csv(path) {
        load_csv(path)
    } else {
        load_fsf1(path)
    }
}

fn load_fsf1(path: &Path) -> Result<FeatureSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != FSF1_MAGIC {
        return Err(Error::format(path, "missing FSF1 magic header"));
    }
    let read_u32 = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().unwrap()) as usize;
    let rows = read_u32(4);
    let dim = read_u32(8);
    if rows == 0 {
        return Err(Error::format(path, "empty set"));
    }
    if dim == 0 {
        return Err(Error::format(path, "zero feature dimension"));
    }
    let expected = rows
        .checked_mul(dim)
        .and_then(|n| n.checked_add(rows))
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::format(path, "header sizes overflow"))?;
    if bytes.len() != expected {
        return Err(Error::format(
            path,
            format!("expected {expected} bytes for {rows}x{dim}, found {}", bytes.len()),
        ));
    }

    let manifest_file = manifest_path(path);
    let text = fs::read_to_string(&manifest_file).map_err(|e| Error::io(&manifest_file, e))?;
    let manifest: SplitManifest =
        toml::from_str(&text).map_err(|e| Error::format(&manifest_file, e.to_string()))?;
    if manifest.num_rows != rows || manifest.dim != dim {
        return Err(Error::format(
            path,
            format!(
                "dimension mismatch: data is {rows}x{dim}, manifest says {}x{}",
                manifest.num_rows, manifest.dim
            ),
        ));
    }
    if manifest.dtype != SplitManifest::DTYPE || manifest.order != SplitManifest::ORDER {
        return Err(Error::format(
            &manifest_file,
            format!("unsupported dtype/order {}/{}", manifest.dtype, manifest.order),
        ));
    }
    let total: usize = manifest.classes.iter().map(|c| c.count).sum();
    if total != rows {
        return Err(Error::format(
            &manifest_file,
            format!("class counts sum to {total}, data has {rows} rows"),
        ));
    }

    let mut values = Vec::with_capacity(rows * dim);
    let body = &bytes[HEADER_LEN..HEADER_LEN + rows * dim * 4];
    for (i, chunk) in body.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::format(path, format!("non-finite entry in row {}", i / dim)));
        }
        if v < 0.0 {
            return Err(Error::format(
                path,
                format!("negative entry in row {}; export must be taken after a ReLU", i / dim),
            ));
        }
        values.push(v);
    }
    let labels: Vec<usize> = bytes[HEADER_LEN + rows * dim * 4..]
        .chunks_exact(4)
        .map(|c| u32::from_le_bytes(c.try_into().unwrap()) as usize)
        .collect();

    let mut counts = vec![0usize; manifest.classes.len()];
    for (row, &l) in labels.iter().enumerate() {
        match counts.get_mut(l) {
            Some(c) => *c += 1,
            None => return Err(Error::format(path, format!("label {l} out of range on row {row}"))),
        }
    }
    for (c, (declared, seen)) in manifest.classes.iter().zip(&counts).enumerate() {
        if declared.count != *seen {
            return Err(Error::format(
                &manifest_file,
                format!("class {c} ({}) declares {} rows, data has {seen}", declared.name, declared.count),
            ));
        }
    }

    let features = Array2::from_shape_vec((rows, dim), values).expect("shape checked above");
    let names = manifest.classes.into_iter().map(|c| c.name).collect();
    FeatureSet::new(features, labels, names)
}

fn load_csv(path: &Path) -> Result<FeatureSet> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| Error::format(path, e.to_string()))?;
    let headers = reader.headers().map_err(|e| Error::format(path, e.to_string()))?.clone();
    if headers.len() < 2 || &headers[0] != "class" {
        return Err(Error::format(path, "header must be `class,f0,...,f{d-1}`"));
    }
    for (i, h) in headers.iter().skip(1).enumerate() {
        if h != format!("f{i}") {
            return Err(Error::format(path, format!("column {} should be f{i}, found {h}", i + 1)));
        }
    }
    let dim = headers.len() - 1;

    let mut names: Vec<String> = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        if record.len() != dim + 1 {
            return Err(Error::format(
                path,
                format!("dimension mismatch on row {row}: {} fields", record.len()),
            ));
        }
        let class = &record[0];
        let label = match names.iter().position(|n| n == class) {
            Some(l) => l,
            None => {
                names.push(class.to_string());
                names.len() - 1
            }
        };
        labels.push(label);
        for field in record.iter().skip(1) {
            let v: f32 = field
                .trim()
                .parse()
                .map_err(|_| Error::format(path, format!("bad number {field:?} on row {row}")))?;
            if !v.is_finite() {
                return Err(Error::format(path, format!("non-finite entry in row {row}")));
            }
            if v < 0.0 {
                return Err(Error::format(path, format!("negative entry in row {row}")));
            }
            values.push(v);
        }
    }
    if labels.is_empty() {
        return Err(Error::format(path, "empty set"));
    }
    let features = Array2::from_shape_vec((labels.len(), dim), values).expect("row widths checked");
    FeatureSet::new(features, labels, names)
}

/// Write `fs` as FSF1 plus manifest. The dataset name defaults to the file
/// stem and the split name to `all`.
pub fn save_feature_set(fs: &FeatureSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("features")
        .to_string();
    save_feature_set_with(fs, path, &stem, "all")
}

pub fn save_feature_set_with(
    fs: &FeatureSet,
    path: impl AsRef<Path>,
    dataset_name: &str,
    split_name: &str,
) -> Result<()> {
    let path = path.as_ref();
    if fs.is_empty() {
        return Err(Error::InvalidFeatures("empty set".into()));
    }
    let rows = u32::try_from(fs.num_rows()).map_err(|_| Error::InvalidFeatures("too many rows".into()))?;
    let dim = u32::try_from(fs.dim()).map_err(|_| Error::InvalidFeatures("dimension too large".into()))?;

    let mut bytes = Vec::with_capacity(HEADER_LEN + 4 * fs.num_rows() * (fs.dim() + 1));
    bytes.extend_from_slice(FSF1_MAGIC);
    bytes.extend_from_slice(&rows.to_le_bytes());
    bytes.extend_from_slice(&dim.to_le_bytes());
    for v in fs.features().iter() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    for &l in fs.labels() {
        bytes.extend_from_slice(&(l as u32).to_le_bytes());
    }
    fs::write(path, &bytes).map_err(|e| Error::io(path, e))?;

    let manifest = SplitManifest::describe(fs, dataset_name, split_name);
    let text = toml::to_string(&manifest).expect("manifest serializes");
    let mpath = manifest_path(path);
    fs::write(&mpath, text).map_err(|e| Error::io(&mpath, e))
}

/// Write the CSV fixture format. Values use the shortest representation that
/// round-trips through f32.
pub fn save_feature_set_csv(fs: &FeatureSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if fs.is_empty() {
        return Err(Error::InvalidFeatures("empty set".into()));
    }
    let mut out = String::from("class");
    for i in 0..fs.dim() {
        out.push_str(&format!(",f{i}"));
    }
    out.push('\n');
    for (row, &label) in fs.features().outer_iter().zip(fs.labels()) {
        out.push_str(&fs.class_names()[label]);
        for v in row.iter() {
            out.push_str(&format!(",{v}"));
        }
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
