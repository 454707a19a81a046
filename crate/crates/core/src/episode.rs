//! Few-shot episode sampling: N classes, K labeled shots and Q unlabeled
//! queries per class, plus an optional held-out test set per class.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureSet;
use crate::seed;

pub const DEFAULT_TEST_PER_CLASS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Balance {
    Balanced,
    /// The first drawn class receives `first_class_fraction` of the NQ
    /// queries; the rest are split evenly over the other classes.
    Unbalanced { first_class_fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub n_way: usize,
    pub k_shot: usize,
    pub q_query: usize,
    pub test_per_class: usize,
    pub balance: Balance,
    pub seed: u64,
}

impl EpisodeSpec {
    pub fn new(n_way: usize, k_shot: usize, q_query: usize) -> Self {
        Self {
            n_way,
            k_shot,
            q_query,
            test_per_class: DEFAULT_TEST_PER_CLASS,
            balance: Balance::Balanced,
            seed: 0,
        }
    }

    pub fn with_test(mut self, test_per_class: usize) -> Self {
        self.test_per_class = test_per_class;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_balance(mut self, balance: Balance) -> Self {
        self.balance = balance;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_way < 2 {
            return Err(Error::Sampling(format!("n_way must be >= 2, got {}", self.n_way)));
        }
        if self.k_shot + self.q_query == 0 {
            return Err(Error::Sampling("k_shot + q_query must be >= 1".into()));
        }
        if let Balance::Unbalanced { first_class_fraction: p } = self.balance {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::Sampling(format!("first_class_fraction must lie in (0,1), got {p}")));
            }
        }
        Ok(())
    }

    /// Queries drawn for each position `0..n_way` of the episode.
    ///
    /// Unbalanced: the first class gets `round_half_up(p * N * Q)`, the
    /// remainder is split as evenly as possible, extra units going to the
    /// lower positions.
    pub fn query_counts(&self) -> Vec<usize> {
        let n = self.n_way;
        match self.balance {
            Balance::Balanced => vec![self.q_query; n],
            Balance::Unbalanced { first_class_fraction: p } => {
                let total = n * self.q_query;
                let first = ((p * total as f64) + 0.5).floor() as usize;
                let first = first.min(total);
                let rest = total - first;
                let others = n - 1;
                let mut counts = vec![first];
                counts.extend((0..others).map(|i| rest / others + usize::from(i < rest % others)));
                counts
            }
        }
    }
}

/// One sampled task. Position `j` in `class_ids` is the task label `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Episode {
    pub class_ids: Vec<usize>,
    pub support: Vec<Vec<usize>>,
    pub query: Vec<Vec<usize>>,
    pub test: Vec<Vec<usize>>,
}

fn flatten(groups: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let rows = groups.iter().flatten().copied().collect();
    let labels = groups
        .iter()
        .enumerate()
        .flat_map(|(j, g)| std::iter::repeat_n(j, g.len()))
        .collect();
    (rows, labels)
}

impl Episode {
    pub fn n_way(&self) -> usize {
        self.class_ids.len()
    }

    /// Support rows and their task labels, class-major.
    pub fn support_rows(&self) -> (Vec<usize>, Vec<usize>) {
        flatten(&self.support)
    }

    pub fn query_rows(&self) -> (Vec<usize>, Vec<usize>) {
        flatten(&self.query)
    }

    pub fn test_rows(&self) -> (Vec<usize>, Vec<usize>) {
        flatten(&self.test)
    }

    /// Replace the test set with every row of the episode's classes that is
    /// neither a shot nor a query.
    pub fn with_remaining_as_test(mut self, fs: &FeatureSet) -> Self {
        self.test = self
            .class_ids
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let used: std::collections::BTreeSet<usize> =
                    self.support[j].iter().chain(&self.query[j]).copied().collect();
                fs.rows_of_class(c).iter().copied().filter(|r| !used.contains(r)).collect()
            })
            .collect();
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("episode serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("episode json: {e}")))
    }
}

/// Draw `n_way` classes uniformly without replacement, then shots, queries
/// and test rows uniformly without replacement inside each class.
pub fn sample_episode(fs: &FeatureSet, spec: &EpisodeSpec) -> Result<Episode> {
    spec.validate()?;
    if fs.num_classes() < spec.n_way {
        return Err(Error::Sampling(format!(
            "{}-way episode needs {} classes, set has {}",
            spec.n_way,
            spec.n_way,
            fs.num_classes()
        )));
    }
    let mut rng = seed::rng_at(spec.seed, &[seed::STREAM_EPISODE]);
    let class_ids = index::sample(&mut rng, fs.num_classes(), spec.n_way).into_vec();
    fill(fs, spec, class_ids, &mut rng)
}

/// Unbalanced-query variant; `spec.balance` must be `Unbalanced`.
pub fn sample_unbalanced_queries(fs: &FeatureSet, spec: &EpisodeSpec) -> Result<Episode> {
    if !matches!(spec.balance, Balance::Unbalanced { .. }) {
        return Err(Error::Sampling("sample_unbalanced_queries needs an Unbalanced spec".into()));
    }
    sample_episode(fs, spec)
}

/// Same classes every call; only rows are redrawn.
pub fn sample_episode_fixed_classes(fs: &FeatureSet, spec: &EpisodeSpec, class_ids: &[usize]) -> Result<Episode> {
    spec.validate()?;
    if class_ids.len() != spec.n_way {
        return Err(Error::Sampling(format!(
            "{} class ids given for a {}-way episode",
            class_ids.len(),
            spec.n_way
        )));
    }
    let mut seen = vec![false; fs.num_classes()];
    for &c in class_ids {
        if c >= fs.num_classes() {
            return Err(Error::Sampling(format!("unknown class {c}")));
        }
        if std::mem::replace(&mut seen[c], true) {
            return Err(Error::Sampling(format!("duplicate class {c}")));
        }
    }
    let mut rng = seed::rng_at(spec.seed, &[seed::STREAM_EPISODE]);
    fill(fs, spec, class_ids.to_vec(), &mut rng)
}

/// Pre-assign `k_shot` shots to each class in `classes` (the outer loop of
/// the fixed-shot protocol).
pub fn draw_fixed_shots(
    fs: &FeatureSet,
    classes: &[usize],
    k_shot: usize,
    seed: u64,
) -> Result<BTreeMap<usize, Vec<usize>>> {
    let mut rng = seed::rng_at(seed, &[seed::STREAM_EPISODE, 1]);
    let mut out = BTreeMap::new();
    for &c in classes {
        if c >= fs.num_classes() {
            return Err(Error::Sampling(format!("unknown class {c}")));
        }
        let rows = fs.rows_of_class(c);
        if rows.len() < k_shot {
            return Err(Error::Sampling(format!(
                "class {c} has {} rows, need {k_shot} shots",
                rows.len()
            )));
        }
        let picked = index::sample(&mut rng, rows.len(), k_shot).into_iter().map(|i| rows[i]).collect();
        out.insert(c, picked);
    }
    Ok(out)
}

/// Draw `n_way` classes from the keys of `shots_per_class` and reuse their
/// pre-assigned shots verbatim; queries and test rows are drawn from the
/// remaining rows of each class.
pub fn sample_episode_fixed_shots(
    fs: &FeatureSet,
    spec: &EpisodeSpec,
    shots_per_class: &BTreeMap<usize, Vec<usize>>,
) -> Result<Episode> {
    spec.validate()?;
    for (&c, shots) in shots_per_class {
        if c >= fs.num_classes() {
            return Err(Error::Sampling(format!("unknown class {c}")));
        }
        if shots.len() != spec.k_shot {
            return Err(Error::Sampling(format!(
                "class {c} has {} pre-assigned shots, spec wants {}",
                shots.len(),
                spec.k_shot
            )));
        }
        for &s in shots {
            if fs.labels().get(s) != Some(&c) {
                return Err(Error::Sampling(format!("row {s} is not a member of class {c}")));
            }
        }
        let mut sorted = shots.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != shots.len() {
            return Err(Error::Sampling(format!("repeated shot for class {c}")));
        }
    }
    let pool: Vec<usize> = shots_per_class.keys().copied().collect();
    if pool.len() < spec.n_way {
        return Err(Error::Sampling(format!(
            "{} classes have pre-assigned shots, need {}",
            pool.len(),
            spec.n_way
        )));
    }
    let mut rng = seed::rng_at(spec.seed, &[seed::STREAM_EPISODE]);
    let class_ids: Vec<usize> = index::sample(&mut rng, pool.len(), spec.n_way)
        .into_iter()
        .map(|i| pool[i])
        .collect();

    let counts = spec.query_counts();
    let mut ep = Episode {
        class_ids: class_ids.clone(),
        support: Vec::with_capacity(spec.n_way),
        query: Vec::with_capacity(spec.n_way),
        test: Vec::with_capacity(spec.n_way),
    };
    for (pos, &c) in class_ids.iter().enumerate() {
        let shots = shots_per_class
            .get(&c)
            .ok_or_else(|| Error::Sampling(format!("class {c} has no pre-assigned shots")))?;
        let rest: Vec<usize> = fs.rows_of_class(c).iter().copied().filter(|r| !shots.contains(r)).collect();
        let need = counts[pos] + spec.test_per_class;
        if rest.len() < need {
            return Err(Error::Sampling(format!(
                "class {c} has {} rows besides its shots, need {need}",
                rest.len()
            )));
        }
        let drawn: Vec<usize> = index::sample(&mut rng, rest.len(), need).into_iter().map(|i| rest[i]).collect();
        ep.support.push(shots.clone());
        ep.query.push(drawn[..counts[pos]].to_vec());
        ep.test.push(drawn[counts[pos]..].to_vec());
    }
    Ok(ep)
}

fn fill<R: Rng>(fs: &FeatureSet, spec: &EpisodeSpec, class_ids: Vec<usize>, rng: &mut R) -> Result<Episode> {
    let counts = spec.query_counts();
    let mut ep = Episode {
        class_ids,
        support: Vec::with_capacity(spec.n_way),
        query: Vec::with_capacity(spec.n_way),
        test: Vec::with_capacity(spec.n_way),
    };
    for pos in 0..spec.n_way {
        let c = ep.class_ids[pos];
        let rows = fs.rows_of_class(c);
        let need = spec.k_shot + counts[pos] + spec.test_per_class;
        if rows.len() < need {
            return Err(Error::Sampling(format!(
                "class {c} has {} rows, episode needs {need}",
                rows.len()
            )));
        }
        let drawn: Vec<usize> = index::sample(rng, rows.len(), need).into_iter().map(|i| rows[i]).collect();
        let (k, q) = (spec.k_shot, counts[pos]);
        ep.support.push(drawn[..k].to_vec());
        ep.query.push(drawn[k..k + q].to_vec());
        ep.test.push(drawn[k + q..].to_vec());
    }
    Ok(ep)
}
