//! Weighted Louvain community detection (resolution 1).

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed;
use crate::simgraph::SimilarityGraph;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityPartition {
    /// Community id per vertex; ids are contiguous from 0 in order of first
    /// appearance.
    pub community_of: Vec<usize>,
    pub modularity: f64,
}

impl CommunityPartition {
    pub fn num_communities(&self) -> usize {
        self.community_of.iter().max().map_or(0, |m| m + 1)
    }
}

/// Weighted Newman modularity of `community_of` on `g`.
pub fn modularity(g: &SimilarityGraph, community_of: &[usize]) -> f64 {
    let w = g.weights();
    let deg = g.degrees();
    let two_m: f64 = deg.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let k = community_of.iter().max().map_or(0, |m| m + 1);
    let mut internal = vec![0.0; k];
    let mut tot = vec![0.0; k];
    for i in 0..community_of.len() {
        tot[community_of[i]] += deg[i];
        for j in 0..community_of.len() {
            if community_of[i] == community_of[j] {
                internal[community_of[i]] += w[[i, j]];
            }
        }
    }
    internal
        .iter()
        .zip(&tot)
        .map(|(&a, &t)| a / two_m - (t / two_m).powi(2))
        .sum()
}

/// Adjacency lists plus per-node self-loop weight. A self-loop of weight `s`
/// contributes `s` to the node's degree (diagonal entry of the aggregated
/// adjacency matrix).
struct Level {
    adj: Vec<Vec<(usize, f64)>>,
    self_loop: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.adj.len()
    }

    fn degrees(&self) -> Vec<f64> {
        self.adj
            .iter()
            .zip(&self.self_loop)
            .map(|(a, &s)| s + a.iter().map(|&(_, w)| w).sum::<f64>())
            .collect()
    }

    fn modularity(&self, comm: &[usize], two_m: f64) -> f64 {
        let k = comm.iter().max().map_or(0, |m| m + 1);
        let mut internal = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for (i, d) in self.degrees().into_iter().enumerate() {
            tot[comm[i]] += d;
            internal[comm[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if comm[j] == comm[i] {
                    internal[comm[i]] += w;
                }
            }
        }
        internal
            .iter()
            .zip(&tot)
            .map(|(&a, &t)| a / two_m - (t / two_m).powi(2))
            .sum()
    }

    fn aggregate(&self, comm: &[usize], k: usize) -> Level {
        let mut dense: Vec<std::collections::BTreeMap<usize, f64>> = vec![Default::default(); k];
        let mut self_loop = vec![0.0; k];
        for i in 0..self.len() {
            self_loop[comm[i]] += self.self_loop[i];
            for &(j, w) in &self.adj[i] {
                if comm[i] == comm[j] {
                    self_loop[comm[i]] += w;
                } else {
                    *dense[comm[i]].entry(comm[j]).or_insert(0.0) += w;
                }
            }
        }
        Level {
            adj: dense.into_iter().map(|m| m.into_iter().collect()).collect(),
            self_loop,
        }
    }
}

const GAIN_EPS: f64 = 1e-12;

/// Local-move phase. Returns whether any vertex changed community, and
/// appends the modularity after each sweep to `trace`.
fn local_moves(level: &Level, comm: &mut [usize], order: &[usize], two_m: f64, trace: &mut Vec<f64>) -> bool {
    let n = level.len();
    let deg = level.degrees();
    let mut tot = vec![0.0; n];
    for i in 0..n {
        tot[comm[i]] += deg[i];
    }
    let mut links = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut any = false;
    loop {
        let mut moved = false;
        for &i in order {
            let own = comm[i];
            for &(j, w) in &level.adj[i] {
                if links[comm[j]] == 0.0 {
                    touched.push(comm[j]);
                }
                links[comm[j]] += w;
            }
            tot[own] -= deg[i];
            let gain = |c: usize, links: &[f64]| links[c] - tot[c] * deg[i] / two_m;
            let mut best = own;
            let mut best_gain = gain(own, &links);
            touched.sort_unstable();
            touched.dedup();
            for &c in &touched {
                let g = gain(c, &links);
                if g > best_gain + GAIN_EPS {
                    best_gain = g;
                    best = c;
                }
            }
            tot[best] += deg[i];
            if best != own {
                comm[i] = best;
                moved = true;
            }
            for &c in &touched {
                links[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
        any = true;
        trace.push(level.modularity(comm, two_m));
    }
    any
}

fn relabel(comm: &mut [usize]) -> usize {
    let mut map = vec![usize::MAX; comm.iter().max().map_or(0, |m| m + 1)];
    let mut next = 0;
    for c in comm.iter_mut() {
        if map[*c] == usize::MAX {
            map[*c] = next;
            next += 1;
        }
        *c = map[*c];
    }
    next
}

/// Louvain with a seeded vertex visiting order. Also returns the modularity
/// after every local-move sweep, across all levels.
pub fn louvain_traced(g: &SimilarityGraph, seed: u64) -> Result<(CommunityPartition, Vec<f64>)> {
    let n = g.num_vertices();
    if g.num_edges() == 0 {
        return Err(Error::InvalidArgument("Louvain on an edgeless graph".into()));
    }
    let w = g.weights();
    let mut level = Level {
        adj: (0..n)
            .map(|i| (0..n).filter(|&j| j != i && w[[i, j]] > 0.0).map(|j| (j, w[[i, j]])).collect())
            .collect(),
        self_loop: vec![0.0; n],
    };
    let two_m: f64 = level.degrees().iter().sum();
    let mut rng = seed::rng(seed);
    let mut membership: Vec<usize> = (0..n).collect();
    let mut trace = vec![level.modularity(&(0..n).collect::<Vec<_>>(), two_m)];
    loop {
        let mut comm: Vec<usize> = (0..level.len()).collect();
        let mut order = comm.clone();
        order.shuffle(&mut rng);
        if !local_moves(&level, &mut comm, &order, two_m, &mut trace) {
            break;
        }
        let k = relabel(&mut comm);
        for m in membership.iter_mut() {
            *m = comm[*m];
        }
        if k == level.len() {
            break;
        }
        level = level.aggregate(&comm, k);
    }
    relabel(&mut membership);
    let q = modularity(g, &membership);
    Ok((
        CommunityPartition {
            community_of: membership,
            modularity: q,
        },
        trace,
    ))
}

pub fn louvain(g: &SimilarityGraph, seed: u64) -> Result<CommunityPartition> {
    louvain_traced(g, seed).map(|(p, _)| p)
}
