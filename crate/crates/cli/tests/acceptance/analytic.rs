//! Closed-form examples, each checked exactly or at 1e-9.

use std::collections::BTreeMap;
use std::process::Command;

use fsgauge::confusion::{
    binary_entropy, bipartite_confusion, conditional_entropy_bound, overlap_matrix, overlap_score,
    score_vs_error_correlation, OverlapParams,
};
use fsgauge::episode::{
    sample_episode, sample_episode_fixed_classes, sample_episode_fixed_shots, sample_unbalanced_queries,
};
use fsgauge::features::{l2_normalize, load_feature_set, save_feature_set, synth_generate, FeatureSet};
use fsgauge::gauges::{db_score, lr_confidence, lr_training_loss, nth_eigenvalue_gauge, similarity_metric, Setting};
use fsgauge::harness::{
    prediction_errors, roc_curve, roc_from_tasks, run_active_labeling, run_eigenindex_sweep, run_knn_sweep,
    run_tasks, run_variance_attribution, GridPoint, LabelPolicy, Orientation, TaskOptions, VarianceParams,
};
use fsgauge::learners::{
    accuracy, adjusted_rand_index, argmax_rows, cross_entropy, n_means, predict_proba, LogRegConfig, LogRegModel,
};
use fsgauge::simgraph::{
    cosine_matrix, diffuse, heavier_edges_graph, knn_sparsify, laplacian_eigenvalues, normalize_adjacency,
    DiffusionParams, SimilarityGraph,
};
use fsgauge::stats::{mean, pearson};
use fsgauge::{Balance, EpisodeSpec};
use ndarray::{array, Array2};

use crate::{ensure, ok, Check};

const TOL: f64 = 1e-9;

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn set(rows: &[&[f32]], labels: &[usize]) -> FeatureSet {
    let dim = rows[0].len();
    let x = Array2::from_shape_vec((rows.len(), dim), rows.concat()).unwrap();
    let n = labels.iter().max().map_or(0, |m| m + 1);
    FeatureSet::new(x, labels.to_vec(), (0..n).map(|c| format!("c{c}")).collect()).unwrap()
}

fn synth_small() -> FeatureSet {
    synth_generate(10, 60, 16, 0.5, 1.0, 3).unwrap()
}

/// Save a valid set of the same shape (for its manifest), then overwrite the
/// binary with hand-made bytes.
fn write_raw(path: &std::path::Path, rows: &[[f32; 2]], labels: &[u32]) -> Check {
    let valid: Vec<[f32; 2]> = rows.iter().map(|_| [1.0, 1.0]).collect();
    let lab: Vec<usize> = labels.iter().map(|&l| l as usize).collect();
    ok(save_feature_set(&set(&valid.iter().map(|r| &r[..]).collect::<Vec<_>>(), &lab), path))?;
    ok(std::fs::write(path, fsf1_bytes(rows, labels)))
}

fn fsf1_bytes(rows: &[[f32; 2]], labels: &[u32]) -> Vec<u8> {
    let mut b = b"FSF1".to_vec();
    b.extend((rows.len() as u32).to_le_bytes());
    b.extend(2u32.to_le_bytes());
    for r in rows {
        for v in r {
            b.extend(v.to_le_bytes());
        }
    }
    for l in labels {
        b.extend(l.to_le_bytes());
    }
    b
}

fn feature_store() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let fs = set(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]], &[0, 0, 1]);
    let p = dir.path().join("a.fsf1");
    ok(save_feature_set(&fs, &p))?;
    let back = ok(load_feature_set(&p))?;
    ensure!(back.num_rows() == 3 && back.num_classes() == 2, "3-row round trip");
    ensure!(back.features() == fs.features() && back.labels() == fs.labels(), "round trip not exact");

    // NaN: write the bytes by hand so no writer-side check interferes
    let nan = dir.path().join("nan.fsf1");
    write_raw(&nan, &[[1.0, f32::NAN]], &[0])?;
    let e = load_feature_set(&nan).err().map(|e| e.to_string()).unwrap_or_default();
    ensure!(e.contains("non-finite entry"), "NaN load gave `{e}`");

    let csv = dir.path().join("b.csv");
    ok(std::fs::write(&csv, "class,f0,f1\na,1,2\nb,3,4\n"))?;
    ensure!(ok(load_feature_set(&csv))?.num_rows() == 2, "csv rows");

    let fs = synth_small();
    let p = dir.path().join("r.fsf1");
    ok(save_feature_set(&fs, &p))?;
    let back = ok(load_feature_set(&p))?;
    ensure!(back.features() == fs.features() && back.labels() == fs.labels(), "random round trip");
    ensure!(save_feature_set(&fs, "/proc/fsgauge/x.fsf1").is_err(), "unwritable path accepted");
    let empty = ok(FeatureSet::new(Array2::zeros((0, 2)), vec![], vec![]))?;
    let e = save_feature_set(&empty, dir.path().join("e.fsf1")).err().map(|e| e.to_string()).unwrap_or_default();
    ensure!(e.contains("empty set"), "empty save gave `{e}`");

    // what a feature exporter writes for 2 classes x 3 images
    let six = dir.path().join("six.fsf1");
    let rows = [[0.5, 0.1], [0.4, 0.2], [0.6, 0.0], [0.0, 0.9], [0.1, 0.7], [0.2, 0.8]];
    write_raw(&six, &rows, &[0, 0, 0, 1, 1, 1])?;
    let six_fs = ok(load_feature_set(&six))?;
    ensure!(six_fs.num_rows() == 6 && six_fs.num_classes() == 2, "exporter-style file");
    let neg = dir.path().join("neg.fsf1");
    write_raw(&neg, &[[0.5, -0.1]], &[0])?;
    ensure!(load_feature_set(&neg).is_err(), "negative entry accepted");

    let n = ok(l2_normalize(&set(&[&[3.0, 4.0], &[1.0, 0.0]], &[0, 0])))?;
    ensure!(n.features().row(0).to_vec() == vec![0.6f32, 0.8], "[3,4] normalized to {:?}", n.row(0));
    ensure!(n.features().row(1).to_vec() == vec![1.0f32, 0.0], "[1,0] moved");
    ensure!(l2_normalize(&set(&[&[0.0, 0.0]], &[0])).is_err(), "zero row accepted");
    ensure!(synth_small() == synth_small(), "synth not deterministic");
    Ok(())
}

fn episodes() -> Check {
    let fs = synth_small();
    let spec = EpisodeSpec::new(5, 2, 3).with_test(4).with_seed(9);
    ensure!(ok(sample_episode(&fs, &spec))? == ok(sample_episode(&fs, &spec))?, "episode not deterministic");
    let four = fs.subset_classes(&[0, 1, 2, 3]).unwrap();
    ensure!(sample_episode(&four, &spec).is_err(), "5-way on 4 classes");

    let ids = [1, 3, 5, 7, 9];
    let a = ok(sample_episode_fixed_classes(&fs, &spec, &ids))?;
    let b = ok(sample_episode_fixed_classes(&fs, &spec.clone().with_seed(10), &ids))?;
    ensure!(a.class_ids == b.class_ids && a.support != b.support, "fixed classes contract");
    ensure!(sample_episode_fixed_classes(&fs, &spec, &[1, 1, 2, 3, 4]).is_err(), "repeated class accepted");
    ensure!(a == ok(sample_episode_fixed_classes(&fs, &spec, &ids))?, "fixed classes not deterministic");

    let shots = ok(fsgauge::episode::draw_fixed_shots(&fs, &(0..10).collect::<Vec<_>>(), 2, 4))?;
    let e = ok(sample_episode_fixed_shots(&fs, &spec, &shots))?;
    for (j, c) in e.class_ids.iter().enumerate() {
        ensure!(e.support[j] == shots[c], "support of class {c} is not the pre-assigned shots");
    }
    ensure!(e == ok(sample_episode_fixed_shots(&fs, &spec, &shots))?, "fixed shots not deterministic");
    let small: BTreeMap<usize, Vec<usize>> = shots.iter().take(4).map(|(k, v)| (*k, v.clone())).collect();
    ensure!(sample_episode_fixed_shots(&fs, &spec, &small).is_err(), "4-class pool accepted");

    let big = synth_generate(5, 120, 4, 0.5, 1.0, 1).unwrap();
    let counts = |n: usize, p: f64| -> Result<Vec<usize>, String> {
        let s = EpisodeSpec::new(n, 1, 50)
            .with_test(0)
            .with_balance(Balance::Unbalanced { first_class_fraction: p });
        Ok(ok(sample_unbalanced_queries(&big, &s))?.query.iter().map(Vec::len).collect())
    };
    ensure!(counts(2, 0.5)? == vec![50, 50], "p=0.5");
    ensure!(counts(5, 0.2)? == vec![50; 5], "p=1/N");
    Ok(())
}

fn graphs() -> Check {
    let s = 1.0 / 2f64.sqrt();
    let c = ok(cosine_matrix(array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [s, s]].view()))?;
    ensure!(close(c[[0, 1]], 1.0, TOL) && close(c[[0, 2]], 0.0, TOL), "cosine identity/orthogonal");
    ensure!(close(c[[0, 3]], 0.70710678, 1e-8), "45 degrees gives {}", c[[0, 3]]);

    let m = array![[1.0, 0.3, 0.5, 0.2], [0.3, 1.0, 0.4, 0.1], [0.5, 0.4, 1.0, 0.6], [0.2, 0.1, 0.6, 1.0]];
    let g = ok(knn_sparsify(&m, 3))?;
    ensure!(g.num_edges() == 6, "k = n-1 keeps {} edges", g.num_edges());
    // row 0 ties between 1 and 2 at the top: the lower index wins
    let tie = array![[1.0, 0.5, 0.5], [0.5, 1.0, 0.0], [0.5, 0.0, 1.0]];
    let g = ok(knn_sparsify(&tie, 1))?;
    ensure!(g.weights()[[0, 1]] == 0.5, "tie rule");
    ensure!(g.weights()[[0, 2]] == 0.5, "row 2 keeps its own pick");

    let e = normalize_adjacency(&ok(SimilarityGraph::from_weights(array![[0.0, 0.5], [0.5, 0.0]]))?);
    ensure!(e == array![[0.0, 1.0], [1.0, 0.0]], "E of a single edge: {e:?}");
    let w = array![[0.0, 0.5, 0.0], [0.5, 0.0, 0.0], [0.0, 0.0, 0.0]];
    let e = normalize_adjacency(&ok(SimilarityGraph::from_weights(w))?);
    ensure!(e.row(2).iter().chain(e.column(2).iter()).all(|&v| v == 0.0), "isolated vertex");
    let zero = ok(SimilarityGraph::from_weights(Array2::zeros((3, 3))))?;
    ensure!(normalize_adjacency(&zero).iter().all(|&v| v == 0.0), "W=0");

    let f = array![[0.1, 0.7], [0.5, 0.2], [0.9, 0.3]];
    let g = ok(knn_sparsify(&ok(cosine_matrix(f.view()))?, 1))?;
    let p = |kappa| DiffusionParams { kappa, ..DiffusionParams::default() };
    ensure!(ok(diffuse(&f, &g, &p(0)))? == f, "kappa=0");
    ensure!(ok(diffuse(&f, &zero, &p(1)))? == &f * 0.75, "edgeless diffusion");
    let twice = ok(diffuse(&ok(diffuse(&f, &g, &p(1)))?, &g, &p(1)))?;
    let two = ok(diffuse(&f, &g, &p(2)))?;
    ensure!(two.iter().zip(&twice).all(|(a, b)| close(*a, *b, 1e-12)), "kappa=2");

    let ev = ok(laplacian_eigenvalues(&ok(SimilarityGraph::from_weights(array![[0.0, 1.0], [1.0, 0.0]]))?))?;
    ensure!(close(ev[0], 0.0, TOL) && close(ev[1], 2.0, TOL), "single edge spectrum {ev:?}");
    let mut w = Array2::zeros((7, 7));
    for (a, b) in [(0, 1), (1, 2), (3, 4), (5, 6)] {
        w[[a, b]] = 0.8;
        w[[b, a]] = 0.8;
    }
    let ev = ok(laplacian_eigenvalues(&ok(SimilarityGraph::from_weights(w))?))?;
    ensure!(ev[..3].iter().all(|v| v.abs() <= 1e-8) && ev[3] > 1e-8, "3 components: {ev:?}");

    let m = array![[1.0, 0.9, 0.8, 0.1], [0.9, 1.0, 0.7, 0.2], [0.8, 0.7, 1.0, 0.3], [0.1, 0.2, 0.3, 1.0]];
    ensure!(ok(fsgauge::simgraph::heavier_edges_budget(&m, 6))?.num_edges() == 6, "complete budget");
    let one = ok(fsgauge::simgraph::heavier_edges_budget(&m, 1))?;
    ensure!(one.edges().len() == 1 && one.weights()[[0, 1]] == 0.9, "single heaviest edge");
    ensure!(heavier_edges_graph(&m, 2).is_err(), "budget over available edges accepted");
    Ok(())
}

fn learners() -> Check {
    let f = array![[1.0, 0.2], [0.3, 0.9], [0.5, 0.5], [0.0, 1.0], [0.7, 0.1]];
    let labels = vec![0, 1, 2, 3, 4];
    let zero = LogRegModel {
        weights: Array2::zeros((2, 5)),
        n_classes: 5,
        config: LogRegConfig::default(),
        final_training_loss: f64::NAN,
    };
    let p = ok(predict_proba(&zero, &f))?;
    ensure!(p.iter().all(|&v| v == 0.2), "zero weights not uniform");
    ensure!(close(cross_entropy(&p, &labels), 5f64.ln(), 1e-15), "zero-init loss is not ln 5");
    ensure!(close(cross_entropy(&p, &labels), 1.60944, 1e-5), "ln 5");

    let w = array![[2.0, -1.0, 0.5], [-0.5, 1.5, 0.3]];
    let m = LogRegModel { weights: w.clone(), n_classes: 3, ..zero.clone() };
    let big = LogRegModel { weights: &w * 10.0, ..m.clone() };
    let p = ok(predict_proba(&m, &f))?;
    ensure!(argmax_rows(&p) == argmax_rows(&ok(predict_proba(&big, &f))?), "argmax changed under scaling");
    ensure!(p.rows().into_iter().all(|r| close(r.sum(), 1.0, TOL)), "rows do not sum to 1");

    let pred = argmax_rows(&p);
    ensure!(ok(accuracy(&m, &f, &pred))? == 1.0, "all correct");
    let two = LogRegModel { weights: array![[1.0, 0.0], [0.0, 1.0]], n_classes: 2, ..zero.clone() };
    let y = vec![0, 1, 1, 1, 0];
    let flipped: Vec<usize> = y.iter().map(|l| 1 - l).collect();
    let a = ok(accuracy(&two, &f, &y))?;
    ensure!(close(ok(accuracy(&two, &f, &flipped))?, 1.0 - a, TOL), "binary complement");
    ensure!(accuracy(&two, &Array2::zeros((0, 2)), &[]).is_err(), "empty evaluation set");

    let blobs = array![[0.0, 0.0], [0.1, 0.0], [0.0, 0.1], [10.0, 10.0], [10.1, 10.0], [10.0, 10.1]];
    let c = ok(n_means(&blobs, 2, 1))?;
    ensure!(ok(adjusted_rand_index(&c.assignments, &[0, 0, 0, 1, 1, 1]))? == 1.0, "two blobs");
    let c = ok(n_means(&blobs, 6, 1))?;
    let mut a = c.assignments.clone();
    a.sort();
    a.dedup();
    ensure!(a.len() == 6 && c.inertia == 0.0, "one point per cluster");
    let same = Array2::from_elem((5, 2), 0.5);
    ensure!(ok(n_means(&same, 2, 1))?.empty_cluster_repairs == 1, "duplicate points repair");
    ensure!(ok(adjusted_rand_index(&[0, 0, 1, 2, 2], &[0, 0, 1, 2, 2]))? == 1.0, "identical partitions");
    Ok(())
}

fn gauges() -> Check {
    let confident = array![[1.0, 0.0], [0.0, 1.0]];
    ensure!(ok(lr_training_loss(&confident, &[0, 1]))? == 0.0, "confident loss");
    let uniform = Array2::from_elem((3, 5), 0.2);
    ensure!(close(ok(lr_training_loss(&uniform, &[0, 1, 2]))?, 5f64.ln(), TOL), "uniform loss");

    let same = Array2::from_elem((4, 3), 1.0 / 3f64.sqrt());
    ensure!(close(ok(similarity_metric(same.view(), &[0, 0, 1, 1], 2))?, 0.0, TOL), "identical support");
    let ortho = array![[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0]];
    ensure!(close(ok(similarity_metric(ortho.view(), &[0, 0, 1, 1], 2))?, 1.0, TOL), "orthogonal classes");

    ensure!(ok(db_score(array![[0.0, 0.0], [3.0, 1.0]].view(), &[0, 1], 2))? == 0.0, "singleton clusters");

    let two_comp = array![[1.0, 0.0], [0.99, 0.01], [0.0, 1.0], [0.01, 0.99]];
    ensure!(ok(nth_eigenvalue_gauge(two_comp.view(), 2, 1))?.abs() <= 1e-8, "two components");
    let dense = array![[1.0, 0.1], [0.9, 0.2], [0.8, 0.3], [0.95, 0.15]];
    ensure!(ok(nth_eigenvalue_gauge(dense.view(), 2, 3))? > 0.0, "connected graph");

    let (log, mmp) = ok(lr_confidence(&confident))?;
    ensure!(log == 0.0 && mmp == 1.0, "confident");
    let (log, mmp) = ok(lr_confidence(&uniform))?;
    ensure!(close(log, 5f64.ln(), TOL) && close(mmp, 0.2, TOL), "uniform confidence");
    Ok(())
}

fn confusion() -> Check {
    ensure!(ok(binary_entropy(0.5))? == 1.0, "H(0.5)");
    ensure!(ok(binary_entropy(0.0))? == 0.0 && ok(binary_entropy(1.0))? == 0.0, "H(0), H(1)");
    ensure!(ok(conditional_entropy_bound(&[0, 0, 1, 1], &[0, 0, 1, 1]))? == 0.0, "pure communities");
    ensure!(close(ok(conditional_entropy_bound(&[0, 0, 0, 0], &[0, 1, 0, 1]))?, 1.0, TOL), "one mixed community");

    let fs = synth_generate(4, 20, 8, 0.4, 1.0, 2).unwrap();
    let p = OverlapParams { k: 5, runs: 3 };
    let ab = ok(overlap_score(&fs, 0, 1, &p, 7))?;
    ensure!(ab == ok(overlap_score(&fs, 1, 0, &p, 7))?, "S(A,B) != S(B,A)");
    let m = ok(overlap_matrix(&fs, &[0, 1], &p, 7))?;
    ensure!(m.scores[[0, 1]] == ab && m.scores[[1, 0]] == ab, "single pair matrix");
    let m3 = ok(overlap_matrix(&fs, &[0, 1, 2], &p, 7))?;
    let m3p = ok(overlap_matrix(&fs, &[2, 0, 1], &p, 7))?;
    let perm = [1, 2, 0];
    for i in 0..3 {
        for j in 0..3 {
            ensure!(m3.scores[[i, j]] == m3p.scores[[perm[i], perm[j]]], "permuted class list");
        }
    }

    let base = fs.subset_classes(&[0, 1]).unwrap();
    let mut novel = fs.subset_classes(&[2, 3]).unwrap();
    novel = ok(FeatureSet::new(novel.features().to_owned(), novel.labels().to_vec(), vec!["n0".into(), "n1".into()]))?;
    let b = ok(bipartite_confusion(&base, &novel, &p, None, 3))?;
    ensure!(b.edges.windows(2).all(|w| w[0].2 >= w[1].2), "edges not sorted");

    // every class the same distribution: the summed overlap is constant across tasks
    let clones = synth_generate(6, 20, 8, 0.0, 1e-6, 4).unwrap();
    let flat = fsgauge::confusion::OverlapMatrix {
        class_ids: (0..6).collect(),
        class_names: clones.class_names().to_vec(),
        scores: Array2::from_elem((6, 6), 0.5) - Array2::<f64>::eye(6) * 0.5,
    };
    ensure!(
        score_vs_error_correlation(&clones, &flat, 3, 1, 10, &LogRegConfig::default(), 1).is_err(),
        "constant scores"
    );
    let m6 = ok(overlap_matrix(&fs, &[0, 1, 2, 3], &p, 1))?;
    ensure!(score_vs_error_correlation(&fs, &m6, 3, 1, 1, &LogRegConfig::default(), 1).is_err(), "one task");
    Ok(())
}

fn harness() -> Check {
    let x = [1.0, 2.0, 5.0, 3.0];
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    ensure!(close(ok(pearson(&x, &x))?, 1.0, TOL) && close(ok(pearson(&x, &neg))?, -1.0, TOL), "pearson");

    let fs = synth_small();
    let spec = EpisodeSpec::new(3, 2, 0).with_test(5);
    let params = VarianceParams { outer: 1, inner: 6, shot_pool: None, logreg: LogRegConfig::default() };
    let v = ok(run_variance_attribution(&fs, &spec, &params, 2))?;
    ensure!(v.fixed_classes.std == 0.0 && v.fixed_shots.std == 0.0, "outer=1 spread {v:?}");

    let tasks: Vec<(f64, f64)> = (0..20).map(|i| (i as f64 / 20.0, i as f64 / 20.0)).collect();
    let curve = ok(roc_curve(&tasks, Orientation::HigherIsEasier, 0.5))?;
    ensure!(curve.points.iter().any(|p| p.one_minus_specificity == 0.0 && p.sensibility == 1.0), "(0,1) missing");
    let res = ok(roc_from_tasks(&tasks, &tasks, Orientation::HigherIsEasier, 0.5))?;
    ensure!(res.holdout_percentages() == [[100.0, 0.0], [0.0, 100.0]], "perfect holdout {:?}", res.holdout);
    let easy: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.95)).collect();
    let e = roc_curve(&easy, Orientation::HigherIsEasier, 0.8).err().map(|e| e.to_string()).unwrap_or_default();
    ensure!(e.contains("single-class calibration"), "all-easy guard gave `{e}`");

    let r = ok(prediction_errors(&[(0.9, 0.7), (0.5, 0.7)]))?;
    ensure!(r.mad_baseline == 0.0, "constant accuracy");
    let r = ok(prediction_errors(&[(0.9, 0.6)]))?;
    ensure!(r.mad_baseline == 0.0 && close(r.mae, 0.3, TOL), "single task");

    let opts = TaskOptions::default();
    let rows = ok(run_eigenindex_sweep(&fs, Setting::Unsupervised, &[3], 0, 8, 12, &opts, 1))?;
    ensure!(rows.len() == 1, "singleton way grid");
    ensure!(rows[0].r_at_best >= rows[0].r_at_n.unwrap_or(0.0), "argmax below r_N");

    let point = GridPoint::new(3, 2, 6);
    let k_rows = ok(run_knn_sweep(&fs, Setting::SemiSupervised, &point, &[2, 23, 40], 8, &opts, 4))?;
    ensure!(k_rows.len() == 3, "one row per k");
    ensure!(k_rows[1].correlations == k_rows[2].correlations, "k >= |V|-1 differs from dense");

    let base = ok(run_tasks(&fs, Setting::SemiSupervised, &point, 6, &opts, 5))?;
    let acc: Vec<f64> = base.iter().map(|r| r.realized_performance).collect();
    let rows = ok(run_active_labeling(&fs, &point, &[0, 17], LabelPolicy::LowestConfidence, 6, &opts, 5))?;
    ensure!(close(rows[0].mean_accuracy, mean(&acc), 1e-12), "budget 0 is not the baseline");
    ensure!(rows[1].mean_accuracy.is_finite(), "all-but-one budget");
    Ok(())
}

fn cli() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let feats = dir.path().join("feats");
    let bin = env!("CARGO_BIN_EXE_fsgauge");
    let run = |args: &[&str]| Command::new(bin).args(args).output().map_err(|e| e.to_string());
    let f = feats.to_str().unwrap();
    let o = run(&["synth", "--classes", "20", "--per-class", "600", "--dim", "64", "--seed", "7", "-o", f])?;
    ensure!(o.status.success(), "synth: {}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("c");
    let args = ["correlate", "--setting", "supervised", "--features", f, "--n-tasks", "20", "--seed", "1", "-o"];
    let mut a = args.to_vec();
    a.push(out.to_str().unwrap());
    let o = run(&a)?;
    ensure!(o.status.success(), "correlate: {}", String::from_utf8_lossy(&o.stderr));
    let first = ok(std::fs::read(out.join("correlation.csv")))?;
    ensure!(String::from_utf8_lossy(&first).lines().count() > 1, "empty per-point csv");
    ensure!(run(&a)?.status.success(), "rerun");
    ensure!(first == ok(std::fs::read(out.join("correlation.csv")))?, "rerun differs");
    let o = run(&["correlate", "--bogus"])?;
    ensure!(o.status.code() == Some(2), "unknown flag exit {:?}", o.status.code());
    ensure!(String::from_utf8_lossy(&o.stderr).contains("Usage"), "no usage message");
    Ok(())
}

pub fn run() -> Check {
    let groups: [(&str, fn() -> Check); 8] = [
        ("feature store", feature_store),
        ("episodes", episodes),
        ("graphs", graphs),
        ("learners", learners),
        ("gauges", gauges),
        ("confusion", confusion),
        ("harness", harness),
        ("cli", cli),
    ];
    let failures: Vec<String> =
        groups.iter().filter_map(|(name, f)| f().err().map(|e| format!("{name}: {e}"))).collect();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(failures.join("; "))
    }
}
