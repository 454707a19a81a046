//! Synthetic studies with a known direction of effect.

use fsgauge::features::{synth_generate_graded, FeatureSet, SynthConfig};
use fsgauge::gauges::{lr_confidence, Gauge, Setting};
use fsgauge::harness::{
    prediction_errors, roc_curve, roc_from_tasks, run_accuracy_prediction, run_correlation_study, run_tasks,
    run_variance_attribution, GridPoint, Orientation, TaskOptions, VarianceParams, DEFAULT_ACCURACY_CUT,
};
use fsgauge::learners::{argmax_rows, LogRegConfig};
use fsgauge::EpisodeSpec;
use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{ensure, ok, Check};

/// Twenty classes whose separation rises linearly from 0.2 to 1.0.
fn family() -> FeatureSet {
    SynthConfig {
        num_classes: 20,
        per_class: 100,
        dim: 64,
        separation: 0.2,
        separation_max: Some(1.0),
        spread: 1.0,
        seed: 1,
    }
    .generate()
    .unwrap()
}

fn single_threaded<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(f)
}

pub fn correlation() -> Check {
    let fs = family();
    let study = single_threaded(|| {
        run_correlation_study(&fs, Setting::SemiSupervised, &[GridPoint::new(5, 5, 30)], 1000, &TaskOptions::default(), 17)
    });
    let study = ok(study)?;
    let r = |g| study.correlation(0, g).map(|c| c.pearson_signed).ok_or(format!("{g} missing"));
    let (loss, sim, db, mmp, nth) =
        (r(Gauge::LrLoss)?, r(Gauge::Similarity)?, r(Gauge::DbScore)?, r(Gauge::LrConfMmp)?, r(Gauge::NthEgv)?);
    println!("      r: lr_loss {loss:.3}  similarity {sim:.3}  db {db:.3}  mmp {mmp:.3}  nth_egv {nth:.3}");
    ensure!(loss <= -0.5, "lr_loss r = {loss}");
    ensure!(sim >= 0.5, "similarity r = {sim}");
    ensure!(db <= -0.5, "db_score r = {db}");
    ensure!(mmp >= 0.5, "mean-max-prob r = {mmp}");
    ensure!(nth.abs() >= 0.3, "nth_egv |r| = {}", nth.abs());
    Ok(())
}

pub fn variance() -> Check {
    // a few nearly coincident classes among well separated ones
    let seps: Vec<f64> = (0..20).map(|c| 0.05 + 0.1 * c as f64).collect();
    let fs = ok(synth_generate_graded(100, 64, &seps, 1.0, 6))?;
    let spec = EpisodeSpec::new(5, 5, 0).with_test(50);
    let params = VarianceParams { outer: 100, inner: 100, shot_pool: None, logreg: LogRegConfig::default() };
    let v = ok(run_variance_attribution(&fs, &spec, &params, 8))?;
    println!(
        "      std: random {:.4}  fixed classes {:.4}  fixed shots {:.4}",
        v.std_random, v.fixed_classes.mean, v.fixed_shots.mean
    );
    ensure!(v.fixed_classes.mean < v.std_random, "fixed-class std {} >= random {}", v.fixed_classes.mean, v.std_random);
    ensure!(
        v.fixed_shots.mean > v.fixed_classes.mean,
        "fixed-shot std {} <= fixed-class {}",
        v.fixed_shots.mean,
        v.fixed_classes.mean
    );
    Ok(())
}

pub fn roc() -> Check {
    let fs = family();
    // interleave so both pools span the difficulty range
    let cal = ok(fs.subset_classes(&(0..20).step_by(2).collect::<Vec<_>>()))?;
    let hold = ok(fs.subset_classes(&(1..20).step_by(2).collect::<Vec<_>>()))?;
    ensure!(cal.class_names().iter().all(|n| !hold.class_names().contains(n)), "pools share a class");
    let point = GridPoint::new(5, 5, 0);
    let opts = TaskOptions::default();
    let acc = |fs: &FeatureSet, n, seed| -> Result<Vec<f64>, String> {
        Ok(ok(run_tasks(fs, Setting::Supervised, &point, n, &opts, seed))?.iter().map(|r| r.realized_performance).collect())
    };
    let cut = DEFAULT_ACCURACY_CUT;
    let cal_acc = acc(&cal, 2000, 1)?;
    let hold_acc = acc(&hold, 2000, 2)?;
    let hard = cal_acc.iter().filter(|&&a| a < cut).count();
    println!("      calibration tasks below {cut}: {hard} of {}", cal_acc.len());

    let perfect = |a: &[f64]| a.iter().map(|&x| (x, x)).collect::<Vec<_>>();
    let res = ok(roc_from_tasks(&perfect(&cal_acc), &perfect(&hold_acc), Orientation::HigherIsEasier, cut))?;
    let pct = res.holdout_percentages();
    println!("      perfect gauge holdout: hard {:.1}%  easy {:.1}%", pct[0][0], pct[1][1]);
    ensure!(pct[0][0] >= 95.0 && pct[1][1] >= 95.0, "perfect gauge holdout diagonal {pct:?}");

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let noise: Vec<(f64, f64)> = cal_acc.iter().map(|&a| (rng.random::<f64>(), a)).collect();
    let auc = ok(roc_curve(&noise, Orientation::HigherIsEasier, cut))?.auc;
    println!("      random gauge AUC {auc:.3} over {} tasks", noise.len());
    ensure!((auc - 0.5).abs() <= 0.05, "random gauge AUC {auc}");
    Ok(())
}

pub fn accuracy_prediction() -> Check {
    // Per task, softmax outputs of random logits at a task-specific scale;
    // each true label is drawn from its own row, so the probabilities are
    // calibrated by construction.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n_way, n_query) = (5, 150);
    let mut pairs = Vec::new();
    for _ in 0..2000 {
        let scale = rng.random_range(0.5..6.0);
        let logits = Array2::from_shape_fn((n_query, n_way), |_| scale * (rng.random::<f64>() * 2.0 - 1.0));
        let probs = fsgauge::learners::softmax_rows(&logits);
        let pred = argmax_rows(&probs);
        let mut hits = 0;
        for (i, row) in probs.rows().into_iter().enumerate() {
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let truth = row.iter().position(|&p| {
                acc += p;
                u < acc
            });
            hits += usize::from(truth.unwrap_or(n_way - 1) == pred[i]);
        }
        let (_, mmp) = ok(lr_confidence(&probs))?;
        pairs.push((mmp, hits as f64 / n_query as f64));
    }
    let r = ok(prediction_errors(&pairs))?;
    println!("      calibrated: MAE {:.4}  MAD {:.4}", r.mae, r.mad_baseline);
    let e2e = ok(run_accuracy_prediction(&family(), &GridPoint::new(5, 5, 30), 500, &TaskOptions::default(), 3))?;
    println!("      end to end on the family (informational): MAE {:.4}  MAD {:.4}", e2e.mae, e2e.mad_baseline);
    ensure!(r.mae < r.mad_baseline, "MAE {} >= MAD {}", r.mae, r.mad_baseline);
    Ok(())
}
