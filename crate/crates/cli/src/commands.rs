//! One adapter per subcommand: resolve flags against the config, call the
//! library, write files.

use std::path::{Path, PathBuf};

use clap::{Args, Subcommand};
use serde::{Deserialize, Serialize};

use fsgauge::confusion::{self, OverlapParams};
use fsgauge::episode::{sample_episode, EpisodeSpec};
use fsgauge::features::{self, load_feature_set, save_feature_set, FeatureSet, SynthConfig};
use fsgauge::gauges::{Gauge, Setting};
use fsgauge::harness::{self, GridPoint, LabelPolicy, RocParams, TaskOptions, VarianceParams};
use fsgauge::Balance;

use crate::config::ConfigFile;
use crate::CliError;

pub const NAMES: &[&str] = &[
    "synth",
    "sample",
    "gauge",
    "correlate",
    "variance",
    "confusion",
    "roc",
    "predict-accuracy",
    "sweep-eigen",
    "sweep-knn",
    "active-label",
];

pub struct Context {
    pub seed: u64,
    pub out: PathBuf,
    pub task: TaskOptions,
}

/// Learner and graph settings shared by every protocol (`[task]` table).
#[derive(Args, Serialize, Deserialize, Default, Debug)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct TaskFlags {
    /// Neighbors kept per vertex in the diffusion / eigenvalue graph
    #[arg(long, global = true)]
    pub k_neighbors: Option<usize>,
    /// Self-loop weight in the diffusion operator
    #[arg(long, global = true)]
    pub alpha: Option<f64>,
    /// Number of diffusion steps
    #[arg(long, global = true)]
    pub kappa: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true)]
    pub weight_decay: Option<f64>,
    /// k-means restarts
    #[arg(long, global = true)]
    pub kmeans_restarts: Option<usize>,
}

impl TaskFlags {
    pub fn options(&self) -> Result<TaskOptions, CliError> {
        let mut o = TaskOptions::default();
        if let Some(k) = self.k_neighbors {
            o.diffusion.k_neighbors = k;
        }
        if let Some(a) = self.alpha {
            o.diffusion.alpha = a;
        }
        if let Some(k) = self.kappa {
            o.diffusion.kappa = k;
        }
        if let Some(e) = self.epochs {
            o.logreg.epochs = e;
        }
        if let Some(lr) = self.learning_rate {
            o.logreg.learning_rate = lr;
        }
        if let Some(wd) = self.weight_decay {
            o.logreg.weight_decay = wd;
        }
        if let Some(n) = self.kmeans_restarts {
            o.kmeans.n_init = n;
        }
        if o.diffusion.k_neighbors == 0 || o.kmeans.n_init == 0 {
            return Err(CliError::Config("k-neighbors and kmeans-restarts must be >= 1".into()));
        }
        Ok(o)
    }
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic feature set
    Synth(SynthArgs),
    /// Sample episodes and write them as JSON lines
    Sample(SampleArgs),
    /// Compute every available gauge on sampled tasks
    Gauge(GaugeArgs),
    /// Gauge-vs-performance correlation over a grid of task shapes
    Correlate(CorrelateArgs),
    /// Split accuracy variance between class choice and shot choice
    Variance(VarianceArgs),
    /// Class-overlap map from community detection
    Confusion(ConfusionArgs),
    /// Calibrate a hard-task threshold and test it on held-out classes
    Roc(RocArgs),
    /// Predict accuracy from mean max probability
    PredictAccuracy(PredictArgs),
    /// Correlation of every Laplacian eigenvalue index, per N
    SweepEigen(SweepEigenArgs),
    /// Correlations as a function of the graph's neighbor count
    SweepKnn(SweepKnnArgs),
    /// Label queries chosen by confidence and retrain
    ActiveLabel(ActiveArgs),
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SynthArgs {
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    per_class: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    /// Separation of the first class
    #[arg(long)]
    separation: Option<f64>,
    /// Separation of the last class; classes in between are spaced linearly
    #[arg(long)]
    separation_max: Option<f64>,
    /// Noise scale
    #[arg(long)]
    spread: Option<f64>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SampleArgs {
    /// FSF1 or CSV file, or a directory holding features.fsf1
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    /// Test rows per class
    #[arg(long)]
    test: Option<usize>,
    /// Share of the queries given to the first class
    #[arg(long)]
    first_class_fraction: Option<f64>,
    /// Episodes to draw
    #[arg(long)]
    count: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct GaugeArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    /// supervised, semi-supervised or unsupervised
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    #[arg(long)]
    first_class_fraction: Option<f64>,
    #[arg(long)]
    n_tasks: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct CorrelateArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    setting: Option<String>,
    /// Comma-separated N values
    #[arg(long, value_delimiter = ',')]
    ways: Option<Vec<usize>>,
    /// Comma-separated K values
    #[arg(long, value_delimiter = ',')]
    shots: Option<Vec<usize>>,
    /// Comma-separated Q values
    #[arg(long, value_delimiter = ',')]
    queries: Option<Vec<usize>>,
    #[arg(long)]
    first_class_fraction: Option<f64>,
    #[arg(long)]
    n_tasks: Option<usize>,
    /// Also write gauge-vs-performance scatter plots
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    svg: Option<bool>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct VarianceArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    test: Option<usize>,
    #[arg(long)]
    outer: Option<usize>,
    #[arg(long)]
    inner: Option<usize>,
    /// Classes that receive pre-assigned shots in the fixed-shot protocol
    #[arg(long)]
    shot_pool: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ConfusionArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    /// Second feature set; switches to the base-vs-novel map
    #[arg(long)]
    novel: Option<PathBuf>,
    /// Random subset of classes to score (default: all)
    #[arg(long)]
    classes: Option<usize>,
    /// Edges kept per vertex
    #[arg(long)]
    k: Option<usize>,
    /// Louvain runs averaged per pair
    #[arg(long)]
    runs: Option<usize>,
    /// Only export the heaviest pairs
    #[arg(long)]
    top: Option<usize>,
    /// Edges kept in the base-vs-novel map
    #[arg(long)]
    edge_budget: Option<usize>,
    /// Tasks for the overlap-vs-error correlation (0 skips it)
    #[arg(long)]
    error_tasks: Option<usize>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RocArgs {
    /// Calibration pool
    #[arg(long)]
    features: Option<PathBuf>,
    /// Holdout pool; without it the classes of --features are split in two
    #[arg(long)]
    holdout: Option<PathBuf>,
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    gauge: Option<String>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    #[arg(long)]
    n_tasks: Option<usize>,
    /// Tasks below this accuracy count as hard
    #[arg(long)]
    cut: Option<f64>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    svg: Option<bool>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct PredictArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    #[arg(long)]
    n_tasks: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepEigenArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    setting: Option<String>,
    #[arg(long, value_delimiter = ',')]
    ways: Option<Vec<usize>>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    #[arg(long)]
    n_tasks: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct SweepKnnArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    /// Comma-separated neighbor counts
    #[arg(long, value_delimiter = ',')]
    k_grid: Option<Vec<usize>>,
    #[arg(long)]
    n_tasks: Option<usize>,
}

#[derive(Args, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ActiveArgs {
    #[arg(long)]
    features: Option<PathBuf>,
    #[arg(long)]
    n_way: Option<usize>,
    #[arg(long)]
    k_shot: Option<usize>,
    #[arg(long)]
    q_query: Option<usize>,
    /// Comma-separated numbers of queries to label
    #[arg(long, value_delimiter = ',')]
    budgets: Option<Vec<usize>>,
    /// lowest-confidence or random
    #[arg(long)]
    policy: Option<String>,
    #[arg(long)]
    n_tasks: Option<usize>,
}

pub fn dispatch(cmd: &Command, file: &ConfigFile, ctx: &Context) -> Result<String, CliError> {
    match cmd {
        Command::Synth(a) => synth(&file.resolve_section("synth", a)?, ctx),
        Command::Sample(a) => sample(&file.resolve_section("sample", a)?, ctx),
        Command::Gauge(a) => gauge(&file.resolve_section("gauge", a)?, ctx),
        Command::Correlate(a) => correlate(&file.resolve_section("correlate", a)?, ctx),
        Command::Variance(a) => variance(&file.resolve_section("variance", a)?, ctx),
        Command::Confusion(a) => confusion_map(&file.resolve_section("confusion", a)?, ctx),
        Command::Roc(a) => roc(&file.resolve_section("roc", a)?, ctx),
        Command::PredictAccuracy(a) => predict(&file.resolve_section("predict-accuracy", a)?, ctx),
        Command::SweepEigen(a) => sweep_eigen(&file.resolve_section("sweep-eigen", a)?, ctx),
        Command::SweepKnn(a) => sweep_knn(&file.resolve_section("sweep-knn", a)?, ctx),
        Command::ActiveLabel(a) => active(&file.resolve_section("active-label", a)?, ctx),
    }
}

fn features_file(p: &Path) -> PathBuf {
    if p.is_dir() {
        p.join("features.fsf1")
    } else {
        p.to_path_buf()
    }
}

/// Load and L2-normalize a feature set.
fn load(path: &Option<PathBuf>, flag: &str) -> Result<FeatureSet, CliError> {
    let p = path
        .as_ref()
        .ok_or_else(|| CliError::Config(format!("--{flag} is required")))?;
    let file = features_file(p);
    if !file.exists() {
        return Err(CliError::Config(format!("{} does not exist", file.display())));
    }
    Ok(features::l2_normalize(&load_feature_set(&file)?)?)
}

fn setting(s: &Option<String>) -> Result<Setting, CliError> {
    Setting::parse(s.as_deref().unwrap_or("supervised")).map_err(|e| CliError::Config(e.to_string()))
}

fn balance(fraction: Option<f64>) -> Balance {
    match fraction {
        Some(f) => Balance::Unbalanced { first_class_fraction: f },
        None => Balance::Balanced,
    }
}

fn point(n: Option<usize>, k: Option<usize>, q: Option<usize>, fraction: Option<f64>) -> GridPoint {
    GridPoint {
        balance: balance(fraction),
        ..GridPoint::new(n.unwrap_or(5), k.unwrap_or(5), q.unwrap_or(30))
    }
}

fn write(ctx: &Context, name: &str, contents: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let p = ctx.out.join(name);
    std::fs::write(&p, contents).map_err(|e| CliError::Data(format!("cannot write {}: {e}", p.display())))?;
    Ok(p)
}

fn synth(a: &SynthArgs, ctx: &Context) -> Result<String, CliError> {
    let cfg = SynthConfig {
        num_classes: a.classes.unwrap_or(20),
        per_class: a.per_class.unwrap_or(600),
        dim: a.dim.unwrap_or(64),
        separation: a.separation.unwrap_or(0.2),
        separation_max: a.separation_max.or(Some(1.0)),
        spread: a.spread.unwrap_or(1.0),
        seed: ctx.seed,
    };
    let fs = cfg.generate()?;
    std::fs::create_dir_all(&ctx.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", ctx.out.display())))?;
    let path = ctx.out.join("features.fsf1");
    save_feature_set(&fs, &path)?;
    Ok(format!(
        "synth: {} classes x {} rows, dim {} -> {}",
        cfg.num_classes,
        cfg.per_class,
        cfg.dim,
        path.display()
    ))
}

fn sample(a: &SampleArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let count = a.count.unwrap_or(1);
    let mut lines = String::new();
    for i in 0..count {
        let spec = EpisodeSpec::new(a.n_way.unwrap_or(5), a.k_shot.unwrap_or(5), a.q_query.unwrap_or(15))
            .with_test(a.test.unwrap_or(fsgauge::episode::DEFAULT_TEST_PER_CLASS))
            .with_balance(balance(a.first_class_fraction))
            .with_seed(fsgauge::seed::derive(ctx.seed, &[i as u64]));
        let ep = sample_episode(&fs, &spec)?;
        lines.push_str(&serde_json::to_string(&ep).expect("episode serializes"));
        lines.push('\n');
    }
    let p = write(ctx, "episodes.jsonl", &lines)?;
    Ok(format!("sample: {count} episodes -> {}", p.display()))
}

fn gauge(a: &GaugeArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let setting = setting(&a.setting)?;
    let pt = point(a.n_way, a.k_shot, a.q_query, a.first_class_fraction);
    let n = a.n_tasks.unwrap_or(1);
    let reports = harness::run_tasks(&fs, setting, &pt, n, &ctx.task, ctx.seed)?;
    let p = write(ctx, "tasks.csv", &harness::tasks_csv(&reports))?;
    let mean = reports.iter().map(|r| r.realized_performance).sum::<f64>() / reports.len() as f64;
    Ok(format!("gauge: {setting} {} tasks, mean performance {mean:.4} -> {}", reports.len(), p.display()))
}

fn correlate(a: &CorrelateArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let setting = setting(&a.setting)?;
    let mut grid = Vec::new();
    for &n in a.ways.as_deref().unwrap_or(&[5]) {
        for &k in a.shots.as_deref().unwrap_or(&[5]) {
            for &q in a.queries.as_deref().unwrap_or(&[30]) {
                grid.push(point(Some(n), Some(k), Some(q), a.first_class_fraction));
            }
        }
    }
    let n_tasks = a.n_tasks.unwrap_or(1000);
    let study = harness::run_correlation_study(&fs, setting, &grid, n_tasks, &ctx.task, ctx.seed)?;
    write(ctx, "correlation.csv", &harness::correlation_csv(&study))?;
    write(ctx, "tasks.csv", &harness::tasks_csv(study.points.iter().flat_map(|p| &p.tasks)))?;
    if a.svg.unwrap_or(false) {
        let y = if setting == Setting::Unsupervised { "ARI" } else { "accuracy" };
        for pr in &study.points {
            for &g in setting.gauges() {
                let pts: Vec<(f64, f64)> = pr
                    .tasks
                    .iter()
                    .filter_map(|r| r.get(g).map(|v| (v, r.realized_performance)))
                    .collect();
                if pts.is_empty() {
                    continue;
                }
                let p = &pr.point;
                let name = format!("scatter_{}_{}w{}s{}q.svg", g.name(), p.n_way, p.k_shot, p.q_query);
                write(ctx, &name, &harness::scatter_svg(&pts, g.name(), y))?;
            }
        }
    }
    for pr in &study.points {
        for (g, why) in &pr.flagged {
            eprintln!("fsgauge: {}w{}s: {g} dropped: {why}", pr.point.n_way, pr.point.k_shot);
        }
    }
    Ok(format!(
        "correlate: {setting}, {} grid points x {n_tasks} tasks -> {}",
        grid.len(),
        ctx.out.join("correlation.csv").display()
    ))
}

fn variance(a: &VarianceArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let spec = EpisodeSpec::new(a.n_way.unwrap_or(5), a.k_shot.unwrap_or(5), 0)
        .with_test(a.test.unwrap_or(fsgauge::episode::DEFAULT_TEST_PER_CLASS));
    let params = VarianceParams {
        outer: a.outer.unwrap_or(100),
        inner: a.inner.unwrap_or(100),
        shot_pool: a.shot_pool,
        logreg: ctx.task.logreg,
    };
    let v = harness::run_variance_attribution(&fs, &spec, &params, ctx.seed)?;
    let text = toml::to_string(&v).expect("variance serializes");
    let p = write(ctx, "variance.toml", &text)?;
    Ok(format!(
        "variance: random {:.4}, fixed classes {:.4}, fixed shots {:.4} -> {}",
        v.std_random,
        v.fixed_classes.mean,
        v.fixed_shots.mean,
        p.display()
    ))
}

fn confusion_map(a: &ConfusionArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let defaults = OverlapParams::default();
    let params = OverlapParams { k: a.k.unwrap_or(defaults.k), runs: a.runs.unwrap_or(defaults.runs) };
    if a.novel.is_some() {
        let novel = load(&a.novel, "novel")?;
        let b = confusion::bipartite_confusion(&fs, &novel, &params, a.edge_budget, ctx.seed)?;
        write(ctx, "bipartite.txt", &confusion::bipartite_to_text(&b))?;
        write(ctx, "bipartite.dot", &confusion::bipartite_to_dot(&b))?;
        return Ok(format!("confusion: {} base-novel edges -> {}", b.edges.len(), ctx.out.display()));
    }
    let classes = match a.classes {
        Some(n) => confusion::random_classes(&fs, n, ctx.seed)?,
        None => (0..fs.num_classes()).collect(),
    };
    let sub = fs.subset_classes(&classes)?;
    let all: Vec<usize> = (0..sub.num_classes()).collect();
    let m = confusion::overlap_matrix(&sub, &all, &params, ctx.seed)?;
    write(ctx, "overlap.txt", &confusion::overlap_to_text(&m, a.top))?;
    write(ctx, "overlap.dot", &confusion::overlap_to_dot(&m, a.top))?;
    let tasks = a.error_tasks.unwrap_or(0);
    let mut tail = String::new();
    if tasks > 0 {
        let r = confusion::score_vs_error_correlation(
            &sub,
            &m,
            a.n_way.unwrap_or(5),
            a.k_shot.unwrap_or(1),
            tasks,
            &ctx.task.logreg,
            ctx.seed,
        )?;
        let mut csv = String::from("score,error\n");
        for (s, e) in &r.points {
            csv.push_str(&format!("{s},{e}\n"));
        }
        write(ctx, "score_vs_error.csv", &csv)?;
        tail = format!(", score-vs-error r = {:.4}", r.pearson);
    }
    Ok(format!("confusion: {} classes{tail} -> {}", classes.len(), ctx.out.display()))
}

fn roc(a: &RocArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let (cal, hold) = match &a.holdout {
        Some(_) => (fs, load(&a.holdout, "holdout")?),
        None => {
            let half = confusion::random_classes(&fs, fs.num_classes() / 2, ctx.seed)?;
            let rest: Vec<usize> = (0..fs.num_classes()).filter(|c| !half.contains(c)).collect();
            (fs.subset_classes(&half)?, fs.subset_classes(&rest)?)
        }
    };
    let setting = setting(&a.setting)?;
    let gauge = match &a.gauge {
        Some(g) => Gauge::parse(g).map_err(|e| CliError::Config(e.to_string()))?,
        None => setting.gauges()[0],
    };
    let params = RocParams {
        setting,
        gauge,
        point: point(a.n_way, a.k_shot, a.q_query, None),
        n_tasks: a.n_tasks.unwrap_or(1000),
        accuracy_cut: a.cut.unwrap_or(harness::DEFAULT_ACCURACY_CUT),
    };
    let res = harness::run_roc_prediction(&cal, &hold, &params, &ctx.task, ctx.seed)?;
    write(ctx, "roc.csv", &harness::roc_csv(&res.curve))?;
    write(ctx, "confusion.toml", &harness::confusion_toml(&res))?;
    if a.svg.unwrap_or(false) {
        let pts: Vec<(f64, f64)> =
            res.curve.points.iter().filter(|p| p.threshold.is_finite()).map(|p| (p.one_minus_specificity, p.sensibility)).collect();
        write(ctx, "roc.svg", &harness::scatter_svg(&pts, "1 - specificity", "sensibility"))?;
    }
    let pct = res.holdout_percentages();
    Ok(format!(
        "roc: {gauge} auc {:.4}, holdout hard {:.1}% / easy {:.1}% correct -> {}",
        res.curve.auc,
        pct[0][0],
        pct[1][1],
        ctx.out.display()
    ))
}

fn predict(a: &PredictArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let pt = point(a.n_way, a.k_shot, a.q_query, None);
    let r = harness::run_accuracy_prediction(&fs, &pt, a.n_tasks.unwrap_or(1000), &ctx.task, ctx.seed)?;
    let mut csv = String::from("predicted,realized\n");
    for (p, y) in &r.pairs {
        csv.push_str(&format!("{p},{y}\n"));
    }
    write(ctx, "prediction.csv", &csv)?;
    let summary = format!("mae = {}\nmad_baseline = {}\nn_tasks = {}\n", r.mae, r.mad_baseline, r.pairs.len());
    write(ctx, "prediction.toml", &summary)?;
    Ok(format!("predict-accuracy: mae {:.4} vs baseline {:.4} -> {}", r.mae, r.mad_baseline, ctx.out.display()))
}

fn sweep_eigen(a: &SweepEigenArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let setting = setting(&a.setting)?;
    let ways = a.ways.clone().unwrap_or_else(|| vec![2, 3, 4, 5, 6, 7, 8, 9, 10]);
    let rows = harness::run_eigenindex_sweep(
        &fs,
        setting,
        &ways,
        a.k_shot.unwrap_or(5),
        a.q_query.unwrap_or(30),
        a.n_tasks.unwrap_or(500),
        &ctx.task,
        ctx.seed,
    )?;
    let p = write(ctx, "eigen_sweep.csv", &harness::eigen_sweep_csv(&rows))?;
    Ok(format!("sweep-eigen: {} values of N -> {}", rows.len(), p.display()))
}

fn sweep_knn(a: &SweepKnnArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let setting = setting(&a.setting)?;
    let grid = a.k_grid.clone().unwrap_or_else(|| vec![5, 10, 15, 20, 30, 50]);
    let pt = point(a.n_way, a.k_shot, a.q_query, None);
    let rows = harness::run_knn_sweep(&fs, setting, &pt, &grid, a.n_tasks.unwrap_or(500), &ctx.task, ctx.seed)?;
    let p = write(ctx, "knn_sweep.csv", &harness::knn_sweep_csv(setting, &rows))?;
    Ok(format!("sweep-knn: {} neighbor counts -> {}", rows.len(), p.display()))
}

fn active(a: &ActiveArgs, ctx: &Context) -> Result<String, CliError> {
    let fs = load(&a.features, "features")?;
    let policy = LabelPolicy::parse(a.policy.as_deref().unwrap_or("lowest-confidence"))
        .map_err(|e| CliError::Config(e.to_string()))?;
    let pt = point(a.n_way, a.k_shot, a.q_query, None);
    let budgets = a.budgets.clone().unwrap_or_else(|| vec![0, 5, 10, 20]);
    let rows = harness::run_active_labeling(&fs, &pt, &budgets, policy, a.n_tasks.unwrap_or(500), &ctx.task, ctx.seed)?;
    let p = write(ctx, "active.csv", &harness::active_csv(policy, &rows))?;
    Ok(format!("active-label: {} budgets -> {}", rows.len(), p.display()))
}
