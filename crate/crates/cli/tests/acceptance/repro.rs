//! Byte-identical reruns of the binary at different thread counts.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

use crate::{ensure, ok, Check};

fn fsgauge(args: &[&str]) -> Check {
    let o = ok(Command::new(env!("CARGO_BIN_EXE_fsgauge")).args(args).output())?;
    ensure!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    Ok(())
}

fn snapshot(dir: &Path) -> Result<BTreeMap<String, Vec<u8>>, String> {
    let mut files = BTreeMap::new();
    for e in ok(std::fs::read_dir(dir))? {
        let p = ok(e)?.path();
        files.insert(p.file_name().unwrap().to_string_lossy().into_owned(), ok(std::fs::read(&p))?);
    }
    Ok(files)
}

pub fn run() -> Check {
    let dir = ok(tempfile::tempdir())?;
    let root = dir.path();
    let s = |p: &Path| p.to_str().unwrap().to_string();
    let feats = s(&root.join("feats"));
    fsgauge(&["synth", "--classes", "10", "--per-class", "80", "--dim", "32", "--seed", "3", "-o", &feats])?;

    let cfg = root.join("run.toml");
    ok(std::fs::write(
        &cfg,
        format!("seed = 21\n[task]\nepochs = 30\n[correlate]\nfeatures = \"{feats}\"\nn-tasks = 24\nqueries = [10]\n"),
    ))?;
    let f = feats.as_str();
    let runs: Vec<Vec<&str>> = vec![
        vec!["correlate", "--setting", "semi-supervised"],
        vec!["correlate", "--setting", "unsupervised", "--svg"],
        vec!["gauge", "--features", f, "--setting", "supervised", "--n-tasks", "16"],
        vec!["sample", "--features", f, "--count", "10", "--test", "5"],
        vec!["variance", "--features", f, "--outer", "4", "--inner", "5", "--test", "10"],
        vec!["confusion", "--features", f, "--k", "5", "--error-tasks", "8", "--n-way", "3"],
        vec!["roc", "--features", f, "--setting", "supervised", "--n-tasks", "40", "--n-way", "3"],
        vec!["predict-accuracy", "--features", f, "--n-tasks", "12", "--q-query", "10"],
        vec!["sweep-eigen", "--features", f, "--setting", "unsupervised", "--ways", "2,3", "--n-tasks", "10", "--q-query", "10"],
        vec!["sweep-knn", "--features", f, "--setting", "semi-supervised", "--k-grid", "3,8", "--n-tasks", "10", "--q-query", "10"],
        vec!["active-label", "--features", f, "--budgets", "0,4", "--n-tasks", "10", "--q-query", "10"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut seen = Vec::new();
        for jobs in ["1", "4", "1"] {
            let out = s(&root.join(format!("run{i}_{}", seen.len())));
            let mut a = args.clone();
            a.extend(["--config", cfg.to_str().unwrap(), "--jobs", jobs, "-o", &out]);
            fsgauge(&a)?;
            seen.push(snapshot(Path::new(&out))?);
        }
        ensure!(!seen[0].is_empty(), "{} wrote nothing", args[0]);
        ensure!(seen[0] == seen[1] && seen[0] == seen[2], "{args:?} differs across reruns");
    }
    Ok(())
}
