//! Acceptance run. One line per criterion; the process fails if any does.

mod analytic;
mod oracles;
mod repro;
mod studies;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

pub type Check = Result<(), String>;

/// Bail out of a check with a formatted reason.
#[macro_export]
macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

/// Stringify any error into a check failure.
pub fn ok<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

struct Criterion {
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { name: "analytic unit suite", budget: Some(Duration::from_secs(10)), run: analytic::run },
        Criterion { name: "oracle equivalence", budget: Some(Duration::from_secs(120)), run: oracles::run },
        Criterion { name: "gradient check", budget: None, run: oracles::gradient },
        Criterion { name: "synthetic correlation study", budget: Some(Duration::from_secs(300)), run: studies::correlation },
        Criterion { name: "variance attribution", budget: Some(Duration::from_secs(300)), run: studies::variance },
        Criterion { name: "ROC protocol", budget: None, run: studies::roc },
        Criterion { name: "accuracy prediction", budget: None, run: studies::accuracy_prediction },
        Criterion { name: "reproducibility", budget: None, run: repro::run },
    ];
    let only: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !only.is_empty() && !only.iter().any(|o| c.name.contains(o.as_str())) {
            continue;
        }
        let t = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or(p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        let took = t.elapsed();
        let res = match (res, c.budget) {
            (Ok(()), Some(b)) if took > b => Err(format!("took {:.1}s, budget {}s", took.as_secs_f64(), b.as_secs())),
            (r, _) => r,
        };
        match res {
            Ok(()) => println!("PASS  {} ({:.1}s)", c.name, took.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL  {} ({:.1}s): {why}", c.name, took.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
