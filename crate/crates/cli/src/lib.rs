//! Scenario runner for cqednet: declarative configs in, CSV series and
//! summaries out.

pub mod config;
pub mod engines;
pub mod output;
pub mod selftest;

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use rayon::prelude::*;

use cqednet_core::Error as CoreError;

pub use config::Scenario;
pub use engines::{run_scenario, RunOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Exit code for a failed run: 3 when a numerical contract broke, 2 otherwise.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CoreError>() {
            return match e {
                CoreError::IntegrationAccuracy { .. }
                | CoreError::Contract(_)
                | CoreError::NotPure(_)
                | CoreError::DegenerateProjection(_) => EXIT_NUMERICAL,
                _ => EXIT_VALIDATION,
            };
        }
    }
    EXIT_VALIDATION
}

/// Runs one scenario and writes `series.csv` and `summary.txt` under `out`.
pub fn run_to_dir(scenario: &Scenario, out: &Path) -> anyhow::Result<RunOutput> {
    let result = run_scenario(scenario)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    result.table.write(&out.join("series.csv"))?;
    result.summary.write(&out.join("summary.txt"))?;
    Ok(result)
}

/// Worker count: `CQEDNET_THREADS` if set, else rayon's default.
pub fn worker_threads() -> anyhow::Result<usize> {
    match std::env::var("CQEDNET_THREADS") {
        Ok(v) => {
            let n: usize = v.trim().parse().with_context(|| format!("CQEDNET_THREADS={v:?} is not a count"))?;
            if n == 0 {
                bail!("CQEDNET_THREADS must be at least 1");
            }
            Ok(n)
        }
        Err(_) => Ok(rayon::current_num_threads()),
    }
}

pub fn parse_values(list: &str) -> anyhow::Result<Vec<f64>> {
    let values: Vec<f64> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().with_context(|| format!("sweep value {s:?} is not a number")))
        .collect::<anyhow::Result<_>>()?;
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    Ok(values)
}

pub struct SweepPoint {
    pub value: f64,
    pub dir: PathBuf,
    pub result: anyhow::Result<RunOutput>,
}

fn is_metric(key: &str) -> bool {
    ["late.", "flatness.", "transmission.", "tau.", "purity.", "invalid.fraction", "mean."]
        .iter()
        .any(|p| key.starts_with(p))
        || (key.starts_with("sudden.") && key.ends_with(".count"))
        || key.starts_with("audit.")
}

/// Runs every sweep point in a worker pool, then merges `sweep.csv`.
pub fn sweep(scenario: &Scenario, axis: &str, values: &[f64], out: &Path) -> anyhow::Result<Vec<SweepPoint>> {
    if values.is_empty() {
        bail!("sweep needs at least one value");
    }
    // resolve every point first so a bad axis fails before any work
    let points: Vec<(f64, Scenario)> = values
        .iter()
        .map(|&v| Ok((v, scenario.with_param(axis, v)?)))
        .collect::<anyhow::Result<_>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_threads()?)
        .build()
        .context("building the worker pool")?;
    let slug = axis.replace('.', "_");
    let results: Vec<SweepPoint> = pool.install(|| {
        points
            .into_par_iter()
            .enumerate()
            .map(|(i, (value, s))| {
                let dir = out.join(format!("{i:03}_{slug}_{value}"));
                let result = run_to_dir(&s, &dir);
                SweepPoint { value, dir, result }
            })
            .collect()
    });

    let mut keys: Vec<String> = Vec::new();
    for p in &results {
        if let Ok(r) = &p.result {
            for (k, v) in &r.summary.entries {
                if is_metric(k) && v.parse::<f64>().is_ok() && !keys.contains(k) {
                    keys.push(k.clone());
                }
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec![axis.to_string(), "status".to_string()];
    header.extend(keys.iter().cloned());
    w.write_record(&header)?;
    for p in &results {
        let mut row = vec![p.value.to_string()];
        match &p.result {
            Ok(r) => {
                row.push("ok".into());
                row.extend(keys.iter().map(|k| r.summary.get(k).unwrap_or("").to_string()));
            }
            Err(e) => {
                row.push(format!("exit {}", exit_code(e)));
                row.extend(keys.iter().map(|_| String::new()));
            }
        }
        w.write_record(&row)?;
    }
    fs::create_dir_all(out)?;
    let body = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    fs::write(out.join("sweep.csv"), body).context("writing sweep.csv")?;
    Ok(results)
}
