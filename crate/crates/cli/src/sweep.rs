//! Parameter sweeps: the full pipeline at every point of the Cartesian
//! product of the sweep axes, one subdirectory per point.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use serde::Serialize;

use crate::config::{set_path, RunConfig};
use crate::output::{ensure_dir, field, write_json, write_table};
use crate::run::{self, AnalysisSummary, TrainMetrics};
use crate::{Classify, Common, Failure};

/// One grid point: its axis values and the configuration they produce.
struct Point {
    values: Vec<toml::Value>,
    config: RunConfig,
}

/// What a finished run contributes to the aggregate.
struct Outcome {
    metrics: TrainMetrics,
    summary: AnalysisSummary,
}

#[derive(Serialize)]
struct SweepManifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'static str,
    runs: usize,
    workers: usize,
    axes: &'a BTreeMap<String, Vec<toml::Value>>,
    base: &'a toml::Value,
}

/// Every combination of axis values, the last axis varying fastest.
fn product(axes: &BTreeMap<String, Vec<toml::Value>>) -> Vec<Vec<toml::Value>> {
    axes.values().fold(vec![Vec::new()], |acc, values| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |v| {
                    let mut next = prefix.clone();
                    next.push(v.clone());
                    next
                })
            })
            .collect()
    })
}

/// Builds and validates every point before any work starts.
fn expand(base: &toml::Value, common: &Common, axes: &BTreeMap<String, Vec<toml::Value>>) -> anyhow::Result<Vec<Point>> {
    let mut stripped = base.clone();
    let table = stripped.as_table_mut().ok_or_else(|| anyhow!("the configuration is not a table"))?;
    table.remove("sweep");
    table.remove("out");
    if let Some(seed) = common.seed {
        let seed = i64::try_from(seed).context("--seed is too large for a configuration file")?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    product(axes)
        .into_iter()
        .enumerate()
        .map(|(idx, values)| {
            let mut v = stripped.clone();
            for (axis, value) in axes.keys().zip(&values) {
                set_path(&mut v, axis, value.clone())?;
            }
            let config = RunConfig::from_value(v).with_context(|| format!("sweep point {idx}"))?;
            config.validate().with_context(|| format!("sweep point {idx}"))?;
            Ok(Point { values, config })
        })
        .collect()
}

/// generate, the least-squares baseline where it applies, train, analyze.
fn pipeline(config: &RunConfig, dir: &Path) -> Result<Outcome, Failure> {
    ensure_dir(dir).runtime()?;
    run::generate(config, dir)?;
    if config.model.order().is_some() {
        run::infer_ols(config, dir, dir)?;
    }
    let metrics = run::train(config, dir, dir)?;
    let summary = run::analyze(Some(config), dir, dir)?;
    Ok(Outcome { metrics, summary })
}

fn run_dir(out: &Path, idx: usize) -> PathBuf {
    out.join(format!("run_{idx:04}"))
}

fn show(v: &toml::Value) -> String {
    match v {
        toml::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn sweep(common: &Common, workers: usize) -> Result<(), Failure> {
    if workers == 0 {
        return Err(Failure::Config(anyhow!("--workers must be at least 1")));
    }
    let base = RunConfig::read_value(&common.config).config()?;
    let parsed = RunConfig::from_value(base.clone()).config()?;
    let axes = parsed.sweep.clone();
    if axes.is_empty() {
        return Err(Failure::Config(anyhow!("the configuration has no [sweep] axes")));
    }
    let out = parsed.out_dir(common.out.as_deref()).config()?;
    let points = expand(&base, common, &axes).config()?;

    ensure_dir(&out).runtime()?;
    let manifest = SweepManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: "sweep",
        runs: points.len(),
        workers,
        axes: &axes,
        base: &base,
    };
    write_json(&out.join("manifest_sweep.json"), &manifest).runtime()?;

    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers).build().runtime()?;
    let outcomes: Vec<Result<Outcome, Failure>> = pool.install(|| {
        use rayon::prelude::*;
        points
            .par_iter()
            .enumerate()
            .map(|(idx, p)| {
                let result = pipeline(&p.config, &run_dir(&out, idx));
                match &result {
                    Ok(_) => log::info!("run {idx} finished"),
                    Err(e) => log::warn!("run {idx} failed: {e}"),
                }
                result
            })
            .collect()
    });

    let axis_names: Vec<&str> = axes.keys().map(String::as_str).collect();
    let statistics: Vec<String> = parsed.analysis.statistics.iter().map(|s| run::stat_name(*s)).collect();
    let mut header: Vec<String> = vec!["run".into()];
    header.extend(axis_names.iter().map(|s| s.to_string()));
    header.extend(["neural_l1", "ols_l1", "convexity"].map(String::from));
    for s in &statistics {
        header.push(format!("hellinger_band_{s}"));
        header.push(format!("kl_total_{s}"));
    }
    header.extend(["median_epoch_seconds", "nu_released_at"].map(String::from));

    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (idx, (point, outcome)) in points.iter().zip(&outcomes).enumerate() {
        let mut row = vec![format!("run_{idx:04}")];
        row.extend(point.values.iter().map(show));
        match outcome {
            Ok(o) => {
                row.push(field(o.summary.neural_l1));
                row.push(field(o.summary.ols_l1));
                row.push(o.summary.convexity.map(|c| c.to_string()).unwrap_or_default());
                for s in &statistics {
                    let stat = o.summary.statistics.get(s);
                    row.push(field(stat.and_then(|x| x.hellinger_band)));
                    row.push(field(stat.and_then(|x| x.kl_total)));
                }
                row.push(field(o.summary.median_epoch_seconds));
                row.push(o.metrics.nu_released_at.map(|e| e.to_string()).unwrap_or_default());
                rows.push(row);
            }
            Err(e) => {
                let class = match e {
                    Failure::Config(_) => "config",
                    Failure::Runtime(_) => "runtime",
                };
                row.push(class.into());
                row.push(e.to_string());
                failures.push(row);
            }
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_table(&out.join("aggregate.csv"), &header_refs, rows).runtime()?;
    let mut failure_header = vec!["run"];
    failure_header.extend(&axis_names);
    failure_header.extend(["class", "error"]);
    let failed = failures.len();
    write_table(&out.join("failures.csv"), &failure_header, failures).runtime()?;
    if failed > 0 {
        return Err(Failure::Runtime(anyhow!("{failed} of {} sweep runs failed, see failures.csv", points.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_covers_every_combination() {
        let mut axes = BTreeMap::new();
        axes.insert("a".to_string(), vec![toml::Value::Integer(1), toml::Value::Integer(2)]);
        axes.insert("b".to_string(), vec![toml::Value::Float(0.5), toml::Value::Float(1.5), toml::Value::Float(2.5)]);
        let points = product(&axes);
        assert_eq!(points.len(), 6);
        assert_eq!(points[0], vec![toml::Value::Integer(1), toml::Value::Float(0.5)]);
        assert_eq!(points[5], vec![toml::Value::Integer(2), toml::Value::Float(2.5)]);
    }

    #[test]
    fn invalid_points_are_reported_before_work() {
        let base: toml::Value = toml::from_str(
            r#"
            model = "kuramoto1"
            [kuramoto]
            beta = 1.0
            kappa = 1.0
            dt = 0.1
            [network]
            source = "random"
            n = 4
            [sweep]
            "kuramoto.dt" = [0.1, -1.0]
            "#,
        )
        .unwrap();
        let parsed = RunConfig::from_value(base.clone()).unwrap();
        let common = Common { config: PathBuf::new(), out: None, seed: None };
        let err = expand(&base, &common, &parsed.sweep).err().expect("negative dt must be rejected");
        assert!(format!("{err:#}").contains("sweep point 1"));
    }
}
