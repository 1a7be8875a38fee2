//! Manifests and table writers shared by the commands.

use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use crate::config::RunConfig;

/// Everything needed to repeat the work that produced a directory.
#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    seed: u64,
    config: &'a RunConfig,
}

/// Writes `manifest.json` and a re-runnable `config.toml`.
pub fn write_manifest(dir: &Path, command: &str, config: &RunConfig) -> Result<()> {
    let mut archived = config.clone();
    archived.sweep.clear();
    archived.out = None;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command,
        seed: archived.seed,
        config: &archived,
    };
    write_json(&dir.join(format!("manifest_{command}.json")), &manifest)?;
    let text = toml::to_string(&archived).context("cannot serialize the configuration")?;
    std::fs::write(dir.join("config.toml"), text).with_context(|| format!("cannot write into {}", dir.display()))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

/// Writes a header and rows of already formatted fields.
pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `dir`, reporting an unusable location clearly.
pub fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

/// Formats an optional number as an empty field when absent.
pub fn field(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}
