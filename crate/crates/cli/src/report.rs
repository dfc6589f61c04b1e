//! Report plumbing: every JSON report embeds the resolved config and the
//! tool version; CSV files land next to the report in the output directory.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;

pub fn write_report(
    out_dir: &Path,
    name: &str,
    config: &impl Serialize,
    body: serde_json::Value,
) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)
        .with_context(|| format!("creating output directory {}", out_dir.display()))?;
    let report = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "config": serde_json::to_value(config)?,
        "report": body,
    });
    let path = out_dir.join(format!("{name}.json"));
    fs::write(&path, serde_json::to_string_pretty(&report)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

pub fn write_csv(out_dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    fs::create_dir_all(out_dir)?;
    let path = out_dir.join(format!("{name}.csv"));
    fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

/// Parse a comma-separated coordinate list.
pub fn parse_vector(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad coordinate `{p}`"))
        })
        .collect()
}

/// Parse repeated NAME=VALUE tolerance overrides.
pub fn parse_tols(items: &[String]) -> Result<std::collections::BTreeMap<String, f64>> {
    let mut map = std::collections::BTreeMap::new();
    for item in items {
        let (name, value) = item
            .split_once('=')
            .with_context(|| format!("expected NAME=VALUE, got `{item}`"))?;
        map.insert(
            name.trim().to_string(),
            value
                .trim()
                .parse::<f64>()
                .with_context(|| format!("bad tolerance value in `{item}`"))?,
        );
    }
    Ok(map)
}

/// Read a CSV point cloud (header line, then one point per row).
pub fn read_point_csv(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading point cloud {}", path.display()))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue; // header
        }
        let row: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .with_context(|| format!("bad row {} in {}", i + 1, path.display()))?;
        rows.push(row);
    }
    Ok(rows)
}
