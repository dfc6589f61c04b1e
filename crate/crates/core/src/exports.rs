//! CSV formatting helpers shared by the library and the CLI.
//!
//! Floats are written with shortest-roundtrip formatting so exports are both
//! lossless and byte-deterministic for identical inputs.

use std::fmt::Write as _;

pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

/// Render rows of numbers as CSV under a header line.
pub fn csv_table(header: &[&str], rows: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

/// CSV for a point cloud with columns named after ambient coordinates.
pub fn point_cloud_csv(points: &[Vec<f64>]) -> String {
    let dim = points.first().map_or(0, |p| p.len());
    let names: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    let header: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    csv_table(&header, points)
}
