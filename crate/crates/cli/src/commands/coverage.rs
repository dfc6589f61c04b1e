//! `nikodym coverage`: which base points see a geodesic mostly inside Ω.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::measure::{nikodym_coverage, CoverageFamily, OccupancyGrid};

use crate::report::{write_csv, write_report};
use crate::Outcome;

#[derive(Subcommand)]
pub enum NikodymCommand {
    /// Coverage fractions of a geodesic family against an occupancy grid.
    Coverage(CoverageArgs),
}

#[derive(Args, Serialize)]
pub struct CoverageArgs {
    /// Occupancy grid JSON (the set Ω).
    #[arg(long)]
    input: PathBuf,
    /// axis | net:K | sphere:K | hyperbolic:K
    #[arg(long, default_value = "axis")]
    family: String,
    #[arg(long)]
    lambda: f64,
    /// Base-point lattice nodes per axis.
    #[arg(long, default_value_t = 5)]
    points_per_axis: usize,
    /// Base-point lattice half-width (default 0.8·L).
    #[arg(long)]
    points_radius: Option<f64>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: NikodymCommand) -> Result<Outcome> {
    match cmd {
        NikodymCommand::Coverage(args) => coverage(args),
    }
}

fn parse_family(s: &str, d: usize) -> Result<CoverageFamily> {
    if s == "axis" {
        return Ok(CoverageFamily::AxisLines);
    }
    if let Some(k) = s.strip_prefix("net:") {
        return Ok(CoverageFamily::DirectionNet(
            k.parse().context("bad direction count")?,
        ));
    }
    if let Some(k) = s.strip_prefix("sphere:") {
        return Ok(CoverageFamily::SpaceForm(
            super::space_form("sphere", d)?,
            k.parse().context("bad direction count")?,
        ));
    }
    if let Some(k) = s.strip_prefix("hyperbolic:") {
        return Ok(CoverageFamily::SpaceForm(
            super::space_form("hyperbolic", d)?,
            k.parse().context("bad direction count")?,
        ));
    }
    bail!("unknown family `{s}`")
}

fn coverage(args: CoverageArgs) -> Result<Outcome> {
    let text = std::fs::read_to_string(&args.input)?;
    let grid = OccupancyGrid::from_json(&text)?;
    let d = grid.spec.d;
    let family = parse_family(&args.family, d)?;
    let radius = args.points_radius.unwrap_or(0.8 * grid.spec.l);
    let points = cube_lattice(d, args.points_per_axis, radius);
    let result = nikodym_coverage(&grid, &points, &family, args.lambda)?;

    let mut rows = Vec::with_capacity(points.len());
    for ((p, &covered), &frac) in points
        .iter()
        .zip(&result.covered)
        .zip(&result.best_fraction)
    {
        let mut row = p.clone();
        row.push(if covered { 1.0 } else { 0.0 });
        row.push(frac);
        rows.push(row);
    }
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.push("covered".into());
    header.push("best_fraction".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &args.out,
        "nikodym_coverage",
        &kakeya_core::exports::csv_table(&header_refs, &rows),
    )?;

    let n_covered = result.covered.iter().filter(|&&c| c).count();
    let body = json!({
        "lambda": args.lambda,
        "base_points": points.len(),
        "covered": n_covered,
    });
    let path = write_report(&args.out, "nikodym_coverage", &args, body)?;
    println!(
        "nikodym coverage: {}/{} base points covered at λ = {} -> {}",
        n_covered,
        points.len(),
        args.lambda,
        path.display()
    );
    Ok(Outcome::Success)
}

fn cube_lattice(d: usize, per_axis: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        out.push(
            idx.iter()
                .map(|&i| {
                    if per_axis == 1 {
                        0.0
                    } else {
                        -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64
                    }
                })
                .collect(),
        );
        let mut k = 0;
        loop {
            if k == d {
                return out;
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}
