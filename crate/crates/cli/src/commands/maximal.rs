//! `maximal scan`: discretized Kakeya / Nikodym / curved maximal functions
//! over dyadic δ lists, with optional L^q scaling fits.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::measure::{
    curved_maximal, fit_scaling, kakeya_maximal, nikodym_maximal, y_lattice, GeodesicSource,
    GridSpec, MaximalScanResult, OccupancyGrid, ScalarGrid,
};
use kakeya_core::sample::direction_net;

use crate::report::{write_csv, write_report};
use crate::Outcome;

#[derive(Subcommand)]
pub enum MaximalCommand {
    /// Scan one maximal function over a δ list.
    Scan(ScanArgs),
}

#[derive(Args, Serialize)]
pub struct ScanArgs {
    /// kakeya | nikodym | curved
    #[arg(long)]
    kind: String,
    /// Comma-separated δ list.
    #[arg(long)]
    delta: String,
    /// Grid resolution.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Box half-width L.
    #[arg(long = "box", default_value_t = 0.75)]
    box_l: f64,
    /// Ambient dimension (ignored for curved scans, which use the phase's d).
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Test function: uniform | ball:R | grid:PATH (occupancy JSON).
    #[arg(long, default_value = "uniform")]
    f: String,
    /// Direction-net size for kakeya/nikodym.
    #[arg(long, default_value_t = 64)]
    directions: usize,
    /// Position-net ball radius for nikodym (spacing δ/2).
    #[arg(long, default_value_t = 0.3)]
    positions_radius: f64,
    /// Model for the nikodym geodesic source: euclidean | sphere | hyperbolic.
    #[arg(long, default_value = "euclidean")]
    model: String,
    /// Phase spec (curved scans).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// y-lattice nodes per axis (curved scans).
    #[arg(long, default_value_t = 3)]
    y_lattice: usize,
    /// Half-width of the y lattice (curved; default 0.5·ε₀).
    #[arg(long)]
    y_radius: Option<f64>,
    /// Exponent for the reported ℓ^q norms.
    #[arg(long, default_value_t = 4.0)]
    q: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: MaximalCommand) -> Result<Outcome> {
    match cmd {
        MaximalCommand::Scan(args) => scan(args),
    }
}

fn test_function(args: &ScanArgs, spec: GridSpec) -> Result<ScalarGrid> {
    if args.f == "uniform" {
        return Ok(ScalarGrid::uniform(spec, 1.0));
    }
    if let Some(radius) = args.f.strip_prefix("ball:") {
        let r: f64 = radius.parse().context("bad ball radius")?;
        return Ok(ScalarGrid::ball_indicator(spec, r));
    }
    if let Some(path) = args.f.strip_prefix("grid:") {
        let text = std::fs::read_to_string(path)?;
        let grid = OccupancyGrid::from_json(&text)?;
        if grid.spec != spec {
            bail!(
                "grid file {path} has spec {:?}, scan wants {:?}; pass matching --grid/--box/--dim",
                grid.spec,
                spec
            );
        }
        return Ok(ScalarGrid::from_occupancy(&grid));
    }
    bail!("unknown test function `{}`", args.f)
}

fn positions_net(radius: f64, spacing: f64, d: usize) -> Vec<Vec<f64>> {
    let per_axis = (2.0 * radius / spacing).floor() as usize + 1;
    let coords: Vec<f64> = (0..per_axis)
        .map(|i| -radius + i as f64 * spacing)
        .collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; d];
    loop {
        let p: Vec<f64> = idx.iter().map(|&i| coords[i]).collect();
        if kakeya_core::linalg::norm(&p) <= radius {
            out.push(p);
        }
        let mut k = d;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                return out;
            }
        }
    }
}

fn scan(args: ScanArgs) -> Result<Outcome> {
    let deltas: Vec<f64> = args
        .delta
        .split(',')
        .map(|s| s.trim().parse::<f64>().context("bad δ"))
        .collect::<Result<_>>()?;
    if deltas.is_empty() {
        bail!("empty δ list");
    }

    let mut per_delta = Vec::new();
    let mut norms = Vec::new();
    for (k, &delta) in deltas.iter().enumerate() {
        let result: MaximalScanResult = match args.kind.as_str() {
            "kakeya" => {
                let spec = GridSpec::new(args.box_l, args.grid, args.dim)?;
                let f = test_function(&args, spec)?;
                let dirs = direction_net(args.dim, args.directions);
                kakeya_maximal(&f, delta, &dirs)?
            }
            "nikodym" => {
                let spec = GridSpec::new(args.box_l, args.grid, args.dim)?;
                let f = test_function(&args, spec)?;
                let positions = positions_net(args.positions_radius, delta / 2.0, args.dim);
                let source = match args.model.as_str() {
                    "euclidean" => GeodesicSource::Euclidean,
                    m => GeodesicSource::SpaceForm(super::space_form(m, args.dim)?),
                };
                nikodym_maximal(&f, delta, &positions, &source, args.directions)?
            }
            "curved" => {
                let path = args
                    .spec
                    .as_ref()
                    .ok_or_else(|| anyhow::anyhow!("curved scans need --spec"))?;
                let (phi, _) = super::load_phase(path)?;
                let spec = GridSpec::new(args.box_l, args.grid, phi.d())?;
                let f = test_function(&args, spec)?;
                let radius = args.y_radius.unwrap_or(0.5 * phi.epsilon0());
                let ys = y_lattice(phi.d() - 1, args.y_lattice, radius);
                curved_maximal(&phi, &f, delta, &ys)?
            }
            other => bail!("unknown scan kind `{other}`"),
        };
        write_csv(
            &args.out,
            &format!("maximal_{}_{k}", args.kind),
            &result.to_csv(),
        )?;
        let norm = result.lq_norm(args.q);
        norms.push(norm);
        per_delta.push(json!({
            "delta": delta,
            "lq_norm": norm,
            "max_value": result.max_value(),
            "parameters": result.params.len(),
        }));
        println!(
            "maximal scan [{}] δ={delta}: ℓ^{} norm {norm:.6}, sup {:.6}",
            args.kind,
            args.q,
            result.max_value()
        );
    }

    let fit = if deltas.len() >= 3 {
        let f = fit_scaling(&deltas, &norms)?;
        json!({"slope": f.slope, "r_squared": f.r_squared})
    } else {
        json!(null)
    };
    let body = json!({
        "scans": per_delta,
        "scaling_fit": fit,
    });
    let path = write_report(&args.out, &format!("maximal_{}", args.kind), &args, body)?;
    println!("report -> {}", path.display());
    Ok(Outcome::Success)
}
