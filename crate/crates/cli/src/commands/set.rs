//! `set build`: rasterize tube families into occupancy grids.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::measure::{
    compression_family, curve_family, rasterize_tubes, straight_family_from_y_lattice, y_lattice,
    GridSpec, OmegaRule, RasterMode,
};

use crate::report::write_report;
use crate::Outcome;

#[derive(Subcommand)]
pub enum SetCommand {
    /// Build a curved or straight tube family and rasterize it.
    Build(BuildArgs),
}

#[derive(Args, Serialize)]
pub struct BuildArgs {
    /// curves | straight
    #[arg(long, default_value = "curves")]
    family: String,
    /// Phase spec JSON (required for --family curves).
    #[arg(long)]
    spec: Option<PathBuf>,
    /// zero | compression | random (base-point rule for curve families).
    #[arg(long, default_value = "compression")]
    omega_rule: String,
    /// Radius for the random ω rule.
    #[arg(long, default_value_t = 0.2)]
    omega_radius: f64,
    /// y-lattice nodes per axis.
    #[arg(long, default_value_t = 16)]
    y_lattice: usize,
    /// Half-width of the y lattice (default 0.99·ε₀ for curves, 0.25 for
    /// straight families).
    #[arg(long)]
    y_radius: Option<f64>,
    /// Grid resolution per axis.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Box half-width L.
    #[arg(long = "box", default_value_t = 0.5)]
    box_l: f64,
    /// Tube radius δ.
    #[arg(long, default_value_t = 0.015625)]
    delta: f64,
    /// Half-range of the curve parameter t (default 0.98·ε₀).
    #[arg(long)]
    tmax: Option<f64>,
    /// Polyline nodes per curve.
    #[arg(long, default_value_t = 65)]
    nt: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-range of t for straight families (unit tubes by default).
    #[arg(long, default_value_t = 0.5)]
    t_extent: f64,
    /// center | corners
    #[arg(long, default_value = "center")]
    mode: String,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: SetCommand) -> Result<Outcome> {
    match cmd {
        SetCommand::Build(args) => build(args),
    }
}

fn build(args: BuildArgs) -> Result<Outcome> {
    let spec = GridSpec::new(args.box_l, args.grid, infer_dim(&args)?)?;
    let mode = match args.mode.as_str() {
        "center" => RasterMode::Center,
        "corners" => RasterMode::Corners,
        other => bail!("unknown raster mode `{other}`"),
    };

    let family = match args.family.as_str() {
        "straight" => {
            let radius = args.y_radius.unwrap_or(0.25);
            let ys = y_lattice(spec.d - 1, args.y_lattice, radius);
            straight_family_from_y_lattice(
                &ys,
                args.t_extent,
                args.omega_radius,
                args.seed,
                args.delta,
            )
        }
        "curves" => {
            let path = args
                .spec
                .as_ref()
                .ok_or_else(|| anyhow::anyhow!("--family curves needs --spec"))?;
            let (phi, _) = super::load_phase(path)?;
            let radius = args.y_radius.unwrap_or(0.99 * phi.epsilon0());
            let ys = y_lattice(phi.d() - 1, args.y_lattice, radius);
            let t_max = args.tmax.unwrap_or(0.98 * phi.epsilon0());
            let t_grid: Vec<f64> = (0..args.nt)
                .map(|i| -t_max + 2.0 * t_max * i as f64 / (args.nt - 1) as f64)
                .collect();
            match args.omega_rule.as_str() {
                "zero" => curve_family(&phi, &ys, OmegaRule::Zero, &t_grid, args.delta)?,
                "compression" => compression_family(&phi, &ys, &t_grid, args.delta)?,
                "random" => curve_family(
                    &phi,
                    &ys,
                    OmegaRule::SeededRandom {
                        seed: args.seed,
                        radius: args.omega_radius,
                    },
                    &t_grid,
                    args.delta,
                )?,
                other => bail!("unknown omega rule `{other}`"),
            }
        }
        other => bail!("unknown family kind `{other}`"),
    };

    let out = rasterize_tubes(&family, &spec, mode)?;
    let grid_path = args.out.join("grid.json");
    std::fs::create_dir_all(&args.out)?;
    std::fs::write(&grid_path, out.grid.to_json())?;
    let body = json!({
        "tubes": family.tubes.len(),
        "occupied_cells": out.grid.count(),
        "total_cells": spec.cells(),
        "coarse_warning": out.coarse_warning,
        "grid_file": grid_path.display().to_string(),
    });
    let path = write_report(&args.out, "set_build", &args, body)?;
    println!(
        "set build: {} tubes, {} occupied cells{} -> {}",
        family.tubes.len(),
        out.grid.count(),
        if out.coarse_warning {
            " (warning: cell size > δ)"
        } else {
            ""
        },
        path.display()
    );
    Ok(Outcome::Success)
}

fn infer_dim(args: &BuildArgs) -> Result<usize> {
    if args.family.as_str() == "curves" {
        let path = args
            .spec
            .as_ref()
            .ok_or_else(|| anyhow::anyhow!("--family curves needs --spec"))?;
        let (phi, _) = super::load_phase(path)?;
        Ok(phi.d())
    } else {
        Ok(3)
    }
}
