//! `linespace map`: the surface line-space model (z, e) ↦ (ρ, η).

use std::collections::BTreeSet;
use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::charts::{line_space_map, LineSpaceElement};

use crate::report::{write_csv, write_report};
use crate::Outcome;

#[derive(Subcommand)]
pub enum LinespaceCommand {
    /// Tabulate Y(z, e) = (ρ, η) on a (z, e) lattice.
    Map(MapArgs),
}

#[derive(Args, Serialize)]
pub struct MapArgs {
    /// sphere | hyperbolic | euclidean
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 50)]
    z_count: usize,
    #[arg(long, default_value_t = 50)]
    e_count: usize,
    /// Half-range of z along the reference geodesic.
    #[arg(long, default_value_t = 0.6)]
    z_max: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: LinespaceCommand) -> Result<Outcome> {
    match cmd {
        LinespaceCommand::Map(args) => map(args),
    }
}

fn map(args: MapArgs) -> Result<Outcome> {
    let form = super::space_form(&args.model, 2)?;
    let center = form.chart_center();
    let frame = form.tangent_frame(&center);
    let gamma0 = form.geodesic(center.clone(), frame[0].clone())?;

    let mut rows = Vec::with_capacity(args.z_count * args.e_count);
    let mut distinct: BTreeSet<(u64, u64)> = BTreeSet::new();
    for i in 0..args.z_count {
        let z = -args.z_max + 2.0 * args.z_max * i as f64 / (args.z_count - 1) as f64;
        for j in 0..args.e_count {
            let e = std::f64::consts::TAU * j as f64 / args.e_count as f64;
            let (rho, eta) = line_space_map(&form, &gamma0, LineSpaceElement::new(z, e))?;
            distinct.insert((rho.to_bits(), eta.to_bits()));
            rows.push(vec![z, e, rho, eta]);
        }
    }
    write_csv(
        &args.out,
        "linespace_map",
        &kakeya_core::exports::csv_table(&["z", "e", "rho", "eta"], &rows),
    )?;
    let injective = distinct.len() == rows.len();
    let body = json!({
        "lattice": [args.z_count, args.e_count],
        "distinct_images": distinct.len(),
        "injective_on_lattice": injective,
    });
    let path = write_report(&args.out, "linespace_map", &args, body)?;
    println!(
        "linespace map [{}]: {} images, injective: {injective} -> {}",
        args.model,
        rows.len(),
        path.display()
    );
    Ok(if injective {
        Outcome::Success
    } else {
        Outcome::ConditionFailed
    })
}
