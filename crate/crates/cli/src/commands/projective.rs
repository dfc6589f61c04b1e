//! `nikodym-to-kakeya`: the projective transform F(x̃, x_d) = (x̃, 1)/x_d
//! applied to a CSV point cloud.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::Serialize;
use serde_json::json;

use kakeya_core::charts::projective_nikodym_to_kakeya;
use kakeya_core::exports::point_cloud_csv;

use crate::report::{read_point_csv, write_csv, write_report};
use crate::Outcome;

#[derive(Args, Serialize)]
pub struct ProjectiveArgs {
    /// Input point cloud CSV (header + one point per row).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(args: ProjectiveArgs) -> Result<Outcome> {
    let points = read_point_csv(&args.input)?;
    let mut images = Vec::with_capacity(points.len());
    for p in &points {
        images.push(projective_nikodym_to_kakeya(p)?);
    }
    write_csv(&args.out, "nikodym_to_kakeya", &point_cloud_csv(&images))?;
    let body = json!({
        "points": points.len(),
    });
    let path = write_report(&args.out, "nikodym_to_kakeya", &args, body)?;
    println!(
        "nikodym-to-kakeya: transformed {} points -> {}",
        points.len(),
        path.display()
    );
    Ok(Outcome::Success)
}
