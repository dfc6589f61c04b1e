//! `geo straighten`, `geo check-lines`, `geo bilipschitz`.

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::charts::{bilipschitz_scan, straighten_geodesic, straighten_points, ChartMap};
use kakeya_core::exports::point_cloud_csv;
use kakeya_core::linalg;
use kakeya_core::sample;
use kakeya_core::space_forms::random_geodesic;

use crate::report::{write_csv, write_report};
use crate::Outcome;

#[derive(Subcommand)]
pub enum GeoCommand {
    /// Straighten seeded random geodesics through the model's chart and
    /// report the worst collinearity residual.
    Straighten(StraightenArgs),
    /// Verify geodesic-to-line straightening on both routes (closed-form and
    /// ODE-integrated samples), optionally with the hyperplane-image check.
    CheckLines(CheckLinesArgs),
    /// Seeded bi-Lipschitz ratio scan of the chart on a geodesic ball.
    Bilipschitz(BilipschitzArgs),
}

#[derive(Args, Serialize)]
pub struct StraightenArgs {
    /// euclidean | sphere | hyperbolic
    #[arg(long)]
    model: String,
    /// Manifold dimension d.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// Number of seeded random geodesics.
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Geodesic ball radius for the random base points.
    #[arg(long, default_value_t = 0.3)]
    radius: f64,
    /// Arclength samples per geodesic.
    #[arg(long, default_value_t = 33)]
    samples: usize,
    /// Half-range of the arclength samples.
    #[arg(long, default_value_t = 0.5)]
    smax: f64,
    /// Use ODE-integrated samples instead of closed forms.
    #[arg(long)]
    integrator: bool,
    /// How many straightened polylines to export as CSV.
    #[arg(long, default_value_t = 3)]
    export: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct CheckLinesArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.3)]
    radius: f64,
    #[arg(long, default_value_t = 33)]
    samples: usize,
    #[arg(long, default_value_t = 0.5)]
    smax: f64,
    /// Also check that (d−1)-geodesic submanifolds map into hyperplanes
    /// (needs dim ≥ 3).
    #[arg(long)]
    hyperplanes: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct BilipschitzArgs {
    #[arg(long)]
    model: String,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0.3)]
    radius: f64,
    #[arg(long, default_value_t = 10_000)]
    pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: GeoCommand) -> Result<Outcome> {
    match cmd {
        GeoCommand::Straighten(args) => straighten(args),
        GeoCommand::CheckLines(args) => check_lines(args),
        GeoCommand::Bilipschitz(args) => bilipschitz(args),
    }
}

fn s_grid(samples: usize, smax: f64) -> Vec<f64> {
    (0..samples)
        .map(|i| -smax + 2.0 * smax * i as f64 / (samples - 1) as f64)
        .collect()
}

fn straighten(args: StraightenArgs) -> Result<Outcome> {
    let form = super::space_form(&args.model, args.dim)?;
    let chart = ChartMap::for_form(form);
    let grid = s_grid(args.samples, args.smax);
    let mut rng = sample::rng(args.seed);
    let mut worst = 0.0_f64;
    for k in 0..args.count {
        let geo = random_geodesic(&form, &mut rng, args.radius);
        let line = if args.integrator {
            let pts = form.geodesic_ode_samples(&geo, &grid)?;
            straighten_points(&chart, &pts)?
        } else {
            straighten_geodesic(&chart, &geo, &grid)?
        };
        worst = worst.max(line.residual);
        if k < args.export {
            write_csv(
                &args.out,
                &format!("geo_straighten_polyline_{k}"),
                &point_cloud_csv(&line.points),
            )?;
        }
    }
    let body = json!({
        "residual_max": worst,
        "n_samples": args.count,
        "method": if args.integrator { "integrator" } else { "closed_form" },
    });
    let path = write_report(&args.out, "geo_straighten", &args, body)?;
    println!(
        "geo straighten [{}]: residual_max {worst:.3e} over {} geodesics -> {}",
        args.model,
        args.count,
        path.display()
    );
    Ok(Outcome::Success)
}

fn check_lines(args: CheckLinesArgs) -> Result<Outcome> {
    let form = super::space_form(&args.model, args.dim)?;
    let chart = ChartMap::for_form(form);
    let grid = s_grid(args.samples, args.smax);

    let mut rng = sample::rng(args.seed);
    let mut closed_worst = 0.0_f64;
    let mut numeric_worst = 0.0_f64;
    for _ in 0..args.count {
        let geo = random_geodesic(&form, &mut rng, args.radius);
        closed_worst = closed_worst.max(straighten_geodesic(&chart, &geo, &grid)?.residual);
        let pts = form.geodesic_ode_samples(&geo, &grid)?;
        numeric_worst = numeric_worst.max(straighten_points(&chart, &pts)?.residual);
    }
    let closed_pass = closed_worst < 1e-10;
    let numeric_pass = numeric_worst < 1e-7;

    let mut hyperplane = json!(null);
    let mut hyperplane_pass = true;
    if args.hyperplanes {
        let mut worst = 0.0_f64;
        for _ in 0..10 {
            let geo = random_geodesic(&form, &mut rng, args.radius);
            let p = geo.base.clone();
            let frame = form.tangent_frame(&p);
            let mut lattice = Vec::new();
            let k = args.dim - 1;
            let mut idx = vec![0usize; k];
            'lat: loop {
                lattice.push(
                    idx.iter()
                        .map(|&i| -0.3 + 0.1 * i as f64)
                        .collect::<Vec<_>>(),
                );
                let mut j = 0;
                loop {
                    if j == k {
                        break 'lat;
                    }
                    idx[j] += 1;
                    if idx[j] < 7 {
                        break;
                    }
                    idx[j] = 0;
                    j += 1;
                }
            }
            let cloud = form.geodesic_submanifold_sample(&p, &frame[..k], &lattice)?;
            let images: Vec<Vec<f64>> = cloud
                .iter()
                .map(|q| chart.forward(q))
                .collect::<kakeya_core::Result<_>>()?;
            worst = worst.max(linalg::hyperplane_residual(&images));
        }
        hyperplane_pass = worst < 1e-9;
        hyperplane = json!({"residual_max": worst, "tolerance": 1e-9, "pass": hyperplane_pass});
    }

    let pass = closed_pass && numeric_pass && hyperplane_pass;
    let body = json!({
        "closed_form": {"residual_max": closed_worst, "tolerance": 1e-10, "pass": closed_pass},
        "integrator": {"residual_max": numeric_worst, "tolerance": 1e-7, "pass": numeric_pass},
        "hyperplanes": hyperplane,
        "n_samples": args.count,
        "pass": pass,
    });
    let path = write_report(&args.out, "geo_check_lines", &args, body)?;
    println!(
        "geo check-lines [{}]: closed {closed_worst:.3e} (tol 1e-10), integrator {numeric_worst:.3e} (tol 1e-7) -> {}",
        args.model,
        path.display()
    );
    Ok(if pass {
        Outcome::Success
    } else {
        Outcome::ConditionFailed
    })
}

fn bilipschitz(args: BilipschitzArgs) -> Result<Outcome> {
    let form = super::space_form(&args.model, args.dim)?;
    let scan = bilipschitz_scan(&form, args.radius, args.pairs, args.seed)?;
    let body = json!({
        "ratio_min": scan.ratio_min,
        "ratio_max": scan.ratio_max,
        "n_samples": scan.n_samples,
    });
    let path = write_report(&args.out, "geo_bilipschitz", &args, body)?;
    println!(
        "geo bilipschitz [{}]: ratios in [{:.6}, {:.6}] over {} pairs -> {}",
        args.model,
        scan.ratio_min,
        scan.ratio_max,
        scan.n_samples,
        path.display()
    );
    Ok(Outcome::Success)
}
