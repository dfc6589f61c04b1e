//! `phase check`, `phase straighten`, `phase curves`.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use serde::Serialize;
use serde_json::json;

use kakeya_core::conditions::{
    self, check_bourgain, check_h1, check_h2, check_straight, check_translation_invariant,
    trace_curve, BourgainMode, ConditionKind, ConditionReport,
};
use kakeya_core::expr::PhasePoint;
use kakeya_core::measure::OmegaRule;
use kakeya_core::straighten::{straighten_phase, StraightenParams};

use crate::report::{parse_tols, parse_vector, write_csv, write_report};
use crate::Outcome;

#[derive(Subcommand)]
pub enum PhaseCommand {
    /// Run condition checkers and emit one report per condition.
    Check(CheckArgs),
    /// Run the full straightening pipeline.
    Straighten(StraightenArgs),
    /// Trace Kakeya curves over a y set and export polylines.
    Curves(CurvesArgs),
}

#[derive(Args, Serialize)]
pub struct CheckArgs {
    /// Phase spec JSON: {"d": …, "phase": "…", "epsilon0": …}.
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated subset of h1,h2,translation,bourgain,straight.
    #[arg(long, default_value = "h1,h2,translation,bourgain,straight")]
    conditions: String,
    /// Lattice nodes per axis for the sample sets.
    #[arg(long, default_value_t = 5)]
    per_axis: usize,
    /// Frequency for the H2 check (comma-separated, default 0).
    #[arg(long)]
    y0: Option<String>,
    /// Fixed frequency for the straight-condition scan (default 0.4·ε₀ in
    /// every coordinate).
    #[arg(long)]
    straight_y: Option<String>,
    /// Bourgain directional-derivative mode: frozen | field.
    #[arg(long, default_value = "frozen")]
    mode: String,
    /// Tolerance overrides, repeatable: --tol bourgain=1e-6.
    #[arg(long = "tol")]
    tols: Vec<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct StraightenArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Working half-interval in t.
    #[arg(long, default_value_t = 0.1)]
    tmax: f64,
    /// Grid spacing.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Radius of the y sample ball.
    #[arg(long, default_value_t = 0.2)]
    y_radius: f64,
    /// Also export h/q/f samples as CSV.
    #[arg(long)]
    csv: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args, Serialize)]
pub struct CurvesArgs {
    #[arg(long)]
    spec: PathBuf,
    /// Single frequency, comma-separated; alternative to --y-lattice.
    #[arg(long)]
    y: Option<String>,
    /// Lattice nodes per axis over the y cube.
    #[arg(long, default_value_t = 8)]
    y_lattice: usize,
    /// Half-width of the y lattice (default 0.8·ε₀).
    #[arg(long)]
    y_radius: Option<f64>,
    /// Base point ω, comma-separated; alternative to --omega-rule.
    #[arg(long)]
    omega: Option<String>,
    /// zero | compression | random
    #[arg(long, default_value = "zero")]
    omega_rule: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Half-range of the t grid (default 0.8·ε₀).
    #[arg(long)]
    tmax: Option<f64>,
    /// Number of t nodes.
    #[arg(long, default_value_t = 65)]
    nt: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

pub fn run(cmd: PhaseCommand) -> Result<Outcome> {
    match cmd {
        PhaseCommand::Check(args) => check(args),
        PhaseCommand::Straighten(args) => straighten(args),
        PhaseCommand::Curves(args) => curves(args),
    }
}

fn summarize(report: &ConditionReport) -> String {
    format!(
        "condition {}: {} (max residual {:.6e}, threshold {:.3e}{})",
        report.condition.name(),
        if report.pass { "PASS" } else { "FAIL" },
        report.max_residual,
        report.threshold,
        report
            .note
            .as_deref()
            .map(|n| format!("; {n}"))
            .unwrap_or_default()
    )
}

fn check(args: CheckArgs) -> Result<Outcome> {
    let (phi, _) = super::load_phase(&args.spec)?;
    let tols = parse_tols(&args.tols)?;
    let tol = |name: &str, default: f64| tols.get(name).copied().unwrap_or(default);
    let mode = match args.mode.as_str() {
        "frozen" => BourgainMode::Frozen,
        "field" => BourgainMode::Field,
        other => bail!("unknown Bourgain mode `{other}`"),
    };
    let lattice = conditions::phase_lattice(&phi, args.per_axis);
    let y0 = match &args.y0 {
        Some(s) => parse_vector(s)?,
        None => vec![0.0; phi.d() - 1],
    };
    let straight_y = match &args.straight_y {
        Some(s) => parse_vector(s)?,
        None => conditions::default_straight_y(&phi),
    };

    let mut reports = Vec::new();
    for name in args.conditions.split(',') {
        let kind: ConditionKind = name.trim().parse()?;
        let report = match kind {
            ConditionKind::H1 => check_h1(&phi, &lattice, tol("h1", conditions::DEFAULT_TOL_H1))?,
            ConditionKind::H2 => {
                let xt = conditions::xt_lattice(&phi, &y0, args.per_axis);
                check_h2(&phi, &y0, &xt, tol("h2", conditions::DEFAULT_TOL_H2))?
            }
            ConditionKind::TranslationInvariant => check_translation_invariant(
                &phi,
                &lattice,
                tol("translation", conditions::DEFAULT_TOL_TRANSLATION),
            )?,
            ConditionKind::Bourgain => check_bourgain(
                &phi,
                &lattice,
                tol("bourgain", conditions::DEFAULT_TOL_BOURGAIN),
                mode,
            )?,
            ConditionKind::Straight => {
                let xt = conditions::xt_lattice(&phi, &straight_y, args.per_axis);
                check_straight(&phi, &xt, tol("straight", conditions::DEFAULT_TOL_STRAIGHT))?
            }
        };
        println!("{}", summarize(&report));
        reports.push(report);
    }

    let all_pass = reports.iter().all(|r| r.pass);
    let body = json!({
        "conditions": reports,
        "pass": all_pass,
    });
    let path = write_report(&args.out, "phase_check", &args, body)?;
    println!("report -> {}", path.display());
    Ok(if all_pass {
        Outcome::Success
    } else {
        Outcome::ConditionFailed
    })
}

fn straighten(args: StraightenArgs) -> Result<Outcome> {
    let (phi, _) = super::load_phase(&args.spec)?;
    let params = StraightenParams {
        t_max: args.tmax,
        dt: args.dt,
        y_radius: args.y_radius,
        ..StraightenParams::default()
    };
    let result = straighten_phase(&phi, &params)?;
    if args.csv {
        let mut h_rows = Vec::new();
        for ((y, h), q) in result.hqf.ys.iter().zip(&result.hqf.h).zip(&result.hqf.q) {
            let mut row = y.clone();
            row.push(*h);
            row.push(*q);
            h_rows.push(row);
        }
        let mut header: Vec<String> = (1..phi.d()).map(|i| format!("y{i}")).collect();
        header.push("h".into());
        header.push("q".into());
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        write_csv(
            &args.out,
            "phase_straighten_hq",
            &kakeya_core::exports::csv_table(&header_refs, &h_rows),
        )?;
        let f_rows: Vec<Vec<f64>> = result
            .hqf
            .ts
            .iter()
            .zip(&result.hqf.f)
            .map(|(&t, &f)| vec![t, f])
            .collect();
        write_csv(
            &args.out,
            "phase_straighten_f",
            &kakeya_core::exports::csv_table(&["t", "f"], &f_rows),
        )?;
        let alpha_rows: Vec<Vec<f64>> = result
            .alpha
            .ts
            .iter()
            .zip(result.alpha.alpha.iter().zip(&result.alpha.alpha_prime))
            .map(|(&t, (&a, &ap))| vec![t, a, ap])
            .collect();
        write_csv(
            &args.out,
            "phase_straighten_alpha",
            &kakeya_core::exports::csv_table(&["t", "alpha", "alpha_prime"], &alpha_rows),
        )?;
    }
    let pass = result.pass;
    let body = serde_json::to_value(&result)?;
    let path = write_report(&args.out, "phase_straighten", &args, body)?;
    println!(
        "phase straighten: {} (straighten residual {:.3e}, x-linearity {:.3e}, |det ∇²h| {:.3e}) -> {}",
        if pass { "PASS" } else { "FAIL" },
        result.verify.straighten_residual,
        result.verify.x_linearity_residual,
        result.hqf.h_hessian_det,
        path.display()
    );
    Ok(if pass {
        Outcome::Success
    } else {
        Outcome::ConditionFailed
    })
}

fn curves(args: CurvesArgs) -> Result<Outcome> {
    let (phi, _) = super::load_phase(&args.spec)?;
    let m = phi.d() - 1;
    let y_radius = args.y_radius.unwrap_or(0.8 * phi.epsilon0());
    let ys: Vec<Vec<f64>> = match &args.y {
        Some(s) => vec![parse_vector(s)?],
        None => kakeya_core::measure::y_lattice(m, args.y_lattice, y_radius),
    };
    let t_max = args.tmax.unwrap_or(0.8 * phi.epsilon0());
    let t_grid: Vec<f64> = (0..args.nt)
        .map(|i| -t_max + 2.0 * t_max * i as f64 / (args.nt - 1) as f64)
        .collect();

    let rule = match (args.omega.as_deref(), args.omega_rule.as_str()) {
        (Some(_), _) => None,
        (None, "zero") => Some(OmegaRule::Zero),
        (None, "compression") => Some(OmegaRule::Compression),
        (None, "random") => Some(OmegaRule::SeededRandom {
            seed: args.seed,
            radius: 0.8 * phi.epsilon0(),
        }),
        (None, other) => bail!("unknown omega rule `{other}`"),
    };

    let mut rows = Vec::new();
    let mut incomplete = 0usize;
    let mut rng = kakeya_core::sample::rng(args.seed);
    for (id, y) in ys.iter().enumerate() {
        let omega = match (&args.omega, &rule) {
            (Some(s), _) => parse_vector(s)?,
            (None, Some(OmegaRule::Zero)) => vec![0.0; m],
            (None, Some(OmegaRule::Compression)) => {
                let mut w = vec![0.0; m];
                if m >= 2 {
                    w[1] = -y[1];
                }
                w
            }
            (None, Some(OmegaRule::SeededRandom { radius, .. })) => {
                kakeya_core::sample::ball_point(&mut rng, m, *radius)
            }
            (None, None) => unreachable!(),
        };
        let base = PhasePoint::new(omega, 0.0, y.clone());
        let trace = trace_curve(&phi, y, &base, &t_grid)?;
        if !trace.completed {
            incomplete += 1;
        }
        for p in &trace.points {
            let mut row = vec![id as f64];
            row.extend_from_slice(p);
            rows.push(row);
        }
    }
    let mut header: Vec<String> = vec!["curve".into()];
    header.extend((1..phi.d()).map(|i| format!("x{i}")));
    header.push("t".into());
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    write_csv(
        &args.out,
        "phase_curves",
        &kakeya_core::exports::csv_table(&header_refs, &rows),
    )?;
    let body = json!({
        "n_curves": ys.len(),
        "incomplete": incomplete,
        "points_per_curve": args.nt,
    });
    let path = write_report(&args.out, "phase_curves", &args, body)?;
    println!(
        "phase curves: {} curves ({} incomplete) -> {}",
        ys.len(),
        incomplete,
        path.display()
    );
    Ok(if incomplete == 0 {
        Outcome::Success
    } else {
        Outcome::ConditionFailed
    })
}
