//! Straightening charts: coordinate maps under which every geodesic of the
//! model becomes a straight line.
//!
//! - gnomonic chart for the sphere, centered at (0,…,0,−1): u = −x̃/x_{d+1};
//! - Beltrami–Klein chart for the hyperboloid: w = x̃/x_{d+1}, |w| < 1;
//! - the identity chart for Euclidean space.
//!
//! Also here: the Klein metric and its segment-length quadrature, the
//! projective Nikodym→Kakeya transform, seeded bi-Lipschitz ratio scans, and
//! the line-space map (z, e) ↦ (ρ, η) for surfaces.

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, collinearity_residual, Mat};
use crate::space_forms::{ModelKind, SFGeodesic, SFPoint, SFTangent, SpaceForm};

/// Gnomonic domain guard: the chart is defined for x_{d+1} < 0, but Jacobian
/// conditioning degrades toward the equator, so points with x_{d+1} above
/// this bound are rejected.
pub const GNOMONIC_LAST_COORD_MAX: f64 = -0.05;

/// Klein inverse guard radius.
pub const KLEIN_GUARD_RADIUS: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChartKind {
    Gnomonic,
    Klein,
    Identity,
}

/// The straightening chart attached to one space-form model.
#[derive(Debug, Clone, Copy)]
pub struct ChartMap {
    pub form: SpaceForm,
    pub kind: ChartKind,
}

impl ChartMap {
    pub fn for_form(form: SpaceForm) -> Self {
        let kind = match form.kind {
            ModelKind::Sphere => ChartKind::Gnomonic,
            ModelKind::Hyperbolic => ChartKind::Klein,
            ModelKind::Euclidean => ChartKind::Identity,
        };
        ChartMap { form, kind }
    }

    /// Chart image of a model point (a point of ℝ^d).
    pub fn forward(&self, p: &SFPoint) -> Result<Vec<f64>> {
        if p.form != self.form {
            return Err(Error::geometry(
                "point does not belong to the chart's model",
            ));
        }
        match self.kind {
            ChartKind::Identity => Ok(p.coords.clone()),
            ChartKind::Gnomonic => gnomonic_fwd(p),
            ChartKind::Klein => klein_fwd(p),
        }
    }

    /// Model point with the given chart coordinates.
    pub fn inverse(&self, u: &[f64]) -> Result<SFPoint> {
        if u.len() != self.form.d {
            return Err(Error::geometry(format!(
                "chart coordinates must have length {}",
                self.form.d
            )));
        }
        match self.kind {
            ChartKind::Identity => self.form.point(u.to_vec()),
            ChartKind::Gnomonic => Ok(gnomonic_inv(&self.form, u)),
            ChartKind::Klein => klein_inv(&self.form, u),
        }
    }
}

/// Gnomonic projection u_i = −x_i/x_{d+1} from the open lower cap.
pub fn gnomonic_fwd(p: &SFPoint) -> Result<Vec<f64>> {
    let d = p.form.d;
    let last = p.coords[d];
    if last > GNOMONIC_LAST_COORD_MAX {
        return Err(Error::chart(format!(
            "gnomonic chart requires x_{{d+1}} ≤ {GNOMONIC_LAST_COORD_MAX}, got {last}"
        )));
    }
    Ok(p.coords[..d].iter().map(|&x| -x / last).collect())
}

/// Inverse gnomonic map: all of ℝ^d lands in the open lower hemisphere.
pub fn gnomonic_inv(form: &SpaceForm, u: &[f64]) -> SFPoint {
    let s = (linalg::dot(u, u) + 1.0).sqrt();
    let mut coords: Vec<f64> = u.iter().map(|&x| x / s).collect();
    coords.push(-1.0 / s);
    SFPoint {
        form: *form,
        coords,
    }
}

/// Beltrami–Klein projection w_i = x_i/x_{d+1}; lands in the open unit ball.
pub fn klein_fwd(p: &SFPoint) -> Result<Vec<f64>> {
    let d = p.form.d;
    let last = p.coords[d];
    Ok(p.coords[..d].iter().map(|&x| x / last).collect())
}

/// Inverse Klein map, guarded at |w| ≤ 0.99.
pub fn klein_inv(form: &SpaceForm, w: &[f64]) -> Result<SFPoint> {
    let r = linalg::norm(w);
    if r > KLEIN_GUARD_RADIUS {
        return Err(Error::chart(format!(
            "Klein coordinates with |w| = {r} exceed the guard radius {KLEIN_GUARD_RADIUS}"
        )));
    }
    let s = (1.0 - r * r).sqrt();
    let mut coords: Vec<f64> = w.iter().map(|&x| x / s).collect();
    coords.push(1.0 / s);
    Ok(SFPoint {
        form: *form,
        coords,
    })
}

/// The hyperbolic metric in Klein coordinates:
/// g̃ᵢⱼ = δᵢⱼ/(1−|w|²) + wᵢwⱼ/(1−|w|²)².
pub fn klein_metric(w: &[f64]) -> Result<Mat> {
    let r2 = linalg::dot(w, w);
    if r2 >= 1.0 {
        return Err(Error::chart("Klein metric requires |w| < 1"));
    }
    let d = w.len();
    let a = 1.0 / (1.0 - r2);
    let b = a * a;
    let mut g = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            g[i][j] = if i == j { a } else { 0.0 } + b * w[i] * w[j];
        }
    }
    Ok(g)
}

/// Length of the straight Klein segment from `w0` to `w1` in the Klein
/// metric, by a 64-node composite Gauss rule (8 panels × 8 nodes).
///
/// For points on the hyperboloid this reproduces the model distance; the
/// quadrature route is independent of the arccosh closed form.
pub fn klein_segment_length(w0: &[f64], w1: &[f64]) -> Result<f64> {
    const NODES: [f64; 8] = [
        -0.960_289_856_497_536_2,
        -0.796_666_477_413_626_7,
        -0.525_532_409_916_329_0,
        -0.183_434_642_495_649_8,
        0.183_434_642_495_649_8,
        0.525_532_409_916_329_0,
        0.796_666_477_413_626_7,
        0.960_289_856_497_536_2,
    ];
    const WEIGHTS: [f64; 8] = [
        0.101_228_536_290_376_3,
        0.222_381_034_453_374_5,
        0.313_706_645_877_887_3,
        0.362_683_783_378_362_0,
        0.362_683_783_378_362_0,
        0.313_706_645_877_887_3,
        0.222_381_034_453_374_5,
        0.101_228_536_290_376_3,
    ];
    let dw = linalg::sub(w1, w0);
    let mut total = 0.0;
    let panels = 8;
    for panel in 0..panels {
        let lo = panel as f64 / panels as f64;
        let hi = (panel + 1) as f64 / panels as f64;
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for (x, wgt) in NODES.iter().zip(WEIGHTS.iter()) {
            let tau = mid + half * x;
            let w: Vec<f64> = w0.iter().zip(&dw).map(|(a, d)| a + tau * d).collect();
            let g = klein_metric(&w)?;
            let speed2 = linalg::dot(&dw, &linalg::mat_vec(&g, &dw));
            total += wgt * half * speed2.max(0.0).sqrt();
        }
    }
    Ok(total)
}

/// A chart polyline with its collinearity residual (max distance to the
/// best-fit line through the centroid, normalized by the image diameter).
#[derive(Debug, Clone)]
pub struct StraightenedLine {
    pub points: Vec<Vec<f64>>,
    pub residual: f64,
}

/// Map already-computed model points through the chart and fit a line.
pub fn straighten_points(chart: &ChartMap, points: &[SFPoint]) -> Result<StraightenedLine> {
    let images: Vec<Vec<f64>> = points
        .iter()
        .map(|p| chart.forward(p))
        .collect::<Result<_>>()?;
    let residual = collinearity_residual(&images);
    Ok(StraightenedLine {
        points: images,
        residual,
    })
}

/// Sample a geodesic at the given arclengths (closed form) and straighten.
pub fn straighten_geodesic(
    chart: &ChartMap,
    geo: &SFGeodesic,
    s_samples: &[f64],
) -> Result<StraightenedLine> {
    let pts: Vec<SFPoint> = s_samples
        .iter()
        .map(|&s| chart.form.geodesic_eval(geo, s))
        .collect::<Result<_>>()?;
    straighten_points(chart, &pts)
}

/// The projective transform F(x̃, x_d) = (x̃, 1)/x_d that carries Nikodym
/// sets to Kakeya sets. An involution away from {x_d = 0}.
pub fn projective_nikodym_to_kakeya(x: &[f64]) -> Result<Vec<f64>> {
    let d = x.len();
    let last = x[d - 1];
    if last.abs() < 1e-6 {
        return Err(Error::chart(format!(
            "projective map requires |x_d| ≥ 1e-6, got {last}"
        )));
    }
    let mut out: Vec<f64> = x[..d - 1].iter().map(|&v| v / last).collect();
    out.push(1.0 / last);
    Ok(out)
}

/// Result of a seeded bi-Lipschitz ratio scan.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RatioScan {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub n_samples: usize,
}

/// Sample `n_pairs` random point pairs in the geodesic ball of `radius`
/// about the chart center and record the extreme values of
/// |image(p) − image(q)| / distance_model(p, q).
pub fn bilipschitz_scan(
    form: &SpaceForm,
    radius: f64,
    n_pairs: usize,
    seed: u64,
) -> Result<RatioScan> {
    let chart = ChartMap::for_form(*form);
    let center = form.chart_center();
    let frame = form.tangent_frame(&center);
    let mut rng = crate::sample::rng(seed);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut accepted = 0usize;
    let mut guard = 0usize;
    while accepted < n_pairs {
        guard += 1;
        if guard > 100 * n_pairs + 1000 {
            return Err(Error::numerical(
                "bilipschitz scan kept drawing degenerate pairs",
            ));
        }
        let mut pts = Vec::with_capacity(2);
        for _ in 0..2 {
            let coeffs = crate::sample::ball_point(&mut rng, form.d, radius);
            let mut v = vec![0.0; form.ambient_dim()];
            for (c, e) in coeffs.iter().zip(&frame) {
                axpy(&mut v, *c, &e.vector);
            }
            let t = SFTangent {
                base: center.clone(),
                vector: v,
            };
            pts.push(form.exp_map(&center, &t)?);
        }
        let dist_model = form.distance(&pts[0], &pts[1])?;
        if dist_model < 1e-12 {
            continue; // degenerate pair, resample
        }
        let a = chart.forward(&pts[0])?;
        let b = chart.forward(&pts[1])?;
        let ratio = linalg::dist(&a, &b) / dist_model;
        if !ratio.is_finite() || ratio <= 0.0 {
            return Err(Error::numerical("non-finite bi-Lipschitz ratio"));
        }
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        accepted += 1;
    }
    Ok(RatioScan {
        ratio_min: lo,
        ratio_max: hi,
        n_samples: n_pairs,
    })
}

/// An element of the line-space model γ₀ × S¹ for a surface: arclength z
/// along the reference geodesic and an angle e parallel-transported from
/// γ₀(0).
#[derive(Debug, Clone, Copy)]
pub struct LineSpaceElement {
    pub z: f64,
    pub e: f64,
}

impl LineSpaceElement {
    pub fn new(z: f64, e: f64) -> Self {
        LineSpaceElement {
            z,
            e: e.rem_euclid(std::f64::consts::TAU),
        }
    }
}

/// The line-space map Y(z, e) = (ρ(z), η_z(e)) on a surface (d = 2).
///
/// ρ is the signed position of the chart image of γ₀(z) along the image line
/// of γ₀ (positive in the forward direction); η is the direction angle of
/// the chart image of the geodesic through γ₀(z) whose initial direction is
/// the parallel transport of angle e. Chart images of geodesics are straight
/// lines, so a chord determines η exactly.
pub fn line_space_map(
    form: &SpaceForm,
    gamma0: &SFGeodesic,
    el: LineSpaceElement,
) -> Result<(f64, f64)> {
    if form.d != 2 {
        return Err(Error::config(
            "the line-space model is defined for surfaces (d = 2)",
        ));
    }
    let chart = ChartMap::for_form(*form);
    let center = form.chart_center();
    if form.distance(&gamma0.base, &center)? > 1e-9 {
        return Err(Error::precondition(
            "γ₀ must pass through the chart center at z = 0",
        ));
    }

    // orientation of the image line of γ₀
    let img0 = chart.forward(&gamma0.base)?;
    let img_fwd = chart.forward(&form.geodesic_eval(gamma0, 0.1)?)?;
    let axis = linalg::normalize(&linalg::sub(&img_fwd, &img0));

    let rho = linalg::dot(
        &linalg::sub(&chart.forward(&form.geodesic_eval(gamma0, el.z)?)?, &img0),
        &axis,
    );

    // orthonormal frame (E1, E2) at γ₀(0) with E1 = γ₀ direction
    let e1 = gamma0.dir.vector.clone();
    let mut e2 = None;
    for cand in form.tangent_frame(&gamma0.base) {
        let mut v = cand.vector;
        let c = form.inner(&v, &e1);
        axpy(&mut v, -c, &e1);
        let n = form.inner(&v, &v).max(0.0).sqrt();
        if n > 1e-8 {
            e2 = Some(linalg::scale(&v, 1.0 / n));
            break;
        }
    }
    let e2 = e2.ok_or_else(|| Error::numerical("failed to complete the tangent frame"))?;

    let mut v0 = linalg::scale(&e1, el.e.cos());
    axpy(&mut v0, el.e.sin(), &e2);
    let v0 = SFTangent {
        base: gamma0.base.clone(),
        vector: v0,
    };
    let transported = form.parallel_transport(gamma0, &v0, el.z)?;
    let at = transported.base.clone();
    let geod = form.geodesic(at.clone(), transported)?;

    let p0 = chart.forward(&at)?;
    let p1 = chart.forward(&form.geodesic_eval(&geod, 0.05)?)?;
    let dir = linalg::sub(&p1, &p0);
    let eta = dir[1].atan2(dir[0]).rem_euclid(std::f64::consts::TAU);
    Ok((rho, eta))
}
