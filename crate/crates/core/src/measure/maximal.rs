//! Discretized Kakeya, Nikodym, and curved Kakeya maximal functions.
//!
//! All scans share the same discretization: a tube value at a parameter is
//! the grid sum of f over cells whose centers lie in the tube, times the
//! cell volume, divided by δ^{d−1}. Sups over translations use a δ/2
//! lattice; ties at the sup go to the lexicographically smallest parameter.

use rayon::prelude::*;
use serde::Serialize;

use crate::charts::ChartMap;
use crate::conditions::{self, check_h1, is_translation_invariant};
use crate::error::{Error, Result};
use crate::expr::{PhaseFunction, PhasePoint};
use crate::linalg;
use crate::space_forms::{SFTangent, SpaceForm};

use super::boxcount::fit_line;
use super::geometry::Segment;
use super::grid::{PrefixRows, ScalarGrid};

#[derive(Debug, Clone, Serialize)]
pub struct MaximalScanResult {
    /// Scan parameters (directions ω, positions x, or frequencies y).
    pub params: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    /// Where each sup was attained (position for Kakeya, direction for
    /// Nikodym, base point ω for the curved scan).
    pub witnesses: Vec<Vec<f64>>,
    pub delta: f64,
}

impl MaximalScanResult {
    /// Discrete ℓ^q norm over the parameter net with normalized counting
    /// measure: ((1/K) Σ v^q)^{1/q}.
    pub fn lq_norm(&self, q: f64) -> f64 {
        let k = self.values.len() as f64;
        (self.values.iter().map(|v| v.abs().powf(q)).sum::<f64>() / k).powf(1.0 / q)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// CSV rows: parameter coordinates, value, witness coordinates.
    pub fn to_csv(&self) -> String {
        let p_len = self.params.first().map_or(0, |p| p.len());
        let w_len = self.witnesses.first().map_or(0, |w| w.len());
        let mut header: Vec<String> = (1..=p_len).map(|i| format!("param{i}")).collect();
        header.push("value".into());
        header.extend((1..=w_len).map(|i| format!("witness{i}")));
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        let rows: Vec<Vec<f64>> = self
            .params
            .iter()
            .zip(&self.values)
            .zip(&self.witnesses)
            .map(|((p, &v), w)| {
                let mut row = p.clone();
                row.push(v);
                row.extend_from_slice(w);
                row
            })
            .collect();
        crate::exports::csv_table(&header_refs, &rows)
    }
}

fn validate_scan(f: &ScalarGrid, delta: f64) -> Result<()> {
    if delta < 2.0 * f.spec.cell_size() {
        return Err(Error::config(format!(
            "δ = {delta} is below two cell widths ({})",
            2.0 * f.spec.cell_size()
        )));
    }
    if f.min_value() < 0.0 {
        return Err(Error::config("maximal scans require f ≥ 0"));
    }
    Ok(())
}

/// Grid sum of f over cells with centers within δ of the segment, times the
/// cell volume.
fn stadium_integral(f: &ScalarGrid, prefix: &PrefixRows, seg: &Segment, delta: f64) -> f64 {
    let spec = &f.spec;
    let d = spec.d;
    let h = spec.cell_size();
    let pad = delta + h;
    let mut lo_idx = vec![0usize; d - 1];
    let mut hi_idx = vec![0usize; d - 1];
    for k in 1..d {
        let lo = seg.p0[k].min(seg.p1[k]) - pad;
        let hi = seg.p0[k].max(seg.p1[k]) + pad;
        if hi < -spec.l || lo > spec.l {
            return 0.0;
        }
        lo_idx[k - 1] = spec.clamp_cell(lo);
        hi_idx[k - 1] = spec.clamp_cell(hi);
    }
    let mut total = 0.0;
    let mut idx = lo_idx.clone();
    loop {
        let mut row_coords = Vec::with_capacity(d - 1);
        let mut row_base = 0usize;
        let mut stride = spec.n;
        for &i in idx.iter() {
            row_coords.push(spec.cell_center(i));
            row_base += i * stride;
            stride *= spec.n;
        }
        if let Some((u_lo, u_hi)) = seg.row_interval(delta, &row_coords) {
            if let Some((i_lo, i_hi)) = spec.cells_in_range(u_lo, u_hi) {
                total += prefix.row_sum(row_base, i_lo, i_hi);
            }
        }
        let mut k = 0;
        loop {
            if k == d - 1 {
                return total * spec.cell_volume();
            }
            idx[k] += 1;
            if idx[k] <= hi_idx[k] {
                break;
            }
            idx[k] = lo_idx[k];
            k += 1;
        }
    }
}

/// Positions in lexicographic order covering [−extent, extent]^d with the
/// given spacing.
fn lex_lattice(extent: f64, spacing: f64, d: usize) -> Vec<Vec<f64>> {
    let per_axis = (2.0 * extent / spacing).floor() as usize + 1;
    let coords: Vec<f64> = (0..per_axis)
        .map(|i| -extent + i as f64 * spacing)
        .collect();
    let mut out = Vec::with_capacity(coords.len().pow(d as u32));
    let mut idx = vec![0usize; d];
    loop {
        out.push(idx.iter().map(|&i| coords[i]).collect());
        // lexicographic: last axis fastest
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

/// The Kakeya maximal function: per direction ω, the sup over a δ/2 position
/// lattice of the normalized integral over the δ-tube (unit segment through
/// x with direction ω).
pub fn kakeya_maximal(
    f: &ScalarGrid,
    delta: f64,
    directions: &[Vec<f64>],
) -> Result<MaximalScanResult> {
    validate_scan(f, delta)?;
    if directions.is_empty() {
        return Err(Error::config("direction net is empty"));
    }
    let prefix = f.prefix_rows();
    // tubes centered outside the box can still reach the support of f
    let positions = lex_lattice(f.spec.l + 0.5 + delta, delta / 2.0, f.spec.d);
    let norm = delta.powi(f.spec.d as i32 - 1);
    let scans: Vec<(f64, Vec<f64>)> = directions
        .par_iter()
        .map(|omega| {
            let half = linalg::scale(omega, 0.5);
            let mut best = f64::NEG_INFINITY;
            let mut witness = positions[0].clone();
            for x in &positions {
                let seg = Segment {
                    p0: linalg::sub(x, &half),
                    p1: linalg::add(x, &half),
                };
                let v = stadium_integral(f, &prefix, &seg, delta) / norm;
                if v > best {
                    best = v;
                    witness = x.clone();
                }
            }
            (best, witness)
        })
        .collect();
    let (values, witnesses) = scans.into_iter().unzip();
    Ok(MaximalScanResult {
        params: directions.to_vec(),
        values,
        witnesses,
        delta,
    })
}

/// Where the Nikodym tubes come from.
#[derive(Debug, Clone)]
pub enum GeodesicSource {
    /// Straight unit segments.
    Euclidean,
    /// Unit geodesics of the model through the chart preimage of the
    /// position, straightened through the chart (their images are segments).
    SpaceForm(SpaceForm),
}

/// Tube segments through a chart position for one direction index.
fn nikodym_segment(
    source: &GeodesicSource,
    x: &[f64],
    dir_index: usize,
    n_directions: usize,
    euclid_net: &[Vec<f64>],
) -> Result<(Segment, Vec<f64>)> {
    match source {
        GeodesicSource::Euclidean => {
            let omega = &euclid_net[dir_index];
            let half = linalg::scale(omega, 0.5);
            Ok((
                Segment {
                    p0: linalg::sub(x, &half),
                    p1: linalg::add(x, &half),
                },
                omega.clone(),
            ))
        }
        GeodesicSource::SpaceForm(form) => {
            let chart = ChartMap::for_form(*form);
            let p = chart.inverse(x)?;
            let frame = form.tangent_frame(&p);
            let coeffs: Vec<f64> = if form.d == 2 {
                let theta = std::f64::consts::PI * dir_index as f64 / n_directions as f64;
                vec![theta.cos(), theta.sin()]
            } else {
                crate::sample::direction_net(form.d, n_directions)[dir_index].clone()
            };
            let mut v = vec![0.0; form.ambient_dim()];
            for (c, e) in coeffs.iter().zip(&frame) {
                linalg::axpy(&mut v, *c, &e.vector);
            }
            let tangent = SFTangent {
                base: p.clone(),
                vector: v,
            };
            let fwd = form.exp_map(
                &p,
                &SFTangent {
                    base: p.clone(),
                    vector: linalg::scale(&tangent.vector, 0.5),
                },
            )?;
            let bwd = form.exp_map(
                &p,
                &SFTangent {
                    base: p.clone(),
                    vector: linalg::scale(&tangent.vector, -0.5),
                },
            )?;
            Ok((
                Segment {
                    p0: chart.forward(&bwd)?,
                    p1: chart.forward(&fwd)?,
                },
                coeffs,
            ))
        }
    }
}

/// The Nikodym maximal function: per position x, the sup over the direction
/// net of the normalized tube integral through x.
pub fn nikodym_maximal(
    f: &ScalarGrid,
    delta: f64,
    positions: &[Vec<f64>],
    source: &GeodesicSource,
    n_directions: usize,
) -> Result<MaximalScanResult> {
    validate_scan(f, delta)?;
    if positions.is_empty() || n_directions == 0 {
        return Err(Error::config("empty position net or direction net"));
    }
    if let GeodesicSource::SpaceForm(form) = source {
        if form.d != f.spec.d {
            return Err(Error::config("space form dimension must match the grid"));
        }
    }
    let prefix = f.prefix_rows();
    let euclid_net = crate::sample::direction_net(f.spec.d, n_directions);
    let norm = delta.powi(f.spec.d as i32 - 1);
    let scans: Vec<Result<(f64, Vec<f64>)>> = positions
        .par_iter()
        .map(|x| {
            let mut best = f64::NEG_INFINITY;
            let mut witness = Vec::new();
            for k in 0..n_directions {
                let (seg, dir_param) = nikodym_segment(source, x, k, n_directions, &euclid_net)?;
                let v = stadium_integral(f, &prefix, &seg, delta) / norm;
                if v > best {
                    best = v;
                    witness = dir_param;
                }
            }
            Ok((best, witness))
        })
        .collect();
    let mut values = Vec::with_capacity(positions.len());
    let mut witnesses = Vec::with_capacity(positions.len());
    for s in scans {
        let (v, w) = s?;
        values.push(v);
        witnesses.push(w);
    }
    Ok(MaximalScanResult {
        params: positions.to_vec(),
        values,
        witnesses,
        delta,
    })
}

/// ω lattice with spacing δ inside the ball of radius ε₀ (lexicographic).
fn omega_lattice(eps0: f64, delta: f64, dim: usize) -> Vec<Vec<f64>> {
    lex_lattice(eps0, delta, dim)
        .into_iter()
        .filter(|w| linalg::norm(w) < eps0)
        .collect()
}

/// The curved Kakeya maximal function 𝒦_δ: per frequency y, the sup over an
/// ω lattice of the normalized integral over the phase tube
/// {|∇_yφ(x,t;y) − ∇_yφ(ω,0;y)| < δ} ∩ domain.
pub fn curved_maximal(
    phi: &PhaseFunction,
    f: &ScalarGrid,
    delta: f64,
    y_net: &[Vec<f64>],
) -> Result<MaximalScanResult> {
    validate_scan(f, delta)?;
    if f.spec.d != phi.d() {
        return Err(Error::config(
            "grid dimension must equal the phase dimension d",
        ));
    }
    let h1 = check_h1(
        phi,
        &conditions::phase_lattice(phi, 3),
        conditions::DEFAULT_TOL_H1,
    )?;
    if !h1.pass {
        return Err(Error::precondition("phase fails H1 on the working region"));
    }
    let omegas = omega_lattice(phi.epsilon0(), delta, phi.d() - 1);
    if omegas.is_empty() {
        return Err(Error::config("ω lattice is empty (δ too large for ε₀)"));
    }
    let ti = is_translation_invariant(phi);
    let prefix = f.prefix_rows();
    let norm = delta.powi(f.spec.d as i32 - 1);
    let scans: Vec<Result<(f64, Vec<f64>)>> = y_net
        .par_iter()
        .map(|y| {
            let mut best = f64::NEG_INFINITY;
            let mut witness = omegas[0].clone();
            for omega in &omegas {
                let v = if ti {
                    curved_tube_integral_ti(phi, f, &prefix, delta, y, omega)?
                } else {
                    curved_tube_integral_general(phi, f, delta, y, omega)?
                } / norm;
                if v > best {
                    best = v;
                    witness = omega.clone();
                }
            }
            Ok((best, witness))
        })
        .collect();
    let mut values = Vec::with_capacity(y_net.len());
    let mut witnesses = Vec::with_capacity(y_net.len());
    for s in scans {
        let (v, w) = s?;
        values.push(v);
        witnesses.push(w);
    }
    Ok(MaximalScanResult {
        params: y_net.to_vec(),
        values,
        witnesses,
        delta,
    })
}

/// Translation-invariant fast path: per t-slice the tube is the δ-ball in x
/// around v₀ − ∇_yψ(t;y), so each grid row contributes one closed-form
/// interval.
fn curved_tube_integral_ti(
    phi: &PhaseFunction,
    f: &ScalarGrid,
    prefix: &PrefixRows,
    delta: f64,
    y: &[f64],
    omega: &[f64],
) -> Result<f64> {
    let spec = &f.spec;
    let d = spec.d;
    let m = d - 1;
    let eps0 = phi.epsilon0();
    // centers c(t) = ω + ∇_yψ(0;y) − ∇_yψ(t;y), cached per t cell
    let zero = PhasePoint::new(vec![0.0; m], 0.0, y.to_vec());
    let psi0 = phi.grad_y(&zero)?;
    let mut centers: Vec<Option<Vec<f64>>> = Vec::with_capacity(spec.n);
    for it in 0..spec.n {
        let t = spec.cell_center(it);
        if t.abs() >= eps0 {
            centers.push(None);
            continue;
        }
        let psi_t = phi.grad_y(&PhasePoint::new(vec![0.0; m], t, y.to_vec()))?;
        let c: Vec<f64> = omega
            .iter()
            .zip(&psi0)
            .zip(&psi_t)
            .map(|((o, a), b)| o + a - b)
            .collect();
        centers.push(Some(c));
    }

    // rows: transverse indices (x₂..x_{d−1}, t); axis 0 is x₁
    let mut total = 0.0;
    let mut idx = vec![0usize; d - 1];
    loop {
        let it = idx[d - 2];
        if let Some(center) = &centers[it] {
            let mut row_base = 0usize;
            let mut stride = spec.n;
            let mut trans2 = 0.0; // Σ_{k≥2} (x_k − c_k)²
            let mut x_norm2 = 0.0; // Σ_{k≥2} x_k² for the domain ball
            for (k, &i) in idx.iter().enumerate() {
                row_base += i * stride;
                stride *= spec.n;
                if k + 1 < d - 1 {
                    let coord = spec.cell_center(i);
                    let diff = coord - center[k + 1];
                    trans2 += diff * diff;
                    x_norm2 += coord * coord;
                }
            }
            let r2 = delta * delta - trans2;
            let dom2 = eps0 * eps0 - x_norm2;
            if r2 > 0.0 && dom2 > 0.0 {
                let r = r2.sqrt();
                let dom = dom2.sqrt();
                let lo = (center[0] - r).max(-dom);
                let hi = (center[0] + r).min(dom);
                if lo <= hi {
                    if let Some((i_lo, i_hi)) = spec.cells_in_range(lo, hi) {
                        total += prefix.row_sum(row_base, i_lo, i_hi);
                    }
                }
            }
        }
        let mut k = 0;
        loop {
            if k == d - 1 {
                return Ok(total * spec.cell_volume());
            }
            idx[k] += 1;
            if idx[k] < spec.n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// General phases: trace the curve, inflate its bounding box, and test each
/// cell center with the exact membership predicate.
fn curved_tube_integral_general(
    phi: &PhaseFunction,
    f: &ScalarGrid,
    delta: f64,
    y: &[f64],
    omega: &[f64],
) -> Result<f64> {
    let spec = &f.spec;
    let d = spec.d;
    let m = d - 1;
    let eps0 = phi.epsilon0();
    let base = PhasePoint::new(omega.to_vec(), 0.0, y.to_vec());
    let t_cap = (eps0 * 0.98).min(spec.l);
    let t_grid: Vec<f64> = (-32..=32).map(|k| k as f64 * t_cap / 32.0).collect();
    let trace = conditions::trace_curve(phi, y, &base, &t_grid)?;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in &trace.points {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let pad = 3.0 * delta + spec.cell_size();
    let v0 = phi.grad_y(&base)?;
    let mut total = 0.0;
    let mut idx: Vec<usize> = (0..d).map(|k| spec.clamp_cell(lo[k] - pad)).collect();
    let hi_idx: Vec<usize> = (0..d).map(|k| spec.clamp_cell(hi[k] + pad)).collect();
    let lo_idx = idx.clone();
    loop {
        let center: Vec<f64> = idx.iter().map(|&i| spec.cell_center(i)).collect();
        let x = &center[..m];
        let t = center[m];
        if t.abs() < eps0 && linalg::norm(x) < eps0 {
            let q = PhasePoint::new(x.to_vec(), t, y.to_vec());
            let diff = linalg::sub(&phi.grad_y(&q)?, &v0);
            if linalg::norm(&diff) < delta {
                let mut flat = 0usize;
                let mut stride = 1usize;
                for &i in &idx {
                    flat += i * stride;
                    stride *= spec.n;
                }
                total += f.vals[flat];
            }
        }
        let mut k = 0;
        loop {
            if k == d {
                return Ok(total * spec.cell_volume());
            }
            idx[k] += 1;
            if idx[k] <= hi_idx[k] {
                break;
            }
            idx[k] = lo_idx[k];
            k += 1;
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub slope: f64,
    pub r_squared: f64,
}

/// Least-squares slope of log‖scan‖ against log δ over dyadic scales —
/// an exploratory diagnostic, not a theorem check.
pub fn fit_scaling(deltas: &[f64], norms: &[f64]) -> Result<FitReport> {
    if deltas.len() < 3 || deltas.len() != norms.len() {
        return Err(Error::config("scaling fits need at least 3 dyadic scales"));
    }
    let xs: Vec<f64> = deltas.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|n| n.max(1e-300).ln()).collect();
    let (slope, _, r_squared) = fit_line(&xs, &ys);
    Ok(FitReport { slope, r_squared })
}
