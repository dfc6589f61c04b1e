//! Nikodym coverage: which base points see a geodesic mostly inside Ω.

use rayon::prelude::*;
use serde::Serialize;

use crate::charts::ChartMap;
use crate::error::{Error, Result};
use crate::linalg;
use crate::space_forms::{SFTangent, SpaceForm};

use super::geometry::Segment;
use super::grid::OccupancyGrid;

/// Arclength samples per geodesic.
const SAMPLES_PER_GEODESIC: usize = 256;

/// The family of geodesics tried through each base point.
#[derive(Debug, Clone)]
pub enum CoverageFamily {
    /// The d axis-parallel chords of the box through the point.
    AxisLines,
    /// Unit segments centered at the point over a direction net.
    DirectionNet(usize),
    /// Straightened unit geodesics of the model through the chart preimage.
    SpaceForm(SpaceForm, usize),
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageResult {
    pub lambda: f64,
    /// Per base point: was some geodesic occupied for a ≥ λ fraction.
    pub covered: Vec<bool>,
    /// Per base point: the best occupied fraction seen.
    pub best_fraction: Vec<f64>,
}

fn segments_for(family: &CoverageFamily, grid: &OccupancyGrid, p: &[f64]) -> Result<Vec<Segment>> {
    let d = grid.spec.d;
    let l = grid.spec.l;
    match family {
        CoverageFamily::AxisLines => Ok((0..d)
            .map(|axis| {
                let mut a = p.to_vec();
                let mut b = p.to_vec();
                a[axis] = -l;
                b[axis] = l;
                Segment { p0: a, p1: b }
            })
            .collect()),
        CoverageFamily::DirectionNet(count) => {
            let net = crate::sample::direction_net(d, *count);
            Ok(net
                .into_iter()
                .map(|omega| {
                    let half = linalg::scale(&omega, 0.5);
                    Segment {
                        p0: linalg::sub(p, &half),
                        p1: linalg::add(p, &half),
                    }
                })
                .collect())
        }
        CoverageFamily::SpaceForm(form, count) => {
            if form.d != d {
                return Err(Error::config("space form dimension must match the grid"));
            }
            let chart = ChartMap::for_form(*form);
            let base = chart.inverse(p)?;
            let frame = form.tangent_frame(&base);
            let mut out = Vec::with_capacity(*count);
            for k in 0..*count {
                let coeffs: Vec<f64> = if d == 2 {
                    let theta = std::f64::consts::PI * k as f64 / *count as f64;
                    vec![theta.cos(), theta.sin()]
                } else {
                    crate::sample::direction_net(d, *count)[k].clone()
                };
                let mut v = vec![0.0; form.ambient_dim()];
                for (c, e) in coeffs.iter().zip(&frame) {
                    linalg::axpy(&mut v, *c, &e.vector);
                }
                let fwd = form.exp_map(
                    &base,
                    &SFTangent {
                        base: base.clone(),
                        vector: linalg::scale(&v, 0.5),
                    },
                )?;
                let bwd = form.exp_map(
                    &base,
                    &SFTangent {
                        base: base.clone(),
                        vector: linalg::scale(&v, -0.5),
                    },
                )?;
                out.push(Segment {
                    p0: chart.forward(&bwd)?,
                    p1: chart.forward(&fwd)?,
                });
            }
            Ok(out)
        }
    }
}

fn occupied_fraction(grid: &OccupancyGrid, seg: &Segment) -> f64 {
    let dir = seg.direction();
    let mut hits = 0usize;
    for i in 0..SAMPLES_PER_GEODESIC {
        let s = (i as f64 + 0.5) / SAMPLES_PER_GEODESIC as f64;
        let mut q = seg.p0.clone();
        linalg::axpy(&mut q, s, &dir);
        if let Some(flat) = grid.spec.flat_of_point(&q) {
            if grid.get(flat) {
                hits += 1;
            }
        }
    }
    hits as f64 / SAMPLES_PER_GEODESIC as f64
}

/// For each base point, sample the family's geodesics at 256 arclength
/// points; the point is covered iff some geodesic has occupied fraction ≥ λ.
pub fn nikodym_coverage(
    grid: &OccupancyGrid,
    base_points: &[Vec<f64>],
    family: &CoverageFamily,
    lambda: f64,
) -> Result<CoverageResult> {
    if !(0.0 < lambda && lambda < 1.0) {
        return Err(Error::config("λ must lie in (0, 1)"));
    }
    let rows: Vec<Result<(bool, f64)>> = base_points
        .par_iter()
        .map(|p| {
            let segs = segments_for(family, grid, p)?;
            let mut best = 0.0_f64;
            for seg in &segs {
                best = best.max(occupied_fraction(grid, seg));
            }
            Ok((best >= lambda, best))
        })
        .collect();
    let mut covered = Vec::with_capacity(base_points.len());
    let mut best_fraction = Vec::with_capacity(base_points.len());
    for r in rows {
        let (c, b) = r?;
        covered.push(c);
        best_fraction.push(b);
    }
    Ok(CoverageResult {
        lambda,
        covered,
        best_fraction,
    })
}
