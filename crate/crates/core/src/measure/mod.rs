//! Occupancy grids, tube rasterization, box-counting dimension, discretized
//! maximal functions, and Nikodym coverage checks.
//!
//! Everything operates on uniform axis-aligned grids over [−L, L]^d. The
//! shared workhorse is a closed-form intersection of a stadium (δ-neighborhood
//! of a segment) with a grid row, which turns both rasterization and tube
//! integrals into per-row index intervals.

mod boxcount;
mod coverage;
mod families;
mod geometry;
mod grid;
mod maximal;

pub use boxcount::{box_count_grid, box_count_points, compression_surface_points, BoxCountReport};
pub use coverage::{nikodym_coverage, CoverageFamily, CoverageResult};
pub use families::{
    compression_family, curve_family, straight_family_from_y_lattice, y_lattice, OmegaRule, Tube,
    TubeFamily, TubeProvenance,
};
pub use geometry::Segment;
pub use grid::{GridSpec, OccupancyGrid, ScalarGrid};
pub use maximal::{
    curved_maximal, fit_scaling, kakeya_maximal, nikodym_maximal, FitReport, GeodesicSource,
    MaximalScanResult,
};

use crate::error::{Error, Result};
use rayon::prelude::*;
use std::sync::atomic::{AtomicU64, Ordering};

/// Cell-membership rule for rasterization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RasterMode {
    /// A cell is occupied iff its center lies within δ of the polyline.
    #[default]
    Center,
    /// Conservative: occupied iff any of the 2^d cell corners lies within δ.
    Corners,
}

#[derive(Debug)]
pub struct RasterOutput {
    pub grid: OccupancyGrid,
    /// Set when the cell size exceeds δ (tubes thinner than one cell).
    pub coarse_warning: bool,
}

/// Rasterize a tube family into an occupancy grid.
///
/// Parallel over tubes; per-cell writes are commutative bit-ORs, so the
/// result is independent of the thread count.
pub fn rasterize_tubes(
    family: &TubeFamily,
    spec: &GridSpec,
    mode: RasterMode,
) -> Result<RasterOutput> {
    let h = spec.cell_size();
    let words = vec![0u64; spec.cells().div_ceil(64)];
    let atomic: Vec<AtomicU64> = words.into_iter().map(AtomicU64::new).collect();
    let mut coarse = false;
    for tube in &family.tubes {
        if tube.delta <= 0.0 {
            return Err(Error::config("tube radius must be positive"));
        }
        if h > tube.delta {
            coarse = true;
        }
        for p in &tube.polyline {
            if p.len() != spec.d {
                return Err(Error::config("polyline point has wrong dimension"));
            }
            if p.iter().any(|&c| c.abs() > spec.l) {
                return Err(Error::config(format!(
                    "polyline exits the box [−{l}, {l}]^d",
                    l = spec.l
                )));
            }
        }
    }

    family.tubes.par_iter().for_each(|tube| {
        raster_one_tube(tube, spec, mode, &atomic);
    });

    let words: Vec<u64> = atomic.into_iter().map(|w| w.into_inner()).collect();
    Ok(RasterOutput {
        grid: OccupancyGrid::from_words(*spec, words),
        coarse_warning: coarse,
    })
}

fn raster_one_tube(tube: &Tube, spec: &GridSpec, mode: RasterMode, bits: &[AtomicU64]) {
    let segments = tube.segments();
    for seg in &segments {
        raster_segment(seg, tube.delta, spec, mode, bits);
    }
    // single-point polylines still mark their δ-ball
    if segments.is_empty() && tube.polyline.len() == 1 {
        let p = &tube.polyline[0];
        let seg = Segment {
            p0: p.clone(),
            p1: p.clone(),
        };
        raster_segment(&seg, tube.delta, spec, mode, bits);
    }
}

fn raster_segment(
    seg: &Segment,
    delta: f64,
    spec: &GridSpec,
    mode: RasterMode,
    bits: &[AtomicU64],
) {
    let d = spec.d;
    let h = spec.cell_size();
    // transverse cell ranges covering the inflated segment AABB
    let mut lo_idx = vec![0usize; d - 1];
    let mut hi_idx = vec![0usize; d - 1];
    let pad = delta + h;
    for k in 1..d {
        let lo = seg.p0[k].min(seg.p1[k]) - pad;
        let hi = seg.p0[k].max(seg.p1[k]) + pad;
        lo_idx[k - 1] = spec.clamp_cell(lo);
        hi_idx[k - 1] = spec.clamp_cell(hi);
    }
    let mut idx = lo_idx.clone();
    loop {
        let mut row_coords = Vec::with_capacity(d - 1);
        let mut row_base = 0usize;
        let mut stride = spec.n;
        for (k, &i) in idx.iter().enumerate() {
            row_coords.push(spec.cell_center(i));
            row_base += i * stride;
            let _ = k;
            stride *= spec.n;
        }
        match mode {
            RasterMode::Center => {
                if let Some((u_lo, u_hi)) = seg.row_interval(delta, &row_coords) {
                    set_cells(spec, bits, row_base, u_lo, u_hi);
                }
            }
            RasterMode::Corners => {
                // union over the 2^{d−1} transverse corner offsets; a cell
                // center c qualifies iff one of its axial corners c ± h/2
                // lands in the slice interval, which splits into two shifted
                // copies when the slice is narrower than a cell
                let corners = 1usize << (d - 1);
                for c in 0..corners {
                    let shifted: Vec<f64> = row_coords
                        .iter()
                        .enumerate()
                        .map(|(k, &v)| v + if c >> k & 1 == 1 { h / 2.0 } else { -h / 2.0 })
                        .collect();
                    if let Some((u_lo, u_hi)) = seg.row_interval(delta, &shifted) {
                        if u_hi - u_lo >= h {
                            set_cells(spec, bits, row_base, u_lo - h / 2.0, u_hi + h / 2.0);
                        } else {
                            set_cells(spec, bits, row_base, u_lo - h / 2.0, u_hi - h / 2.0);
                            set_cells(spec, bits, row_base, u_lo + h / 2.0, u_hi + h / 2.0);
                        }
                    }
                }
            }
        }
        // odometer over transverse indices
        let mut k = 0;
        loop {
            if k == d - 1 {
                return;
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

fn set_cells(spec: &GridSpec, bits: &[AtomicU64], row_base: usize, u_lo: f64, u_hi: f64) {
    if let Some((i_lo, i_hi)) = spec.cells_in_range(u_lo, u_hi) {
        let start = row_base + i_lo;
        let end = row_base + i_hi; // inclusive
        let mut word = start / 64;
        let last_word = end / 64;
        let mut bit = start % 64;
        while word <= last_word {
            let hi_bit = if word == last_word { end % 64 } else { 63 };
            let count = hi_bit - bit + 1;
            let mask = if count == 64 {
                u64::MAX
            } else {
                ((1u64 << count) - 1) << bit
            };
            bits[word].fetch_or(mask, Ordering::Relaxed);
            word += 1;
            bit = 0;
        }
    }
}
