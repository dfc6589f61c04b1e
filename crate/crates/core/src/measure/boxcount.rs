//! Dyadic box counting: the Minkowski-dimension proxy.

use serde::Serialize;

use crate::error::{Error, Result};

use super::grid::OccupancyGrid;

#[derive(Debug, Clone, Serialize)]
pub struct BoxCountReport {
    pub ks: Vec<u32>,
    pub counts: Vec<u64>,
    /// Least-squares slope of log₂N_k against k.
    pub slope: f64,
    pub r_squared: f64,
}

/// Least-squares line fit returning (slope, intercept, R²).
pub(crate) fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy < 1e-300 {
        1.0
    } else {
        (sxy * sxy) / (sxx * syy)
    };
    (slope, intercept, r2)
}

fn report_from_counts(ks: Vec<u32>, counts: Vec<u64>) -> BoxCountReport {
    let xs: Vec<f64> = ks.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).log2()).collect();
    let (slope, _, r_squared) = fit_line(&xs, &ys);
    BoxCountReport {
        ks,
        counts,
        slope,
        r_squared,
    }
}

fn validate_ks(k_min: u32, k_max: u32) -> Result<Vec<u32>> {
    if k_max < k_min || (k_max - k_min + 1) < 3 {
        return Err(Error::config("box counting needs at least 3 scales"));
    }
    Ok((k_min..=k_max).collect())
}

/// Count occupied dyadic boxes of the grid at scales 2^{−k}·(2L).
///
/// Requires 2^k ≤ n for every k (each dyadic box must cover whole cells).
pub fn box_count_grid(grid: &OccupancyGrid, k_min: u32, k_max: u32) -> Result<BoxCountReport> {
    let ks = validate_ks(k_min, k_max)?;
    let n = grid.spec.n;
    for &k in &ks {
        if (1usize << k) > n {
            return Err(Error::config(format!(
                "scale 2^{k} exceeds the grid resolution n={n}"
            )));
        }
    }
    let d = grid.spec.d;
    let mut counts = Vec::with_capacity(ks.len());
    for &k in &ks {
        let boxes_per_axis = 1usize << k;
        let mut marks = vec![0u64; (boxes_per_axis.pow(d as u32)).div_ceil(64)];
        grid.for_each_occupied(|flat| {
            let idx = grid.spec.unflatten(flat);
            let mut key = 0usize;
            let mut stride = 1usize;
            for &i in &idx {
                // cell i of n maps to box floor(i·2^k / n)
                key += (i * boxes_per_axis / n) * stride;
                stride *= boxes_per_axis;
            }
            marks[key / 64] |= 1u64 << (key % 64);
        });
        counts.push(marks.iter().map(|w| w.count_ones() as u64).sum());
    }
    Ok(report_from_counts(ks, counts))
}

/// Count occupied dyadic boxes of a point cloud inside [−L, L]^d.
pub fn box_count_points(
    points: &[Vec<f64>],
    l: f64,
    k_min: u32,
    k_max: u32,
) -> Result<BoxCountReport> {
    let ks = validate_ks(k_min, k_max)?;
    if points.is_empty() {
        return Err(Error::config("box counting needs a nonempty point cloud"));
    }
    let d = points[0].len();
    let mut counts = Vec::with_capacity(ks.len());
    for &k in &ks {
        let boxes_per_axis = 1u64 << k;
        let size = 2.0 * l / boxes_per_axis as f64;
        let mut keys: Vec<u64> = points
            .iter()
            .filter(|p| p.iter().all(|&c| c.abs() <= l))
            .map(|p| {
                let mut key = 0u64;
                let mut stride = 1u64;
                for &c in p.iter().take(d) {
                    let i = (((c + l) / size).floor() as u64).min(boxes_per_axis - 1);
                    key += i * stride;
                    stride *= boxes_per_axis;
                }
                key
            })
            .collect();
        keys.sort_unstable();
        keys.dedup();
        counts.push(keys.len() as u64);
    }
    Ok(report_from_counts(ks, counts))
}

/// Dense samples of the planar-concentration surface {x₁ = t·x₂} over
/// |x₂| ≤ x2_max, |t| ≤ t_max — the box-counting calibration target.
pub fn compression_surface_points(x2_max: f64, t_max: f64, per_axis: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(per_axis * per_axis);
    for i in 0..per_axis {
        let x2 = -x2_max + 2.0 * x2_max * i as f64 / (per_axis - 1) as f64;
        for j in 0..per_axis {
            let t = -t_max + 2.0 * t_max * j as f64 / (per_axis - 1) as f64;
            pts.push(vec![t * x2, x2, t]);
        }
    }
    pts
}
