//! Uniform grids over [−L, L]^d: bit-packed occupancy and scalar fields.
//!
//! Flat cell indexing runs axis 0 fastest, so a "row" (all cells with fixed
//! indices on axes 1..d−1) is a contiguous index range — the layout the
//! stadium-interval kernels rely on.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub l: f64,
    pub n: usize,
    pub d: usize,
}

impl GridSpec {
    pub fn new(l: f64, n: usize, d: usize) -> Result<Self> {
        if l <= 0.0 || n == 0 || d == 0 {
            return Err(Error::config("grid requires L > 0, n ≥ 1, d ≥ 1"));
        }
        // flat indices must fit comfortably in usize
        let cells = (n as u128).pow(d as u32);
        if cells > u64::MAX as u128 / 64 {
            return Err(Error::config("grid too large"));
        }
        Ok(GridSpec { l, n, d })
    }

    pub fn cells(&self) -> usize {
        self.n.pow(self.d as u32)
    }

    pub fn cell_size(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size().powi(self.d as i32)
    }

    pub fn cell_center(&self, i: usize) -> f64 {
        -self.l + (i as f64 + 0.5) * self.cell_size()
    }

    /// Cell index containing coordinate `c`, or None outside the box.
    pub fn cell_of(&self, c: f64) -> Option<usize> {
        let raw = ((c + self.l) / self.cell_size()).floor();
        if raw < 0.0 || raw >= self.n as f64 {
            None
        } else {
            Some(raw as usize)
        }
    }

    /// Nearest valid cell index for coordinate `c` (clamped).
    pub fn clamp_cell(&self, c: f64) -> usize {
        let raw = ((c + self.l) / self.cell_size()).floor();
        raw.max(0.0).min((self.n - 1) as f64) as usize
    }

    /// Inclusive cell-index range whose centers lie in [u_lo, u_hi].
    pub fn cells_in_range(&self, u_lo: f64, u_hi: f64) -> Option<(usize, usize)> {
        let h = self.cell_size();
        // centers at −l + (i + 0.5)h
        let i_lo = ((u_lo + self.l) / h - 0.5).ceil().max(0.0);
        let i_hi = ((u_hi + self.l) / h - 0.5).floor().min((self.n - 1) as f64);
        if i_lo > i_hi {
            None
        } else {
            Some((i_lo as usize, i_hi as usize))
        }
    }

    /// Multi-index of a flat index (axis 0 fastest).
    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.d);
        for _ in 0..self.d {
            idx.push(flat % self.n);
            flat /= self.n;
        }
        idx
    }

    /// Center coordinates of a flat cell index.
    pub fn center_of(&self, flat: usize) -> Vec<f64> {
        self.unflatten(flat)
            .into_iter()
            .map(|i| self.cell_center(i))
            .collect()
    }

    /// Flat index of the cell containing a point, or None outside the box.
    pub fn flat_of_point(&self, p: &[f64]) -> Option<usize> {
        let mut flat = 0usize;
        let mut stride = 1usize;
        for &c in p {
            flat += self.cell_of(c)? * stride;
            stride *= self.n;
        }
        Some(flat)
    }
}

/// Bit-packed occupancy grid.
#[derive(Debug, Clone)]
pub struct OccupancyGrid {
    pub spec: GridSpec,
    words: Vec<u64>,
}

/// Serialized form: `{"L", "n", "d", "occupied": [sorted flat indices]}`.
#[derive(Serialize, Deserialize)]
struct OccupancyJson {
    #[serde(rename = "L")]
    l: f64,
    n: usize,
    d: usize,
    occupied: Vec<u64>,
}

impl OccupancyGrid {
    pub fn empty(spec: GridSpec) -> Self {
        OccupancyGrid {
            words: vec![0; spec.cells().div_ceil(64)],
            spec,
        }
    }

    pub fn from_words(spec: GridSpec, words: Vec<u64>) -> Self {
        debug_assert_eq!(words.len(), spec.cells().div_ceil(64));
        OccupancyGrid { spec, words }
    }

    pub fn full(spec: GridSpec) -> Self {
        let mut g = Self::empty(spec);
        for i in 0..spec.cells() {
            g.set(i);
        }
        g
    }

    pub fn set(&mut self, flat: usize) {
        self.words[flat / 64] |= 1u64 << (flat % 64);
    }

    pub fn get(&self, flat: usize) -> bool {
        self.words[flat / 64] >> (flat % 64) & 1 == 1
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Sorted flat indices of occupied cells.
    pub fn occupied_indices(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.count());
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as u64;
                out.push(wi as u64 * 64 + b);
                bits &= bits - 1;
            }
        }
        out
    }

    /// Visit occupied flat indices in ascending order.
    pub fn for_each_occupied(&self, mut f: impl FnMut(usize)) {
        for (wi, &w) in self.words.iter().enumerate() {
            let mut bits = w;
            while bits != 0 {
                let b = bits.trailing_zeros() as usize;
                f(wi * 64 + b);
                bits &= bits - 1;
            }
        }
    }

    pub fn to_json(&self) -> String {
        let j = OccupancyJson {
            l: self.spec.l,
            n: self.spec.n,
            d: self.spec.d,
            occupied: self.occupied_indices(),
        };
        serde_json::to_string(&j).expect("grid serialization")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let j: OccupancyJson = serde_json::from_str(json)?;
        let spec = GridSpec::new(j.l, j.n, j.d)?;
        let mut g = Self::empty(spec);
        for idx in j.occupied {
            let idx = idx as usize;
            if idx >= spec.cells() {
                return Err(Error::config("occupied index out of range"));
            }
            g.set(idx);
        }
        Ok(g)
    }
}

/// Scalar field on the grid, with row prefix sums for fast slab integrals.
#[derive(Debug, Clone)]
pub struct ScalarGrid {
    pub spec: GridSpec,
    pub vals: Vec<f64>,
}

impl ScalarGrid {
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut vals = Vec::with_capacity(spec.cells());
        for flat in 0..spec.cells() {
            vals.push(f(&spec.center_of(flat)));
        }
        ScalarGrid { spec, vals }
    }

    pub fn uniform(spec: GridSpec, value: f64) -> Self {
        ScalarGrid {
            vals: vec![value; spec.cells()],
            spec,
        }
    }

    /// Indicator of the Euclidean ball of `radius` about the origin.
    pub fn ball_indicator(spec: GridSpec, radius: f64) -> Self {
        Self::from_fn(spec, |c| {
            if crate::linalg::norm(c) <= radius {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn from_occupancy(grid: &OccupancyGrid) -> Self {
        let mut vals = vec![0.0; grid.spec.cells()];
        grid.for_each_occupied(|i| vals[i] = 1.0);
        ScalarGrid {
            spec: grid.spec,
            vals,
        }
    }

    pub fn min_value(&self) -> f64 {
        self.vals.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Discrete Lp norm: (Σ |f|^p · cellvol)^{1/p}.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol = self.spec.cell_volume();
        (self.vals.iter().map(|v| v.abs().powf(p) * vol).sum::<f64>()).powf(1.0 / p)
    }

    /// Row-wise inclusive prefix sums (axis 0 contiguous).
    pub fn prefix_rows(&self) -> PrefixRows {
        let n = self.spec.n;
        let mut ps = vec![0.0; self.vals.len()];
        let rows = self.vals.len() / n;
        for r in 0..rows {
            let base = r * n;
            let mut acc = 0.0;
            for i in 0..n {
                acc += self.vals[base + i];
                ps[base + i] = acc;
            }
        }
        PrefixRows {
            spec: self.spec,
            ps,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut rows = Vec::with_capacity(self.vals.len());
        for flat in 0..self.spec.cells() {
            let mut row = self.spec.center_of(flat);
            row.push(self.vals[flat]);
            rows.push(row);
        }
        let mut header: Vec<String> = (1..=self.spec.d).map(|i| format!("x{i}")).collect();
        header.push("value".to_string());
        let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
        crate::exports::csv_table(&header_refs, &rows)
    }
}

/// Inclusive prefix sums along axis 0.
pub struct PrefixRows {
    pub spec: GridSpec,
    ps: Vec<f64>,
}

impl PrefixRows {
    /// Σ vals[row_base + i] for i in [i_lo, i_hi] (inclusive).
    pub fn row_sum(&self, row_base: usize, i_lo: usize, i_hi: usize) -> f64 {
        let hi = self.ps[row_base + i_hi];
        if i_lo == 0 {
            hi
        } else {
            hi - self.ps[row_base + i_lo - 1]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_roundtrip() {
        let spec = GridSpec::new(1.0, 8, 3).unwrap();
        for flat in [0usize, 7, 63, 100, 511] {
            let idx = spec.unflatten(flat);
            let back: usize = idx
                .iter()
                .enumerate()
                .map(|(k, &i)| i * spec.n.pow(k as u32))
                .sum();
            assert_eq!(back, flat);
        }
    }

    #[test]
    fn occupancy_json_roundtrip() {
        let spec = GridSpec::new(0.5, 16, 2).unwrap();
        let mut g = OccupancyGrid::empty(spec);
        for i in [0usize, 5, 64, 65, 255] {
            g.set(i);
        }
        let j = g.to_json();
        let back = OccupancyGrid::from_json(&j).unwrap();
        assert_eq!(g.occupied_indices(), back.occupied_indices());
        assert_eq!(back.spec, spec);
    }

    #[test]
    fn occupied_indices_sorted() {
        let spec = GridSpec::new(1.0, 32, 2).unwrap();
        let mut g = OccupancyGrid::empty(spec);
        for i in [900usize, 3, 512, 100] {
            g.set(i);
        }
        assert_eq!(g.occupied_indices(), vec![3, 100, 512, 900]);
        assert_eq!(g.count(), 4);
    }

    #[test]
    fn prefix_rows_sum() {
        let spec = GridSpec::new(1.0, 4, 2).unwrap();
        let f = ScalarGrid::from_fn(spec, |c| c[0] + 10.0 * c[1]);
        let ps = f.prefix_rows();
        for row in 0..4 {
            let base = row * 4;
            for lo in 0..4 {
                for hi in lo..4 {
                    let direct: f64 = (lo..=hi).map(|i| f.vals[base + i]).sum();
                    assert!((ps.row_sum(base, lo, hi) - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn cells_in_range_respects_centers() {
        let spec = GridSpec::new(1.0, 4, 1).unwrap(); // centers −0.75, −0.25, 0.25, 0.75
        assert_eq!(spec.cells_in_range(-0.3, 0.3), Some((1, 2)));
        assert_eq!(spec.cells_in_range(-0.25, 0.25), Some((1, 2)));
        assert_eq!(spec.cells_in_range(0.8, 0.9), None);
        assert_eq!(spec.cells_in_range(-2.0, 2.0), Some((0, 3)));
    }

    #[test]
    fn lp_norm_uniform() {
        let spec = GridSpec::new(1.0, 32, 2).unwrap();
        let f = ScalarGrid::uniform(spec, 1.0);
        // ∫ 1 over [−1,1]² = 4; L² norm = 2
        assert!((f.lp_norm(2.0) - 2.0).abs() < 1e-12);
    }
}
