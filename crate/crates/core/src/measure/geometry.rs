//! Stadium–row intersection: the closed-form core of rasterization and tube
//! integrals.
//!
//! A row is the set of points (u, c⊥) with fixed transverse coordinates c⊥
//! and u running along axis 0. The δ-neighborhood of a segment is convex, so
//! its slice along a row is a single interval in u, assembled from the two
//! endpoint caps and the cylindrical body.

/// A line segment in ℝ^d.
#[derive(Debug, Clone)]
pub struct Segment {
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
}

fn interval_union(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some((a0, a1)), Some((b0, b1))) => Some((a0.min(b0), a1.max(b1))),
    }
}

fn interval_intersect(a: Option<(f64, f64)>, b: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a0, a1) = a?;
    let (b0, b1) = b?;
    let lo = a0.max(b0);
    let hi = a1.min(b1);
    (lo <= hi).then_some((lo, hi))
}

impl Segment {
    pub fn direction(&self) -> Vec<f64> {
        crate::linalg::sub(&self.p1, &self.p0)
    }

    /// Euclidean distance from a point to the segment.
    pub fn distance_to_point(&self, q: &[f64]) -> f64 {
        let v = self.direction();
        let w = crate::linalg::sub(q, &self.p0);
        let vv = crate::linalg::dot(&v, &v);
        let s = if vv < 1e-300 {
            0.0
        } else {
            (crate::linalg::dot(&w, &v) / vv).clamp(0.0, 1.0)
        };
        let mut diff = w;
        crate::linalg::axpy(&mut diff, -s, &v);
        crate::linalg::norm(&diff)
    }

    /// The u-interval {u : dist((u, c⊥), segment) ≤ δ} for the row with
    /// transverse coordinates `c_perp` (length d−1, axes 1..d−1).
    ///
    /// Returns None when the row misses the stadium.
    pub fn row_interval(&self, delta: f64, c_perp: &[f64]) -> Option<(f64, f64)> {
        let d2 = delta * delta;
        let a0 = self.p0[0];
        let a1 = self.p1[0];

        // cap at p0: (u − a0)² ≤ δ² − |c⊥ − p0⊥|²
        let m0: f64 = c_perp
            .iter()
            .zip(&self.p0[1..])
            .map(|(c, p)| (c - p) * (c - p))
            .sum();
        let cap0 = (d2 >= m0).then(|| {
            let r = (d2 - m0).sqrt();
            (a0 - r, a0 + r)
        });

        // cap at p1
        let m1: f64 = c_perp
            .iter()
            .zip(&self.p1[1..])
            .map(|(c, p)| (c - p) * (c - p))
            .sum();
        let cap1 = (d2 >= m1).then(|| {
            let r = (d2 - m1).sqrt();
            (a1 - r, a1 + r)
        });

        // cylindrical body: perpendicular distance ≤ δ with the unclamped
        // projection parameter in [0, 1]
        let v = self.direction();
        let vv = crate::linalg::dot(&v, &v);
        let body = if vv < 1e-300 {
            None
        } else {
            let v0 = v[0];
            // w(z) = (z, m) with z = u − a0 and m = c⊥ − p0⊥
            let kv: f64 = c_perp
                .iter()
                .zip(&self.p0[1..])
                .zip(&v[1..])
                .map(|((c, p), vk)| (c - p) * vk)
                .sum();
            // perp²(z) = A z² + B z + C
            let a_coef = 1.0 - v0 * v0 / vv;
            let b_coef = -2.0 * v0 * kv / vv;
            let c_coef = m0 - kv * kv / vv;
            let perp_range = if a_coef > 1e-14 {
                let disc = b_coef * b_coef - 4.0 * a_coef * (c_coef - d2);
                (disc >= 0.0).then(|| {
                    let root = disc.sqrt();
                    (
                        (-b_coef - root) / (2.0 * a_coef),
                        (-b_coef + root) / (2.0 * a_coef),
                    )
                })
            } else {
                // segment parallel to axis 0: perp² is constant in u
                (c_coef <= d2).then_some((f64::NEG_INFINITY, f64::INFINITY))
            };
            // projection parameter s(z) = (v0 z + kv)/vv ∈ [0, 1]
            let s_range = if v0.abs() > 1e-14 {
                let za = -kv / v0;
                let zb = (vv - kv) / v0;
                Some((za.min(zb), za.max(zb)))
            } else {
                let s = kv / vv;
                (0.0..=1.0)
                    .contains(&s)
                    .then_some((f64::NEG_INFINITY, f64::INFINITY))
            };
            interval_intersect(perp_range, s_range)
        };
        // shift body from z back to u
        let body = body.map(|(lo, hi)| (lo + a0, hi + a0));

        interval_union(interval_union(cap0, cap1), body)
    }
}
