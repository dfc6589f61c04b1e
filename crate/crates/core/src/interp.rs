//! Cubic interpolation on a uniform grid.

/// Piecewise-cubic Lagrange interpolation over the 4 nodes nearest to `t`.
///
/// `ts` must be a strictly increasing uniform grid with at least 4 nodes.
/// Interpolation error is O(h⁴ f⁗) uniformly; at grid nodes the stored value
/// is returned exactly.
pub fn cubic_eval(ts: &[f64], vals: &[f64], t: f64) -> f64 {
    debug_assert!(ts.len() >= 4 && ts.len() == vals.len());
    let n = ts.len();
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    // index of the grid interval containing t, clamped to keep a full stencil
    let raw = ((t - ts[0]) / h).floor() as isize;
    let i = raw.clamp(1, n as isize - 3) as usize;
    let stencil = [i - 1, i, i + 1, i + 2];
    let mut acc = 0.0;
    for (a, &ia) in stencil.iter().enumerate() {
        let mut w = 1.0;
        for (b, &ib) in stencil.iter().enumerate() {
            if a != b {
                w *= (t - ts[ib]) / (ts[ia] - ts[ib]);
            }
        }
        acc += w * vals[ia];
    }
    acc
}

/// Derivative of the same piecewise-cubic interpolant.
pub fn cubic_deriv(ts: &[f64], vals: &[f64], t: f64) -> f64 {
    debug_assert!(ts.len() >= 4 && ts.len() == vals.len());
    let n = ts.len();
    let h = (ts[n - 1] - ts[0]) / (n - 1) as f64;
    let raw = ((t - ts[0]) / h).floor() as isize;
    let i = raw.clamp(1, n as isize - 3) as usize;
    let stencil = [i - 1, i, i + 1, i + 2];
    let mut acc = 0.0;
    for (a, &ia) in stencil.iter().enumerate() {
        let mut dw = 0.0;
        for (c, &ic) in stencil.iter().enumerate() {
            if c == a {
                continue;
            }
            let mut term = 1.0 / (ts[ia] - ts[ic]);
            for (b, &ib) in stencil.iter().enumerate() {
                if b != a && b != c {
                    term *= (t - ts[ib]) / (ts[ia] - ts[ib]);
                }
            }
            dw += term;
        }
        acc += dw * vals[ia];
    }
    acc
}

/// Build the uniform grid [lo, hi] with `n` nodes.
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let ts = uniform_grid(-1.0, 1.0, 21);
        let f = |t: f64| 0.3 * t * t * t - t * t + 2.0 * t - 0.5;
        let vals: Vec<f64> = ts.iter().map(|&t| f(t)).collect();
        for k in 0..100 {
            let t = -0.999 + 1.99 * k as f64 / 99.0;
            assert!((cubic_eval(&ts, &vals, t) - f(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn node_values_exact() {
        let ts = uniform_grid(0.0, 1.0, 11);
        let vals: Vec<f64> = ts.iter().map(|&t| (3.0 * t).sin()).collect();
        for (i, &t) in ts.iter().enumerate() {
            assert_eq!(cubic_eval(&ts, &vals, t), vals[i]);
        }
    }

    #[test]
    fn smooth_function_error_small() {
        let ts = uniform_grid(-0.15, 0.15, 301);
        let vals: Vec<f64> = ts.iter().map(|&t| (1.0 + t).ln()).collect();
        let mut worst = 0.0_f64;
        for k in 0..1000 {
            let t = -0.149 + 0.298 * k as f64 / 999.0;
            worst = worst.max((cubic_eval(&ts, &vals, t) - (1.0 + t).ln()).abs());
        }
        assert!(worst < 1e-11, "worst {worst}");
    }

    #[test]
    fn derivative_accuracy() {
        let ts = uniform_grid(-0.5, 0.5, 201);
        let vals: Vec<f64> = ts.iter().map(|&t| t.exp()).collect();
        for k in 0..50 {
            let t = -0.49 + 0.98 * k as f64 / 49.0;
            assert!((cubic_deriv(&ts, &vals, t) - t.exp()).abs() < 1e-6);
        }
    }
}
