//! Classical 4th-order Runge–Kutta with step-doubling error control.

use crate::error::{Error, Result};

/// One RK4 step for `y' = f(t, y)`.
pub fn rk4_step<F>(f: &F, t: f64, y: &[f64], h: f64) -> Vec<f64>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let k1 = f(t, y);
    let y2: Vec<f64> = y.iter().zip(&k1).map(|(a, k)| a + 0.5 * h * k).collect();
    let k2 = f(t + 0.5 * h, &y2);
    let y3: Vec<f64> = y.iter().zip(&k2).map(|(a, k)| a + 0.5 * h * k).collect();
    let k3 = f(t + 0.5 * h, &y3);
    let y4: Vec<f64> = y.iter().zip(&k3).map(|(a, k)| a + h * k).collect();
    let k4 = f(t + h, &y4);
    y.iter()
        .enumerate()
        .map(|(i, a)| a + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Advance `y' = f(t, y)` from `t0` to `t1` with adaptive sub-stepping.
///
/// Each trial step is compared against two half steps; the step is accepted
/// when the step-doubling error estimate is below `tol` (per component, scaled
/// by 1 + |y|), otherwise halved. Accepted results use the more accurate
/// two-half-step value. `t1` may be below `t0` (integration runs backwards).
pub fn integrate_adaptive<F>(f: &F, t0: f64, y0: &[f64], t1: f64, tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64, &[f64]) -> Vec<f64>,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0.to_vec());
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut h = span.abs();
    let h_min = span.abs() * 1e-12;
    let mut rejects = 0usize;
    while (t1 - t).abs() > 1e-15 * (1.0 + t1.abs()) {
        h = h.min((t1 - t).abs());
        let step = dir * h;
        let full = rk4_step(f, t, &y, step);
        let half = rk4_step(f, t, &y, step * 0.5);
        let two_half = rk4_step(f, t + step * 0.5, &half, step * 0.5);
        let mut err = 0.0_f64;
        for (a, b) in full.iter().zip(&two_half) {
            // step-doubling estimate: |y_h − y_{h/2}| / 15 is the local error
            // of the half-step solution for a 4th-order method
            err = err.max((a - b).abs() / 15.0 / (1.0 + b.abs()));
        }
        if err <= tol || h <= h_min {
            if !two_half.iter().all(|v| v.is_finite()) {
                return Err(Error::numerical("ODE state became non-finite"));
            }
            t += step;
            y = two_half;
            if err < tol / 32.0 {
                h *= 2.0;
            }
        } else {
            h *= 0.5;
            rejects += 1;
            if rejects > 10_000 {
                return Err(Error::numerical(
                    "step control failed: too many rejected steps",
                ));
            }
        }
    }
    Ok(y)
}
