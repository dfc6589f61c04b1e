//! Seeded sampling helpers: lattices, balls, and direction nets.
//!
//! All randomness flows through [`ChaCha12Rng`] seeded from a caller-supplied
//! `u64`, so every scan is reproducible bit-for-bit.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

/// Uniform point in the closed ball of the given radius (Euclidean, any dim).
pub fn ball_point(rng: &mut ChaCha12Rng, dim: usize, radius: f64) -> Vec<f64> {
    // direction from normalized Gaussians, radius via u^{1/dim}
    loop {
        let g: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let n = crate::linalg::norm(&g);
        if n > 1e-12 {
            let r = radius * rng.random::<f64>().powf(1.0 / dim as f64);
            return crate::linalg::scale(&g, r / n);
        }
    }
}

/// Standard Gaussian via Box–Muller (deterministic given the stream).
pub fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Axis-aligned lattice with `per_axis` nodes per axis on [−radius, radius]^dim,
/// restricted to the closed ball of that radius.
///
/// This is the default sample set for condition scans (5^dim over 0.8·ε₀).
pub fn ball_lattice(dim: usize, per_axis: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut points = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        let p: Vec<f64> = idx
            .iter()
            .map(|&i| {
                if per_axis == 1 {
                    0.0
                } else {
                    -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64
                }
            })
            .collect();
        if crate::linalg::norm(&p) <= radius + 1e-12 {
            points.push(p);
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == dim {
                return points;
            }
            idx[k] += 1;
            if idx[k] < per_axis {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Direction net on S^{d−1}: uniform angles for d=2, a Fibonacci sphere for d=3.
pub fn direction_net(dim: usize, count: usize) -> Vec<Vec<f64>> {
    assert!(count >= 1);
    match dim {
        2 => (0..count)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / count as f64;
                vec![theta.cos(), theta.sin()]
            })
            .collect(),
        3 => {
            let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
                    let r = (1.0 - z * z).max(0.0).sqrt();
                    let phi = golden * i as f64;
                    vec![r * phi.cos(), r * phi.sin(), z]
                })
                .collect()
        }
        _ => panic!("direction nets are provided for d = 2 and d = 3 only"),
    }
}
