//! Tube families: straight direction families and phase-curve families.

use rand::Rng;

use crate::conditions::trace_curve;
use crate::error::Result;
use crate::expr::{PhaseFunction, PhasePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TubeProvenance {
    StraightDirections,
    PhaseCurves,
}

#[derive(Debug, Clone)]
pub struct Tube {
    pub polyline: Vec<Vec<f64>>,
    pub delta: f64,
}

impl Tube {
    pub fn segments(&self) -> Vec<super::Segment> {
        self.polyline
            .windows(2)
            .map(|w| super::Segment {
                p0: w[0].clone(),
                p1: w[1].clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct TubeFamily {
    pub tubes: Vec<Tube>,
    pub provenance: TubeProvenance,
}

/// Base-point selection rule ω(y) for phase-curve families.
#[derive(Debug, Clone, Copy)]
pub enum OmegaRule {
    /// ω = 0 for every y.
    Zero,
    /// ω(y) = (0, −y₂): the base points that exhibit Kakeya compression for
    /// the planar-concentration example phase (d = 3).
    Compression,
    /// Seeded uniform draws from the ball of the given radius.
    SeededRandom { seed: u64, radius: f64 },
}

/// Uniform lattice on [−radius, radius]^{d−1} (full cube; curved families
/// use frequencies up to the domain radius).
pub fn y_lattice(dim: usize, per_axis: usize, radius: f64) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    let mut idx = vec![0usize; dim];
    loop {
        out.push(
            idx.iter()
                .map(|&i| {
                    if per_axis == 1 {
                        0.0
                    } else {
                        -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64
                    }
                })
                .collect(),
        );
        let mut k = 0;
        loop {
            if k == dim {
                return out;
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

fn omega_for(rule: &OmegaRule, y: &[f64], rng: &mut rand_chacha::ChaCha12Rng) -> Vec<f64> {
    match rule {
        OmegaRule::Zero => vec![0.0; y.len()],
        OmegaRule::Compression => {
            let mut w = vec![0.0; y.len()];
            if y.len() >= 2 {
                w[0] = 0.0;
                w[1] = -y[1];
            }
            w
        }
        OmegaRule::SeededRandom { radius, .. } => crate::sample::ball_point(rng, y.len(), *radius),
    }
}

/// Trace the phase curves Γ_y((ω(y), 0)) over the y-lattice and wrap them as
/// δ-tubes.
pub fn curve_family(
    phi: &PhaseFunction,
    ys: &[Vec<f64>],
    rule: OmegaRule,
    t_grid: &[f64],
    delta: f64,
) -> Result<TubeFamily> {
    let seed = match rule {
        OmegaRule::SeededRandom { seed, .. } => seed,
        _ => 0,
    };
    let mut rng = crate::sample::rng(seed);
    let mut tubes = Vec::with_capacity(ys.len());
    for y in ys {
        let omega = omega_for(&rule, y, &mut rng);
        let base = PhasePoint::new(omega, 0.0, y.clone());
        let trace = trace_curve(phi, y, &base, t_grid)?;
        tubes.push(Tube {
            polyline: trace.points,
            delta,
        });
    }
    Ok(TubeFamily {
        tubes,
        provenance: TubeProvenance::PhaseCurves,
    })
}

/// The compression family of the planar-concentration example: curves with
/// base rule ω(y) = (0, −y₂), which all lie near the surface x₁ = t·x₂.
pub fn compression_family(
    phi: &PhaseFunction,
    ys: &[Vec<f64>],
    t_grid: &[f64],
    delta: f64,
) -> Result<TubeFamily> {
    curve_family(phi, ys, OmegaRule::Compression, t_grid, delta)
}

/// Straight tubes from the same y-lattice: direction (−y, 1)/|(−y, 1)| (the
/// line directions of the standard phase ⟨x,y⟩ + t|y|²/2) through seeded
/// random base points (ω, 0), spanning the given t extent.
pub fn straight_family_from_y_lattice(
    ys: &[Vec<f64>],
    t_extent: f64,
    omega_radius: f64,
    seed: u64,
    delta: f64,
) -> TubeFamily {
    let mut rng = crate::sample::rng(seed);
    let tubes = ys
        .iter()
        .map(|y| {
            let omega: Vec<f64> = (0..y.len())
                .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * omega_radius)
                .collect();
            // x(t) = ω − t·y, t ∈ [−extent, extent]
            let mut a: Vec<f64> = omega
                .iter()
                .zip(y)
                .map(|(o, yi)| o + t_extent * yi)
                .collect();
            a.push(-t_extent);
            let mut b: Vec<f64> = omega
                .iter()
                .zip(y)
                .map(|(o, yi)| o - t_extent * yi)
                .collect();
            b.push(t_extent);
            Tube {
                polyline: vec![a, b],
                delta,
            }
        })
        .collect();
    TubeFamily {
        tubes,
        provenance: TubeProvenance::StraightDirections,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::DEFAULT_EPSILON0;

    #[test]
    fn compression_curves_lie_on_surface() {
        let phi = PhaseFunction::parse(
            "x1*y1 + x2*y2 + t*y1*y2 + (t^2/2)*y1^2",
            3,
            DEFAULT_EPSILON0,
        )
        .unwrap();
        let ys = y_lattice(2, 5, 0.2);
        let t_grid: Vec<f64> = (0..17).map(|i| -0.2 + 0.025 * i as f64).collect();
        let fam = compression_family(&phi, &ys, &t_grid, 0.01).unwrap();
        assert_eq!(fam.tubes.len(), 25);
        for tube in &fam.tubes {
            for p in &tube.polyline {
                assert!((p[0] - p[2] * p[1]).abs() < 1e-10, "x₁ = t·x₂");
            }
        }
    }

    #[test]
    fn straight_family_directions() {
        let ys = y_lattice(2, 3, 0.25);
        let fam = straight_family_from_y_lattice(&ys, 0.25, 0.2, 7, 0.02);
        assert_eq!(fam.tubes.len(), 9);
        for (tube, y) in fam.tubes.iter().zip(&ys) {
            let a = &tube.polyline[0];
            let b = &tube.polyline[1];
            let dir: Vec<f64> = crate::linalg::sub(b, a);
            // direction proportional to (−y, 1)
            let t_span = dir[2];
            assert!((dir[0] + y[0] * t_span).abs() < 1e-12);
            assert!((dir[1] + y[1] * t_span).abs() < 1e-12);
        }
        // seeded: same seed, same family
        let again = straight_family_from_y_lattice(&ys, 0.25, 0.2, 7, 0.02);
        for (a, b) in fam.tubes.iter().zip(&again.tubes) {
            assert_eq!(a.polyline, b.polyline);
        }
    }
}
