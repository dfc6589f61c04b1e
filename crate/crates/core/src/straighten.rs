//! Straightening pipeline for translation-invariant phases satisfying
//! Bourgain's condition.
//!
//! With φ(x,t;y) = ⟨x,y⟩ + ψ(t;y), the y-Hessian proportionality
//! ∂_t²∇_y²ψ = c(t)·∂_t∇_y²ψ yields a scalar profile c(t) and a vector
//! profile A(t) = ∂_t²∂_yψ − c(t)∂_t∂_yψ. Solving B″ − cB′ + A = 0 and the
//! reparametrization α″ + c(α)(α′)² = 0 produces the diffeomorphism
//! κ(x,t) = (x + B(α(t)), α(t)) under which the phase takes the standard
//! form ⟨x,y⟩ + t·h(y) + q(y) + f(t).
//!
//! Stages report failures loudly: y-dependence of c or A above tolerance, a
//! proportionality defect (Bourgain's condition failing), α exiting the
//! profile window, or a degenerate Jacobian all abort the pipeline.

use serde::Serialize;

use crate::conditions::{
    check_h1, check_translation_invariant, phase_lattice, DEFAULT_TOL_H1, DEFAULT_TOL_TRANSLATION,
};
use crate::error::{Error, Result};
use crate::expr::{PhaseFunction, PhasePoint, Var};
use crate::interp::cubic_eval;
use crate::linalg::{self, Mat};
use crate::ode::integrate_adaptive;

/// Tolerance on the y-spread of c and A (exceeding it signals that the phase
/// is not in the Bourgain class).
pub const Y_SPREAD_TOL: f64 = 1e-6;

/// Local error target for the B and α integrations.
pub const ODE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StraightenParams {
    /// Working half-interval in t.
    pub t_max: f64,
    /// Grid spacing.
    pub dt: f64,
    /// The c/A/B profiles extend to ±t_max·profile_margin so that α(t) stays
    /// inside their domain.
    pub profile_margin: f64,
    /// Radius of the y sample ball.
    pub y_radius: f64,
    /// Lattice nodes per axis for the y samples.
    pub y_per_axis: usize,
    /// Pass threshold for the straightening residual.
    pub verify_tol: f64,
}

impl Default for StraightenParams {
    fn default() -> Self {
        StraightenParams {
            t_max: 0.1,
            dt: 1e-3,
            profile_margin: 1.5,
            y_radius: 0.2,
            y_per_axis: 3,
            verify_tol: 1e-6,
        }
    }
}

/// Uniform symmetric grid with an exact node at t = 0.
pub fn symmetric_grid(t_max: f64, dt: f64) -> Vec<f64> {
    let half = (t_max / dt).round() as i64;
    (-half..=half).map(|k| k as f64 * dt).collect()
}

// ── profiles ────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct ScalarProfile {
    pub ts: Vec<f64>,
    pub vals: Vec<f64>,
}

impl ScalarProfile {
    pub fn constant(value: f64, t_max: f64, dt: f64) -> Self {
        let ts = symmetric_grid(t_max, dt);
        let vals = vec![value; ts.len()];
        ScalarProfile { ts, vals }
    }

    pub fn eval(&self, t: f64) -> f64 {
        cubic_eval(&self.ts, &self.vals, t)
    }

    pub fn range(&self) -> (f64, f64) {
        (self.ts[0], self.ts[self.ts.len() - 1])
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VectorProfile {
    pub ts: Vec<f64>,
    /// Per-component node values: `comps[c][k]`.
    pub comps: Vec<Vec<f64>>,
    /// Node values of the first derivative, when the producer integrates it.
    pub derivs: Option<Vec<Vec<f64>>>,
}

impl VectorProfile {
    pub fn constant(value: &[f64], t_max: f64, dt: f64) -> Self {
        let ts = symmetric_grid(t_max, dt);
        let comps = value.iter().map(|&v| vec![v; ts.len()]).collect();
        VectorProfile {
            ts,
            comps,
            derivs: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.comps
            .iter()
            .map(|c| cubic_eval(&self.ts, c, t))
            .collect()
    }
}

/// The reparametrization α with α(0) = 0, α′(0) = 1, α′ > 0.
#[derive(Debug, Clone, Serialize)]
pub struct Reparam {
    pub ts: Vec<f64>,
    pub alpha: Vec<f64>,
    pub alpha_prime: Vec<f64>,
}

impl Reparam {
    pub fn identity(t_max: f64, dt: f64) -> Self {
        let ts = symmetric_grid(t_max, dt);
        Reparam {
            alpha: ts.clone(),
            alpha_prime: vec![1.0; ts.len()],
            ts,
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        cubic_eval(&self.ts, &self.alpha, t)
    }

    pub fn eval_prime(&self, t: f64) -> f64 {
        cubic_eval(&self.ts, &self.alpha_prime, t)
    }

    /// Invert the (strictly increasing) reparametrization: find t with
    /// α(t) = s, by bisection refined with Newton.
    pub fn invert(&self, s: f64) -> Result<f64> {
        let (a0, a1) = (self.alpha[0], self.alpha[self.alpha.len() - 1]);
        if s < a0 - 1e-12 || s > a1 + 1e-12 {
            return Err(Error::numerical(format!(
                "α⁻¹({s}) outside the computed range [{a0}, {a1}]"
            )));
        }
        let mut lo = self.ts[0];
        let mut hi = self.ts[self.ts.len() - 1];
        let mut t = 0.5 * (lo + hi);
        for _ in 0..200 {
            let v = self.eval(t) - s;
            if v.abs() < 1e-14 {
                return Ok(t);
            }
            if v > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let dp = self.eval_prime(t);
            let newton = t - v / dp;
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Ok(t)
    }
}

// ── stage 1: extract c(t) ───────────────────────────────────────────────

fn psi_point(phi: &PhaseFunction, t: f64, y: &[f64]) -> PhasePoint {
    PhasePoint::new(vec![0.0; phi.d() - 1], t, y.to_vec())
}

/// ∂_t∇_y²ψ and ∂_t²∇_y²ψ at (t; y).
fn hessian_t_derivatives(phi: &PhaseFunction, t: f64, y: &[f64]) -> Result<(Mat, Mat)> {
    let m = phi.d() - 1;
    let pt = psi_point(phi, t, y);
    let mut m1 = vec![vec![0.0; m]; m];
    let mut m2 = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in i..m {
            let v1 = phi.eval_derivative(&[Var::T, Var::Y(i), Var::Y(j)], &pt)?;
            let v2 = phi.eval_derivative(&[Var::T, Var::T, Var::Y(i), Var::Y(j)], &pt)?;
            m1[i][j] = v1;
            m1[j][i] = v1;
            m2[i][j] = v2;
            m2[j][i] = v2;
        }
    }
    Ok((m1, m2))
}

fn y_samples(phi: &PhaseFunction, params: &StraightenParams) -> Vec<Vec<f64>> {
    crate::sample::ball_lattice(phi.d() - 1, params.y_per_axis, params.y_radius)
}

/// Extract the proportionality profile c(t) with its y-independence spread.
///
/// Per (t, y) the scalar is the Frobenius projection
/// c = ⟨∂_t²∇_y²ψ, ∂_t∇_y²ψ⟩_F / ‖∂_t∇_y²ψ‖_F²; the matrices must actually be
/// proportional (normalized defect < 1e-6) and c must not vary with y.
pub fn extract_c(phi: &PhaseFunction, params: &StraightenParams) -> Result<(ScalarProfile, f64)> {
    let ts = symmetric_grid(params.t_max * params.profile_margin, params.dt);
    let ys = y_samples(phi, params);
    let mut vals = Vec::with_capacity(ts.len());
    let mut worst_spread = 0.0_f64;
    for &t in &ts {
        let mut c_lo = f64::INFINITY;
        let mut c_hi = f64::NEG_INFINITY;
        let mut c_sum = 0.0;
        for y in &ys {
            let (m1, m2) = hessian_t_derivatives(phi, t, y)?;
            let sv = linalg::singular_values(&m1);
            if sv[sv.len() - 1] <= 1e-10 * sv[0].max(1e-300) {
                return Err(Error::numerical(format!(
                    "singular ∂_t∇_y²ψ at t={t}, y={y:?} (rank below d−1)"
                )));
            }
            let n1 = linalg::frobenius(&m1);
            let n2 = linalg::frobenius(&m2);
            let c = linalg::frobenius_inner(&m2, &m1) / (n1 * n1);
            if n2 > 1e-12 {
                let mut defect = 0.0;
                for i in 0..m1.len() {
                    for j in 0..m1.len() {
                        let v = m2[i][j] - c * m1[i][j];
                        defect += v * v;
                    }
                }
                let rel = defect.sqrt() / n2;
                if rel > Y_SPREAD_TOL {
                    return Err(Error::precondition(format!(
                        "∂_t²∇_y²ψ is not proportional to ∂_t∇_y²ψ at t={t}, y={y:?} \
                         (defect {rel:.3e}); Bourgain's condition fails"
                    )));
                }
            }
            c_lo = c_lo.min(c);
            c_hi = c_hi.max(c);
            c_sum += c;
        }
        let spread = c_hi - c_lo;
        if spread > Y_SPREAD_TOL {
            return Err(Error::precondition(format!(
                "c(t;y) varies with y at t={t} (spread {spread:.3e})"
            )));
        }
        worst_spread = worst_spread.max(spread);
        vals.push(c_sum / ys.len() as f64);
    }
    Ok((ScalarProfile { ts, vals }, worst_spread))
}

// ── stage 2: extract A(t) ───────────────────────────────────────────────

/// A(t) = ∂_t²∂_yψ − c(t)·∂_t∂_yψ, with its y-independence spread.
pub fn extract_a(
    phi: &PhaseFunction,
    c: &ScalarProfile,
    params: &StraightenParams,
) -> Result<(VectorProfile, f64)> {
    let m = phi.d() - 1;
    let ts = c.ts.clone();
    let ys = y_samples(phi, params);
    let mut comps = vec![Vec::with_capacity(ts.len()); m];
    let mut worst_spread = 0.0_f64;
    for (k, &t) in ts.iter().enumerate() {
        let ct = c.vals[k];
        let mut lo = vec![f64::INFINITY; m];
        let mut hi = vec![f64::NEG_INFINITY; m];
        let mut sum = vec![0.0; m];
        for y in &ys {
            let pt = psi_point(phi, t, y);
            for i in 0..m {
                let d1 = phi.eval_derivative(&[Var::T, Var::Y(i)], &pt)?;
                let d2 = phi.eval_derivative(&[Var::T, Var::T, Var::Y(i)], &pt)?;
                let a = d2 - ct * d1;
                lo[i] = lo[i].min(a);
                hi[i] = hi[i].max(a);
                sum[i] += a;
            }
        }
        for i in 0..m {
            let spread = hi[i] - lo[i];
            if spread > Y_SPREAD_TOL {
                return Err(Error::precondition(format!(
                    "A(t;y) varies with y at t={t}, component {i} (spread {spread:.3e})"
                )));
            }
            worst_spread = worst_spread.max(spread);
            comps[i].push(sum[i] / ys.len() as f64);
        }
    }
    Ok((
        VectorProfile {
            ts,
            comps,
            derivs: None,
        },
        worst_spread,
    ))
}

// ── stage 3: solve B″ − c(t)B′ + A(t) = 0, B(0) = B′(0) = 0 ─────────────

pub fn solve_b(
    c: &ScalarProfile,
    a: &VectorProfile,
    _params: &StraightenParams,
) -> Result<VectorProfile> {
    let m = a.dim();
    let ts = a.ts.clone();
    let zero_index = nearest_zero_index(&ts);
    let rhs = |t: f64, state: &[f64]| -> Vec<f64> {
        // state = (B, B′)
        let ct = c.eval(t);
        let at = a.eval(t);
        let mut out = Vec::with_capacity(2 * m);
        out.extend_from_slice(&state[m..]);
        for i in 0..m {
            out.push(ct * state[m + i] - at[i]);
        }
        out
    };
    let mut comps = vec![vec![0.0; ts.len()]; m];
    let mut derivs = vec![vec![0.0; ts.len()]; m];
    for dir in [1i64, -1] {
        let mut state = vec![0.0; 2 * m];
        let mut k = zero_index as i64;
        loop {
            let next = k + dir;
            if next < 0 || next as usize >= ts.len() {
                break;
            }
            state = integrate_adaptive(&rhs, ts[k as usize], &state, ts[next as usize], ODE_TOL)?;
            for i in 0..m {
                comps[i][next as usize] = state[i];
                derivs[i][next as usize] = state[m + i];
            }
            k = next;
        }
    }
    Ok(VectorProfile {
        ts,
        comps,
        derivs: Some(derivs),
    })
}

fn nearest_zero_index(ts: &[f64]) -> usize {
    let mut best = 0;
    for (i, &t) in ts.iter().enumerate() {
        if t.abs() < ts[best].abs() {
            best = i;
        }
    }
    best
}

// ── stage 4: solve α″ + c(α)(α′)² = 0, α(0) = 0, α′(0) = 1 ──────────────

pub fn solve_alpha(c: &ScalarProfile, params: &StraightenParams) -> Result<Reparam> {
    let ts = symmetric_grid(params.t_max, params.dt);
    let zero_index = nearest_zero_index(&ts);
    let (c_lo, c_hi) = c.range();
    let rhs = |_t: f64, state: &[f64]| -> Vec<f64> {
        // state = (α, α′); first-order system X₁′ = X₂, X₂′ = −c(X₁)X₂²
        vec![state[1], -c.eval(state[0]) * state[1] * state[1]]
    };
    let mut alpha = vec![0.0; ts.len()];
    let mut alpha_prime = vec![0.0; ts.len()];
    alpha_prime[zero_index] = 1.0;
    for dir in [1i64, -1] {
        let mut state = vec![0.0, 1.0];
        let mut k = zero_index as i64;
        loop {
            let next = k + dir;
            if next < 0 || next as usize >= ts.len() {
                break;
            }
            state = integrate_adaptive(&rhs, ts[k as usize], &state, ts[next as usize], ODE_TOL)?;
            if state[0] < c_lo || state[0] > c_hi {
                return Err(Error::numerical(format!(
                    "α({}) = {} exited the c profile window [{c_lo}, {c_hi}]",
                    ts[next as usize], state[0]
                )));
            }
            if state[1] <= 1e-6 {
                return Err(Error::numerical(format!(
                    "α′({}) = {} degenerated (≤ 1e-6)",
                    ts[next as usize], state[1]
                )));
            }
            alpha[next as usize] = state[0];
            alpha_prime[next as usize] = state[1];
            k = next;
        }
    }
    Ok(Reparam {
        ts,
        alpha,
        alpha_prime,
    })
}

// ── stage 5: assemble κ ─────────────────────────────────────────────────

/// The straightening diffeomorphism κ(x,t) = (x + B(α(t)), α(t)).
#[derive(Debug, Clone)]
pub struct Kappa {
    pub b: VectorProfile,
    pub alpha: Reparam,
}

impl Kappa {
    /// κ = identity (B ≡ 0, α = id); the negative-control transform.
    pub fn identity(dim: usize, t_max: f64, dt: f64) -> Self {
        Kappa {
            b: VectorProfile::constant(&vec![0.0; dim], t_max, dt),
            alpha: Reparam::identity(t_max, dt),
        }
    }

    /// Apply κ: returns the (x, t) image.
    pub fn eval(&self, x: &[f64], t: f64) -> (Vec<f64>, f64) {
        let s = self.alpha.eval(t);
        let b = self.b.eval(s);
        (linalg::add(x, &b), s)
    }

    /// Jacobian determinant of κ at t (equals α′(t)).
    pub fn jacobian_det(&self, t: f64) -> f64 {
        self.alpha.eval_prime(t)
    }

    /// Invert κ: given the image (u, s), recover (x, t).
    pub fn inverse(&self, u: &[f64], s: f64) -> Result<(Vec<f64>, f64)> {
        let t = self.alpha.invert(s)?;
        let b = self.b.eval(s);
        Ok((linalg::sub(u, &b), t))
    }
}

/// Build κ from the profiles, checking that the Jacobian determinant α′
/// stays away from zero on the whole grid.
pub fn assemble_kappa(b: VectorProfile, alpha: Reparam) -> Result<Kappa> {
    if let Some(bad) = alpha.alpha_prime.iter().find(|&&v| v.abs() <= 1e-6) {
        return Err(Error::numerical(format!(
            "κ is not a diffeomorphism: α′ reached {bad}"
        )));
    }
    Ok(Kappa { b, alpha })
}

// ── stage 6: verification and recovery ──────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// max ‖second t-difference of ∂_yΦ‖ / dt² over the grid × y samples.
    pub straighten_residual: f64,
    /// max |φ(κ(x,t);y) − φ(κ(0,t);y) − ⟨x,y⟩|.
    pub x_linearity_residual: f64,
}

/// Second-difference straightness check: with Φ(t;y) = φ(κ(0,t);y), the
/// map t ↦ ∂_yΦ(t;y) must be affine.
pub fn verify_straightened(
    phi: &PhaseFunction,
    kappa: &Kappa,
    params: &StraightenParams,
) -> Result<VerifyReport> {
    let m = phi.d() - 1;
    let ts = &kappa.alpha.ts;
    let dt = ts[1] - ts[0];
    let ys = y_samples(phi, params);
    let mut straighten_residual = 0.0_f64;
    for y in &ys {
        let grads: Vec<Vec<f64>> = ts
            .iter()
            .map(|&t| {
                let (bx, s) = kappa.eval(&vec![0.0; m], t);
                phi.grad_y(&PhasePoint::new(bx, s, y.clone()))
            })
            .collect::<std::result::Result<_, _>>()?;
        for k in 1..ts.len() - 1 {
            let mut acc = 0.0;
            for i in 0..m {
                let second = grads[k + 1][i] - 2.0 * grads[k][i] + grads[k - 1][i];
                acc += second * second;
            }
            straighten_residual = straighten_residual.max(acc.sqrt() / (dt * dt));
        }
    }

    // translation structure must survive κ: φ(κ(x,t);y) − φ(κ(0,t);y) = ⟨x,y⟩
    let mut x_linearity_residual = 0.0_f64;
    let x_probe: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let mut x = vec![0.0; m];
            x[i] = 0.1;
            x
        })
        .chain(std::iter::once(vec![0.05; m]))
        .collect();
    for y in &ys {
        for k in (0..ts.len()).step_by(ts.len() / 16 + 1) {
            let (b0, s) = kappa.eval(&vec![0.0; m], ts[k]);
            let base = phi.eval(&PhasePoint::new(b0, s, y.clone()))?;
            for x in &x_probe {
                let (bx, s2) = kappa.eval(x, ts[k]);
                let v = phi.eval(&PhasePoint::new(bx, s2, y.clone()))?;
                let expect = base + linalg::dot(x, y);
                x_linearity_residual = x_linearity_residual.max((v - expect).abs());
            }
        }
    }
    Ok(VerifyReport {
        straighten_residual,
        x_linearity_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct HqfSamples {
    /// y lattice used for h and q.
    pub ys: Vec<Vec<f64>>,
    pub h: Vec<f64>,
    pub q: Vec<f64>,
    /// t grid used for f.
    pub ts: Vec<f64>,
    pub f: Vec<f64>,
    /// |det ∇²h(0)| via central differences of the recovered h.
    pub h_hessian_det: f64,
    /// max |Φ(t;y) − (t·h(y) + q(y) + f(t) + Φ(0;0))| over the grid.
    pub reconstruction_residual: f64,
}

fn phi_straightened(phi: &PhaseFunction, kappa: &Kappa, t: f64, y: &[f64]) -> Result<f64> {
    let m = phi.d() - 1;
    let (bx, s) = kappa.eval(&vec![0.0; m], t);
    Ok(phi.eval(&PhasePoint::new(bx, s, y.to_vec()))?)
}

/// d/dt Φ(t;y) at t = 0 by Richardson-extrapolated central differences.
fn dt_phi_at_zero(phi: &PhaseFunction, kappa: &Kappa, y: &[f64]) -> Result<f64> {
    let h = 1e-4;
    let d = |step: f64| -> Result<f64> {
        Ok(
            (phi_straightened(phi, kappa, step, y)? - phi_straightened(phi, kappa, -step, y)?)
                / (2.0 * step),
        )
    };
    let coarse = d(h)?;
    let fine = d(h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Recover h(y), q(y), f(t) from the straightened phase and verify the
/// reconstruction Φ(t;y) = t·h(y) + q(y) + f(t) + Φ(0;0) on the grid.
pub fn recover_hqf(
    phi: &PhaseFunction,
    kappa: &Kappa,
    params: &StraightenParams,
) -> Result<HqfSamples> {
    let m = phi.d() - 1;
    let ys = y_samples(phi, params);
    let y0 = vec![0.0; m];
    let phi00 = phi_straightened(phi, kappa, 0.0, &y0)?;
    let dt_at_y0 = dt_phi_at_zero(phi, kappa, &y0)?;

    let h_of = |y: &[f64]| -> Result<f64> { Ok(dt_phi_at_zero(phi, kappa, y)? - dt_at_y0) };

    let mut h = Vec::with_capacity(ys.len());
    let mut q = Vec::with_capacity(ys.len());
    for y in &ys {
        h.push(h_of(y)?);
        q.push(phi_straightened(phi, kappa, 0.0, y)? - phi00);
    }
    let ts = kappa.alpha.ts.clone();
    let mut f = Vec::with_capacity(ts.len());
    for &t in &ts {
        f.push(phi_straightened(phi, kappa, t, &y0)? - phi00);
    }

    // reconstruction check on the full grid
    let mut reconstruction_residual = 0.0_f64;
    for (yi, y) in ys.iter().enumerate() {
        for (k, &t) in ts.iter().enumerate() {
            let direct = phi_straightened(phi, kappa, t, y)?;
            let model = t * h[yi] + q[yi] + f[k] + phi00;
            reconstruction_residual = reconstruction_residual.max((direct - model).abs());
        }
    }
    if reconstruction_residual > 1e-6 {
        return Err(Error::numerical(format!(
            "recovered h/q/f do not reconstruct the straightened phase \
             (residual {reconstruction_residual:.3e})"
        )));
    }

    // non-degeneracy of ∇²h at y = 0 via central second differences
    let hy = 1e-2;
    let mut hess = vec![vec![0.0; m]; m];
    let h00 = h_of(&y0)?;
    for i in 0..m {
        for j in i..m {
            let val = if i == j {
                let mut yp = y0.clone();
                yp[i] = hy;
                let mut ym = y0.clone();
                ym[i] = -hy;
                (h_of(&yp)? - 2.0 * h00 + h_of(&ym)?) / (hy * hy)
            } else {
                let mut ypp = y0.clone();
                ypp[i] = hy;
                ypp[j] = hy;
                let mut ypm = y0.clone();
                ypm[i] = hy;
                ypm[j] = -hy;
                let mut ymp = y0.clone();
                ymp[i] = -hy;
                ymp[j] = hy;
                let mut ymm = y0.clone();
                ymm[i] = -hy;
                ymm[j] = -hy;
                (h_of(&ypp)? - h_of(&ypm)? - h_of(&ymp)? + h_of(&ymm)?) / (4.0 * hy * hy)
            };
            hess[i][j] = val;
            hess[j][i] = val;
        }
    }
    let h_hessian_det = linalg::det(&hess).abs();

    Ok(HqfSamples {
        ys,
        h,
        q,
        ts,
        f,
        h_hessian_det,
        reconstruction_residual,
    })
}

// ── driver ──────────────────────────────────────────────────────────────

#[derive(Debug, Clone, Serialize)]
pub struct StraighteningResult {
    pub params: StraightenParams,
    pub c: ScalarProfile,
    pub a: VectorProfile,
    pub b: VectorProfile,
    pub alpha: Reparam,
    pub c_y_spread: f64,
    pub a_y_spread: f64,
    pub verify: VerifyReport,
    pub hqf: HqfSamples,
    pub pass: bool,
    #[serde(skip)]
    pub kappa: Kappa,
}

/// Run the full pipeline. The phase must pass the translation-invariance and
/// H1 checks; failures of proportionality or y-independence abort with a
/// diagnostic (Bourgain's condition does not hold).
pub fn straighten_phase(
    phi: &PhaseFunction,
    params: &StraightenParams,
) -> Result<StraighteningResult> {
    let lattice = phase_lattice(phi, 5);
    let ti = check_translation_invariant(phi, &lattice, DEFAULT_TOL_TRANSLATION)?;
    if !ti.pass {
        return Err(Error::precondition(format!(
            "phase is not translation-invariant (residual {:.3e})",
            ti.max_residual
        )));
    }
    let h1 = check_h1(phi, &lattice, DEFAULT_TOL_H1)?;
    if !h1.pass {
        return Err(Error::precondition(format!(
            "phase fails the rank condition H1 (residual {:.3e})",
            h1.max_residual
        )));
    }

    let (c, c_y_spread) = extract_c(phi, params)?;
    let (a, a_y_spread) = extract_a(phi, &c, params)?;
    let b = solve_b(&c, &a, params)?;
    let alpha = solve_alpha(&c, params)?;
    let kappa = assemble_kappa(b.clone(), alpha.clone())?;
    let verify = verify_straightened(phi, &kappa, params)?;
    let hqf = recover_hqf(phi, &kappa, params)?;

    let pass = verify.straighten_residual < params.verify_tol
        && verify.x_linearity_residual < 1e-10
        && hqf.h_hessian_det > 1e-8;

    Ok(StraighteningResult {
        params: *params,
        c,
        a,
        b,
        alpha,
        c_y_spread,
        a_y_spread,
        verify,
        hqf,
        pass,
        kappa,
    })
}
