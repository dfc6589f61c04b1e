//! Exact geometry of the three constant-curvature local models.
//!
//! Points live in ambient coordinates: ℝ^d for the Euclidean model, the unit
//! sphere Σxᵢ² = 1 in ℝ^{d+1}, and the upper hyperboloid
//! x₁²+⋯+x_d²−x_{d+1}² = −1, x_{d+1} > 0 in Minkowski ℝ^{d,1}. Geodesics,
//! distance, exponential map, and parallel transport all have closed forms in
//! these coordinates; a projected RK4 integrator for the geodesic equation is
//! provided as an independent numerical route.

use crate::error::{Error, Result};
use crate::linalg::{self, axpy, scale};

/// Construction tolerance for quadric and tangency invariants.
pub const CONSTRUCT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Euclidean,
    Sphere,
    Hyperbolic,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Euclidean => "euclidean",
            ModelKind::Sphere => "sphere",
            ModelKind::Hyperbolic => "hyperbolic",
        }
    }
}

/// A space form of curvature +1, −1, or 0 and dimension d ≥ 2. Non-unit
/// curvature is handled by the caller rescaling the metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceForm {
    pub kind: ModelKind,
    pub d: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SFPoint {
    pub form: SpaceForm,
    pub coords: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SFTangent {
    pub base: SFPoint,
    pub vector: Vec<f64>,
}

/// A unit-speed geodesic through `base` with direction `dir`.
#[derive(Debug, Clone)]
pub struct SFGeodesic {
    pub base: SFPoint,
    pub dir: SFTangent,
}

impl SpaceForm {
    pub fn new(kind: ModelKind, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::geometry(format!("dimension must be ≥ 2, got {d}")));
        }
        Ok(SpaceForm { kind, d })
    }

    pub fn euclidean(d: usize) -> Result<Self> {
        Self::new(ModelKind::Euclidean, d)
    }

    pub fn sphere(d: usize) -> Result<Self> {
        Self::new(ModelKind::Sphere, d)
    }

    pub fn hyperbolic(d: usize) -> Result<Self> {
        Self::new(ModelKind::Hyperbolic, d)
    }

    pub fn ambient_dim(&self) -> usize {
        match self.kind {
            ModelKind::Euclidean => self.d,
            _ => self.d + 1,
        }
    }

    /// Ambient metric pairing: Euclidean dot on ℝ^d and the sphere, the
    /// Minkowski form v₁w₁+⋯+v_dw_d − v_{d+1}w_{d+1} on the hyperboloid.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        match self.kind {
            ModelKind::Euclidean | ModelKind::Sphere => linalg::dot(a, b),
            ModelKind::Hyperbolic => {
                let n = a.len();
                linalg::dot(&a[..n - 1], &b[..n - 1]) - a[n - 1] * b[n - 1]
            }
        }
    }

    /// Residual of the model quadric at ambient coordinates.
    pub fn quadric_residual(&self, coords: &[f64]) -> f64 {
        match self.kind {
            ModelKind::Euclidean => 0.0,
            ModelKind::Sphere => (linalg::dot(coords, coords) - 1.0).abs(),
            ModelKind::Hyperbolic => (self.inner(coords, coords) + 1.0).abs(),
        }
    }

    /// Validate ambient coordinates as a model point.
    pub fn point(&self, coords: Vec<f64>) -> Result<SFPoint> {
        if coords.len() != self.ambient_dim() {
            return Err(Error::geometry(format!(
                "expected {} ambient coordinates, got {}",
                self.ambient_dim(),
                coords.len()
            )));
        }
        let res = self.quadric_residual(&coords);
        if res > CONSTRUCT_TOL {
            return Err(Error::geometry(format!(
                "coordinates violate the {} quadric by {res:.3e}",
                self.kind.name()
            )));
        }
        if self.kind == ModelKind::Hyperbolic && coords[self.d] <= 0.0 {
            return Err(Error::geometry(
                "hyperboloid points must lie on the upper sheet (x_{d+1} > 0)",
            ));
        }
        Ok(SFPoint {
            form: *self,
            coords,
        })
    }

    /// The chart center: the origin, (0,…,0,−1) on the sphere, (0,…,0,1) on
    /// the hyperboloid.
    pub fn chart_center(&self) -> SFPoint {
        let mut coords = vec![0.0; self.ambient_dim()];
        match self.kind {
            ModelKind::Euclidean => {}
            ModelKind::Sphere => coords[self.d] = -1.0,
            ModelKind::Hyperbolic => coords[self.d] = 1.0,
        }
        SFPoint {
            form: *self,
            coords,
        }
    }

    /// Validate a tangent vector at `base` (metric-orthogonal to the point on
    /// the curved models).
    pub fn tangent(&self, base: &SFPoint, vector: Vec<f64>) -> Result<SFTangent> {
        if vector.len() != self.ambient_dim() {
            return Err(Error::geometry("tangent vector has wrong ambient length"));
        }
        if self.kind != ModelKind::Euclidean {
            let pairing = self.inner(&vector, &base.coords);
            if pairing.abs() > CONSTRUCT_TOL * (1.0 + linalg::norm(&vector)) {
                return Err(Error::geometry(format!(
                    "vector is not tangent: ⟨v,p⟩ = {pairing:.3e}"
                )));
            }
        }
        Ok(SFTangent {
            base: base.clone(),
            vector,
        })
    }

    /// Project an ambient vector onto the tangent space at `base`.
    pub fn project_tangent(&self, base: &SFPoint, vector: &[f64]) -> SFTangent {
        let mut v = vector.to_vec();
        match self.kind {
            ModelKind::Euclidean => {}
            ModelKind::Sphere => {
                let c = linalg::dot(&v, &base.coords);
                axpy(&mut v, -c, &base.coords);
            }
            ModelKind::Hyperbolic => {
                // ⟨p,p⟩_M = −1, so the projection adds ⟨v,p⟩_M · p
                let c = self.inner(&v, &base.coords);
                axpy(&mut v, c, &base.coords);
            }
        }
        SFTangent {
            base: base.clone(),
            vector: v,
        }
    }

    /// Metric norm of a tangent vector (tangents on the hyperboloid are
    /// spacelike, so the Minkowski form is nonnegative there).
    pub fn tangent_norm(&self, v: &SFTangent) -> f64 {
        self.inner(&v.vector, &v.vector).max(0.0).sqrt()
    }

    /// Exponential map.
    pub fn exp_map(&self, p: &SFPoint, v: &SFTangent) -> Result<SFPoint> {
        if v.base != *p {
            return Err(Error::geometry("tangent vector is not based at p"));
        }
        let n = self.tangent_norm(v);
        let coords = match self.kind {
            ModelKind::Euclidean => linalg::add(&p.coords, &v.vector),
            ModelKind::Sphere => {
                if n == 0.0 {
                    p.coords.clone()
                } else {
                    let mut out = scale(&p.coords, n.cos());
                    axpy(&mut out, n.sin() / n, &v.vector);
                    out
                }
            }
            ModelKind::Hyperbolic => {
                if n == 0.0 {
                    p.coords.clone()
                } else {
                    let mut out = scale(&p.coords, n.cosh());
                    axpy(&mut out, n.sinh() / n, &v.vector);
                    out
                }
            }
        };
        Ok(SFPoint {
            form: *self,
            coords,
        })
    }

    /// Distance between two points of the same model.
    pub fn distance(&self, p: &SFPoint, q: &SFPoint) -> Result<f64> {
        if p.form != *self || q.form != *self {
            return Err(Error::geometry("distance requires points of this model"));
        }
        match self.kind {
            ModelKind::Euclidean => Ok(linalg::dist(&p.coords, &q.coords)),
            ModelKind::Sphere => {
                let c = linalg::dot(&p.coords, &q.coords);
                if c.abs() > 1.0 + 1e-9 {
                    return Err(Error::geometry(format!(
                        "inner product {c} outside [-1,1] beyond slack"
                    )));
                }
                Ok(c.clamp(-1.0, 1.0).acos())
            }
            ModelKind::Hyperbolic => {
                let m = -self.inner(&p.coords, &q.coords);
                if m < 1.0 - 1e-9 {
                    return Err(Error::geometry(format!(
                        "Minkowski pairing {m} below 1 beyond slack"
                    )));
                }
                Ok(m.max(1.0).acosh())
            }
        }
    }

    /// Build a unit-speed geodesic; the direction is normalized.
    pub fn geodesic(&self, base: SFPoint, direction: SFTangent) -> Result<SFGeodesic> {
        if direction.base != base {
            return Err(Error::geometry("direction must be based at the base point"));
        }
        let n = self.tangent_norm(&direction);
        if n < 1e-14 {
            return Err(Error::geometry("geodesic direction must be nonzero"));
        }
        let dir = SFTangent {
            base: base.clone(),
            vector: scale(&direction.vector, 1.0 / n),
        };
        Ok(SFGeodesic { base, dir })
    }

    /// Evaluate a geodesic at arclength `s` (|s| < π on the sphere).
    pub fn geodesic_eval(&self, geo: &SFGeodesic, s: f64) -> Result<SFPoint> {
        if self.kind == ModelKind::Sphere && s.abs() >= std::f64::consts::PI {
            return Err(Error::geometry(format!(
                "arclength |{s}| exceeds the injectivity guard π on the sphere"
            )));
        }
        let v = SFTangent {
            base: geo.base.clone(),
            vector: scale(&geo.dir.vector, s),
        };
        self.exp_map(&geo.base, &v)
    }

    /// Velocity γ′(s) of a unit-speed geodesic.
    pub fn geodesic_velocity(&self, geo: &SFGeodesic, s: f64) -> Result<SFTangent> {
        let at = self.geodesic_eval(geo, s)?;
        let vector = match self.kind {
            ModelKind::Euclidean => geo.dir.vector.clone(),
            ModelKind::Sphere => {
                let mut v = scale(&geo.base.coords, -s.sin());
                axpy(&mut v, s.cos(), &geo.dir.vector);
                v
            }
            ModelKind::Hyperbolic => {
                let mut v = scale(&geo.base.coords, s.sinh());
                axpy(&mut v, s.cosh(), &geo.dir.vector);
                v
            }
        };
        Ok(SFTangent { base: at, vector })
    }

    /// Parallel transport of `v` (tangent at geo(0)) to geo(s).
    ///
    /// The component along the geodesic direction rides the rotating/boosting
    /// frame; the orthogonal complement is carried unchanged in ambient
    /// coordinates, which keeps it tangent along the whole geodesic.
    pub fn parallel_transport(&self, geo: &SFGeodesic, v: &SFTangent, s: f64) -> Result<SFTangent> {
        if v.base != geo.base {
            return Err(Error::geometry("vector must be tangent at geo(0)"));
        }
        let along = self.inner(&v.vector, &geo.dir.vector);
        let mut ortho = v.vector.clone();
        axpy(&mut ortho, -along, &geo.dir.vector);
        let vel = self.geodesic_velocity(geo, s)?;
        let at = vel.base.clone();
        let mut out = scale(&vel.vector, along);
        axpy(&mut out, 1.0, &ortho);
        Ok(SFTangent {
            base: at,
            vector: out,
        })
    }

    /// Exponential image of the lattice {Σᵢ aᵢ·basisᵢ} — a k-locally geodesic
    /// submanifold sample when the basis is linearly independent.
    pub fn geodesic_submanifold_sample(
        &self,
        p: &SFPoint,
        basis: &[SFTangent],
        lattice: &[Vec<f64>],
    ) -> Result<Vec<SFPoint>> {
        let k = basis.len();
        if k == 0 || k >= self.d {
            return Err(Error::geometry(format!(
                "basis size must satisfy 1 ≤ k < d, got k={k}"
            )));
        }
        for b in basis {
            if b.base != *p {
                return Err(Error::geometry("basis vectors must be tangent at p"));
            }
        }
        // Gram determinant in the model metric detects dependence
        let mut gram = vec![vec![0.0; k]; k];
        for i in 0..k {
            for j in 0..k {
                gram[i][j] = self.inner(&basis[i].vector, &basis[j].vector);
            }
        }
        let scale_ref: f64 = (0..k).map(|i| gram[i][i]).product();
        if linalg::det(&gram).abs() <= 1e-12 * scale_ref.max(1e-30) {
            return Err(Error::geometry("basis vectors are linearly dependent"));
        }
        let mut cloud = Vec::with_capacity(lattice.len());
        for a in lattice {
            if a.len() != k {
                return Err(Error::geometry("lattice point has wrong arity"));
            }
            let mut vec = vec![0.0; self.ambient_dim()];
            for (ai, b) in a.iter().zip(basis) {
                axpy(&mut vec, *ai, &b.vector);
            }
            let tangent = SFTangent {
                base: p.clone(),
                vector: vec,
            };
            if self.kind == ModelKind::Sphere && self.tangent_norm(&tangent) >= std::f64::consts::PI
            {
                return Err(Error::geometry(
                    "lattice point exceeds the injectivity guard π on the sphere",
                ));
            }
            cloud.push(self.exp_map(p, &tangent)?);
        }
        Ok(cloud)
    }

    /// Deterministic orthonormal tangent frame at `p` (Gram–Schmidt over the
    /// ambient axes in the model metric).
    pub fn tangent_frame(&self, p: &SFPoint) -> Vec<SFTangent> {
        let ambient = self.ambient_dim();
        let mut frame: Vec<Vec<f64>> = Vec::with_capacity(self.d);
        for axis in 0..ambient {
            if frame.len() == self.d {
                break;
            }
            let mut e = vec![0.0; ambient];
            e[axis] = 1.0;
            let mut v = self.project_tangent(p, &e).vector;
            for f in &frame {
                let c = self.inner(&v, f);
                axpy(&mut v, -c, f);
            }
            let n = self.inner(&v, &v).max(0.0).sqrt();
            if n > 1e-8 {
                frame.push(scale(&v, 1.0 / n));
            }
        }
        frame
            .into_iter()
            .map(|vector| SFTangent {
                base: p.clone(),
                vector,
            })
            .collect()
    }

    /// Project ambient coordinates back onto the quadric (and the velocity
    /// back onto the tangent space); used by the geodesic ODE integrator.
    fn project_state(&self, x: &mut [f64], v: &mut [f64]) {
        match self.kind {
            ModelKind::Euclidean => {}
            ModelKind::Sphere => {
                let n = linalg::norm(x);
                for xi in x.iter_mut() {
                    *xi /= n;
                }
                let c = linalg::dot(v, x);
                for (vi, xi) in v.iter_mut().zip(x.iter()) {
                    *vi -= c * xi;
                }
            }
            ModelKind::Hyperbolic => {
                let q = -self.inner(x, x);
                let n = q.max(f64::MIN_POSITIVE).sqrt();
                for xi in x.iter_mut() {
                    *xi /= n;
                }
                let c = self.inner(v, x);
                let xc = x.to_vec();
                axpy(v, c, &xc);
            }
        }
    }

    /// Sample a geodesic by integrating the second-order ambient ODE
    /// (x″ = −⟨x′,x′⟩x on the sphere, x″ = ⟨x′,x′⟩_M x on the hyperboloid,
    /// x″ = 0 in Euclidean space) with fixed-step RK4 and per-step projection
    /// onto the quadric.
    ///
    /// This is an independent route from the closed forms; `s_values` must be
    /// sorted ascending.
    pub fn geodesic_ode_samples(&self, geo: &SFGeodesic, s_values: &[f64]) -> Result<Vec<SFPoint>> {
        if s_values.iter().any(|s| !s.is_finite()) {
            return Err(Error::geometry("arclength samples must be finite"));
        }
        let ambient = self.ambient_dim();
        let form = *self;
        let f = move |_s: f64, state: &[f64]| -> Vec<f64> {
            let (x, v) = state.split_at(ambient);
            let mut out = Vec::with_capacity(2 * ambient);
            out.extend_from_slice(v);
            match form.kind {
                ModelKind::Euclidean => out.extend(std::iter::repeat_n(0.0, ambient)),
                ModelKind::Sphere => {
                    let c = linalg::dot(v, v);
                    out.extend(x.iter().map(|xi| -c * xi));
                }
                ModelKind::Hyperbolic => {
                    let c = form.inner(v, v);
                    out.extend(x.iter().map(|xi| c * xi));
                }
            }
            out
        };

        let step = 1e-3;
        let mut samples: Vec<Option<SFPoint>> = vec![None; s_values.len()];
        // walk outward from s = 0 in each direction
        for forward in [true, false] {
            let mut state: Vec<f64> = geo
                .base
                .coords
                .iter()
                .chain(geo.dir.vector.iter())
                .copied()
                .collect();
            let mut s = 0.0_f64;
            let indices: Vec<usize> = if forward {
                (0..s_values.len())
                    .filter(|&i| s_values[i] >= 0.0)
                    .collect()
            } else {
                (0..s_values.len())
                    .rev()
                    .filter(|&i| s_values[i] < 0.0)
                    .collect()
            };
            for i in indices {
                let target = s_values[i];
                while (target - s).abs() > 1e-14 {
                    let h = (target - s).clamp(-step, step);
                    state = crate::ode::rk4_step(&f, s, &state, h);
                    s += h;
                    let (x, v) = state.split_at_mut(ambient);
                    self.project_state(x, v);
                }
                samples[i] = Some(SFPoint {
                    form,
                    coords: state[..ambient].to_vec(),
                });
            }
        }
        Ok(samples.into_iter().map(|p| p.unwrap()).collect())
    }
}

/// An ambient isometry of the model taking a chosen point to the chart
/// center; pre-compose charts with this to straighten around arbitrary
/// centers. Rotation in the (center, p) plane on the sphere, a Lorentz boost
/// on the hyperboloid, a translation in Euclidean space.
#[derive(Debug, Clone)]
pub struct Recentering {
    form: SpaceForm,
    kind: RecenterKind,
}

#[derive(Debug, Clone)]
enum RecenterKind {
    Identity,
    Translate(Vec<f64>),
    Plane {
        center: Vec<f64>,
        complement: Vec<f64>,
        angle: f64,
    },
}

impl Recentering {
    /// Build the isometry with `apply(p) = chart_center`.
    pub fn to_center(form: &SpaceForm, p: &SFPoint) -> Result<Self> {
        if p.form != *form {
            return Err(Error::geometry("point does not belong to this model"));
        }
        match form.kind {
            ModelKind::Euclidean => Ok(Recentering {
                form: *form,
                kind: RecenterKind::Translate(scale(&p.coords, -1.0)),
            }),
            ModelKind::Sphere | ModelKind::Hyperbolic => {
                let center = form.chart_center().coords;
                let r = form.distance(&form.chart_center(), p)?;
                if r < 1e-15 {
                    return Ok(Recentering {
                        form: *form,
                        kind: RecenterKind::Identity,
                    });
                }
                // tangential part of p at the center, normalized
                let sign = if form.kind == ModelKind::Sphere {
                    1.0
                } else {
                    -1.0
                };
                let along = sign * form.inner(&p.coords, &center);
                let mut w = p.coords.clone();
                axpy(&mut w, -along, &center);
                let n = form.inner(&w, &w).max(0.0).sqrt();
                Ok(Recentering {
                    form: *form,
                    kind: RecenterKind::Plane {
                        center,
                        complement: scale(&w, 1.0 / n),
                        angle: r,
                    },
                })
            }
        }
    }

    fn rotate(&self, v: &[f64], direction: f64) -> Vec<f64> {
        match &self.kind {
            RecenterKind::Identity => v.to_vec(),
            RecenterKind::Translate(t) => {
                if direction < 0.0 {
                    linalg::add(v, t)
                } else {
                    linalg::sub(v, t)
                }
            }
            RecenterKind::Plane {
                center,
                complement,
                angle,
            } => {
                let delta = direction * angle;
                let sign = if self.form.kind == ModelKind::Sphere {
                    1.0
                } else {
                    -1.0
                };
                let alpha = sign * self.form.inner(v, center);
                let beta = self.form.inner(v, complement);
                let mut out = v.to_vec();
                axpy(&mut out, -alpha, center);
                axpy(&mut out, -beta, complement);
                // rotate (boost) the (center, complement) coordinates by delta
                let (na, nb) = match self.form.kind {
                    ModelKind::Sphere => (
                        alpha * delta.cos() - beta * delta.sin(),
                        alpha * delta.sin() + beta * delta.cos(),
                    ),
                    _ => (
                        alpha * delta.cosh() + beta * delta.sinh(),
                        alpha * delta.sinh() + beta * delta.cosh(),
                    ),
                };
                axpy(&mut out, na, center);
                axpy(&mut out, nb, complement);
                out
            }
        }
    }

    /// Map a point (taking the reference point to the chart center).
    pub fn apply(&self, p: &SFPoint) -> SFPoint {
        SFPoint {
            form: self.form,
            coords: self.rotate(&p.coords, -1.0),
        }
    }

    /// Inverse map.
    pub fn invert(&self, p: &SFPoint) -> SFPoint {
        SFPoint {
            form: self.form,
            coords: self.rotate(&p.coords, 1.0),
        }
    }

    /// Push a tangent vector forward (these isometries are ambient-linear on
    /// the curved models, and translations act trivially on vectors).
    pub fn apply_tangent(&self, v: &SFTangent) -> SFTangent {
        let vector = match &self.kind {
            RecenterKind::Translate(_) | RecenterKind::Identity => v.vector.clone(),
            RecenterKind::Plane { .. } => self.rotate(&v.vector, -1.0),
        };
        SFTangent {
            base: self.apply(&v.base),
            vector,
        }
    }
}

/// Random unit-speed geodesic with base inside the geodesic ball of `radius`
/// about the chart center (deterministic given the RNG stream).
pub fn random_geodesic(
    form: &SpaceForm,
    rng: &mut rand_chacha::ChaCha12Rng,
    radius: f64,
) -> SFGeodesic {
    let center = form.chart_center();
    let frame = form.tangent_frame(&center);
    let coeffs = crate::sample::ball_point(rng, form.d, radius);
    let mut v = vec![0.0; form.ambient_dim()];
    for (c, e) in coeffs.iter().zip(&frame) {
        axpy(&mut v, *c, &e.vector);
    }
    let base = form
        .exp_map(
            &center,
            &SFTangent {
                base: center.clone(),
                vector: v,
            },
        )
        .expect("tangent built from the frame");
    let base_frame = form.tangent_frame(&base);
    let mut dir = vec![0.0; form.ambient_dim()];
    loop {
        let mut nonzero = false;
        for e in &base_frame {
            let c = crate::sample::gaussian(rng);
            if c.abs() > 1e-6 {
                nonzero = true;
            }
            axpy(&mut dir, c, &e.vector);
        }
        if nonzero {
            break;
        }
    }
    let tangent = SFTangent {
        base: base.clone(),
        vector: dir,
    };
    form.geodesic(base, tangent).expect("nonzero direction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use rand::Rng;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn sphere2() -> SpaceForm {
        SpaceForm::sphere(2).unwrap()
    }

    fn hyper2() -> SpaceForm {
        SpaceForm::hyperbolic(2).unwrap()
    }

    #[test]
    fn exp_map_sphere_quarter_turn() {
        let s = sphere2();
        let p = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let v = s.tangent(&p, vec![FRAC_PI_2, 0.0, 0.0]).unwrap();
        let q = s.exp_map(&p, &v).unwrap();
        assert!(linalg::dist(&q.coords, &[1.0, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn exp_map_zero_vector_is_identity() {
        for form in [
            SpaceForm::euclidean(3).unwrap(),
            SpaceForm::sphere(3).unwrap(),
            SpaceForm::hyperbolic(3).unwrap(),
        ] {
            let p = form.chart_center();
            let v = form.tangent(&p, vec![0.0; form.ambient_dim()]).unwrap();
            assert_eq!(form.exp_map(&p, &v).unwrap(), p);
        }
    }

    #[test]
    fn exp_map_hyperboloid_closed_form() {
        let h = hyper2();
        let p = h.point(vec![0.0, 0.0, 1.0]).unwrap();
        for r in [0.1, 0.5, 1.5] {
            let v = h.tangent(&p, vec![r, 0.0, 0.0]).unwrap();
            let q = h.exp_map(&p, &v).unwrap();
            assert!((q.coords[0] - r.sinh()).abs() < 1e-12);
            assert!(q.coords[1].abs() < 1e-15);
            assert!((q.coords[2] - r.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn geodesic_eval_closed_forms() {
        let s = sphere2();
        let base = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let dir = s.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let geo = s.geodesic(base, dir).unwrap();
        assert_eq!(s.geodesic_eval(&geo, 0.0).unwrap(), geo.base);
        for k in 0..20 {
            let t = -1.5 + 3.0 * k as f64 / 19.0;
            let q = s.geodesic_eval(&geo, t).unwrap();
            assert!((q.coords[0] - t.sin()).abs() < 1e-12);
            assert!((q.coords[2] + t.cos()).abs() < 1e-12);
        }

        let h = hyper2();
        let base = h.point(vec![0.0, 0.0, 1.0]).unwrap();
        let dir = h.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let geo = h.geodesic(base, dir).unwrap();
        for k in 0..20 {
            let t = -1.5 + 3.0 * k as f64 / 19.0;
            let q = h.geodesic_eval(&geo, t).unwrap();
            assert!((q.coords[0] - t.sinh()).abs() < 1e-12);
            assert!((q.coords[2] - t.cosh()).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_guard_rejects_large_arclength() {
        let s = sphere2();
        let base = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let dir = s.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let geo = s.geodesic(base, dir).unwrap();
        assert!(s.geodesic_eval(&geo, PI).is_err());
        assert!(s.geodesic_eval(&geo, -3.5).is_err());
    }

    #[test]
    fn distances_match_parameters() {
        let s = sphere2();
        let p = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        assert_eq!(s.distance(&p, &p).unwrap(), 0.0);
        let q = s.point(vec![1.0, 0.0, 0.0]).unwrap();
        assert!((s.distance(&p, &q).unwrap() - FRAC_PI_2).abs() < 1e-15);

        let h = hyper2();
        let a = h.point(vec![0.0, 0.0, 1.0]).unwrap();
        let b = h.point(vec![1.0_f64.sinh(), 0.0, 1.0_f64.cosh()]).unwrap();
        assert!((h.distance(&a, &b).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn invalid_points_rejected() {
        let s = sphere2();
        assert!(s.point(vec![0.5, 0.0, 0.0]).is_err());
        let h = hyper2();
        // lower sheet
        assert!(h.point(vec![0.0, 0.0, -1.0]).is_err());
        // non-tangent vector
        let p = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        assert!(s.tangent(&p, vec![0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn transport_of_direction_is_velocity() {
        let mut rng = sample::rng(11);
        for form in [sphere2(), hyper2(), SpaceForm::euclidean(2).unwrap()] {
            for _ in 0..10 {
                let geo = random_geodesic(&form, &mut rng, 0.5);
                let s = rng.random::<f64>() * 1.5 - 0.75;
                let moved = form.parallel_transport(&geo, &geo.dir, s).unwrap();
                let vel = form.geodesic_velocity(&geo, s).unwrap();
                assert!(linalg::dist(&moved.vector, &vel.vector) < 1e-12);
            }
        }
    }

    #[test]
    fn transport_orthogonal_complement_unchanged_on_equator() {
        let s = SpaceForm::sphere(3).unwrap();
        let base = s.point(vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        let dir = s.tangent(&base, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let geo = s.geodesic(base.clone(), dir).unwrap();
        let v = s.tangent(&base, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let moved = s.parallel_transport(&geo, &v, FRAC_PI_2).unwrap();
        assert!(linalg::dist(&moved.vector, &[0.0, 1.0, 0.0, 0.0]) < 1e-15);
    }

    #[test]
    fn transport_preserves_norms_and_angles() {
        let mut rng = sample::rng(23);
        for form in [sphere2(), hyper2()] {
            for _ in 0..20 {
                let geo = random_geodesic(&form, &mut rng, 0.4);
                let frame = form.tangent_frame(&geo.base);
                let s = rng.random::<f64>() * 2.0 - 1.0;
                let moved: Vec<SFTangent> = frame
                    .iter()
                    .map(|v| form.parallel_transport(&geo, v, s).unwrap())
                    .collect();
                for i in 0..frame.len() {
                    for j in 0..frame.len() {
                        let before = form.inner(&frame[i].vector, &frame[j].vector);
                        let after = form.inner(&moved[i].vector, &moved[j].vector);
                        assert!((before - after).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn submanifold_k1_matches_geodesic() {
        let s = sphere2();
        let base = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let dir = s.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let geo = s.geodesic(base.clone(), dir.clone()).unwrap();
        let lattice: Vec<Vec<f64>> = (0..9).map(|i| vec![-0.4 + 0.1 * i as f64]).collect();
        let cloud = s
            .geodesic_submanifold_sample(&base, &[dir], &lattice)
            .unwrap();
        for (a, pt) in lattice.iter().zip(&cloud) {
            let q = s.geodesic_eval(&geo, a[0]).unwrap();
            assert!(linalg::dist(&pt.coords, &q.coords) < 1e-12);
        }
    }

    #[test]
    fn submanifold_plane_spans_great_subsphere() {
        let s = SpaceForm::sphere(3).unwrap();
        let base = s.point(vec![0.0, 0.0, 0.0, -1.0]).unwrap();
        let e1 = s.tangent(&base, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let e2 = s.tangent(&base, vec![0.0, 1.0, 0.0, 0.0]).unwrap();
        let mut lattice = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                lattice.push(vec![-0.4 + 0.2 * i as f64, -0.4 + 0.2 * j as f64]);
            }
        }
        let cloud = s
            .geodesic_submanifold_sample(&base, &[e1, e2], &lattice)
            .unwrap();
        for p in &cloud {
            assert!(p.coords[2].abs() < 1e-14, "x3 must vanish on the subsphere");
            assert!(s.quadric_residual(&p.coords) < 1e-10);
        }
        // the zero lattice point maps to the base
        let frame = s.tangent_frame(&base);
        let center = s
            .geodesic_submanifold_sample(&base, &frame[..2], &[vec![0.0, 0.0]])
            .unwrap();
        assert_eq!(center[0], base);
    }

    #[test]
    fn dependent_basis_rejected() {
        let s = sphere2();
        let base = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let e1 = s.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let e1b = s.tangent(&base, vec![2.0, 0.0, 0.0]).unwrap();
        assert!(s
            .geodesic_submanifold_sample(&base, &[e1, e1b], &[vec![0.0, 0.0]])
            .is_err());
    }

    #[test]
    fn submanifold_lattice_guarded_on_sphere() {
        let s = sphere2();
        let base = s.point(vec![0.0, 0.0, -1.0]).unwrap();
        let e1 = s.tangent(&base, vec![1.0, 0.0, 0.0]).unwrap();
        let err = s
            .geodesic_submanifold_sample(&base, &[e1], &[vec![3.5]])
            .unwrap_err();
        assert!(err.to_string().contains("injectivity"), "{err}");
    }

    #[test]
    fn quadric_preserved_along_geodesics() {
        let mut rng = sample::rng(5);
        for form in [sphere2(), hyper2()] {
            for _ in 0..20 {
                let geo = random_geodesic(&form, &mut rng, 0.6);
                for k in 0..21 {
                    let t = -2.0 + 4.0 * k as f64 / 20.0;
                    let p = form.geodesic_eval(&geo, t).unwrap();
                    assert!(form.quadric_residual(&p.coords) < 1e-10);
                }
            }
        }
    }

    #[test]
    fn geodesic_additivity() {
        let mut rng = sample::rng(17);
        for form in [sphere2(), hyper2(), SpaceForm::euclidean(3).unwrap()] {
            for _ in 0..10 {
                let geo = random_geodesic(&form, &mut rng, 0.5);
                let s = rng.random::<f64>() - 0.5;
                let s2 = rng.random::<f64>() - 0.5;
                let direct = form.geodesic_eval(&geo, s + s2).unwrap();
                let mid = form.geodesic_eval(&geo, s).unwrap();
                let vel = form.geodesic_velocity(&geo, s).unwrap();
                let stepped = form
                    .exp_map(
                        &mid,
                        &SFTangent {
                            base: mid.clone(),
                            vector: scale(&vel.vector, s2),
                        },
                    )
                    .unwrap();
                assert!(linalg::dist(&direct.coords, &stepped.coords) < 1e-9);
            }
        }
    }

    #[test]
    fn ode_route_matches_closed_form() {
        let mut rng = sample::rng(31);
        let s_values: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        for form in [sphere2(), hyper2(), SpaceForm::euclidean(2).unwrap()] {
            for _ in 0..3 {
                let geo = random_geodesic(&form, &mut rng, 0.4);
                let numeric = form.geodesic_ode_samples(&geo, &s_values).unwrap();
                for (s, num) in s_values.iter().zip(&numeric) {
                    let exact = form.geodesic_eval(&geo, *s).unwrap();
                    assert!(
                        linalg::dist(&num.coords, &exact.coords) < 1e-7,
                        "{} at s={s}: {:e}",
                        form.kind.name(),
                        linalg::dist(&num.coords, &exact.coords)
                    );
                }
            }
        }
    }

    #[test]
    fn recentering_moves_point_to_center() {
        let mut rng = sample::rng(41);
        for form in [sphere2(), hyper2(), SpaceForm::euclidean(2).unwrap()] {
            for _ in 0..10 {
                let geo = random_geodesic(&form, &mut rng, 0.7);
                let p = geo.base.clone();
                let rc = Recentering::to_center(&form, &p).unwrap();
                let moved = rc.apply(&p);
                assert!(
                    linalg::dist(&moved.coords, &form.chart_center().coords) < 1e-12,
                    "{}",
                    form.kind.name()
                );
                // isometry: preserves the quadric and distances
                let q = form.geodesic_eval(&geo, 0.3).unwrap();
                let mq = rc.apply(&q);
                assert!(form.quadric_residual(&mq.coords) < 1e-10);
                let before = form.distance(&p, &q).unwrap();
                let after = form.distance(&moved, &mq).unwrap();
                assert!((before - after).abs() < 1e-10);
                // roundtrip
                let back = rc.invert(&mq);
                assert!(linalg::dist(&back.coords, &q.coords) < 1e-10);
            }
        }
    }
}
