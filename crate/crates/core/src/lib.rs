//! Numerical lab for curved Kakeya sets, Nikodym sets on constant-curvature
//! space forms, and oscillatory-integral phase functions.
//!
//! The crate is organized around six subsystems:
//!
//! - [`expr`] — a small expression language for phase functions φ(x,t;y) with
//!   exact symbolic derivatives up to total order 4.
//! - [`space_forms`] — ambient-coordinate geometry of the sphere, the
//!   hyperboloid model of hyperbolic space, and Euclidean space: geodesics,
//!   distance, exponential map, parallel transport.
//! - [`charts`] — the straightening diffeomorphisms (gnomonic, Beltrami–Klein,
//!   identity) that map geodesics to straight lines, the Klein metric, the
//!   projective Nikodym→Kakeya transform, bi-Lipschitz ratio scans, and the
//!   line-space map for surfaces.
//! - [`conditions`] — phase-function condition checkers (Hörmander rank and
//!   curvature non-degeneracy, translation invariance, Bourgain's condition,
//!   the straight condition), Kakeya-curve tracing, and δ-tube membership.
//! - [`straighten`] — the ODE pipeline that straightens translation-invariant
//!   phases satisfying Bourgain's condition: extract c(t) and A(t), solve the
//!   B and α equations, assemble the diffeomorphism κ, verify the normal form,
//!   and recover h, q, f.
//! - [`measure`] — occupancy grids, tube rasterization, box-counting dimension,
//!   discretized Kakeya/Nikodym/curved maximal functions, and Nikodym coverage.

pub mod charts;
pub mod conditions;
pub mod error;
pub mod exports;
pub mod expr;
pub mod interp;
pub mod linalg;
pub mod measure;
pub mod ode;
pub mod sample;
pub mod space_forms;
pub mod straighten;

pub use error::{Error, Result};
