//! Phase functions: a parsed expression with dimension, domain radius, and a
//! memoized table of symbolic derivatives up to total order 4.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use super::{parse_phase, Expr, ExprError, PhasePoint, Var};
use crate::linalg::Mat;

/// Default domain radius ε₀. The underlying theory only requires "a small
/// constant depending on φ"; 0.25 is this lab's configuration default.
pub const DEFAULT_EPSILON0: f64 = 0.25;

/// Maximum total derivative order held by the cache.
pub const MAX_DERIVATIVE_ORDER: usize = 4;

/// On-disk phase description: `{"d": 3, "phase": "…", "epsilon0": 0.25}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub d: usize,
    pub phase: String,
    #[serde(default = "default_epsilon0")]
    pub epsilon0: f64,
}

fn default_epsilon0() -> f64 {
    DEFAULT_EPSILON0
}

/// A phase φ(x, t; y) with exact symbolic derivatives.
///
/// Immutable after construction; the derivative cache is a fill-once memo
/// keyed by sorted multi-index (mixed partials commute, so the sorted key
/// bounds the cache size), safe for concurrent use.
#[derive(Debug)]
pub struct PhaseFunction {
    d: usize,
    expr: Expr,
    epsilon0: f64,
    cache: Mutex<HashMap<Vec<Var>, Arc<Expr>>>,
}

impl Clone for PhaseFunction {
    fn clone(&self) -> Self {
        PhaseFunction {
            d: self.d,
            expr: self.expr.clone(),
            epsilon0: self.epsilon0,
            cache: Mutex::new(self.cache.lock().unwrap().clone()),
        }
    }
}

impl PhaseFunction {
    pub fn new(d: usize, expr: Expr, epsilon0: f64) -> Result<Self, ExprError> {
        if d < 2 {
            return Err(ExprError::InvalidPhase(format!(
                "dimension d must be at least 2, got {d}"
            )));
        }
        if epsilon0 <= 0.0 || epsilon0.is_nan() {
            return Err(ExprError::InvalidPhase(format!(
                "epsilon0 must be positive, got {epsilon0}"
            )));
        }
        for v in expr.variables() {
            let ok = match v {
                Var::T => true,
                Var::X(i) | Var::Y(i) => i < d - 1,
            };
            if !ok {
                return Err(ExprError::InvalidPhase(format!(
                    "variable {v} exceeds dimension d={d}"
                )));
            }
        }
        Ok(PhaseFunction {
            d,
            expr,
            epsilon0,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn parse(src: &str, d: usize, epsilon0: f64) -> Result<Self, ExprError> {
        Self::new(d, parse_phase(src, d)?, epsilon0)
    }

    pub fn from_spec(spec: &PhaseSpec) -> Result<Self, ExprError> {
        Self::parse(&spec.phase, spec.d, spec.epsilon0)
    }

    pub fn from_spec_json(json: &str) -> Result<Self, ExprError> {
        let spec: PhaseSpec = serde_json::from_str(json)
            .map_err(|e| ExprError::InvalidPhase(format!("bad phase spec JSON: {e}")))?;
        Self::from_spec(&spec)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn epsilon0(&self) -> f64 {
        self.epsilon0
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    /// The symbolic derivative for a multi-index of total order ≤ 4.
    ///
    /// The index is sorted before lookup, so permutations of the same
    /// multi-set share one cache entry and return the identical expression.
    pub fn derivative(&self, vars: &[Var]) -> Result<Arc<Expr>, ExprError> {
        if vars.len() > MAX_DERIVATIVE_ORDER {
            return Err(ExprError::DerivativeOrder { order: vars.len() });
        }
        let mut key: Vec<Var> = vars.to_vec();
        key.sort();
        self.derivative_sorted(&key)
    }

    fn derivative_sorted(&self, key: &[Var]) -> Result<Arc<Expr>, ExprError> {
        if key.is_empty() {
            return Ok(Arc::new(self.expr.clone()));
        }
        if let Some(hit) = self.cache.lock().unwrap().get(key) {
            return Ok(hit.clone());
        }
        // compute outside the lock; duplicated work between racing threads is
        // benign, the first insert wins and the value is unique either way
        let prefix = self.derivative_sorted(&key[..key.len() - 1])?;
        let computed = Arc::new(prefix.differentiate(key[key.len() - 1]));
        let mut cache = self.cache.lock().unwrap();
        let entry = cache.entry(key.to_vec()).or_insert(computed);
        Ok(entry.clone())
    }

    pub fn eval(&self, pt: &PhasePoint) -> Result<f64, ExprError> {
        self.expr.eval(pt)
    }

    /// Evaluate the mixed partial ∂_{vars} φ at a point.
    pub fn eval_derivative(&self, vars: &[Var], pt: &PhasePoint) -> Result<f64, ExprError> {
        self.derivative(vars)?.eval(pt)
    }

    /// ∇_y φ (length d−1).
    pub fn grad_y(&self, pt: &PhasePoint) -> Result<Vec<f64>, ExprError> {
        (0..self.d - 1)
            .map(|j| self.eval_derivative(&[Var::Y(j)], pt))
            .collect()
    }

    /// ∇_{(x,t)} φ (length d; x components first, then t).
    pub fn grad_xt(&self, pt: &PhasePoint) -> Result<Vec<f64>, ExprError> {
        let mut g = Vec::with_capacity(self.d);
        for i in 0..self.d - 1 {
            g.push(self.eval_derivative(&[Var::X(i)], pt)?);
        }
        g.push(self.eval_derivative(&[Var::T], pt)?);
        Ok(g)
    }

    /// The (x,t)-variable with flat index `k` (0..d−1; the last one is t).
    pub fn xt_var(&self, k: usize) -> Var {
        if k < self.d - 1 {
            Var::X(k)
        } else {
            Var::T
        }
    }

    /// Hessian ∇_y² φ, a (d−1)×(d−1) symmetric matrix.
    pub fn hess_yy(&self, pt: &PhasePoint) -> Result<Mat, ExprError> {
        let m = self.d - 1;
        let mut h = vec![vec![0.0; m]; m];
        for i in 0..m {
            for j in i..m {
                let v = self.eval_derivative(&[Var::Y(i), Var::Y(j)], pt)?;
                h[i][j] = v;
                h[j][i] = v;
            }
        }
        Ok(h)
    }

    /// ∇_{(x,t)} ∇_y φ as a d×(d−1) matrix (rows: x₁..x_{d−1}, t; cols: y).
    pub fn mixed_xt_y(&self, pt: &PhasePoint) -> Result<Mat, ExprError> {
        let mut m = vec![vec![0.0; self.d - 1]; self.d];
        for k in 0..self.d {
            for j in 0..self.d - 1 {
                m[k][j] = self.eval_derivative(&[self.xt_var(k), Var::Y(j)], pt)?;
            }
        }
        Ok(m)
    }

    /// Evaluate a flat tensor of mixed partials, one entry per multi-index.
    /// Entries for multi-indices that permute the same multi-set are equal
    /// by construction (the cache key is sorted).
    pub fn deriv_tensor(
        &self,
        multi_indices: &[Vec<Var>],
        pt: &PhasePoint,
    ) -> Result<Vec<f64>, ExprError> {
        multi_indices
            .iter()
            .map(|vars| self.eval_derivative(vars, pt))
            .collect()
    }
}
