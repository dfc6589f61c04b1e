//! Phase-function expression language.
//!
//! Expressions are ASTs over the variables `x1..x(d−1)`, `t`, `y1..y(d−1)`
//! with rational and decimal literals, the arithmetic operators
//! `+ − * / ^integer`, and the functions `sin cos exp log sqrt`.
//!
//! Construction goes through smart constructors that fold literal subtrees
//! (rational arithmetic stays exact) and elide neutral elements; no other
//! rewriting is performed, so derivatives remain auditable. Differentiation
//! is exact and closed under the grammar. Evaluation reports domain errors
//! (log of a nonpositive value, division by zero, …) with the offending
//! subexpression instead of producing non-finite values.

mod parse;
mod phase;

pub use parse::parse_phase;
pub use phase::{PhaseFunction, PhaseSpec, DEFAULT_EPSILON0};

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdentifier { pos: usize, name: String },
    #[error("variable `{name}` out of range for dimension d={d} at byte {pos}")]
    IndexOutOfRange { pos: usize, name: String, d: usize },
    #[error("domain error in `{expr}`: {msg}")]
    Domain { expr: String, msg: String },
    #[error("non-finite value produced by `{expr}`")]
    NonFinite { expr: String },
    #[error("assignment does not cover variable `{name}`")]
    MissingVariable { name: String },
    #[error("derivative order {order} exceeds the cached maximum of 4")]
    DerivativeOrder { order: usize },
    #[error("invalid phase function: {0}")]
    InvalidPhase(String),
}

/// A variable of the phase domain. Indices are 0-based internally; the
/// surface syntax (`x1`, `y2`, …) is 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(usize),
    T,
    Y(usize),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i + 1),
            Var::T => write!(f, "t"),
            Var::Y(i) => write!(f, "y{}", i + 1),
        }
    }
}

/// Exact rational or binary floating-point literal.
///
/// Rationals are kept normalized (reduced, positive denominator) and stay
/// exact under folding until evaluation; any operation that mixes in a float
/// or overflows i64 falls back to `Real`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Literal {
    Rat(i64, i64),
    Real(f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

impl Literal {
    pub fn int(n: i64) -> Self {
        Literal::Rat(n, 1)
    }

    fn rat(num: i64, den: i64) -> Self {
        debug_assert!(den != 0);
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Literal::Rat(sign * num / g, sign * den / g)
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Literal::Rat(n, d) => n as f64 / d as f64,
            Literal::Real(v) => v,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Literal::Rat(0, _)) || matches!(self, Literal::Real(v) if *v == 0.0)
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Literal::Rat(1, 1)) || matches!(self, Literal::Real(v) if *v == 1.0)
    }

    fn checked_binop(a: Literal, b: Literal, op: char) -> Option<Literal> {
        match (a, b) {
            (Literal::Rat(an, ad), Literal::Rat(bn, bd)) => {
                let exact = match op {
                    '+' => Some((
                        an.checked_mul(bd)?.checked_add(bn.checked_mul(ad)?)?,
                        ad.checked_mul(bd)?,
                    )),
                    '-' => Some((
                        an.checked_mul(bd)?.checked_sub(bn.checked_mul(ad)?)?,
                        ad.checked_mul(bd)?,
                    )),
                    '*' => Some((an.checked_mul(bn)?, ad.checked_mul(bd)?)),
                    '/' => {
                        if bn == 0 {
                            return None;
                        }
                        Some((an.checked_mul(bd)?, ad.checked_mul(bn)?))
                    }
                    _ => None,
                }?;
                Some(Literal::rat(exact.0, exact.1))
            }
            _ => {
                let (x, y) = (a.as_f64(), b.as_f64());
                let v = match op {
                    '+' => x + y,
                    '-' => x - y,
                    '*' => x * y,
                    '/' => {
                        if y == 0.0 {
                            return None;
                        }
                        x / y
                    }
                    _ => return None,
                };
                v.is_finite().then_some(Literal::Real(v))
            }
        }
    }

    fn pow(self, n: i64) -> Option<Literal> {
        match self {
            Literal::Rat(num, den) => {
                if n >= 0 {
                    let (p, q) = (
                        num.checked_pow(n.try_into().ok()?)?,
                        den.checked_pow(n.try_into().ok()?)?,
                    );
                    Some(Literal::rat(p, q))
                } else {
                    if num == 0 {
                        return None;
                    }
                    let m = (-n).try_into().ok()?;
                    Some(Literal::rat(den.checked_pow(m)?, num.checked_pow(m)?))
                }
            }
            Literal::Real(v) => {
                if v == 0.0 && n < 0 {
                    return None;
                }
                let r = v.powi(n.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
                r.is_finite().then_some(Literal::Real(r))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
}

impl Func {
    pub fn name(&self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn apply(&self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Log => v.ln(),
            Func::Sqrt => v.sqrt(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Lit(Literal),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
    Fun(Func, Box<Expr>),
}

/// The evaluation point (x, t; y) ∈ ℝ^{d−1} × ℝ × ℝ^{d−1}.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub t: f64,
    pub y: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, t: f64, y: Vec<f64>) -> Self {
        PhasePoint { x, t, y }
    }

    pub fn origin(d: usize) -> Self {
        PhasePoint {
            x: vec![0.0; d - 1],
            t: 0.0,
            y: vec![0.0; d - 1],
        }
    }

    pub fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::X(i) => self.x.get(i).copied(),
            Var::T => Some(self.t),
            Var::Y(i) => self.y.get(i).copied(),
        }
    }
}

// ── smart constructors ──────────────────────────────────────────────────

pub fn lit_int(n: i64) -> Expr {
    Expr::Lit(Literal::int(n))
}

pub fn lit_real(v: f64) -> Expr {
    Expr::Lit(Literal::Real(v))
}

pub fn var(v: Var) -> Expr {
    Expr::Var(v)
}

pub fn neg(e: Expr) -> Expr {
    match e {
        Expr::Lit(Literal::Rat(n, d)) => Expr::Lit(Literal::Rat(-n, d)),
        Expr::Lit(Literal::Real(v)) => Expr::Lit(Literal::Real(-v)),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}

pub fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => match Literal::checked_binop(x, y, '+') {
            Some(l) => Expr::Lit(l),
            None => Expr::Add(Box::new(Expr::Lit(x)), Box::new(Expr::Lit(y))),
        },
        (Expr::Lit(x), b) if x.is_zero() => b,
        (a, Expr::Lit(y)) if y.is_zero() => a,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

pub fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => match Literal::checked_binop(x, y, '-') {
            Some(l) => Expr::Lit(l),
            None => Expr::Sub(Box::new(Expr::Lit(x)), Box::new(Expr::Lit(y))),
        },
        (a, Expr::Lit(y)) if y.is_zero() => a,
        (Expr::Lit(x), b) if x.is_zero() => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

pub fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Lit(x), Expr::Lit(y)) => match Literal::checked_binop(x, y, '*') {
            Some(l) => Expr::Lit(l),
            None => Expr::Mul(Box::new(Expr::Lit(x)), Box::new(Expr::Lit(y))),
        },
        (Expr::Lit(x), _) | (_, Expr::Lit(x)) if x.is_zero() => Expr::Lit(Literal::int(0)),
        (Expr::Lit(x), b) if x.is_one() => b,
        (a, Expr::Lit(y)) if y.is_one() => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

pub fn div(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        // fold only when the divisor is a nonzero literal; a zero divisor is
        // kept so evaluation reports it
        (Expr::Lit(x), Expr::Lit(y)) if !y.is_zero() => match Literal::checked_binop(x, y, '/') {
            Some(l) => Expr::Lit(l),
            None => Expr::Div(Box::new(Expr::Lit(x)), Box::new(Expr::Lit(y))),
        },
        (a, Expr::Lit(y)) if y.is_one() => a,
        (a, b) => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub fn pow(e: Expr, n: i64) -> Expr {
    if n == 0 {
        return lit_int(1);
    }
    if n == 1 {
        return e;
    }
    match e {
        Expr::Lit(x) => match x.pow(n) {
            Some(l) => Expr::Lit(l),
            None => Expr::Pow(Box::new(Expr::Lit(x)), n),
        },
        e => Expr::Pow(Box::new(e), n),
    }
}

pub fn fun(f: Func, e: Expr) -> Expr {
    if let Expr::Lit(x) = &e {
        let v = f.apply(x.as_f64());
        if v.is_finite() {
            return Expr::Lit(Literal::Real(v));
        }
    }
    Expr::Fun(f, Box::new(e))
}

// ── core operations ─────────────────────────────────────────────────────

impl Expr {
    /// Exact symbolic partial derivative with respect to `v`.
    pub fn differentiate(&self, v: Var) -> Expr {
        match self {
            Expr::Lit(_) => lit_int(0),
            Expr::Var(u) => lit_int(if *u == v { 1 } else { 0 }),
            Expr::Neg(e) => neg(e.differentiate(v)),
            Expr::Add(a, b) => add(a.differentiate(v), b.differentiate(v)),
            Expr::Sub(a, b) => sub(a.differentiate(v), b.differentiate(v)),
            Expr::Mul(a, b) => add(
                mul(a.differentiate(v), (**b).clone()),
                mul((**a).clone(), b.differentiate(v)),
            ),
            Expr::Div(a, b) => div(
                sub(
                    mul(a.differentiate(v), (**b).clone()),
                    mul((**a).clone(), b.differentiate(v)),
                ),
                pow((**b).clone(), 2),
            ),
            Expr::Pow(e, n) => mul(
                mul(lit_int(*n), pow((**e).clone(), n - 1)),
                e.differentiate(v),
            ),
            Expr::Fun(f, e) => {
                let de = e.differentiate(v);
                let inner = (**e).clone();
                match f {
                    Func::Sin => mul(fun(Func::Cos, inner), de),
                    Func::Cos => neg(mul(fun(Func::Sin, inner), de)),
                    Func::Exp => mul(fun(Func::Exp, inner), de),
                    Func::Log => div(de, inner),
                    Func::Sqrt => div(de, mul(lit_int(2), fun(Func::Sqrt, inner))),
                }
            }
        }
    }

    /// Evaluate at the given point; domain violations and non-finite values
    /// are reported with the offending subexpression.
    pub fn eval(&self, pt: &PhasePoint) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Lit(l) => l.as_f64(),
            Expr::Var(u) => pt.get(*u).ok_or_else(|| ExprError::MissingVariable {
                name: u.to_string(),
            })?,
            Expr::Neg(e) => -e.eval(pt)?,
            Expr::Add(a, b) => a.eval(pt)? + b.eval(pt)?,
            Expr::Sub(a, b) => a.eval(pt)? - b.eval(pt)?,
            Expr::Mul(a, b) => a.eval(pt)? * b.eval(pt)?,
            Expr::Div(a, b) => {
                let den = b.eval(pt)?;
                if den == 0.0 {
                    return Err(ExprError::Domain {
                        expr: self.to_string(),
                        msg: "division by zero".into(),
                    });
                }
                a.eval(pt)? / den
            }
            Expr::Pow(e, n) => {
                let base = e.eval(pt)?;
                if base == 0.0 && *n < 0 {
                    return Err(ExprError::Domain {
                        expr: self.to_string(),
                        msg: "zero raised to a negative power".into(),
                    });
                }
                base.powi((*n).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
            }
            Expr::Fun(f, e) => {
                let arg = e.eval(pt)?;
                match f {
                    Func::Log if arg <= 0.0 => {
                        return Err(ExprError::Domain {
                            expr: self.to_string(),
                            msg: "log of a nonpositive value".into(),
                        })
                    }
                    Func::Sqrt if arg < 0.0 => {
                        return Err(ExprError::Domain {
                            expr: self.to_string(),
                            msg: "sqrt of a negative value".into(),
                        })
                    }
                    _ => {}
                }
                f.apply(arg)
            }
        };
        if !v.is_finite() {
            return Err(ExprError::NonFinite {
                expr: self.to_string(),
            });
        }
        Ok(v)
    }

    /// All variables occurring in the expression.
    pub fn variables(&self) -> std::collections::BTreeSet<Var> {
        let mut set = std::collections::BTreeSet::new();
        self.collect_vars(&mut set);
        set
    }

    fn collect_vars(&self, set: &mut std::collections::BTreeSet<Var>) {
        match self {
            Expr::Lit(_) => {}
            Expr::Var(v) => {
                set.insert(*v);
            }
            Expr::Neg(e) | Expr::Pow(e, _) | Expr::Fun(_, e) => e.collect_vars(set),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(set);
                b.collect_vars(set);
            }
        }
    }
}

// ── printing ────────────────────────────────────────────────────────────

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Pow(..) => 4,
        Expr::Lit(Literal::Rat(n, d)) => {
            if *d != 1 {
                2 // prints as n/d
            } else if *n < 0 {
                3
            } else {
                5
            }
        }
        Expr::Lit(Literal::Real(v)) => {
            if *v < 0.0 {
                3
            } else {
                5
            }
        }
        Expr::Var(..) | Expr::Fun(..) => 5,
    }
}

fn fmt_prec(e: &Expr, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let wrap = prec(e) < min;
    if wrap {
        write!(f, "(")?;
    }
    match e {
        Expr::Lit(Literal::Rat(n, d)) => {
            if *d == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}/{d}")?;
            }
        }
        Expr::Lit(Literal::Real(v)) => write!(f, "{v:?}")?,
        Expr::Var(v) => write!(f, "{v}")?,
        Expr::Neg(inner) => {
            write!(f, "-")?;
            fmt_prec(inner, 4, f)?;
        }
        Expr::Add(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, " + ")?;
            fmt_prec(b, 2, f)?;
        }
        Expr::Sub(a, b) => {
            fmt_prec(a, 1, f)?;
            write!(f, " - ")?;
            fmt_prec(b, 2, f)?;
        }
        Expr::Mul(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, "*")?;
            fmt_prec(b, 3, f)?;
        }
        Expr::Div(a, b) => {
            fmt_prec(a, 2, f)?;
            write!(f, "/")?;
            fmt_prec(b, 3, f)?;
        }
        Expr::Pow(base, n) => {
            fmt_prec(base, 5, f)?;
            if *n < 0 {
                write!(f, "^({n})")?;
            } else {
                write!(f, "^{n}")?;
            }
        }
        Expr::Fun(func, arg) => {
            write!(f, "{}(", func.name())?;
            fmt_prec(arg, 0, f)?;
            write!(f, ")")?;
        }
    }
    if wrap {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_prec(self, 0, f)
    }
}
