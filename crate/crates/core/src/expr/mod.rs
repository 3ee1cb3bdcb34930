//! Expression trees for the entire and meromorphic functions produced by the
//! builder: evaluation, shift `z ↦ z + c`, analytic differentiation and an
//! overflow-free log-magnitude path.

mod json;
mod logmag;
mod poly;

use thiserror::Error;

use crate::scalar::{is_finite, Cx, Real};

pub use json::JsonError;
pub use poly::{binomial, MultiPoly};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("pole encountered: |denominator| = {0:e}")]
    PoleEncountered(f64),
    #[error("floating overflow during evaluation; use the log-magnitude path or a smaller radius")]
    Overflow,
    #[error("dimension mismatch: expression has {expected}, point has {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

/// A point of ℂⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct Point<T: Real>(Vec<Cx<T>>);

impl<T: Real> Point<T> {
    pub fn new(coords: Vec<Cx<T>>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![Cx::new(T::zero(), T::zero()); dim])
    }

    pub fn real(coords: &[f64]) -> Self {
        Self(
            coords
                .iter()
                .map(|&x| Cx::new(T::lit(x), T::zero()))
                .collect(),
        )
    }

    /// `h · e_axis`
    pub fn axis(dim: usize, axis: usize, h: Cx<T>) -> Self {
        let mut p = Self::zeros(dim);
        p.0[axis] = h;
        p
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Cx<T>] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim(), other.dim());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self(self.0.iter().map(|a| a * s).collect())
    }

    /// Euclidean norm `(Σ|z_j|²)^{1/2}`.
    pub fn norm(&self) -> T {
        self.0
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    /// Largest coordinate modulus (polydisc radius).
    pub fn max_modulus(&self) -> T {
        self.0.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    pub fn is_zero(&self, tol: T) -> bool {
        self.0.iter().all(|z| z.norm() <= tol)
    }
}

/// `L(z) = Σ a_r z_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearForm<T: Real>(Vec<Cx<T>>);

impl<T: Real> LinearForm<T> {
    pub fn new(coeffs: Vec<Cx<T>>) -> Self {
        Self(coeffs)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.0
    }

    pub fn eval(&self, z: &Point<T>) -> Cx<T> {
        assert_eq!(z.dim(), self.dim());
        self.0
            .iter()
            .zip(z.coords())
            .fold(Cx::new(T::zero(), T::zero()), |acc, (a, z)| acc + a * z)
    }

    pub fn to_poly(&self) -> MultiPoly<T> {
        let dim = self.dim();
        MultiPoly::from_terms(
            dim,
            self.0.iter().enumerate().map(|(j, &a)| {
                let mut e = vec![0; dim];
                e[j] = 1;
                (e, a)
            }),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ExprNode<T: Real> {
    Const(Cx<T>),
    Poly(MultiPoly<T>),
    Cos(Box<ExprNode<T>>),
    Sin(Box<ExprNode<T>>),
    Exp(Box<ExprNode<T>>),
    Sum(Vec<ExprNode<T>>),
    Product(Vec<ExprNode<T>>),
    Quotient(Box<ExprNode<T>>, Box<ExprNode<T>>),
    Scale(Cx<T>, Box<ExprNode<T>>),
}

/// Default `|denominator|` below which a quotient counts as a pole.
pub const POLE_TOL: f64 = 1e-12;

fn zero<T: Real>() -> Cx<T> {
    Cx::new(T::zero(), T::zero())
}

fn one<T: Real>() -> Cx<T> {
    Cx::new(T::one(), T::zero())
}

fn is_zero<T: Real>(c: Cx<T>) -> bool {
    c.re == T::zero() && c.im == T::zero()
}

impl<T: Real> ExprNode<T> {
    pub fn constant(c: Cx<T>) -> Self {
        Self::Const(c)
    }

    pub fn poly(p: MultiPoly<T>) -> Self {
        Self::Poly(p)
    }

    pub fn cos(child: Self) -> Self {
        Self::Cos(Box::new(child))
    }

    pub fn sin(child: Self) -> Self {
        Self::Sin(Box::new(child))
    }

    pub fn exp(child: Self) -> Self {
        Self::Exp(Box::new(child))
    }

    pub fn quotient(num: Self, den: Self) -> Self {
        Self::Quotient(Box::new(num), Box::new(den))
    }

    /// Scales with constant folding; a zero factor collapses to `Const(0)`.
    pub fn scale(s: Cx<T>, child: Self) -> Self {
        if is_zero(s) {
            return Self::Const(zero());
        }
        if s == one() {
            return child;
        }
        match child {
            Self::Const(c) => Self::Const(c * s),
            Self::Scale(t, inner) => Self::scale(s * t, *inner),
            other => Self::Scale(s, Box::new(other)),
        }
    }

    /// Sum with zero-term pruning and constant folding.
    pub fn sum(children: Vec<Self>) -> Self {
        let mut konst = zero::<T>();
        let mut rest = Vec::new();
        for c in children {
            match c {
                Self::Const(k) => konst = konst + k,
                Self::Sum(inner) => {
                    for i in inner {
                        match i {
                            Self::Const(k) => konst = konst + k,
                            other => rest.push(other),
                        }
                    }
                }
                other => rest.push(other),
            }
        }
        if !is_zero(konst) {
            rest.push(Self::Const(konst));
        }
        match rest.len() {
            0 => Self::Const(zero()),
            1 => rest.pop().unwrap(),
            _ => Self::Sum(rest),
        }
    }

    /// Product with constant factors pulled into a single `Scale`.
    pub fn product(children: Vec<Self>) -> Self {
        let mut konst = one::<T>();
        let mut rest = Vec::new();
        for c in children {
            match c {
                Self::Const(k) => konst = konst * k,
                Self::Scale(k, inner) => {
                    konst = konst * k;
                    rest.push(*inner);
                }
                other => rest.push(other),
            }
        }
        if is_zero(konst) {
            return Self::Const(zero());
        }
        let body = match rest.len() {
            0 => return Self::Const(konst),
            1 => rest.pop().unwrap(),
            _ => Self::Product(rest),
        };
        Self::scale(konst, body)
    }

    /// Constant value, recognising constant polynomial leaves as well.
    pub fn as_constant(&self) -> Option<Cx<T>> {
        match self {
            Self::Const(c) => Some(*c),
            Self::Poly(p) => p.as_constant(),
            _ => None,
        }
    }

    /// Dimension shared by the polynomial leaves, `None` for constant trees.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            Self::Const(_) => None,
            Self::Poly(p) => Some(p.dim()),
            Self::Cos(c) | Self::Sin(c) | Self::Exp(c) | Self::Scale(_, c) => c.dimension(),
            Self::Sum(cs) | Self::Product(cs) => cs.iter().find_map(|c| c.dimension()),
            Self::Quotient(n, d) => n.dimension().or_else(|| d.dimension()),
        }
    }

    pub fn has_quotient(&self) -> bool {
        match self {
            Self::Const(_) | Self::Poly(_) => false,
            Self::Quotient(..) => true,
            Self::Cos(c) | Self::Sin(c) | Self::Exp(c) | Self::Scale(_, c) => c.has_quotient(),
            Self::Sum(cs) | Self::Product(cs) => cs.iter().any(|c| c.has_quotient()),
        }
    }

    fn check_dim(&self, z: &Point<T>) -> Result<(), ExprError> {
        match self.dimension() {
            Some(n) if n != z.dim() => Err(ExprError::DimensionMismatch {
                expected: n,
                got: z.dim(),
            }),
            _ => Ok(()),
        }
    }

    pub fn eval(&self, z: &Point<T>) -> Result<Cx<T>, ExprError> {
        self.eval_with_pole_tol(z, T::lit(POLE_TOL))
    }

    pub fn eval_with_pole_tol(&self, z: &Point<T>, pole_tol: T) -> Result<Cx<T>, ExprError> {
        self.check_dim(z)?;
        let v = self.eval_inner(z, pole_tol)?;
        if is_finite(v) {
            Ok(v)
        } else {
            Err(ExprError::Overflow)
        }
    }

    fn eval_inner(&self, z: &Point<T>, pole_tol: T) -> Result<Cx<T>, ExprError> {
        let finite = |v: Cx<T>| {
            if is_finite(v) {
                Ok(v)
            } else {
                Err(ExprError::Overflow)
            }
        };
        match self {
            Self::Const(c) => Ok(*c),
            Self::Poly(p) => finite(p.eval(z)),
            Self::Cos(c) => finite(c.eval_inner(z, pole_tol)?.cos()),
            Self::Sin(c) => finite(c.eval_inner(z, pole_tol)?.sin()),
            Self::Exp(c) => finite(c.eval_inner(z, pole_tol)?.exp()),
            Self::Sum(cs) => {
                let mut acc = zero();
                for c in cs {
                    acc = acc + c.eval_inner(z, pole_tol)?;
                }
                finite(acc)
            }
            Self::Product(cs) => {
                let mut acc = one();
                for c in cs {
                    acc = acc * c.eval_inner(z, pole_tol)?;
                }
                finite(acc)
            }
            Self::Quotient(n, d) => {
                let den = d.eval_inner(z, pole_tol)?;
                if den.norm() < pole_tol {
                    return Err(ExprError::PoleEncountered(
                        den.norm().to_f64().unwrap_or(0.0),
                    ));
                }
                finite(n.eval_inner(z, pole_tol)? / den)
            }
            Self::Scale(s, c) => finite(*s * c.eval_inner(z, pole_tol)?),
        }
    }

    /// `ln |e(z)|`, `-∞` at zeros, computed without forming `e(z)` itself.
    pub fn eval_log_magnitude(&self, z: &Point<T>) -> Result<T, ExprError> {
        self.check_dim(z)?;
        logmag::log_magnitude(self, z, T::lit(POLE_TOL))
    }

    /// `e ∘ (z ↦ z + c)`; polynomial leaves are re-expanded.
    pub fn shift(&self, c: &Point<T>) -> Self {
        match self {
            Self::Const(k) => Self::Const(*k),
            Self::Poly(p) => Self::Poly(p.shift(c)),
            Self::Cos(x) => Self::cos(x.shift(c)),
            Self::Sin(x) => Self::sin(x.shift(c)),
            Self::Exp(x) => Self::exp(x.shift(c)),
            Self::Sum(xs) => Self::Sum(xs.iter().map(|x| x.shift(c)).collect()),
            Self::Product(xs) => Self::Product(xs.iter().map(|x| x.shift(c)).collect()),
            Self::Quotient(n, d) => Self::quotient(n.shift(c), d.shift(c)),
            Self::Scale(s, x) => Self::Scale(*s, Box::new(x.shift(c))),
        }
    }

    /// Analytic `∂/∂z_axis` (zero-based axis).
    pub fn differentiate(&self, axis: usize) -> Self {
        match self {
            Self::Const(_) => Self::Const(zero()),
            Self::Poly(p) => match p.derivative(axis) {
                d if d.is_empty() => Self::Const(zero()),
                d => match d.as_constant() {
                    Some(k) => Self::Const(k),
                    None => Self::Poly(d),
                },
            },
            Self::Cos(h) => chain(-one::<T>(), Self::sin((**h).clone()), h.differentiate(axis)),
            Self::Sin(h) => chain(one(), Self::cos((**h).clone()), h.differentiate(axis)),
            Self::Exp(h) => chain(one(), Self::exp((**h).clone()), h.differentiate(axis)),
            Self::Sum(xs) => Self::sum(xs.iter().map(|x| x.differentiate(axis)).collect()),
            Self::Product(xs) => {
                let mut terms = Vec::with_capacity(xs.len());
                for i in 0..xs.len() {
                    let di = xs[i].differentiate(axis);
                    if di.as_constant().is_some_and(is_zero) {
                        continue;
                    }
                    let mut factors: Vec<Self> = xs.clone();
                    factors[i] = di;
                    terms.push(Self::product(factors));
                }
                Self::sum(terms)
            }
            Self::Quotient(n, d) => {
                let dn = n.differentiate(axis);
                let dd = d.differentiate(axis);
                let num = Self::sum(vec![
                    Self::product(vec![dn, (**d).clone()]),
                    Self::scale(-one::<T>(), Self::product(vec![(**n).clone(), dd])),
                ]);
                if num.as_constant().is_some_and(is_zero) {
                    return Self::Const(zero());
                }
                Self::quotient(num, Self::product(vec![(**d).clone(), (**d).clone()]))
            }
            Self::Scale(s, x) => Self::scale(*s, x.differentiate(axis)),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json::to_json(self)
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, JsonError> {
        json::from_json(v)
    }
}

/// `sign · outer · inner'` with the inner derivative folded when constant.
fn chain<T: Real>(sign: Cx<T>, outer: ExprNode<T>, inner_d: ExprNode<T>) -> ExprNode<T> {
    match inner_d.as_constant() {
        Some(k) => ExprNode::scale(sign * k, outer),
        None => ExprNode::scale(sign, ExprNode::product(vec![outer, inner_d])),
    }
}

/// Central difference `(e(z + h e_axis) − e(z − h e_axis)) / 2h`.
pub fn fd_derivative<T: Real>(
    e: &ExprNode<T>,
    axis: usize,
    z: &Point<T>,
    h: T,
) -> Result<Cx<T>, ExprError> {
    let step = Point::axis(z.dim(), axis, Cx::new(h, T::zero()));
    let fwd = e.eval(&z.add(&step))?;
    let bwd = e.eval(&z.sub(&step))?;
    Ok((fwd - bwd) / (h + h))
}

/// Default step `1e-5 · max(1, |z|)`.
pub fn default_fd_step<T: Real>(z: &Point<T>) -> T {
    T::lit(1e-5) * T::one().max(z.norm())
}
