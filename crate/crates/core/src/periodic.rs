//! Polynomials periodic under a shift `c`.
//!
//! `Ψ(z) = Σ_t H_t(s_t(z))` where each `s_t = Σ_{j∈S_t} d_j z_j` annihilates
//! `c` on its support `S_t`, so `s_t(z + c) = s_t(z)` and `Ψ(z + c) = Ψ(z)`.
//! Supports are zero-based in this API and one-based in the JSON form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{ExprNode, LinearForm, MultiPoly, Point};
use crate::sampling;
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PeriodicError {
    #[error("periodic polynomials need n >= 2 (got n = {0})")]
    DimensionTooSmall(usize),
    #[error("a null form needs a support of at least two coordinates (got {0})")]
    EmptyNullSpace(usize),
    #[error("invalid support: {0}")]
    InvalidSupport(String),
    #[error("nontrivial terms need degree >= 2 (budget {0})")]
    DegreeBudgetTooSmall(u32),
    #[error("exhaustive supports are limited to n <= 4 (got n = {0})")]
    ExhaustiveTooLarge(usize),
    #[error("form does not annihilate the shift: |<d, c>| = {0:e}")]
    NotNull(f64),
}

/// Default tolerance for `|Σ d_j c_j|` and for periodicity checks.
pub const NULL_TOL: f64 = 1e-12;
pub const PERIODIC_TOL: f64 = 1e-9;

/// `s(z) = Σ_{j∈support} d_j z_j` with `Σ d_j c_j = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct NullLinearForm<T: Real> {
    dim: usize,
    support: Vec<usize>,
    d: Vec<Cx<T>>,
}

impl<T: Real> NullLinearForm<T> {
    /// Validates the support and the null condition against `c`.
    pub fn new(c: &Point<T>, support: Vec<usize>, d: Vec<Cx<T>>) -> Result<Self, PeriodicError> {
        let dim = c.dim();
        validate_support(dim, &support)?;
        if d.len() != support.len() {
            return Err(PeriodicError::InvalidSupport(format!(
                "{} coefficients for a support of size {}",
                d.len(),
                support.len()
            )));
        }
        if d.iter().all(|x| x.norm() == T::zero()) {
            return Err(PeriodicError::InvalidSupport(
                "all coefficients are zero".into(),
            ));
        }
        let form = Self { dim, support, d };
        let r = form.null_residual(c);
        // scale-aware: |<d,c>| against |d|·|c|
        let scale =
            T::one().max(form.d.iter().fold(T::zero(), |m, x| m.max(x.norm())) * c.max_modulus());
        if r > T::lit(NULL_TOL) * scale {
            return Err(PeriodicError::NotNull(r.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(form)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.d
    }

    /// `|Σ d_j c_j|`.
    pub fn null_residual(&self, c: &Point<T>) -> T {
        self.support
            .iter()
            .zip(&self.d)
            .fold(Cx::new(T::zero(), T::zero()), |acc, (&j, d)| {
                acc + d * c.coords()[j]
            })
            .norm()
    }

    pub fn eval(&self, z: &Point<T>) -> Cx<T> {
        self.support
            .iter()
            .zip(&self.d)
            .fold(Cx::new(T::zero(), T::zero()), |acc, (&j, d)| {
                acc + d * z.coords()[j]
            })
    }

    pub fn to_linear_form(&self) -> LinearForm<T> {
        let mut a = vec![Cx::new(T::zero(), T::zero()); self.dim];
        for (&j, &d) in self.support.iter().zip(&self.d) {
            a[j] = d;
        }
        LinearForm::new(a)
    }
}

fn validate_support(dim: usize, support: &[usize]) -> Result<(), PeriodicError> {
    if support.len() < 2 {
        return Err(PeriodicError::EmptyNullSpace(support.len()));
    }
    if support.windows(2).any(|w| w[0] >= w[1]) {
        return Err(PeriodicError::InvalidSupport(
            "indices must be strictly increasing".into(),
        ));
    }
    if let Some(&j) = support.iter().find(|&&j| j >= dim) {
        return Err(PeriodicError::InvalidSupport(format!(
            "index {j} out of range for n = {dim}"
        )));
    }
    Ok(())
}

/// One summand `H(s(z))`; `h[k]` is the coefficient of `s^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiTerm<T: Real> {
    pub form: NullLinearForm<T>,
    pub h: Vec<Cx<T>>,
}

impl<T: Real> PsiTerm<T> {
    /// `s^k`.
    pub fn power(form: NullLinearForm<T>, k: u32) -> Self {
        let mut h = vec![Cx::new(T::zero(), T::zero()); k as usize + 1];
        h[k as usize] = Cx::new(T::one(), T::zero());
        Self { form, h }
    }

    pub fn degree(&self) -> u32 {
        self.h
            .iter()
            .rposition(|x| x.norm() != T::zero())
            .unwrap_or(0) as u32
    }

    pub fn eval(&self, z: &Point<T>) -> Cx<T> {
        let s = self.form.eval(z);
        self.h
            .iter()
            .rev()
            .fold(Cx::new(T::zero(), T::zero()), |acc, &hk| acc * s + hk)
    }
}

/// `Ψ`, together with the shift it is periodic under.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicPolynomial<T: Real> {
    pub shift: Point<T>,
    pub terms: Vec<PsiTerm<T>>,
}

impl<T: Real> PeriodicPolynomial<T> {
    pub fn zero(shift: Point<T>) -> Self {
        Self {
            shift,
            terms: Vec::new(),
        }
    }

    pub fn new(shift: Point<T>, terms: Vec<PsiTerm<T>>) -> Self {
        Self { shift, terms }
    }

    pub fn dim(&self) -> usize {
        self.shift.dim()
    }

    pub fn is_zero(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.h.iter().all(|x| x.norm() == T::zero()))
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(PsiTerm::degree).max().unwrap_or(0)
    }

    /// Horner evaluation in each `s_t`; cheaper and better conditioned than
    /// the expanded polynomial.
    pub fn eval(&self, z: &Point<T>) -> Cx<T> {
        self.terms
            .iter()
            .fold(Cx::new(T::zero(), T::zero()), |acc, t| acc + t.eval(z))
    }

    pub fn to_poly(&self) -> MultiPoly<T> {
        self.terms
            .iter()
            .fold(MultiPoly::zero(self.dim()), |acc, t| {
                acc.add(&MultiPoly::univariate_in(&t.form.to_linear_form(), &t.h))
            })
    }

    pub fn to_expr(&self) -> ExprNode<T> {
        ExprNode::Poly(self.to_poly())
    }

    pub fn to_wire(&self) -> PsiWire {
        let pair = |x: &Cx<T>| {
            [
                x.re.to_f64().unwrap_or(f64::NAN),
                x.im.to_f64().unwrap_or(f64::NAN),
            ]
        };
        PsiWire {
            terms: self
                .terms
                .iter()
                .map(|t| PsiTermWire {
                    support: t.form.support.iter().map(|j| j + 1).collect(),
                    d: t.form.d.iter().map(pair).collect(),
                    h: t.h.iter().map(pair).collect(),
                })
                .collect(),
        }
    }

    pub fn from_wire(shift: Point<T>, wire: &PsiWire) -> Result<Self, PeriodicError> {
        let cx = |p: &[f64; 2]| Cx::new(T::lit(p[0]), T::lit(p[1]));
        let mut terms = Vec::with_capacity(wire.terms.len());
        for t in &wire.terms {
            if t.support.contains(&0) {
                return Err(PeriodicError::InvalidSupport(
                    "supports are one-based".into(),
                ));
            }
            let support = t.support.iter().map(|j| j - 1).collect();
            let form = NullLinearForm::new(&shift, support, t.d.iter().map(cx).collect())?;
            terms.push(PsiTerm {
                form,
                h: t.h.iter().map(cx).collect(),
            });
        }
        Ok(Self { shift, terms })
    }
}

/// Serialized form `{"terms":[{"support":[..],"d":[[re,im],..],"H":[[re,im],..]}]}`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PsiWire {
    pub terms: Vec<PsiTermWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiTermWire {
    pub support: Vec<usize>,
    pub d: Vec<[f64; 2]>,
    #[serde(rename = "H")]
    pub h: Vec<[f64; 2]>,
}

/// Random nonzero vector in the null space of `(c_j)_{j∈support}`.
///
/// The pivot is the support coordinate of largest `|c_j|`; the remaining
/// coefficients are drawn from the unit disc and the pivot is solved for.
pub fn sample_null_form<T: Real>(
    c: &Point<T>,
    support: &[usize],
    seed: u64,
) -> Result<NullLinearForm<T>, PeriodicError> {
    validate_support(c.dim(), support)?;
    let mut rng = sampling::stream(seed, 0);
    draw_null_form(c, support, &mut rng)
}

fn draw_null_form<T: Real, R: Rng>(
    c: &Point<T>,
    support: &[usize],
    rng: &mut R,
) -> Result<NullLinearForm<T>, PeriodicError> {
    let cs: Vec<Cx<T>> = support.iter().map(|&j| c.coords()[j]).collect();
    let (pivot, cmax) = cs
        .iter()
        .enumerate()
        .fold((0, T::zero()), |(p, m), (i, x)| {
            if x.norm() > m {
                (i, x.norm())
            } else {
                (p, m)
            }
        });
    loop {
        let mut d: Vec<Cx<T>> = (0..support.len())
            .map(|_| sampling::disc(rng, T::one()))
            .collect();
        if cmax > T::zero() {
            let rest = cs
                .iter()
                .zip(&d)
                .enumerate()
                .filter(|(i, _)| *i != pivot)
                .fold(Cx::new(T::zero(), T::zero()), |acc, (_, (cj, dj))| {
                    acc + cj * dj
                });
            d[pivot] = -rest / cs[pivot];
        }
        if d.iter().any(|x| x.norm() > T::lit(1e-3)) {
            return NullLinearForm::new(c, support.to_vec(), d);
        }
    }
}

/// How [`build_psi_with`] chooses the support of each term.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SupportMode {
    /// Random support size in `2..=n` and random coordinates, per term.
    Random,
    /// One term per coordinate subset of size `>= 2` (`n <= 4`); `term_count` is ignored.
    Exhaustive,
}

/// `term_count` random terms of degree in `2..=degree_budget`.
pub fn build_psi<T: Real>(
    c: &Point<T>,
    degree_budget: u32,
    term_count: usize,
    seed: u64,
) -> Result<PeriodicPolynomial<T>, PeriodicError> {
    build_psi_with(c, degree_budget, term_count, seed, SupportMode::Random)
}

pub fn build_psi_with<T: Real>(
    c: &Point<T>,
    degree_budget: u32,
    term_count: usize,
    seed: u64,
    mode: SupportMode,
) -> Result<PeriodicPolynomial<T>, PeriodicError> {
    let n = c.dim();
    if n < 2 {
        return Err(PeriodicError::DimensionTooSmall(n));
    }
    let supports: Vec<Option<Vec<usize>>> = match mode {
        SupportMode::Random => vec![None; term_count],
        SupportMode::Exhaustive => {
            if n > 4 {
                return Err(PeriodicError::ExhaustiveTooLarge(n));
            }
            (1u32..(1 << n))
                .filter(|m| m.count_ones() >= 2)
                .map(|m| Some((0..n).filter(|j| m & (1 << j) != 0).collect()))
                .collect()
        }
    };
    if supports.is_empty() {
        return Ok(PeriodicPolynomial::zero(c.clone()));
    }
    if degree_budget < 2 {
        return Err(PeriodicError::DegreeBudgetTooSmall(degree_budget));
    }
    let mut terms = Vec::with_capacity(supports.len());
    for (t, fixed) in supports.into_iter().enumerate() {
        let mut rng = sampling::stream(seed, t as u64);
        let support = match fixed {
            Some(s) => s,
            None => {
                let k = rng.random_range(2..=n);
                let mut s = sample(&mut rng, n, k).into_vec();
                s.sort_unstable();
                s
            }
        };
        let form = draw_null_form(c, &support, &mut rng)?;
        let degree = rng.random_range(2..=degree_budget) as usize;
        // constant and linear parts belong to b and L
        let mut h = vec![Cx::new(T::zero(), T::zero()); degree + 1];
        for hk in h.iter_mut().skip(2) {
            *hk = sampling::disc(&mut rng, T::one());
        }
        while h[degree].norm() < T::lit(1e-3) {
            h[degree] = sampling::disc(&mut rng, T::one());
        }
        terms.push(PsiTerm { form, h });
    }
    Ok(PeriodicPolynomial::new(c.clone(), terms))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicityReport<T: Real> {
    pub samples: usize,
    pub radius: T,
    pub seed: u64,
    /// `max |Ψ(z+c) − Ψ(z)|`.
    pub max_deviation: T,
    /// `max |Ψ(z+c) − Ψ(z)| / max(1, |Ψ(z)|, |Ψ(z+c)|)`.
    pub max_scaled_deviation: T,
    pub max_value: T,
    pub tol: T,
    pub pass: bool,
}

/// Samples the polydisc of `radius` and compares `Ψ(z + c)` with `Ψ(z)`.
///
/// Passes when the deviation relative to `max(1, |Ψ|)` stays below
/// [`PERIODIC_TOL`]; the absolute maximum is reported alongside.
pub fn check_periodicity<T: Real>(
    psi: &PeriodicPolynomial<T>,
    samples: usize,
    radius: T,
    seed: u64,
) -> PeriodicityReport<T> {
    check_periodicity_under(psi, &psi.shift, samples, radius, seed)
}

/// As [`check_periodicity`] for an arbitrary shift (e.g. `2c`).
pub fn check_periodicity_under<T: Real>(
    psi: &PeriodicPolynomial<T>,
    shift: &Point<T>,
    samples: usize,
    radius: T,
    seed: u64,
) -> PeriodicityReport<T> {
    let tol = T::lit(PERIODIC_TOL);
    let mut max_dev = T::zero();
    let mut max_scaled = T::zero();
    let mut max_value = T::zero();
    for i in 0..samples {
        let mut rng = sampling::stream(seed, i as u64);
        let z = sampling::polydisc(&mut rng, psi.dim(), radius);
        let p0 = psi.eval(&z);
        let p1 = psi.eval(&z.add(shift));
        let dev = (p1 - p0).norm();
        let scale = T::one().max(p0.norm()).max(p1.norm());
        max_dev = max_dev.max(dev);
        max_scaled = max_scaled.max(dev / scale);
        max_value = max_value.max(p0.norm()).max(p1.norm());
    }
    PeriodicityReport {
        samples,
        radius,
        seed,
        max_deviation: max_dev,
        max_scaled_deviation: max_scaled,
        max_value,
        tol,
        pass: max_scaled < tol,
    }
}

/// Result of fitting `Ψ` by polynomials in the null forms of one coordinate pair.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFit {
    /// Zero-based coordinate pair.
    pub pair: (usize, usize),
    /// `‖Ψ − fit‖ / ‖Ψ‖` over the sample points.
    pub relative_residual: f64,
}

/// Least-squares fit of `Ψ` by polynomials (degree `≤ deg Ψ`) in the null
/// space of `(c_j, c_k)` restricted to the pair `(j, k)`.
///
/// A small residual means `Ψ` has a representation using that single pair.
pub fn single_pair_fit<T: Real>(
    psi: &PeriodicPolynomial<T>,
    pair: (usize, usize),
    samples: usize,
    radius: f64,
    seed: u64,
) -> PairFit {
    let (j, k) = pair;
    let c = |i: usize| to_c64(psi.shift.coords()[i]);
    let (cj, ck) = (c(j), c(k));
    // basis of the null space of the 1×2 row (c_j, c_k)
    let basis: Vec<(C64, C64)> = if cj.norm() == 0.0 && ck.norm() == 0.0 {
        vec![
            (C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
            (C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        ]
    } else {
        vec![(ck, -cj)]
    };
    let deg = psi.degree().max(1) as usize;
    let monomials: Vec<Vec<usize>> = match basis.len() {
        1 => (0..=deg).map(|p| vec![p]).collect(),
        _ => (0..=deg)
            .flat_map(|p| (0..=deg - p).map(move |q| vec![p, q]))
            .collect(),
    };
    let mut a = DMatrix::<C64>::zeros(samples, monomials.len());
    let mut b = DVector::<C64>::zeros(samples);
    for i in 0..samples {
        let mut rng = sampling::stream(seed, i as u64);
        let z: Point<T> = sampling::polydisc(&mut rng, psi.dim(), T::lit(radius));
        let zj = to_c64(z.coords()[j]);
        let zk = to_c64(z.coords()[k]);
        let s: Vec<C64> = basis.iter().map(|(dj, dk)| dj * zj + dk * zk).collect();
        for (col, m) in monomials.iter().enumerate() {
            a[(i, col)] = m
                .iter()
                .zip(&s)
                .fold(C64::new(1.0, 0.0), |acc, (&p, sv)| acc * sv.powu(p as u32));
        }
        b[i] = to_c64(psi.eval(&z));
    }
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return PairFit {
            pair,
            relative_residual: 0.0,
        };
    }
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-13).expect("svd computed with u and v");
    let r = &a * x - &b;
    PairFit {
        pair,
        relative_residual: r.norm() / bnorm,
    }
}

/// Smallest single-pair residual over all pairs containing `anchor`.
pub fn best_single_pair_fit<T: Real>(
    psi: &PeriodicPolynomial<T>,
    anchor: usize,
    samples: usize,
    radius: f64,
    seed: u64,
) -> PairFit {
    (0..psi.dim())
        .filter(|&k| k != anchor)
        .map(|k| {
            let pair = if anchor < k { (anchor, k) } else { (k, anchor) };
            single_pair_fit(psi, pair, samples, radius, seed)
        })
        .min_by(|x, y| x.relative_residual.total_cmp(&y.relative_residual))
        .expect("n >= 2")
}

type C64 = Complex<f64>;

fn to_c64<T: Real>(x: Cx<T>) -> C64 {
    C64::new(
        x.re.to_f64().unwrap_or(f64::NAN),
        x.im.to_f64().unwrap_or(f64::NAN),
    )
}
