//! Monte-Carlo Nevanlinna functionals on spheres of `ℂⁿ`.
//!
//! `m(r, f)` is the mean of `log⁺|f|` over the unitarily invariant probability
//! measure on `|z| = r`. For entire `f` the counting term vanishes, so
//! `T(r, f) = m(r, f)`. The order is the least-squares slope of `ln T` against
//! `ln r` over a few radii.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use thiserror::Error;

use crate::expr::{ExprError, ExprNode, Point};
use crate::sampling::stream;
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NevanlinnaError {
    #[error("sphere needs dimension >= 1, radius > 0 and at least one sample")]
    BadSampler,
    #[error("expression has a quotient; only entire expressions are supported")]
    NotEntire,
    #[error("order estimation needs a non-constant expression")]
    ConstantExpression,
    #[error("order estimation needs at least 4 strictly increasing radii above 1")]
    BadRadii,
    #[error("dimension mismatch: expression has {expected}, sphere has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("characteristic estimate {value:e} at r = {radius} is not positive; cannot take its logarithm")]
    DegenerateFit { radius: f64, value: f64 },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

/// Uniform points on `|z| = r` in `ℂⁿ`, from `2n` normalised Gaussians.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereSampler<T: Real> {
    pub dim: usize,
    pub radius: T,
    pub samples: usize,
    pub seed: u64,
    /// Separates the streams of samplers sharing a seed (the radius index).
    pub tag: u32,
}

impl<T: Real> SphereSampler<T> {
    pub fn new(dim: usize, radius: T, samples: usize, seed: u64) -> Result<Self, NevanlinnaError> {
        if dim == 0 || samples == 0 || !(radius > T::zero() && radius.is_finite()) {
            return Err(NevanlinnaError::BadSampler);
        }
        Ok(Self {
            dim,
            radius,
            samples,
            seed,
            tag: 0,
        })
    }

    pub fn with_tag(mut self, tag: u32) -> Self {
        self.tag = tag;
        self
    }

    pub fn point(&self, index: usize) -> Point<T> {
        let mut rng = stream(self.seed, ((self.tag as u64) << 32) | index as u64);
        let g: Vec<f64> = (0..2 * self.dim)
            .map(|_| rng.sample(StandardNormal))
            .collect();
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        let s = self.radius / T::lit(norm);
        Point::new(
            g.chunks(2)
                .map(|p| Cx::new(T::lit(p[0]) * s, T::lit(p[1]) * s))
                .collect(),
        )
    }

    pub fn points(&self) -> Vec<Point<T>> {
        (0..self.samples).map(|i| self.point(i)).collect()
    }
}

fn check_entire<T: Real>(e: &ExprNode<T>, dim: usize) -> Result<(), NevanlinnaError> {
    if e.has_quotient() {
        return Err(NevanlinnaError::NotEntire);
    }
    match e.dimension() {
        Some(d) if d != dim => Err(NevanlinnaError::DimensionMismatch {
            expected: d,
            got: dim,
        }),
        _ => Ok(()),
    }
}

/// `log⁺|e(z)|` at every sample point, in index order.
pub fn log_plus_values<T: Real>(
    e: &ExprNode<T>,
    sampler: &SphereSampler<T>,
) -> Result<Vec<T>, NevanlinnaError> {
    check_entire(e, sampler.dim)?;
    (0..sampler.samples)
        .into_par_iter()
        .map(|i| Ok(e.eval_log_magnitude(&sampler.point(i))?.max(T::zero())))
        .collect()
}

fn mean<T: Real>(xs: &[T]) -> T {
    xs.iter().fold(T::zero(), |a, &x| a + x) / T::lit(xs.len() as f64)
}

/// `m(r, e)`.
pub fn proximity<T: Real>(
    e: &ExprNode<T>,
    sampler: &SphereSampler<T>,
) -> Result<T, NevanlinnaError> {
    Ok(mean(&log_plus_values(e, sampler)?))
}

/// `T(r, e) = m(r, e)`; the counting term is zero for entire `e`.
pub fn characteristic<T: Real>(
    e: &ExprNode<T>,
    sampler: &SphereSampler<T>,
) -> Result<T, NevanlinnaError> {
    proximity(e, sampler)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrderEstimate<T: Real> {
    pub radii: Vec<T>,
    pub t_values: Vec<T>,
    /// Least-squares slope of `ln T` against `ln r`.
    pub order: T,
    /// RMS deviation of the fitted line.
    pub fit_residual: T,
    /// Bootstrap standard error of `order`.
    pub std_error: T,
}

impl<T: Real> OrderEstimate<T> {
    /// `(ln r, ln T)` per radius.
    pub fn log_pairs(&self) -> Vec<(T, T)> {
        self.radii
            .iter()
            .zip(&self.t_values)
            .map(|(r, t)| (r.ln(), t.ln()))
            .collect()
    }
}

/// Slope and RMS residual of the least-squares line through `(x, y)`.
fn fit_line<T: Real>(x: &[T], y: &[T]) -> (T, T) {
    let (mx, my) = (mean(x), mean(y));
    let sxy = x
        .iter()
        .zip(y)
        .fold(T::zero(), |a, (&xi, &yi)| a + (xi - mx) * (yi - my));
    let sxx = x.iter().fold(T::zero(), |a, &xi| a + (xi - mx) * (xi - mx));
    let slope = sxy / sxx;
    let sse = x.iter().zip(y).fold(T::zero(), |a, (&xi, &yi)| {
        let d = yi - (my + slope * (xi - mx));
        a + d * d
    });
    (slope, (sse / T::lit(x.len() as f64)).sqrt())
}

/// Bootstrap resamples behind the standard error.
pub const BOOTSTRAP_ROUNDS: u64 = 200;

pub fn estimate_order<T: Real>(
    e: &ExprNode<T>,
    radii: &[T],
    samples: usize,
    seed: u64,
) -> Result<OrderEstimate<T>, NevanlinnaError> {
    if radii.len() < 4 || radii[0] <= T::one() || radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(NevanlinnaError::BadRadii);
    }
    let dim = e.dimension().ok_or(NevanlinnaError::ConstantExpression)?;
    let per_radius = radii
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            log_plus_values(
                e,
                &SphereSampler::new(dim, r, samples, seed)?.with_tag(i as u32),
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let t_values: Vec<T> = per_radius.iter().map(|v| mean(v)).collect();
    for (&r, &t) in radii.iter().zip(&t_values) {
        if t <= T::zero() {
            return Err(NevanlinnaError::DegenerateFit {
                radius: r.to_f64().unwrap_or(f64::NAN),
                value: t.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let ln_r: Vec<T> = radii.iter().map(|r| r.ln()).collect();
    let ln_t: Vec<T> = t_values.iter().map(|t| t.ln()).collect();
    let (order, fit_residual) = fit_line(&ln_r, &ln_t);

    let slopes: Vec<T> = (0..BOOTSTRAP_ROUNDS)
        .into_par_iter()
        .filter_map(|b| {
            let mut rng = stream(seed ^ 0x5eed_b007, b);
            let ln_t: Vec<T> = per_radius
                .iter()
                .map(|v| {
                    let s =
                        (0..v.len()).fold(T::zero(), |a, _| a + v[rng.random_range(0..v.len())]);
                    (s / T::lit(v.len() as f64)).ln()
                })
                .collect();
            ln_t.iter()
                .all(|x| x.is_finite())
                .then(|| fit_line(&ln_r, &ln_t).0)
        })
        .collect();
    let m = mean(&slopes);
    let var = slopes.iter().fold(T::zero(), |a, &s| a + (s - m) * (s - m))
        / T::lit((slopes.len().max(2) - 1) as f64);
    Ok(OrderEstimate {
        radii: radii.to_vec(),
        t_values,
        order,
        fit_residual,
        std_error: var.sqrt(),
    })
}
