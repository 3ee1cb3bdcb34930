//! Scalar abstraction shared by every numeric module.
//!
//! All math in this crate is written against [`Real`]; complex values are
//! `num_complex::Complex<T>`. `f64` is the working precision for the CLI and
//! the acceptance suite, `f32` is supported for cheap sweeps.

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for finite inputs on f32/f64.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Largest `x` with `exp(x)` finite.
    fn ln_max() -> Self {
        Self::max_value().ln()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex numbers over a [`Real`].
pub type Cx<T> = Complex<T>;

pub(crate) fn re<T: Real>(x: T) -> Cx<T> {
    Complex::new(x, T::zero())
}

pub(crate) fn i_unit<T: Real>() -> Cx<T> {
    Complex::new(T::zero(), T::one())
}

pub(crate) fn is_finite<T: Real>(z: Cx<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// `|a - b| / max(1, |b|)`.
pub fn rel_err<T: Real>(a: Cx<T>, b: Cx<T>) -> T {
    (a - b).norm() / T::one().max(b.norm())
}
