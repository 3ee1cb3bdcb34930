//! Seeded random draws shared by the sampling-based checks.
//!
//! Every draw comes from a ChaCha8 stream keyed by `(seed, index)`, so a
//! sample's value depends only on its index and never on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::Point;
use crate::scalar::{Cx, Real};

pub(crate) fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform on the closed disc `|w| ≤ radius`.
pub(crate) fn disc<T: Real, R: Rng + ?Sized>(rng: &mut R, radius: T) -> Cx<T> {
    let u: f64 = rng.random();
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = T::lit(u.sqrt()) * radius;
    Cx::new(r * T::lit(theta.cos()), r * T::lit(theta.sin()))
}

/// Independent uniform draws per coordinate from the polydisc of `radius`.
pub(crate) fn polydisc<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize, radius: T) -> Point<T> {
    Point::new((0..dim).map(|_| disc(rng, radius)).collect())
}
