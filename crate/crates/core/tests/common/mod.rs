//! Random generators shared by the integration tests.
#![allow(dead_code)]

use gqe_core::{check_admissibility, derive_constants, Coefficients, SignBranch, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn real(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..hi)
}

pub fn complex(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    C64::new(real(rng, -r, r), real(rng, -r, r))
}

/// Accepts sets that are admissible and give well-conditioned constants on both branches.
pub fn usable(c: &Coefficients) -> bool {
    check_admissibility(c, 1e-6).admissible
        && c.dq().norm() > 0.05
        && c.delta().norm() > 0.05
        && SignBranch::BOTH
            .iter()
            .all(|&b| derive_constants(c, b).is_ok())
}

/// Random admissible complex coefficients.
pub fn admissible_complex(rng: &mut ChaCha8Rng) -> Coefficients {
    loop {
        let v: Vec<C64> = (0..6).map(|_| complex(rng, 3.0)).collect();
        let c = Coefficients::new(v[0], v[1], v[2], v[3], v[4], v[5]);
        if usable(&c) {
            return c;
        }
    }
}

/// Random admissible real coefficients; `gamma` is derived from the rest.
pub fn admissible_real_with(
    rng: &mut ChaCha8Rng,
    gamma: impl Fn(f64, f64, f64, f64) -> f64,
) -> Coefficients {
    loop {
        let (a, b, alpha, beta, cc) = (
            real(rng, 0.5, 4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            real(rng, 0.5, 4.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            real(rng, 0.3, 3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 },
            real(rng, -2.0, 2.0),
            real(rng, -3.0, 3.0),
        );
        let g = gamma(a, b, alpha, beta);
        if !g.is_finite() || g.abs() > 10.0 {
            continue;
        }
        let c = Coefficients::real(a, b, alpha, beta, g, cc);
        if usable(&c) {
            return c;
        }
    }
}

/// Admissible real coefficients with `T1 = T2`.
pub fn with_equal_shifts(rng: &mut ChaCha8Rng) -> Coefficients {
    admissible_real_with(rng, |a, b, alpha, beta| beta * (alpha + b) / (alpha + a))
}

/// Admissible real coefficients with `T2 = 0`.
pub fn with_zero_t2(rng: &mut ChaCha8Rng) -> Coefficients {
    admissible_real_with(rng, |a, _, alpha, beta| alpha * beta / a)
}
