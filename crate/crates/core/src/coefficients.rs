//! Equation coefficients and every constant derived from them.
//!
//! The quadratic part `a f² + 2α f g + b g²` is diagonalised by a complex
//! rotation `(ξ, η)`; the eigenvalues are `A = ((a+b) + σ√((a−b)²+4α²))/2`
//! and `B = ((a+b) − σ√(...))/2` for the chosen [`SignBranch`] `σ`. Each
//! radical is evaluated once (principal branch) and reused wherever it
//! appears, so `D11`/`E11` share one `√(D·A/−Δ)` and `D12`/`E12` share one
//! `√(D·B/−Δ)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{i_unit, re, Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CoeffError {
    #[error("inadmissible coefficients: {0}")]
    InadmissibleCoefficients(String),
    #[error("degenerate radical: {0} vanishes")]
    DegenerateRadical(&'static str),
    #[error("degenerate denominator iE11 - E12 (|.| = {0:e})")]
    DegenerateDenominator(f64),
}

/// The shared `±` choice inside `ξ±`, `η±`, `A±`, `B∓`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignBranch {
    Plus,
    Minus,
}

impl SignBranch {
    pub const BOTH: [SignBranch; 2] = [SignBranch::Plus, SignBranch::Minus];

    pub fn sign<T: Real>(self) -> T {
        match self {
            SignBranch::Plus => T::one(),
            SignBranch::Minus => -T::one(),
        }
    }
}

/// Coefficients of `A(f,g) = a f² + 2α f g + b g² + 2β f + 2γ g + C`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientSet<T: Real> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub alpha: Cx<T>,
    pub beta: Cx<T>,
    pub gamma: Cx<T>,
}

impl<T: Real> CoefficientSet<T> {
    /// Argument order follows the usual `(a, b, α, β, γ, C)` listing.
    pub fn new(a: Cx<T>, b: Cx<T>, alpha: Cx<T>, beta: Cx<T>, gamma: Cx<T>, c: Cx<T>) -> Self {
        Self {
            a,
            b,
            c,
            alpha,
            beta,
            gamma,
        }
    }

    pub fn real(a: f64, b: f64, alpha: f64, beta: f64, gamma: f64, c: f64) -> Self {
        let r = |x: f64| re(T::lit(x));
        Self::new(r(a), r(b), r(alpha), r(beta), r(gamma), r(c))
    }

    /// The circular equation `f² + g² = 1`.
    pub fn circular() -> Self {
        Self::real(1.0, 1.0, 0.0, 0.0, 0.0, -1.0)
    }

    /// Companion determinant `abC + 2αβγ − aγ² − bβ² − Cα²`.
    pub fn delta(&self) -> Cx<T> {
        let two = T::lit(2.0);
        self.a * self.b * self.c + self.alpha * self.beta * self.gamma * two
            - self.a * self.gamma * self.gamma
            - self.b * self.beta * self.beta
            - self.c * self.alpha * self.alpha
    }

    /// `ab − α²`.
    pub fn dq(&self) -> Cx<T> {
        self.a * self.b - self.alpha * self.alpha
    }

    pub fn eval(&self, f: Cx<T>, g: Cx<T>) -> Cx<T> {
        let two = T::lit(2.0);
        self.a * f * f
            + self.alpha * f * g * two
            + self.b * g * g
            + self.beta * f * two
            + self.gamma * g * two
            + self.c
    }

    /// Largest magnitude among the six constituent terms of `A(f,g)`.
    pub fn dominant_term(&self, f: Cx<T>, g: Cx<T>) -> T {
        let two = T::lit(2.0);
        [
            (self.a * f * f).norm(),
            (self.alpha * f * g).norm() * two,
            (self.b * g * g).norm(),
            (self.beta * f).norm() * two,
            (self.gamma * g).norm() * two,
            self.c.norm(),
        ]
        .into_iter()
        .fold(T::zero(), T::max)
    }

    /// `|A(f,g)| / max(term magnitudes, 1)`.
    pub fn scaled_residual(&self, f: Cx<T>, g: Cx<T>) -> T {
        self.eval(f, g).norm() / self.dominant_term(f, g).max(T::one())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityCheck<T: Real> {
    pub condition: &'static str,
    pub magnitude: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport<T: Real> {
    pub checks: Vec<AdmissibilityCheck<T>>,
    pub delta: Cx<T>,
    pub dq: Cx<T>,
    pub admissible: bool,
}

impl<T: Real> AdmissibilityReport<T> {
    pub fn failures(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.condition)
            .collect()
    }
}

pub const DEFAULT_TOL: f64 = 1e-12;

/// Checks `ab ≠ 0`, `Δ ≠ 0`, `α² ≠ 0` and `α² ≠ ab`, each as `|·| > tol`.
pub fn check_admissibility<T: Real>(coeffs: &CoefficientSet<T>, tol: T) -> AdmissibilityReport<T> {
    let delta = coeffs.delta();
    let dq = coeffs.dq();
    let alpha_sq = coeffs.alpha * coeffs.alpha;
    let checks: Vec<_> = [
        ("ab != 0", (coeffs.a * coeffs.b).norm()),
        ("Delta != 0", delta.norm()),
        ("alpha^2 != 0", alpha_sq.norm()),
        ("alpha^2 != ab", dq.norm()),
    ]
    .into_iter()
    .map(|(condition, magnitude)| AdmissibilityCheck {
        condition,
        magnitude,
        pass: magnitude > tol,
    })
    .collect();
    let admissible = checks.iter().all(|c| c.pass);
    AdmissibilityReport {
        checks,
        delta,
        dq,
        admissible,
    }
}

fn require_admissible<T: Real>(coeffs: &CoefficientSet<T>, tol: T) -> Result<(), CoeffError> {
    let report = check_admissibility(coeffs, tol);
    if report.admissible {
        Ok(())
    } else {
        Err(CoeffError::InadmissibleCoefficients(
            report.failures().join(", "),
        ))
    }
}

/// Radicals computed once per branch and shared by every constant using them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Radicals<T: Real> {
    /// `√((a−b)² + 4α²)`
    pub disc_root: Cx<T>,
    /// `√(((b−a) ± disc_root)² + 4α²)`
    pub eig_norm: Cx<T>,
    /// `√(D·A/−Δ)`
    pub scale_a: Cx<T>,
    /// `√(D·B/−Δ)`
    pub scale_b: Cx<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants<T: Real> {
    pub delta: Cx<T>,
    pub dq: Cx<T>,
    pub xi1: Cx<T>,
    pub eta1: Cx<T>,
    pub a_plus: Cx<T>,
    pub b_minus: Cx<T>,
    pub d11: Cx<T>,
    pub d12: Cx<T>,
    pub e11: Cx<T>,
    pub e12: Cx<T>,
    pub t1: Cx<T>,
    pub t2: Cx<T>,
    pub radicals: Radicals<T>,
    pub branch: SignBranch,
}

/// Shift constants `T1`, `T2`: the critical point of `A`.
pub fn critical_point<T: Real>(coeffs: &CoefficientSet<T>) -> (Cx<T>, Cx<T>) {
    let dq = coeffs.dq();
    let t1 = (coeffs.alpha * coeffs.gamma - coeffs.b * coeffs.beta) / dq;
    let t2 = (coeffs.alpha * coeffs.beta - coeffs.a * coeffs.gamma) / dq;
    (t1, t2)
}

pub fn derive_constants<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
) -> Result<DerivedConstants<T>, CoeffError> {
    derive_constants_with_tol(coeffs, branch, T::lit(DEFAULT_TOL))
}

pub fn derive_constants_with_tol<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    tol: T,
) -> Result<DerivedConstants<T>, CoeffError> {
    require_admissible(coeffs, tol)?;
    let CoefficientSet { a, b, alpha, .. } = *coeffs;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let sigma = branch.sign::<T>();

    let delta = coeffs.delta();
    let dq = coeffs.dq();
    let disc_root = ((a - b) * (a - b) + alpha * alpha * four).sqrt();
    let k = (b - a) + disc_root * sigma;
    let eig_norm = (k * k + alpha * alpha * four).sqrt();
    if eig_norm.norm() < tol {
        return Err(CoeffError::DegenerateRadical("eigenvector normaliser"));
    }
    let xi1 = alpha * two / eig_norm;
    let eta1 = k / eig_norm;
    let a_plus = ((a + b) + disc_root * sigma) / two;
    let b_minus = ((a + b) - disc_root * sigma) / two;

    let scale_a = (dq * a_plus / (-delta)).sqrt();
    let scale_b = (dq * b_minus / (-delta)).sqrt();
    if scale_a.norm() < tol {
        return Err(CoeffError::DegenerateRadical("sqrt(D A / -Delta)"));
    }
    if scale_b.norm() < tol {
        return Err(CoeffError::DegenerateRadical("sqrt(D B / -Delta)"));
    }
    let (t1, t2) = critical_point(coeffs);

    Ok(DerivedConstants {
        delta,
        dq,
        xi1,
        eta1,
        a_plus,
        b_minus,
        d11: xi1 / scale_a,
        d12: eta1 / scale_b,
        e11: eta1 / scale_a,
        e12: xi1 / scale_b,
        t1,
        t2,
        radicals: Radicals {
            disc_root,
            eig_norm,
            scale_a,
            scale_b,
        },
        branch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RConstants<T: Real> {
    pub r11: Cx<T>,
    pub r12: Cx<T>,
    pub r13: Cx<T>,
    pub r14: Cx<T>,
    pub r21: Cx<T>,
    pub r22: Cx<T>,
    pub r23: Cx<T>,
    pub r24: Cx<T>,
}

/// Amplitudes of the wave pair `f = P cos h − Q sin h + S`, `g = U cos h + V sin h + W`.
///
/// Both the general constants (`D11, D12, E11, E12`) and the normalised
/// corollary constants (`A11, A12, B11, B12`) feed the same R formulas.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveAmplitudes<T: Real> {
    pub cos_f: Cx<T>,
    pub sin_f: Cx<T>,
    pub cos_g: Cx<T>,
    pub sin_g: Cx<T>,
    pub t1: Cx<T>,
    pub t2: Cx<T>,
}

impl<T: Real> From<&DerivedConstants<T>> for WaveAmplitudes<T> {
    fn from(d: &DerivedConstants<T>) -> Self {
        Self {
            cos_f: d.d11,
            sin_f: d.d12,
            cos_g: d.e11,
            sin_g: d.e12,
            t1: d.t1,
            t2: d.t2,
        }
    }
}

impl<T: Real> From<&CorollaryConstants<T>> for WaveAmplitudes<T> {
    fn from(k: &CorollaryConstants<T>) -> Self {
        let zero = Cx::new(T::zero(), T::zero());
        Self {
            cos_f: k.a11,
            sin_f: k.a12,
            cos_g: k.b11,
            sin_g: k.b12,
            t1: zero,
            t2: zero,
        }
    }
}

pub fn compute_r_constants<T: Real>(
    derived: &DerivedConstants<T>,
) -> Result<RConstants<T>, CoeffError> {
    r_constants_from(&WaveAmplitudes::from(derived), T::lit(DEFAULT_TOL))
}

pub fn r_constants_from<T: Real>(
    w: &WaveAmplitudes<T>,
    tol: T,
) -> Result<RConstants<T>, CoeffError> {
    let i = i_unit::<T>();
    let two = T::lit(2.0);
    let den = i * w.cos_g - w.sin_g;
    if den.norm() < tol {
        return Err(CoeffError::DegenerateDenominator(
            den.norm().to_f64().unwrap_or(0.0),
        ));
    }
    // R13 and R23 are one value.
    let r13 = (i * w.cos_g + w.sin_g) / den;
    Ok(RConstants {
        r11: (i * w.cos_f - w.sin_f) / den,
        r12: (i * w.cos_f + w.sin_f) / den,
        r13,
        r14: i * (w.t2 - w.t1) * two / den,
        r21: (-w.cos_f - i * w.sin_f) / den,
        r22: (w.cos_f - i * w.sin_f) / den,
        r23: r13,
        r24: i * w.t2 * two / den,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorollaryConstants<T: Real> {
    pub k11: Cx<T>,
    pub k12: Cx<T>,
    pub k13: Cx<T>,
    pub k14: Cx<T>,
    pub a11: Cx<T>,
    pub a12: Cx<T>,
    pub b11: Cx<T>,
    pub b12: Cx<T>,
    pub branch: SignBranch,
}

/// Constants for the normalised equation `a f² + 2α f g + b g² = 1`.
///
/// Only `a`, `b`, `α` are read; `β`, `γ`, `C` are ignored.
pub fn compute_corollary_constants<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
) -> Result<CorollaryConstants<T>, CoeffError> {
    let tol = T::lit(DEFAULT_TOL);
    let CoefficientSet { a, b, alpha, .. } = *coeffs;
    if (a * b).norm() <= tol || (alpha * alpha).norm() <= tol || coeffs.dq().norm() <= tol {
        return Err(CoeffError::InadmissibleCoefficients(
            "corollary needs ab != 0, alpha^2 != 0, alpha^2 != ab".into(),
        ));
    }
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let sqrt2 = two.sqrt();
    let sigma = branch.sign::<T>();

    let disc_root = ((a - b) * (a - b) + alpha * alpha * four).sqrt();
    let k14 = (b - a) + disc_root * sigma;
    let k11 = ((a + b) + disc_root * sigma).sqrt();
    let k12 = (k14 * k14 + alpha * alpha * four).sqrt();
    let k13 = ((a + b) - disc_root * sigma).sqrt();
    for (name, v) in [("K11", k11), ("K12", k12), ("K13", k13)] {
        if v.norm() < tol {
            return Err(CoeffError::DegenerateRadical(name));
        }
    }
    Ok(CorollaryConstants {
        k11,
        k12,
        k13,
        k14,
        a11: alpha * two * sqrt2 / (k11 * k12),
        a12: k14 * sqrt2 / (k12 * k13),
        b11: k14 * sqrt2 / (k11 * k12),
        b12: alpha * two * sqrt2 / (k12 * k13),
        branch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type C = Cx<f64>;

    fn cx(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn ex1() -> CoefficientSet<f64> {
        CoefficientSet::real(3.0, 1.0, -2.0, 2.0, -2.0, -1.0)
    }

    fn ex2() -> CoefficientSet<f64> {
        CoefficientSet::real(2.0, 3.0, 2.0, -1.0, -1.0, -1.0)
    }

    fn close(a: C, b: C, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn admissibility_of_first_example() {
        let r = check_admissibility(&ex1(), 1e-12);
        assert!(r.admissible);
        assert!(close(r.delta, cx(1.0, 0.0), 1e-14));
        assert!(close(r.dq, cx(-1.0, 0.0), 1e-14));
    }

    #[test]
    fn alpha_squared_equal_ab_is_rejected() {
        let c = CoefficientSet::<f64>::real(1.0, 1.0, 1.0, 0.3, -0.7, 2.0);
        let r = check_admissibility(&c, 1e-12);
        assert!(!r.admissible);
        assert_eq!(r.failures(), vec!["alpha^2 != ab"]);
        assert!(matches!(
            derive_constants(&c, SignBranch::Plus),
            Err(CoeffError::InadmissibleCoefficients(_))
        ));
    }

    #[test]
    fn admissibility_of_second_example() {
        let r = check_admissibility(&ex2(), 1e-12);
        assert!(r.admissible);
        assert!(close(r.delta, cx(-3.0, 0.0), 1e-14));
        assert!(close(r.dq, cx(2.0, 0.0), 1e-14));
    }

    #[test]
    fn first_example_printed_constants() {
        let d = derive_constants(&ex1(), SignBranch::Plus).unwrap();
        assert!(close(d.t1, cx(-2.0, 0.0), 1e-14));
        assert!(close(d.t2, cx(-2.0, 0.0), 1e-14));
        let printed = C::new(-2.0, 0.0) / C::new(10.0 + 6.0 * 5f64.sqrt(), 0.0).sqrt();
        assert!(close(d.d11, printed, 1e-12));
        // (−1 + √5)/√(30 − 14√5); the radicand is negative so the principal root is imaginary.
        let printed12 =
            C::new(-1.0 + 5f64.sqrt(), 0.0) / C::new(30.0 - 14.0 * 5f64.sqrt(), 0.0).sqrt();
        assert!(close(d.d12, printed12, 1e-12));
    }

    #[test]
    fn second_example_printed_constants() {
        let d = derive_constants(&ex2(), SignBranch::Plus).unwrap();
        let s17 = 17f64.sqrt();
        assert!(close(d.t1, cx(0.5, 0.0), 1e-14));
        assert!(close(d.t2, cx(0.0, 0.0), 1e-14));
        let d11 = 4.0 * 3f64.sqrt() / (204.0 + 44.0 * s17).sqrt();
        let d12 = 3f64.sqrt() * (1.0 + s17) / (136.0 - 24.0 * s17).sqrt();
        assert!(close(d.d11, cx(d11, 0.0), 1e-12));
        assert!(close(d.d12, cx(d12, 0.0), 1e-12));
    }

    #[test]
    fn zero_linear_terms_give_zero_shifts() {
        let c = CoefficientSet::<f64>::new(
            cx(1.3, 0.2),
            cx(-0.4, 1.0),
            cx(0.7, -0.3),
            cx(0.0, 0.0),
            cx(0.0, 0.0),
            cx(2.0, 0.5),
        );
        let d = derive_constants(&c, SignBranch::Minus).unwrap();
        assert_eq!(d.t1, cx(0.0, 0.0));
        assert_eq!(d.t2, cx(0.0, 0.0));
    }

    #[test]
    fn r_constants_of_first_example() {
        for branch in SignBranch::BOTH {
            let d = derive_constants(&ex1(), branch).unwrap();
            let r = compute_r_constants(&d).unwrap();
            assert!(close(r.r13 / (r.r11 * r.r12), cx(3.0, 0.0), 1e-12));
            assert!(close(
                C::new(1.0, 0.0) / (r.r11 * r.r11),
                cx(5.0, 0.0),
                1e-12
            ));
            // T1 = T2 here
            assert!(r.r14.norm() < 1e-14);
        }
    }

    #[test]
    fn unit_modulus_r13_for_real_e_constants() {
        let d = derive_constants(&ex2(), SignBranch::Plus).unwrap();
        assert!(d.e11.im.abs() < 1e-15 && d.e12.im.abs() < 1e-15);
        let r = compute_r_constants(&d).unwrap();
        assert!((r.r13.norm() - 1.0).abs() < 1e-12);
        assert_eq!(r.r13, r.r23);
        // T2 = 0 so R24 vanishes
        assert!(r.r24.norm() < 1e-14);
    }

    #[test]
    fn degenerate_denominator_is_reported() {
        let w = WaveAmplitudes {
            cos_f: cx(1.0, 0.0),
            sin_f: cx(1.0, 0.0),
            cos_g: cx(1.0, 0.0),
            sin_g: cx(0.0, 1.0),
            t1: cx(0.0, 0.0),
            t2: cx(0.0, 0.0),
        };
        assert!(matches!(
            r_constants_from(&w, 1e-12),
            Err(CoeffError::DegenerateDenominator(_))
        ));
    }

    #[test]
    fn corollary_k14() {
        let c = CoefficientSet::<f64>::real(2.0, 3.0, 1.0, 0.0, 0.0, -1.0);
        let k = compute_corollary_constants(&c, SignBranch::Plus).unwrap();
        assert!(close(k.k14, cx(1.0 + 5f64.sqrt(), 0.0), 1e-14));

        let eq = CoefficientSet::<f64>::real(1.5, 1.5, 0.4, 0.0, 0.0, -1.0);
        let k = compute_corollary_constants(&eq, SignBranch::Plus).unwrap();
        assert!(close(k.k14, cx(0.8, 0.0), 1e-14));
    }

    #[test]
    fn f32_constants_agree_with_f64() {
        let c32 = CoefficientSet::<f32>::real(3.0, 1.0, -2.0, 2.0, -2.0, -1.0);
        let d32 = derive_constants_with_tol(&c32, SignBranch::Plus, 1e-6).unwrap();
        let d64 = derive_constants(&ex1(), SignBranch::Plus).unwrap();
        assert!((d32.d11.re as f64 - d64.d11.re).abs() < 1e-5);
        assert!((d32.d12.im as f64 - d64.d12.im).abs() < 1e-5);
    }

    fn arb_c() -> impl Strategy<Value = C> {
        (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(r, i)| C::new(r, i))
    }

    prop_compose! {
        fn arb_admissible()(a in arb_c(), b in arb_c(), al in arb_c(), be in arb_c(), ga in arb_c(), c in arb_c())
            -> CoefficientSet<f64> {
            CoefficientSet::new(a, b, al, be, ga, c)
        }
    }

    fn usable(c: &CoefficientSet<f64>) -> bool {
        check_admissibility(c, 1e-3).admissible
            && SignBranch::BOTH
                .iter()
                .all(|&s| derive_constants(c, s).is_ok())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn rotation_is_unit_and_eigenvalues_match(c in arb_admissible()) {
            prop_assume!(usable(&c));
            for s in SignBranch::BOTH {
                let d = derive_constants(&c, s).unwrap();
                let scale = 1.0 + c.a.norm() + c.b.norm() + c.alpha.norm();
                prop_assert!(rel_norm(d.xi1 * d.xi1 + d.eta1 * d.eta1, cx(1.0, 0.0)) < 1e-12);
                prop_assert!((d.a_plus + d.b_minus - (c.a + c.b)).norm() < 1e-12 * scale);
                prop_assert!((d.a_plus * d.b_minus - d.dq).norm() < 1e-12 * scale * scale);
            }
        }

        #[test]
        fn r14_and_r24_vanish_exactly_with_their_shift_conditions(c in arb_admissible()) {
            prop_assume!(usable(&c));
            let d = derive_constants(&c, SignBranch::Plus).unwrap();
            let r = compute_r_constants(&d).unwrap();
            prop_assert_eq!(r.r13, r.r23);
            prop_assert_eq!(r.r14.norm() < 1e-12, (d.t1 - d.t2).norm() * 2.0 / (C::i() * d.e11 - d.e12).norm() < 1e-12);
            prop_assert_eq!(r.r24.norm() < 1e-12, d.t2.norm() * 2.0 / (C::i() * d.e11 - d.e12).norm() < 1e-12);
        }

        #[test]
        fn corollary_constants_coincide_at_unit_normalisation(a in arb_c(), b in arb_c(), al in arb_c()) {
            let c = CoefficientSet::new(a, b, al, cx(0.0, 0.0), cx(0.0, 0.0), cx(-1.0, 0.0));
            prop_assume!(usable(&c));
            for s in SignBranch::BOTH {
                let d = derive_constants(&c, s).unwrap();
                let k = compute_corollary_constants(&c, s).unwrap();
                prop_assert!(rel_norm(k.a11, d.d11) < 1e-10);
                prop_assert!(rel_norm(k.a12, d.d12) < 1e-10);
                prop_assert!(rel_norm(k.b11, d.e11) < 1e-10);
                prop_assert!(rel_norm(k.b12, d.e12) < 1e-10);
                let kk = k.k11 * k.k13;
                prop_assert!(rel_norm(kk * kk, d.dq * 4.0) < 1e-10);
            }
        }

        #[test]
        fn case_a_obstruction_never_vanishes(c in arb_admissible()) {
            prop_assume!(usable(&c));
            for s in SignBranch::BOTH {
                let r = compute_r_constants(&derive_constants(&c, s).unwrap()).unwrap();
                prop_assert!((r.r22 * r.r23 - r.r21).norm() > 1e-9);
            }
        }
    }

    fn rel_norm(a: C, b: C) -> f64 {
        crate::scalar::rel_err(a, b)
    }
}
