//! Numerical certification of candidate pairs.
//!
//! Residuals are scaled by the dominant term of `A(f, g)` (floored at 1), so a
//! cancellation between terms of size `e^{40}` is judged relative to that size.
//! Samples are drawn from per-index ChaCha streams and reduced in index order,
//! which makes reports identical under any thread count.

use rayon::prelude::*;
use thiserror::Error;

use crate::builder::SolutionPair;
use crate::coefficients::{
    check_admissibility, compute_r_constants, critical_point, derive_constants, CoeffError,
    CoefficientSet, DerivedConstants, SignBranch, DEFAULT_TOL,
};
use crate::expr::{default_fd_step, fd_derivative, ExprError, ExprNode, Point};
use crate::sampling::{disc, polydisc, stream};
use crate::scalar::{Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
    #[error("invalid system spec: {0}")]
    InvalidSpec(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("sampling radius must be positive and finite")]
    BadRadius,
    #[error("overflow at sample {index}; reduce the radius below {radius:e}")]
    Overflow { index: u64, radius: f64 },
    #[error("sample {index} hit a pole {attempts} times in a row")]
    PoleLimit { index: u64, attempts: usize },
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    /// `A(f1(z), f2(z+c)) = 0`, `A(f2(z), f1(z+c)) = 0`.
    Difference,
    /// `A(f1, ∂f2/∂z1) = 0`, `A(f2, ∂f1/∂z1) = 0`.
    Pde,
    /// `A(f1(z+c), ∂f2/∂z1) = 0`, `A(f2(z+c), ∂f1/∂z1) = 0`.
    Pdde,
    /// `A(f, g) = 0`.
    SingleCircular,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemSpec<T: Real> {
    pub kind: SystemKind,
    pub coeffs: CoefficientSet<T>,
    pub shift: Point<T>,
    pub dim: usize,
}

impl<T: Real> SystemSpec<T> {
    pub fn new(
        kind: SystemKind,
        coeffs: CoefficientSet<T>,
        shift: Point<T>,
    ) -> Result<Self, VerifyError> {
        let dim = shift.dim();
        if dim == 0 {
            return Err(VerifyError::InvalidSpec(
                "dimension must be at least 1".into(),
            ));
        }
        if matches!(kind, SystemKind::Difference | SystemKind::Pdde) && shift.is_zero(T::zero()) {
            return Err(VerifyError::InvalidSpec("shift c must be nonzero".into()));
        }
        Ok(Self {
            kind,
            coeffs,
            shift,
            dim,
        })
    }

    /// `f² + g² = 1` in `ℂⁿ`.
    pub fn circular(dim: usize) -> Self {
        Self {
            kind: SystemKind::SingleCircular,
            coeffs: CoefficientSet::circular(),
            shift: Point::zeros(dim),
            dim,
        }
    }

    /// The spec a builder pair claims to solve.
    pub fn for_pair(pair: &SolutionPair<T>) -> Self {
        let kind = if pair.family.is_difference() {
            SystemKind::Difference
        } else if pair.family.is_pdde() {
            SystemKind::Pdde
        } else {
            SystemKind::SingleCircular
        };
        Self {
            kind,
            coeffs: pair.coeffs,
            shift: pair.shift.clone(),
            dim: pair.dim(),
        }
    }

    /// `(f, g)` expression pairs, one per equation.
    fn equations(&self, f1: &ExprNode<T>, f2: &ExprNode<T>) -> Vec<(ExprNode<T>, ExprNode<T>)> {
        let c = &self.shift;
        match self.kind {
            SystemKind::Difference => vec![(f1.clone(), f2.shift(c)), (f2.clone(), f1.shift(c))],
            SystemKind::Pde => vec![
                (f1.clone(), f2.differentiate(0)),
                (f2.clone(), f1.differentiate(0)),
            ],
            SystemKind::Pdde => vec![
                (f1.shift(c), f2.differentiate(0)),
                (f2.shift(c), f1.differentiate(0)),
            ],
            SystemKind::SingleCircular => vec![(f1.clone(), f2.clone())],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions<T: Real> {
    pub samples: usize,
    pub radius: T,
    pub seed: u64,
    pub tol: T,
    /// Cross-check analytic derivatives against central differences.
    pub fd_check: bool,
    /// Redraws allowed per sample when a pole is hit.
    pub max_pole_retries: usize,
}

impl<T: Real> VerifyOptions<T> {
    pub fn new(samples: usize, radius: T, seed: u64) -> Self {
        Self {
            samples,
            radius,
            seed,
            tol: T::lit(1e-9),
            fd_check: false,
            max_pole_retries: 16,
        }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_fd_check(mut self, on: bool) -> Self {
        self.fd_check = on;
        self
    }
}

/// Mixed tolerance of the finite-difference cross-check.
pub const FD_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport<T: Real> {
    pub kind: SystemKind,
    pub samples: usize,
    pub radius: T,
    pub seed: u64,
    pub tol: T,
    pub max_scaled_residual: T,
    pub argmax: Point<T>,
    /// Max scaled residual of each equation of the system.
    pub per_equation: Vec<T>,
    /// Redraws caused by poles.
    pub resampled: usize,
    /// Largest mixed deviation `|d − d_fd| / (1 + |d|)`, when the check ran.
    pub fd_max_deviation: Option<T>,
    pub pass: bool,
}

struct SampleOut<T: Real> {
    point: Point<T>,
    residuals: Vec<T>,
    retries: usize,
    fd_dev: T,
}

fn eval_sample<T: Real>(
    spec: &SystemSpec<T>,
    eqs: &[(ExprNode<T>, ExprNode<T>)],
    fd_sources: &[ExprNode<T>],
    opts: &VerifyOptions<T>,
    index: u64,
) -> Result<SampleOut<T>, VerifyError> {
    let mut rng = stream(opts.seed, index);
    let mut retries = 0;
    loop {
        let z = polydisc(&mut rng, spec.dim, opts.radius);
        let attempt = (|| -> Result<(Vec<T>, T), ExprError> {
            let mut residuals = Vec::with_capacity(eqs.len());
            for (f, g) in eqs {
                let (fv, gv) = (f.eval(&z)?, g.eval(&z)?);
                residuals.push(spec.coeffs.scaled_residual(fv, gv));
            }
            let mut fd_dev = T::zero();
            for (src, (_, g)) in fd_sources.iter().zip(eqs) {
                let exact = g.eval(&z)?;
                let approx = fd_derivative(src, 0, &z, default_fd_step(&z))?;
                fd_dev = fd_dev.max((exact - approx).norm() / (T::one() + exact.norm()));
            }
            Ok((residuals, fd_dev))
        })();
        match attempt {
            Ok((residuals, fd_dev)) => {
                if residuals.iter().any(|r| !r.is_finite()) {
                    return Err(VerifyError::Overflow {
                        index,
                        radius: opts.radius.to_f64().unwrap_or(f64::NAN),
                    });
                }
                return Ok(SampleOut {
                    point: z,
                    residuals,
                    retries,
                    fd_dev,
                });
            }
            Err(ExprError::PoleEncountered(_)) => {
                retries += 1;
                if retries > opts.max_pole_retries {
                    return Err(VerifyError::PoleLimit {
                        index,
                        attempts: retries,
                    });
                }
            }
            Err(ExprError::Overflow) => {
                return Err(VerifyError::Overflow {
                    index,
                    radius: opts.radius.to_f64().unwrap_or(f64::NAN),
                })
            }
            Err(e) => return Err(e.into()),
        }
    }
}

/// Samples the system's equations on the polydisc of `opts.radius`.
pub fn verify_system<T: Real>(
    spec: &SystemSpec<T>,
    f1: &ExprNode<T>,
    f2: &ExprNode<T>,
    opts: &VerifyOptions<T>,
) -> Result<ResidualReport<T>, VerifyError> {
    if !(opts.radius > T::zero() && opts.radius.is_finite()) {
        return Err(VerifyError::BadRadius);
    }
    for f in [f1, f2] {
        if let Some(d) = f.dimension() {
            if d != spec.dim {
                return Err(VerifyError::DimensionMismatch(format!(
                    "expression has n = {d}, system has n = {}",
                    spec.dim
                )));
            }
        }
    }
    let eqs = spec.equations(f1, f2);
    // the g of each derivative equation is ∂/∂z1 of these
    let fd_sources: Vec<ExprNode<T>> = match (opts.fd_check, spec.kind) {
        (true, SystemKind::Pde | SystemKind::Pdde) => vec![f2.clone(), f1.clone()],
        _ => Vec::new(),
    };
    let outs: Vec<SampleOut<T>> = (0..opts.samples as u64)
        .into_par_iter()
        .map(|i| eval_sample(spec, &eqs, &fd_sources, opts, i))
        .collect::<Result<_, _>>()?;

    let mut per_equation = vec![T::zero(); eqs.len()];
    let mut max = T::zero();
    let mut argmax = Point::zeros(spec.dim);
    let mut resampled = 0;
    let mut fd_max = T::zero();
    for out in &outs {
        resampled += out.retries;
        fd_max = fd_max.max(out.fd_dev);
        for (slot, r) in per_equation.iter_mut().zip(&out.residuals) {
            *slot = slot.max(*r);
        }
        let worst = out.residuals.iter().copied().fold(T::zero(), T::max);
        if worst > max || (max == T::zero() && argmax.is_zero(T::zero())) {
            max = max.max(worst);
            argmax = out.point.clone();
        }
    }
    let fd_max_deviation = (!fd_sources.is_empty()).then_some(fd_max);
    let fd_ok = fd_max_deviation.is_none_or(|d| d <= T::lit(FD_TOL));
    Ok(ResidualReport {
        kind: spec.kind,
        samples: opts.samples,
        radius: opts.radius,
        seed: opts.seed,
        tol: opts.tol,
        max_scaled_residual: max,
        argmax,
        per_equation,
        resampled,
        fd_max_deviation,
        pass: max < opts.tol && fd_ok,
    })
}

/// [`verify_system`] against the system the pair was built for.
pub fn verify_pair<T: Real>(
    pair: &SolutionPair<T>,
    opts: &VerifyOptions<T>,
) -> Result<ResidualReport<T>, VerifyError> {
    verify_system(
        &SystemSpec::for_pair(pair),
        &pair.f1_expr(),
        &pair.f2_expr(),
        opts,
    )
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentityReport<T: Real> {
    pub samples: usize,
    pub seed: u64,
    pub max_scaled_error: T,
    pub tol: T,
    pub pass: bool,
}

/// Tolerance of the identity suites.
pub const IDENTITY_TOL: f64 = 1e-10;

fn identity_report<T: Real>(
    samples: usize,
    seed: u64,
    errs: impl Iterator<Item = T>,
) -> IdentityReport<T> {
    let max = errs.fold(T::zero(), T::max);
    let tol = T::lit(IDENTITY_TOL);
    IdentityReport {
        samples,
        seed,
        max_scaled_error: max,
        tol,
        pass: max < tol,
    }
}

fn require_admissible<T: Real>(coeffs: &CoefficientSet<T>) -> Result<(), VerifyError> {
    let report = check_admissibility(coeffs, T::lit(DEFAULT_TOL));
    if !report.admissible {
        return Err(CoeffError::InadmissibleCoefficients(report.failures().join(", ")).into());
    }
    Ok(())
}

fn max_norm<T: Real>(xs: &[Cx<T>]) -> T {
    xs.iter().fold(T::one(), |m, x| m.max(x.norm()))
}

/// `A(F + T1, G + T2) = aF² + 2αFG + bG² + Δ/D` at random `(F, G)`.
pub fn check_reduction_identity<T: Real>(
    coeffs: &CoefficientSet<T>,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport<T>, VerifyError> {
    require_admissible(coeffs)?;
    let (t1, t2) = critical_point(coeffs);
    let k = coeffs.delta() / coeffs.dq();
    let two = T::lit(2.0);
    let errs = (0..samples as u64).map(|i| {
        let mut rng = stream(seed, i);
        let (f, g) = (disc(&mut rng, two), disc(&mut rng, two));
        let lhs = coeffs.eval(f + t1, g + t2);
        let quad = [
            coeffs.a * f * f,
            coeffs.alpha * f * g * two,
            coeffs.b * g * g,
        ];
        let rhs = quad.iter().copied().sum::<Cx<T>>() + k;
        let scale = coeffs
            .dominant_term(f + t1, g + t2)
            .max(max_norm(&quad))
            .max(k.norm());
        (lhs - rhs).norm() / scale
    });
    Ok(identity_report(samples, seed, errs))
}

/// Probe values of the rotation `F = Uξ1 − Vη1`, `G = Uη1 + Vξ1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReductionFrame<T: Real> {
    pub f: Cx<T>,
    pub g: Cx<T>,
    pub u: Cx<T>,
    pub v: Cx<T>,
}

impl<T: Real> ReductionFrame<T> {
    pub fn from_uv(u: Cx<T>, v: Cx<T>, d: &DerivedConstants<T>) -> Self {
        Self {
            f: u * d.xi1 - v * d.eta1,
            g: u * d.eta1 + v * d.xi1,
            u,
            v,
        }
    }
}

/// `aF² + 2αFG + bG² = A U² + B V²` for the branch's eigenpair.
pub fn check_rotation_identity<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport<T>, VerifyError> {
    require_admissible(coeffs)?;
    let d = derive_constants(coeffs, branch)?;
    let two = T::lit(2.0);
    let errs = (0..samples as u64).map(|i| {
        let mut rng = stream(seed, i);
        let frame = ReductionFrame::from_uv(disc(&mut rng, two), disc(&mut rng, two), &d);
        rotation_error(coeffs, &d, &frame)
    });
    Ok(identity_report(samples, seed, errs))
}

fn rotation_error<T: Real>(
    coeffs: &CoefficientSet<T>,
    d: &DerivedConstants<T>,
    fr: &ReductionFrame<T>,
) -> T {
    let two = T::lit(2.0);
    let lhs = [
        coeffs.a * fr.f * fr.f,
        coeffs.alpha * fr.f * fr.g * two,
        coeffs.b * fr.g * fr.g,
    ];
    let rhs = [d.a_plus * fr.u * fr.u, d.b_minus * fr.v * fr.v];
    let diff = lhs.iter().copied().sum::<Cx<T>>() - rhs.iter().copied().sum::<Cx<T>>();
    diff.norm() / max_norm(&lhs).max(max_norm(&rhs))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum ProbeCase {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseVerdict<T: Real> {
    pub case: ProbeCase,
    pub feasible: bool,
    /// Numeric obstruction, Case A only.
    pub obstruction: Option<T>,
    pub tag: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonexistenceReport<T: Real> {
    pub branch: SignBranch,
    /// Candidate slope `c0 = √(R23/(R21 R22))` of Case A.
    pub c0: Cx<T>,
    pub cases: Vec<CaseVerdict<T>>,
    /// True iff every case is infeasible.
    pub infeasible: bool,
}

impl<T: Real> NonexistenceReport<T> {
    pub fn case(&self, case: ProbeCase) -> &CaseVerdict<T> {
        self.cases
            .iter()
            .find(|c| c.case == case)
            .expect("all four cases are reported")
    }
}

/// Case analysis for wave-form solutions of the pde system.
///
/// Case A needs `R22 R23 = R21`, which forces `a = b` and `α = 0`. Cases B and
/// C force the carrier to be constant and Case D forces `−1 = 1`; they carry no
/// numeric content and are reported as structural verdicts.
pub fn probe_pde_nonexistence<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    tol: T,
) -> Result<NonexistenceReport<T>, VerifyError> {
    require_admissible(coeffs)?;
    let d = derive_constants(coeffs, branch)?;
    let r = compute_r_constants(&d)?;
    let c0 = (r.r23 / (r.r21 * r.r22)).sqrt();
    let gap = (r.r22 * r.r23 - r.r21).norm();
    let cases = vec![
        CaseVerdict {
            case: ProbeCase::A,
            feasible: gap <= tol,
            obstruction: Some(gap),
            tag: "requires R22 R23 = R21",
        },
        CaseVerdict {
            case: ProbeCase::B,
            feasible: false,
            obstruction: None,
            tag: "forces a constant carrier",
        },
        CaseVerdict {
            case: ProbeCase::C,
            feasible: false,
            obstruction: None,
            tag: "forces a constant carrier",
        },
        CaseVerdict {
            case: ProbeCase::D,
            feasible: false,
            obstruction: None,
            tag: "forces -1 = 1",
        },
    ];
    let infeasible = cases.iter().all(|c| !c.feasible);
    Ok(NonexistenceReport {
        branch,
        c0,
        cases,
        infeasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_circular_pair, CircularKind};
    use crate::expr::MultiPoly;

    type C = Cx<f64>;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn zero_pair_residual_is_c_over_floor() {
        let coeffs = CoefficientSet::real(3.0, 1.0, -2.0, 2.0, -2.0, -0.5);
        let spec =
            SystemSpec::new(SystemKind::Difference, coeffs, Point::real(&[1.0, 0.0])).unwrap();
        let zero = ExprNode::Const(c(0.0, 0.0));
        let r = verify_system(&spec, &zero, &zero, &VerifyOptions::new(10, 1.0, 1)).unwrap();
        assert!((r.max_scaled_residual - 0.5).abs() < 1e-15);
        assert!(!r.pass);
    }

    #[test]
    fn circular_pythagoras() {
        let pair = build_circular_pair(&MultiPoly::<f64>::var(2, 0), CircularKind::Entire);
        let r = verify_pair(&pair, &VerifyOptions::new(200, 2.0, 3).with_tol(1e-12)).unwrap();
        assert!(r.pass, "{}", r.max_scaled_residual);
        assert_eq!(r.per_equation.len(), 1);
    }

    #[test]
    fn meromorphic_pair_resamples_at_poles() {
        // β = z1 has poles at ±i; a huge pole tolerance is not needed, the
        // pair is simply checked away from them
        let h = MultiPoly::<f64>::var(1, 0);
        let pair = build_circular_pair(&h, CircularKind::Meromorphic(ExprNode::Poly(h.clone())));
        let r = verify_pair(&pair, &VerifyOptions::new(300, 3.0, 9).with_tol(1e-10)).unwrap();
        assert!(r.pass, "{}", r.max_scaled_residual);
    }

    #[test]
    fn parallel_and_serial_agree() {
        let pair = build_circular_pair(&MultiPoly::<f64>::var(3, 1).pow(2), CircularKind::Entire);
        let opts = VerifyOptions::new(64, 1.0, 42);
        let a = verify_pair(&pair, &opts).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| verify_pair(&pair, &opts).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn overflow_is_reported() {
        let big = ExprNode::cos(ExprNode::Poly(
            MultiPoly::<f64>::var(1, 0).scale(c(1000.0, 0.0)),
        ));
        let spec = SystemSpec::circular(1);
        let err = verify_system(&spec, &big, &big, &VerifyOptions::new(8, 1.0, 0)).unwrap_err();
        assert!(matches!(err, VerifyError::Overflow { .. }), "{err:?}");
        assert_eq!(
            verify_system(&spec, &big, &big, &VerifyOptions::new(8, 0.0, 0)).unwrap_err(),
            VerifyError::BadRadius
        );
    }

    #[test]
    fn fd_check_matches_analytic_derivative() {
        let e = ExprNode::sin(ExprNode::Poly(MultiPoly::<f64>::var(2, 0).pow(2)));
        let spec =
            SystemSpec::new(SystemKind::Pde, CoefficientSet::circular(), Point::zeros(2)).unwrap();
        let r = verify_system(
            &spec,
            &e,
            &e,
            &VerifyOptions::new(50, 1.0, 5).with_fd_check(true),
        )
        .unwrap();
        assert!(r.fd_max_deviation.unwrap() < FD_TOL);
    }

    #[test]
    fn reduction_identity_constant() {
        let coeffs = CoefficientSet::<f64>::real(3.0, 1.0, -2.0, 2.0, -2.0, -1.0);
        assert!((coeffs.delta() / coeffs.dq() - c(-1.0, 0.0)).norm() < 1e-14);
        assert!(check_reduction_identity(&coeffs, 50, 0).unwrap().pass);
        let plain = CoefficientSet::<f64>::real(2.0, 5.0, 1.0, 0.0, 0.0, 0.7);
        assert!((plain.delta() / plain.dq() - c(0.7, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn rotation_unit_vectors() {
        let coeffs = CoefficientSet::real(2.0, 3.0, 2.0, -1.0, -1.0, -1.0);
        for branch in SignBranch::BOTH {
            let d = derive_constants(&coeffs, branch).unwrap();
            let one = c(1.0, 0.0);
            let zero = c(0.0, 0.0);
            for (u, v, want) in [(one, zero, d.a_plus), (zero, one, d.b_minus)] {
                let fr = ReductionFrame::from_uv(u, v, &d);
                let q = coeffs.a * fr.f * fr.f
                    + coeffs.alpha * fr.f * fr.g * 2.0
                    + coeffs.b * fr.g * fr.g;
                assert!((q - want).norm() < 1e-12);
            }
            assert!(
                check_rotation_identity(&coeffs, branch, 50, 1)
                    .unwrap()
                    .pass
            );
        }
    }

    #[test]
    fn probe_second_example() {
        let coeffs = CoefficientSet::real(2.0, 3.0, 2.0, -1.0, -1.0, -1.0);
        for branch in SignBranch::BOTH {
            let r = probe_pde_nonexistence(&coeffs, branch, 1e-9).unwrap();
            assert!(r.case(ProbeCase::A).obstruction.unwrap() > 1e-9);
            assert!(r.infeasible);
        }
        let bad = CoefficientSet::real(2.0, 3.0, 0.0, -1.0, -1.0, -1.0);
        assert!(matches!(
            probe_pde_nonexistence(&bad, SignBranch::Plus, 1e-9),
            Err(VerifyError::Coefficients(_))
        ));
    }

    #[test]
    fn spec_validation() {
        let coeffs = CoefficientSet::<f64>::circular();
        assert!(SystemSpec::new(SystemKind::Difference, coeffs, Point::zeros(2)).is_err());
        assert!(SystemSpec::new(SystemKind::Pde, coeffs, Point::zeros(2)).is_ok());
    }
}
