//! Closed-form solution families for systems of general quadratic functional
//! equations
//!
//! ```text
//! A(f, g) = a f² + 2α f g + b g² + 2β f + 2γ g + C = 0
//! ```
//!
//! coupling two entire functions on ℂⁿ through a shift `z ↦ z + c`, the
//! partial derivative `∂/∂z₁`, or both. The crate constructs the candidate
//! wave solutions, solves their exponential constraint equations over
//! logarithm branches, and certifies them by scaled-residual sampling and
//! Nevanlinna growth-order estimation.
//!
//! Every numeric type is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the working precision to `f64`.

pub mod builder;
pub mod coefficients;
pub mod expr;
pub mod nevanlinna;
pub mod periodic;
mod sampling;
pub mod scalar;
pub mod verifier;

pub use num_complex::Complex;
pub use scalar::{rel_err, Cx, Real};

pub use builder::{
    build_circular_pair, build_corollary_family, build_difference_family, build_pdde_family,
    check_constraints, solve_exp_constraint, BuildError, CircularKind, ConstantSource,
    ConstraintReport, ConstraintRow, CorollaryKind, Family, FamilyKind, FreeParams, Member,
    RootChoice, SolutionPair, WaveSolution,
};
pub use coefficients::{
    check_admissibility, compute_corollary_constants, compute_r_constants, derive_constants,
    AdmissibilityReport, CoeffError, CoefficientSet, CorollaryConstants, DerivedConstants,
    RConstants, SignBranch,
};
pub use expr::{ExprError, ExprNode, LinearForm, MultiPoly, Point};
pub use nevanlinna::{
    characteristic, estimate_order, proximity, NevanlinnaError, OrderEstimate, SphereSampler,
};
pub use periodic::{
    build_psi, check_periodicity, sample_null_form, NullLinearForm, PeriodicError,
    PeriodicPolynomial, PeriodicityReport, PsiTerm, PsiWire,
};
pub use verifier::{
    check_reduction_identity, check_rotation_identity, probe_pde_nonexistence, verify_pair,
    verify_system, IdentityReport, NonexistenceReport, ProbeCase, ReductionFrame, ResidualReport,
    SystemKind, SystemSpec, VerifyError, VerifyOptions,
};

pub type C64 = Complex<f64>;
pub type Coefficients = CoefficientSet<f64>;
pub type Derived = DerivedConstants<f64>;
pub type RConsts = RConstants<f64>;
pub type CorollaryConsts = CorollaryConstants<f64>;
pub type Expr = ExprNode<f64>;
pub type Poly = MultiPoly<f64>;
pub type Pt = Point<f64>;
pub type Psi = PeriodicPolynomial<f64>;
pub type Pair = SolutionPair<f64>;
pub type Residuals = ResidualReport<f64>;
pub type Constraints = ConstraintReport<f64>;
pub type Order = OrderEstimate<f64>;
