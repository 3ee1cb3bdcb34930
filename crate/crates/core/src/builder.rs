//! Closed-form candidate pairs for the difference and differential-difference
//! systems, the normalised corollary systems, and the circular equation.
//!
//! Each family is a pair of waves
//!
//! ```text
//! f(z) = P cos(γ(z) + s + b) + Q sin(γ(z) + s + b) + T,   γ = L + Ψ
//! ```
//!
//! whose linear part `L` and phases `b1, b2` are pinned by exponential
//! constraints `e^{2iλ} = t`. The displayed (squared) constraints fix `b1 − b2`
//! only modulo `π`; the unsquared relations they come from fix the half-branch,
//! and the builder uses them to pick it. Both sets are re-checked in the
//! [`ConstraintReport`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coefficients::{
    compute_corollary_constants, compute_r_constants, derive_constants, r_constants_from,
    CoeffError, CoefficientSet, RConstants, SignBranch, WaveAmplitudes, DEFAULT_TOL,
};
use crate::expr::{ExprNode, LinearForm, MultiPoly, Point};
use crate::periodic::PeriodicPolynomial;
use crate::scalar::{i_unit, re, rel_err, Cx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BuildError {
    #[error(transparent)]
    Coefficients(#[from] CoeffError),
    #[error("this family requires T1 = T2 (|T1 - T2| = {0:e})")]
    RequiresT1EqualsT2(f64),
    #[error("this family requires T2 = 0 (|T2| = {0:e})")]
    RequiresT2Zero(f64),
    #[error("shift c must be nonzero")]
    ZeroShift,
    #[error("shift coordinate {0} (one-based) is zero and cannot carry the constraint")]
    ZeroShiftCoordinate(usize),
    #[error("constraint target is zero (|t| = {0:e}); e^(2i lambda) = t has no solution")]
    ZeroTarget(f64),
    #[error("no branch k in [-{window}, {window}] solves L(c) = a1 c1; nearest miss k = {best_k}, residual {residual:e}")]
    InfeasibleBranch {
        window: i64,
        best_k: i64,
        residual: f64,
    },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Which displayed family of a theorem to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    I,
    Ii,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    DiffI,
    DiffIi,
    PddeI,
    PddeIi,
    CircularEntire,
    CircularMeromorphic,
}

impl Family {
    pub fn is_difference(self) -> bool {
        matches!(self, Family::DiffI | Family::DiffIi)
    }

    pub fn is_pdde(self) -> bool {
        matches!(self, Family::PddeI | Family::PddeIi)
    }

    pub fn kind(self) -> Option<FamilyKind> {
        match self {
            Family::DiffI | Family::PddeI => Some(FamilyKind::I),
            Family::DiffIi | Family::PddeIi => Some(FamilyKind::Ii),
            _ => None,
        }
    }
}

/// Which square root of `a1² = R23/(R21 R22)` to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RootChoice {
    #[default]
    Principal,
    Negated,
}

/// Whether amplitudes come from the general constants (`D11, D12, E11, E12`)
/// or the normalised corollary constants (`A11, A12, B11, B12`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantSource {
    #[default]
    General,
    Corollary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorollaryKind {
    Difference,
    Pdde,
}

/// Free data of a family.
///
/// `tail` holds `a_2..a_n`. The coefficient that carries the `L(c)` constraint
/// (the pivot) is overwritten by back-solving; `lead` supplies `a_1` when the
/// pivot is not coordinate 1 in a difference family.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeParams<T: Real> {
    pub tail: Vec<Cx<T>>,
    pub lead: Cx<T>,
    pub b2: Cx<T>,
    pub branch_l: i64,
    pub branch_b: i64,
    pub root: RootChoice,
    pub branch_window: i64,
}

impl<T: Real> FreeParams<T> {
    pub fn new(tail: Vec<Cx<T>>) -> Self {
        let zero = Cx::new(T::zero(), T::zero());
        Self {
            tail,
            lead: zero,
            b2: zero,
            branch_l: 0,
            branch_b: 0,
            root: RootChoice::Principal,
            branch_window: 8,
        }
    }

    pub fn with_b2(mut self, b2: Cx<T>) -> Self {
        self.b2 = b2;
        self
    }

    pub fn with_branches(mut self, branch_l: i64, branch_b: i64) -> Self {
        self.branch_l = branch_l;
        self.branch_b = branch_b;
        self
    }

    pub fn with_root(mut self, root: RootChoice) -> Self {
        self.root = root;
        self
    }
}

/// `offset + cos_amp·cos(γ + carrier_shift + phase) + sin_amp·sin(γ + carrier_shift + phase)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution<T: Real> {
    pub cos_amp: Cx<T>,
    pub sin_amp: Cx<T>,
    pub offset: Cx<T>,
    pub phase: Cx<T>,
    pub linear: LinearForm<T>,
    pub psi: PeriodicPolynomial<T>,
    pub carrier_shift: Cx<T>,
}

impl<T: Real> WaveSolution<T> {
    /// The full argument `L + Ψ + carrier_shift + phase` as one polynomial.
    pub fn argument(&self) -> MultiPoly<T> {
        let n = self.linear.dim();
        self.linear
            .to_poly()
            .add(&self.psi.to_poly())
            .add(&MultiPoly::constant(n, self.carrier_shift + self.phase))
    }

    pub fn to_expr(&self) -> ExprNode<T> {
        let arg = ExprNode::Poly(self.argument());
        ExprNode::sum(vec![
            ExprNode::scale(self.cos_amp, ExprNode::cos(arg.clone())),
            ExprNode::scale(self.sin_amp, ExprNode::sin(arg)),
            ExprNode::Const(self.offset),
        ])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Member<T: Real> {
    Wave(WaveSolution<T>),
    Expr(ExprNode<T>),
}

impl<T: Real> Member<T> {
    pub fn to_expr(&self) -> ExprNode<T> {
        match self {
            Member::Wave(w) => w.to_expr(),
            Member::Expr(e) => e.clone(),
        }
    }

    pub fn as_wave(&self) -> Option<&WaveSolution<T>> {
        match self {
            Member::Wave(w) => Some(w),
            Member::Expr(_) => None,
        }
    }
}

/// Circular-equation baseline `f² + g² = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum CircularKind<T: Real> {
    /// `(cos h, sin h)`.
    Entire,
    /// `((1 − β²)/(1 + β²), 2β/(1 + β²))`.
    Meromorphic(ExprNode<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPair<T: Real> {
    pub f1: Member<T>,
    pub f2: Member<T>,
    pub family: Family,
    pub coeffs: CoefficientSet<T>,
    pub branch: SignBranch,
    pub shift: Point<T>,
    pub source: ConstantSource,
}

impl<T: Real> SolutionPair<T> {
    pub fn dim(&self) -> usize {
        self.shift.dim()
    }

    pub fn f1_expr(&self) -> ExprNode<T> {
        self.f1.to_expr()
    }

    pub fn f2_expr(&self) -> ExprNode<T> {
        self.f2.to_expr()
    }

    /// Largest polydisc radius on which every carrier satisfies `|h| ≤ bound`,
    /// from the coefficient majorant. `None` for pairs without wave members.
    pub fn safe_radius(&self, bound: T) -> Option<T> {
        let args: Vec<MultiPoly<T>> = [&self.f1, &self.f2]
            .iter()
            .map(|m| m.as_wave().map(WaveSolution::argument))
            .collect::<Option<_>>()?;
        let fits = |r: T| args.iter().all(|p| p.majorant(r) <= bound);
        if !fits(T::zero()) {
            return Some(T::zero());
        }
        let (mut lo, mut hi) = (T::zero(), T::one());
        while fits(hi) && hi < T::lit(1e6) {
            lo = hi;
            hi = hi + hi;
        }
        for _ in 0..60 {
            let mid = (lo + hi) / T::lit(2.0);
            if fits(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Some(lo)
    }

    /// Copy with `b1` moved by `delta` (a constructed constraint violation).
    pub fn perturb_b1(&self, delta: Cx<T>) -> Self {
        let mut out = self.clone();
        if let Member::Wave(w) = &mut out.f1 {
            w.phase = w.phase + delta;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintRow<T: Real> {
    pub name: String,
    pub lhs: Cx<T>,
    pub rhs: Cx<T>,
    /// `|lhs − rhs|`.
    pub abs_err: T,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport<T: Real> {
    pub rows: Vec<ConstraintRow<T>>,
    pub notes: Vec<String>,
    pub tol: T,
    pub pass: bool,
}

impl<T: Real> ConstraintReport<T> {
    fn new(tol: T) -> Self {
        Self {
            rows: Vec::new(),
            notes: Vec::new(),
            tol,
            pass: true,
        }
    }

    fn push(&mut self, name: impl Into<String>, lhs: Cx<T>, rhs: Cx<T>) {
        let pass = rel_err(lhs, rhs) <= self.tol;
        self.pass &= pass;
        self.rows.push(ConstraintRow {
            name: name.into(),
            lhs,
            rhs,
            abs_err: (lhs - rhs).norm(),
            pass,
        });
    }

    pub fn row(&self, name: &str) -> Option<&ConstraintRow<T>> {
        self.rows.iter().find(|r| r.name == name)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect()
    }
}

/// Tolerance for constraint rows (relative to `max(1, |rhs|)`).
pub const CONSTRAINT_TOL: f64 = 1e-10;

/// `λ = Log(t)/(2i) + kπ`, so that `e^{2iλ} = t`.
pub fn solve_exp_constraint<T: Real>(target: Cx<T>, k: i64) -> Result<Cx<T>, BuildError> {
    if target.norm() < T::lit(DEFAULT_TOL) {
        return Err(BuildError::ZeroTarget(
            target.norm().to_f64().unwrap_or(0.0),
        ));
    }
    // -0 imaginary parts would put the negative real axis on the -π side
    let target = if target.im == T::zero() {
        Cx::new(target.re, T::zero())
    } else {
        target
    };
    let two_i = i_unit::<T>() * T::lit(2.0);
    Ok(target.ln() / two_i + re(T::PI() * T::lit(k as f64)))
}

fn cis<T: Real>(w: Cx<T>) -> Cx<T> {
    (i_unit::<T>() * w).exp()
}

fn one<T: Real>() -> Cx<T> {
    Cx::new(T::one(), T::zero())
}

struct Setup<T: Real> {
    coeffs: CoefficientSet<T>,
    amps: WaveAmplitudes<T>,
    r: RConstants<T>,
}

fn setup<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    source: ConstantSource,
) -> Result<Setup<T>, BuildError> {
    match source {
        ConstantSource::General => {
            let d = derive_constants(coeffs, branch)?;
            Ok(Setup {
                coeffs: *coeffs,
                amps: WaveAmplitudes::from(&d),
                r: compute_r_constants(&d)?,
            })
        }
        ConstantSource::Corollary => {
            let k = compute_corollary_constants(coeffs, branch)?;
            let amps = WaveAmplitudes::from(&k);
            let zero = Cx::new(T::zero(), T::zero());
            let normalised =
                CoefficientSet::new(coeffs.a, coeffs.b, coeffs.alpha, zero, zero, -one::<T>());
            Ok(Setup {
                coeffs: normalised,
                amps,
                r: r_constants_from(&amps, T::lit(DEFAULT_TOL))?,
            })
        }
    }
}

/// Displayed targets `(e^{2iL(c)}, e^{2i(b1−b2)})` for a family.
fn displayed_targets<T: Real>(r: &RConstants<T>, family: Family) -> (Cx<T>, Cx<T>) {
    match family {
        Family::DiffI => (r.r13 * r.r13 / (r.r11 * r.r11), r.r13 / (r.r11 * r.r12)),
        Family::DiffIi => (r.r13 / (r.r11 * r.r12), one::<T>() / (r.r11 * r.r11)),
        Family::PddeI => (r.r21 / (r.r22 * r.r23), one()),
        Family::PddeIi => (-one::<T>(), -r.r22 / (r.r21 * r.r23)),
        _ => unreachable!("circular pairs carry no exponential constraints"),
    }
}

/// The unsquared relations behind the displayed constraints, as `(name, lhs, rhs)`.
///
/// `delta = b1 − b2` (for family ii this is `b1* + b2*` after folding).
fn unsquared_rows<T: Real>(
    r: &RConstants<T>,
    family: Family,
    lc: Cx<T>,
    delta: Cx<T>,
    a1: Cx<T>,
) -> Vec<(&'static str, Cx<T>, Cx<T>)> {
    let e = |w: Cx<T>| cis(w);
    match family {
        Family::DiffI => vec![
            (
                "R12 e^{i(-L(c)-(b1-b2))} = 1",
                r.r12 * e(-lc - delta),
                one(),
            ),
            (
                "R12 e^{i(-L(c)+(b1-b2))} = 1",
                r.r12 * e(-lc + delta),
                one(),
            ),
            (
                "R11 e^{i(L(c)+(b1-b2))} = R13",
                r.r11 * e(lc + delta),
                r.r13,
            ),
            (
                "R11 e^{i(L(c)-(b1-b2))} = R13",
                r.r11 * e(lc - delta),
                r.r13,
            ),
        ],
        Family::DiffIi => vec![
            ("R11 e^{i(L(c)+(b1-b2))} = 1", r.r11 * e(lc + delta), one()),
            (
                "R11 e^{i(-L(c)+(b1-b2))} = 1",
                r.r11 * e(-lc + delta),
                one(),
            ),
            (
                "R12 e^{i(-L(c)-(b1-b2))} = R13",
                r.r12 * e(-lc - delta),
                r.r13,
            ),
            (
                "R12 e^{i(L(c)-(b1-b2))} = R13",
                r.r12 * e(lc - delta),
                r.r13,
            ),
        ],
        Family::PddeI => vec![
            (
                "R22 a1 e^{i(L(c)-(b1-b2))} = 1",
                r.r22 * a1 * e(lc - delta),
                one(),
            ),
            (
                "R22 a1 e^{i(L(c)+(b1-b2))} = 1",
                r.r22 * a1 * e(lc + delta),
                one(),
            ),
            (
                "R21 a1 e^{i(-L(c)+(b1-b2))} = R23",
                r.r21 * a1 * e(-lc + delta),
                r.r23,
            ),
            (
                "R21 a1 e^{i(-L(c)-(b1-b2))} = R23",
                r.r21 * a1 * e(-lc - delta),
                r.r23,
            ),
        ],
        Family::PddeIi => vec![
            (
                "R21 a1 e^{i(-L(c)+(b1-b2))} = 1",
                r.r21 * a1 * e(-lc + delta),
                one(),
            ),
            (
                "-R21 a1 e^{i(L(c)+(b1-b2))} = 1",
                -r.r21 * a1 * e(lc + delta),
                one(),
            ),
            (
                "R22 a1 e^{i(L(c)-(b1-b2))} = R23",
                r.r22 * a1 * e(lc - delta),
                r.r23,
            ),
            (
                "-R22 a1 e^{i(-L(c)-(b1-b2))} = R23",
                -r.r22 * a1 * e(-lc - delta),
                r.r23,
            ),
        ],
        _ => Vec::new(),
    }
}

fn unsquared_error<T: Real>(
    r: &RConstants<T>,
    family: Family,
    lc: Cx<T>,
    delta: Cx<T>,
    a1: Cx<T>,
) -> T {
    unsquared_rows(r, family, lc, delta, a1)
        .into_iter()
        .fold(T::zero(), |m, (_, l, rr)| m.max(rel_err(l, rr)))
}

/// Picks `delta` or `delta + π` so the unsquared relations hold when one of them can.
fn fix_parity<T: Real>(
    r: &RConstants<T>,
    family: Family,
    lc: Cx<T>,
    delta: Cx<T>,
    a1: Cx<T>,
    notes: &mut Vec<String>,
) -> Cx<T> {
    let tol = T::lit(1e-8);
    let flipped = delta + re(T::PI());
    let e0 = unsquared_error(r, family, lc, delta, a1);
    if e0 <= tol {
        return delta;
    }
    let e1 = unsquared_error(r, family, lc, flipped, a1);
    if e1 <= tol {
        notes.push(
            "b1 - b2 moved by pi onto the half-branch satisfying the unsquared relations".into(),
        );
        return flipped;
    }
    notes.push(format!(
        "no half-branch of b1 - b2 satisfies the unsquared relations (max relative error {:.3e}); displayed value kept",
        e0.min(e1).to_f64().unwrap_or(f64::NAN)
    ));
    delta
}

fn check_shift<T: Real>(c: &Point<T>) -> Result<(), BuildError> {
    if c.is_zero(T::zero()) {
        return Err(BuildError::ZeroShift);
    }
    Ok(())
}

fn check_tail<T: Real>(n: usize, free: &FreeParams<T>) -> Result<(), BuildError> {
    if free.tail.len() + 1 != n {
        return Err(BuildError::DimensionMismatch(format!(
            "linear tail a_2..a_n has {} entries for n = {n}",
            free.tail.len()
        )));
    }
    Ok(())
}

fn wave<T: Real>(
    cos_amp: Cx<T>,
    sin_amp: Cx<T>,
    offset: Cx<T>,
    phase: Cx<T>,
    linear: &LinearForm<T>,
    psi: &PeriodicPolynomial<T>,
    carrier_shift: Cx<T>,
) -> Member<T> {
    Member::Wave(WaveSolution {
        cos_amp,
        sin_amp,
        offset,
        phase,
        linear: linear.clone(),
        psi: psi.clone(),
        carrier_shift,
    })
}

/// Difference system `A(f1(z), f2(z+c)) = 0`, `A(f2(z), f1(z+c)) = 0`.
pub fn build_difference_family<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    c: &Point<T>,
    family: FamilyKind,
    psi: &PeriodicPolynomial<T>,
    free: &FreeParams<T>,
) -> Result<(SolutionPair<T>, ConstraintReport<T>), BuildError> {
    difference_pipeline(
        coeffs,
        branch,
        c,
        family,
        psi,
        free,
        ConstantSource::General,
    )
}

fn difference_pipeline<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    c: &Point<T>,
    kind: FamilyKind,
    psi: &PeriodicPolynomial<T>,
    free: &FreeParams<T>,
    source: ConstantSource,
) -> Result<(SolutionPair<T>, ConstraintReport<T>), BuildError> {
    check_shift(c)?;
    let n = c.dim();
    check_tail(n, free)?;
    if psi.dim() != n {
        return Err(BuildError::DimensionMismatch(format!(
            "psi has n = {}, shift has n = {n}",
            psi.dim()
        )));
    }
    let s = setup(coeffs, branch, source)?;
    let gap = (s.amps.t1 - s.amps.t2).norm();
    if gap > T::lit(DEFAULT_TOL) * T::one().max(s.amps.t1.norm()) {
        return Err(BuildError::RequiresT1EqualsT2(
            gap.to_f64().unwrap_or(f64::NAN),
        ));
    }
    let family = match kind {
        FamilyKind::I => Family::DiffI,
        FamilyKind::Ii => Family::DiffIi,
    };
    let mut notes = Vec::new();
    let (t_l, t_b) = displayed_targets(&s.r, family);
    let lc = solve_exp_constraint(t_l, free.branch_l)?;
    let delta = solve_exp_constraint(t_b, free.branch_b)?;
    let delta = fix_parity(&s.r, family, lc, delta, one(), &mut notes);

    let pivot = c
        .coords()
        .iter()
        .position(|x| x.norm() > T::zero())
        .expect("nonzero shift has a nonzero coordinate");
    let mut a: Vec<Cx<T>> = std::iter::once(free.lead)
        .chain(free.tail.iter().copied())
        .collect();
    let rest = a
        .iter()
        .zip(c.coords())
        .enumerate()
        .filter(|(j, _)| *j != pivot)
        .fold(Cx::new(T::zero(), T::zero()), |acc, (_, (aj, cj))| {
            acc + aj * cj
        });
    a[pivot] = (lc - rest) / c.coords()[pivot];
    notes.push(format!("a_{} back-solved from L(c)", pivot + 1));
    let linear = LinearForm::new(a);

    let b1 = free.b2 + delta;
    let zero = Cx::new(T::zero(), T::zero());
    let f2_sin = match kind {
        FamilyKind::I => -s.amps.sin_f,
        FamilyKind::Ii => s.amps.sin_f,
    };
    let pair = SolutionPair {
        f1: wave(
            s.amps.cos_f,
            -s.amps.sin_f,
            s.amps.t1,
            b1,
            &linear,
            psi,
            zero,
        ),
        f2: wave(s.amps.cos_f, f2_sin, s.amps.t1, free.b2, &linear, psi, zero),
        family,
        coeffs: s.coeffs,
        branch,
        shift: c.clone(),
        source,
    };
    let mut report = check_constraints(&pair);
    report.notes.extend(notes);
    Ok((pair, report))
}

/// Differential-difference system `A(f1(z+c), ∂f2/∂z1) = 0`, `A(f2(z+c), ∂f1/∂z1) = 0`.
///
/// The carrier is linear; the `L(c)` constraint is carried by the first
/// nonzero `c_r` with `r ≥ 2`, or by a branch search when there is none.
pub fn build_pdde_family<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    c: &Point<T>,
    family: FamilyKind,
    free: &FreeParams<T>,
) -> Result<(SolutionPair<T>, ConstraintReport<T>), BuildError> {
    pdde_pipeline(coeffs, branch, c, family, free, ConstantSource::General)
}

fn pdde_pipeline<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    c: &Point<T>,
    kind: FamilyKind,
    free: &FreeParams<T>,
    source: ConstantSource,
) -> Result<(SolutionPair<T>, ConstraintReport<T>), BuildError> {
    check_shift(c)?;
    let n = c.dim();
    check_tail(n, free)?;
    let s = setup(coeffs, branch, source)?;
    let t2 = s.amps.t2.norm();
    if t2 > T::lit(DEFAULT_TOL) {
        return Err(BuildError::RequiresT2Zero(t2.to_f64().unwrap_or(f64::NAN)));
    }
    let family = match kind {
        FamilyKind::I => Family::PddeI,
        FamilyKind::Ii => Family::PddeIi,
    };
    let r = &s.r;
    let mut notes = Vec::new();
    let a1 = match free.root {
        RootChoice::Principal => (r.r23 / (r.r21 * r.r22)).sqrt(),
        RootChoice::Negated => -(r.r23 / (r.r21 * r.r22)).sqrt(),
    };
    let (t_l, t_b) = displayed_targets(r, family);

    let mut a: Vec<Cx<T>> = std::iter::once(a1)
        .chain(free.tail.iter().copied())
        .collect();
    let pivot = c
        .coords()
        .iter()
        .skip(1)
        .position(|x| x.norm() > T::zero())
        .map(|p| p + 1);
    let lc = match pivot {
        Some(p) => {
            let lc = solve_exp_constraint(t_l, free.branch_l)?;
            let rest = a
                .iter()
                .zip(c.coords())
                .enumerate()
                .filter(|(j, _)| *j != p)
                .fold(Cx::new(T::zero(), T::zero()), |acc, (_, (aj, cj))| {
                    acc + aj * cj
                });
            a[p] = (lc - rest) / c.coords()[p];
            notes.push(format!("a_{} back-solved from L(c)", p + 1));
            lc
        }
        None => {
            // L(c) = a1 c1 is frozen; it must hit one of the branches.
            let frozen = a1 * c.coords()[0];
            let w = free.branch_window;
            let mut best: Option<(i64, T)> = None;
            for k in -w..=w {
                let miss = (frozen - solve_exp_constraint(t_l, k)?).norm();
                if best.is_none_or(|(bk, bm)| miss < bm || (miss == bm && k.abs() < bk.abs())) {
                    best = Some((k, miss));
                }
            }
            let (best_k, miss) = best.expect("window is nonempty");
            if miss > T::lit(CONSTRAINT_TOL) * T::one().max(frozen.norm()) {
                return Err(BuildError::InfeasibleBranch {
                    window: w,
                    best_k,
                    residual: miss.to_f64().unwrap_or(f64::NAN),
                });
            }
            notes.push(format!("L(c) = a1 c1 lands on branch k = {best_k}"));
            frozen
        }
    };
    let linear = LinearForm::new(a);
    let delta = solve_exp_constraint(t_b, free.branch_b)?;
    let delta = fix_parity(r, family, lc, delta, a1, &mut notes);

    let b1 = free.b2 + delta;
    let psi = PeriodicPolynomial::zero(c.clone());
    let f2_sin = match kind {
        FamilyKind::I => -s.amps.sin_f,
        FamilyKind::Ii => s.amps.sin_f,
    };
    let pair = SolutionPair {
        f1: wave(
            s.amps.cos_f,
            -s.amps.sin_f,
            s.amps.t1,
            b1,
            &linear,
            &psi,
            -lc,
        ),
        f2: wave(s.amps.cos_f, f2_sin, s.amps.t1, free.b2, &linear, &psi, -lc),
        family,
        coeffs: s.coeffs,
        branch,
        shift: c.clone(),
        source,
    };
    let mut report = check_constraints(&pair);
    report.notes.extend(notes);
    Ok((pair, report))
}

/// The normalised systems `a f² + 2α f g + b g² = 1` (`β`, `γ`, `C` of the
/// input are ignored), built with the corollary constants.
pub fn build_corollary_family<T: Real>(
    coeffs: &CoefficientSet<T>,
    branch: SignBranch,
    c: &Point<T>,
    family: FamilyKind,
    kind: CorollaryKind,
    psi: &PeriodicPolynomial<T>,
    free: &FreeParams<T>,
) -> Result<(SolutionPair<T>, ConstraintReport<T>), BuildError> {
    match kind {
        CorollaryKind::Difference => difference_pipeline(
            coeffs,
            branch,
            c,
            family,
            psi,
            free,
            ConstantSource::Corollary,
        ),
        CorollaryKind::Pdde => {
            pdde_pipeline(coeffs, branch, c, family, free, ConstantSource::Corollary)
        }
    }
}

/// Solutions of `f² + g² = 1` in the entire or meromorphic form.
pub fn build_circular_pair<T: Real>(h: &MultiPoly<T>, kind: CircularKind<T>) -> SolutionPair<T> {
    let n = h.dim();
    let (f1, f2, family) = match kind {
        CircularKind::Entire => {
            let arg = ExprNode::Poly(h.clone());
            (
                ExprNode::cos(arg.clone()),
                ExprNode::sin(arg),
                Family::CircularEntire,
            )
        }
        CircularKind::Meromorphic(beta) => {
            let sq = ExprNode::product(vec![beta.clone(), beta.clone()]);
            let den = ExprNode::sum(vec![ExprNode::Const(one()), sq.clone()]);
            let num = ExprNode::sum(vec![
                ExprNode::Const(one()),
                ExprNode::scale(-one::<T>(), sq),
            ]);
            (
                ExprNode::quotient(num, den.clone()),
                ExprNode::quotient(ExprNode::scale(re(T::lit(2.0)), beta), den),
                Family::CircularMeromorphic,
            )
        }
    };
    SolutionPair {
        f1: Member::Expr(f1),
        f2: Member::Expr(f2),
        family,
        coeffs: CoefficientSet::circular(),
        branch: SignBranch::Plus,
        shift: Point::zeros(n),
        source: ConstantSource::General,
    }
}

/// Recomputes every constraint of the pair's family from its coefficients.
pub fn check_constraints<T: Real>(pair: &SolutionPair<T>) -> ConstraintReport<T> {
    let mut report = ConstraintReport::new(T::lit(CONSTRAINT_TOL));
    if matches!(
        pair.family,
        Family::CircularEntire | Family::CircularMeromorphic
    ) {
        report
            .notes
            .push("circular pairs carry no constraints".into());
        return report;
    }
    let (Some(w1), Some(w2)) = (pair.f1.as_wave(), pair.f2.as_wave()) else {
        report.push(
            "wave form",
            Cx::new(T::one(), T::zero()),
            Cx::new(T::zero(), T::zero()),
        );
        return report;
    };
    let s = match setup(&pair.coeffs, pair.branch, pair.source) {
        Ok(s) => s,
        Err(e) => {
            report.notes.push(format!("constants unavailable: {e}"));
            report.push(
                "admissible coefficients",
                Cx::new(T::one(), T::zero()),
                Cx::new(T::zero(), T::zero()),
            );
            return report;
        }
    };
    let zero = Cx::new(T::zero(), T::zero());
    let r = &s.r;
    let family = pair.family;
    let c = &pair.shift;
    let lc = w1.linear.eval(c);
    let a1 = w1.linear.coeffs()[0];
    let delta = w1.phase - w2.phase;

    let carrier_gap =
        if w1.linear == w2.linear && w1.psi == w2.psi && w1.carrier_shift == w2.carrier_shift {
            zero
        } else {
            Cx::new(T::one(), T::zero())
        };
    report.push("shared carrier", carrier_gap, zero);

    let f2_sin = match family.kind() {
        Some(FamilyKind::I) => -s.amps.sin_f,
        _ => s.amps.sin_f,
    };
    let amp_gap = |w: &WaveSolution<T>, sin: Cx<T>| {
        let g = (w.cos_amp - s.amps.cos_f)
            .norm()
            .max((w.sin_amp - sin).norm())
            .max((w.offset - s.amps.t1).norm());
        re(g)
    };
    report.push("f1 amplitudes", amp_gap(w1, -s.amps.sin_f), zero);
    report.push("f2 amplitudes", amp_gap(w2, f2_sin), zero);

    if family.is_difference() {
        report.push("T1 = T2", s.amps.t1, s.amps.t2);
    } else {
        report.push("T2 = 0", s.amps.t2, zero);
        report.push("a1^2", a1 * a1, r.r23 / (r.r21 * r.r22));
    }
    let (t_l, t_b) = displayed_targets(r, family);
    let two = T::lit(2.0);
    report.push("e^{2iL(c)}", cis(lc * two), t_l);
    report.push("e^{2i(b1-b2)}", cis(delta * two), t_b);
    for (name, lhs, rhs) in unsquared_rows(r, family, lc, delta, a1) {
        report.push(name, lhs, rhs);
    }
    if family.is_difference() {
        report.push("R11 R12 = R13", r.r11 * r.r12, r.r13);
        let null = w1
            .psi
            .terms
            .iter()
            .fold(T::zero(), |m, t| m.max(t.form.null_residual(c)));
        report.push("psi periodic", re(null), zero);
    } else {
        let psi_size = w1
            .psi
            .to_poly()
            .terms()
            .fold(T::zero(), |m, (_, x)| m.max(x.norm()));
        report.push("linear carrier (NonlinearCarrier)", re(psi_size), zero);
        report.push("carrier shift = -L(c)", w1.carrier_shift, -lc);
    }
    report
}
