//! Problem-spec files.
//!
//! JSON with lower_snake_case keys and complex numbers as `[re, im]`. Every
//! optional field has a default, and serialising a parsed spec writes the
//! defaults out, so a report's echo re-runs the same job.

use std::path::Path;

use gqe_core::builder::{ConstantSource, FamilyKind, RootChoice};
use gqe_core::periodic::PsiWire;
use gqe_core::{Coefficients, Pt, SignBranch, SystemKind, C64};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub type Complex2 = [f64; 2];

pub fn to_c64(p: Complex2) -> C64 {
    C64::new(p[0], p[1])
}

pub fn from_c64(z: C64) -> Complex2 {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientsSpec {
    pub a: Complex2,
    pub b: Complex2,
    pub alpha: Complex2,
    pub beta: Complex2,
    pub gamma: Complex2,
    pub c: Complex2,
}

impl CoefficientsSpec {
    pub fn to_core(&self) -> Coefficients {
        Coefficients::new(
            to_c64(self.a),
            to_c64(self.b),
            to_c64(self.alpha),
            to_c64(self.beta),
            to_c64(self.gamma),
            to_c64(self.c),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CarrierSpec {
    /// `a_2..a_n`; the coefficient carrying `L(c)` is back-solved.
    pub linear_tail: Vec<Complex2>,
    /// `a_1` when it is free (difference systems with `c_1 = 0`).
    #[serde(default)]
    pub lead: Complex2,
    #[serde(default)]
    pub psi: PsiWire,
    #[serde(default)]
    pub b2: Complex2,
    #[serde(default)]
    pub branch_l: i64,
    #[serde(default)]
    pub branch_b: i64,
    #[serde(default)]
    pub root: RootChoice,
}

fn default_samples() -> usize {
    1000
}

fn default_tol() -> f64 {
    1e-9
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerificationSpec {
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Polydisc radius; when absent the carrier bound `|h| ≤ 40` picks it (capped at 1).
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub fd_check: bool,
}

impl Default for VerificationSpec {
    fn default() -> Self {
        Self {
            samples: default_samples(),
            radius: None,
            seed: 0,
            tol: default_tol(),
            fd_check: false,
        }
    }
}

fn default_radii() -> Vec<f64> {
    vec![1.2, 1.6, 2.0, 2.5, 3.0]
}

fn default_order_samples() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrderSpec {
    #[serde(default = "default_radii")]
    pub radii: Vec<f64>,
    #[serde(default = "default_order_samples")]
    pub samples: usize,
}

impl Default for OrderSpec {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            samples: default_order_samples(),
        }
    }
}

fn default_branch() -> SignBranch {
    SignBranch::Plus
}

fn default_family() -> FamilyKind {
    FamilyKind::I
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    pub kind: SystemKind,
    pub dimension: usize,
    pub shift: Vec<Complex2>,
    pub coefficients: CoefficientsSpec,
    #[serde(default = "default_branch")]
    pub branch: SignBranch,
    #[serde(default = "default_family")]
    pub family: FamilyKind,
    #[serde(default)]
    pub constants: ConstantSource,
    #[serde(default)]
    pub carrier: Option<CarrierSpec>,
    #[serde(default)]
    pub verification: VerificationSpec,
    #[serde(default)]
    pub order: OrderSpec,
}

impl ProblemSpec {
    pub fn shift_point(&self) -> Pt {
        Pt::new(self.shift.iter().copied().map(to_c64).collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("spec serialises")
    }

    /// Semantic checks serde cannot express, as `field: message` lines.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let n = self.dimension;
        if n == 0 {
            v.push("dimension: must be at least 1".into());
        }
        if self.shift.len() != n {
            v.push(format!(
                "shift: has {} entries, dimension is {n}",
                self.shift.len()
            ));
        }
        let all = self
            .shift
            .iter()
            .chain(&self.coefficients_list())
            .flat_map(|p| p.iter())
            .all(|x| x.is_finite());
        if !all {
            v.push("shift/coefficients: entries must be finite".into());
        }
        if matches!(self.kind, SystemKind::Difference | SystemKind::Pdde)
            && self.shift.iter().all(|p| *p == [0.0, 0.0])
        {
            v.push("shift: shift must be nonzero".into());
        }
        if let Some(carrier) = &self.carrier {
            if n > 0 && carrier.linear_tail.len() + 1 != n {
                v.push(format!(
                    "carrier.linear_tail: has {} entries, expected dimension - 1 = {}",
                    carrier.linear_tail.len(),
                    n.saturating_sub(1)
                ));
            }
            for (i, t) in carrier.psi.terms.iter().enumerate() {
                if t.support.iter().any(|&j| j == 0 || j > n) {
                    v.push(format!(
                        "carrier.psi.terms[{i}].support: indices are 1-based and at most {n}"
                    ));
                }
                if t.d.len() != t.support.len() {
                    v.push(format!(
                        "carrier.psi.terms[{i}].d: length differs from support"
                    ));
                }
            }
        }
        let ver = &self.verification;
        if ver.samples == 0 {
            v.push("verification.samples: must be positive".into());
        }
        if let Some(r) = ver.radius {
            if !(r > 0.0 && r.is_finite()) {
                v.push("verification.radius: must be positive".into());
            }
        }
        if ver.tol.is_nan() || ver.tol <= 0.0 {
            v.push("verification.tol: must be positive".into());
        }
        let o = &self.order;
        if o.radii.len() < 4 || o.radii[0] <= 1.0 || o.radii.windows(2).any(|w| w[1] <= w[0]) {
            v.push("order.radii: need at least 4 strictly increasing radii above 1".into());
        }
        if o.samples == 0 {
            v.push("order.samples: must be positive".into());
        }
        v
    }

    fn coefficients_list(&self) -> Vec<Complex2> {
        let c = &self.coefficients;
        vec![c.a, c.b, c.alpha, c.beta, c.gamma, c.c]
    }
}

/// Parses and validates a spec held in memory.
pub fn parse_problem_str(text: &str) -> Result<ProblemSpec, CliError> {
    let spec: ProblemSpec = serde_json::from_str(text).map_err(|e| {
        let line = text
            .lines()
            .nth(e.line().saturating_sub(1))
            .unwrap_or("")
            .trim();
        CliError::Schema(vec![format!(
            "line {} column {}: {e} (near `{line}`)",
            e.line(),
            e.column()
        )])
    })?;
    let violations = spec.violations();
    if violations.is_empty() {
        Ok(spec)
    } else {
        Err(CliError::Schema(violations))
    }
}

pub fn parse_problem_file(path: &Path) -> Result<ProblemSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_problem_str(&text)
}
