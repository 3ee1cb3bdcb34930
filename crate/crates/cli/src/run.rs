//! Command dispatch.

use clap::ValueEnum;
use gqe_core::builder::CorollaryKind;
use gqe_core::periodic::PeriodicPolynomial;
use gqe_core::{
    build_corollary_family, build_difference_family, build_pdde_family, check_admissibility,
    compute_corollary_constants, compute_r_constants, derive_constants, estimate_order,
    probe_pde_nonexistence, verify_pair, BuildError, ConstantSource, Constraints, Derived,
    FreeParams, Order, Pair, Residuals, SystemKind, VerifyOptions, C64,
};
use serde_json::{json, Map, Value};

use crate::report::ReportFile;
use crate::spec::{from_c64, to_c64, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Derive,
    Build,
    Verify,
    Probe,
    Order,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Derive => "derive",
            Command::Build => "build",
            Command::Verify => "verify",
            Command::Probe => "probe",
            Command::Order => "order",
        }
    }
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_SCHEMA: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;
pub const EXIT_VERIFY: i32 = 4;

/// Bound on `|h|` used to pick a default sampling radius.
pub const CARRIER_BOUND: f64 = 40.0;

fn cx(z: C64) -> Value {
    json!(from_c64(z))
}

fn constants_table(d: &Derived) -> Value {
    let mut m = Map::new();
    for (k, v) in [
        ("delta", d.delta),
        ("d", d.dq),
        ("xi1", d.xi1),
        ("eta1", d.eta1),
        ("a_plus", d.a_plus),
        ("b_minus", d.b_minus),
        ("d11", d.d11),
        ("d12", d.d12),
        ("e11", d.e11),
        ("e12", d.e12),
        ("t1", d.t1),
        ("t2", d.t2),
    ] {
        m.insert(k.into(), cx(v));
    }
    if let Ok(r) = compute_r_constants(d) {
        for (k, v) in [
            ("r11", r.r11),
            ("r12", r.r12),
            ("r13", r.r13),
            ("r14", r.r14),
            ("r21", r.r21),
            ("r22", r.r22),
            ("r23", r.r23),
            ("r24", r.r24),
        ] {
            m.insert(k.into(), cx(v));
        }
    }
    Value::Object(m)
}

fn constraints_json(r: &Constraints) -> Value {
    let rows: Vec<Value> = r
        .rows
        .iter()
        .map(|row| json!({"name": row.name, "lhs": cx(row.lhs), "rhs": cx(row.rhs), "abs_err": row.abs_err, "pass": row.pass}))
        .collect();
    json!({"rows": rows, "notes": r.notes, "tol": r.tol, "pass": r.pass})
}

fn residuals_json(r: &Residuals) -> Value {
    json!({
        "samples": r.samples,
        "radius": r.radius,
        "seed": r.seed,
        "tol": r.tol,
        "max_scaled_residual": r.max_scaled_residual,
        "argmax": r.argmax.coords().iter().map(|z| cx(*z)).collect::<Vec<_>>(),
        "per_equation": r.per_equation,
        "resampled": r.resampled,
        "fd_max_deviation": r.fd_max_deviation,
        "pass": r.pass,
    })
}

fn order_json(o: &Order) -> Value {
    json!({
        "radii": o.radii,
        "t_values": o.t_values,
        "order": o.order,
        "fit_residual": o.fit_residual,
        "std_error": o.std_error,
    })
}

struct Job<'a> {
    spec: &'a ProblemSpec,
    body: Map<String, Value>,
    /// Two-column `(ln r, ln T)` text produced by `order`.
    plot: Option<String>,
}

impl Job<'_> {
    fn finish(mut self, exit_code: i32, error: Option<String>) -> (ReportFile, Option<String>) {
        self.body.insert("exit_code".into(), json!(exit_code));
        self.body.insert("pass".into(), json!(exit_code == EXIT_OK));
        if let Some(e) = error {
            self.body.insert("error".into(), json!(e));
        }
        (
            ReportFile {
                body: Value::Object(self.body),
                exit_code,
            },
            self.plot,
        )
    }
}

/// Runs `command` on `spec`. Also returns the plot columns of `order`.
pub fn execute_with_plot(command: Command, spec: &ProblemSpec) -> (ReportFile, Option<String>) {
    let mut body = Map::new();
    body.insert("command".into(), json!(command.name()));
    body.insert("toolkit_version".into(), json!(env!("CARGO_PKG_VERSION")));
    body.insert("spec".into(), spec.to_json());
    let mut job = Job {
        spec,
        body,
        plot: None,
    };
    let outcome = match command {
        Command::Derive => derive(&mut job),
        Command::Build => build(&mut job).map(|(_, code)| code),
        Command::Verify => verify(&mut job),
        Command::Probe => probe(&mut job),
        Command::Order => order(&mut job),
    };
    match outcome {
        Ok(code) => job.finish(code, None),
        Err((code, msg)) => job.finish(code, Some(msg)),
    }
}

pub fn execute(command: Command, spec: &ProblemSpec) -> ReportFile {
    execute_with_plot(command, spec).0
}

type Step<T> = Result<T, (i32, String)>;

fn derive(job: &mut Job) -> Step<i32> {
    let coeffs = job.spec.coefficients.to_core();
    let adm = check_admissibility(&coeffs, 1e-12);
    job.body.insert(
        "admissibility".into(),
        json!({
            "checks": adm.checks.iter().map(|c| json!({"condition": c.condition, "magnitude": c.magnitude, "pass": c.pass})).collect::<Vec<_>>(),
            "admissible": adm.admissible,
        }),
    );
    let d =
        derive_constants(&coeffs, job.spec.branch).map_err(|e| (EXIT_INFEASIBLE, e.to_string()))?;
    job.body.insert("constants".into(), constants_table(&d));
    if job.spec.constants == ConstantSource::Corollary {
        let k = compute_corollary_constants(&coeffs, job.spec.branch)
            .map_err(|e| (EXIT_INFEASIBLE, e.to_string()))?;
        job.body.insert(
            "corollary_constants".into(),
            json!({
                "k11": cx(k.k11), "k12": cx(k.k12), "k13": cx(k.k13), "k14": cx(k.k14),
                "a11": cx(k.a11), "a12": cx(k.a12), "b11": cx(k.b11), "b12": cx(k.b12),
            }),
        );
    }
    Ok(EXIT_OK)
}

fn build_error(e: BuildError) -> (i32, String) {
    (EXIT_INFEASIBLE, e.to_string())
}

/// Builds the spec's pair and records constants and constraint rows.
fn build(job: &mut Job) -> Step<(Pair, i32)> {
    let spec = job.spec;
    if !matches!(spec.kind, SystemKind::Difference | SystemKind::Pdde) {
        return Err((
            EXIT_SCHEMA,
            "kind: build needs a difference or pdde system".into(),
        ));
    }
    let carrier = spec
        .carrier
        .as_ref()
        .ok_or((EXIT_SCHEMA, "carrier: required to build a pair".to_string()))?;
    derive(job)?;
    let coeffs = spec.coefficients.to_core();
    let shift = spec.shift_point();
    let psi = PeriodicPolynomial::from_wire(shift.clone(), &carrier.psi)
        .map_err(|e| (EXIT_SCHEMA, format!("carrier.psi: {e}")))?;
    if spec.kind == SystemKind::Pdde && !psi.is_zero() {
        return Err((
            EXIT_SCHEMA,
            "carrier.psi: the pdde families have a linear carrier (NonlinearCarrier)".into(),
        ));
    }
    let free = FreeParams {
        tail: carrier.linear_tail.iter().copied().map(to_c64).collect(),
        lead: to_c64(carrier.lead),
        b2: to_c64(carrier.b2),
        branch_l: carrier.branch_l,
        branch_b: carrier.branch_b,
        root: carrier.root,
        branch_window: 8,
    };
    let built = match (spec.constants, spec.kind) {
        (ConstantSource::General, SystemKind::Difference) => {
            build_difference_family(&coeffs, spec.branch, &shift, spec.family, &psi, &free)
        }
        (ConstantSource::General, _) => {
            build_pdde_family(&coeffs, spec.branch, &shift, spec.family, &free)
        }
        (ConstantSource::Corollary, kind) => {
            let ck = if kind == SystemKind::Difference {
                CorollaryKind::Difference
            } else {
                CorollaryKind::Pdde
            };
            build_corollary_family(&coeffs, spec.branch, &shift, spec.family, ck, &psi, &free)
        }
    };
    let (pair, report) = built.map_err(build_error)?;
    job.body
        .insert("constraints".into(), constraints_json(&report));
    job.body.insert(
        "pair".into(),
        json!({"f1": pair.f1_expr().to_json(), "f2": pair.f2_expr().to_json()}),
    );
    let code = if report.pass {
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    Ok((pair, code))
}

fn verify(job: &mut Job) -> Step<i32> {
    let (pair, build_code) = build(job)?;
    let ver = &job.spec.verification;
    let radius = match ver.radius {
        Some(r) => r,
        None => pair.safe_radius(CARRIER_BOUND).unwrap_or(1.0).min(1.0),
    };
    if radius.is_nan() || radius <= 0.0 {
        return Err((
            EXIT_VERIFY,
            format!("carrier exceeds |h| <= {CARRIER_BOUND} at every radius"),
        ));
    }
    let opts = VerifyOptions {
        samples: ver.samples,
        radius,
        seed: ver.seed,
        tol: ver.tol,
        fd_check: ver.fd_check,
        max_pole_retries: 16,
    };
    let res = verify_pair(&pair, &opts).map_err(|e| (EXIT_VERIFY, e.to_string()))?;
    let mut rj = residuals_json(&res);
    rj["carrier_bound"] = json!(CARRIER_BOUND);
    job.body.insert("residuals".into(), rj);
    Ok(if !res.pass { EXIT_VERIFY } else { build_code })
}

fn probe(job: &mut Job) -> Step<i32> {
    if job.spec.kind != SystemKind::Pde {
        return Err((EXIT_SCHEMA, "kind: probe needs a pde system".into()));
    }
    derive(job)?;
    let coeffs = job.spec.coefficients.to_core();
    let r = probe_pde_nonexistence(&coeffs, job.spec.branch, 1e-9)
        .map_err(|e| (EXIT_INFEASIBLE, e.to_string()))?;
    let cases: Vec<Value> = r
        .cases
        .iter()
        .map(|c| json!({"case": format!("{:?}", c.case), "feasible": c.feasible, "obstruction": c.obstruction, "tag": c.tag}))
        .collect();
    job.body.insert(
        "probe".into(),
        json!({"c0": cx(r.c0), "cases": cases, "infeasible": r.infeasible}),
    );
    Ok(if r.infeasible { EXIT_OK } else { EXIT_VERIFY })
}

fn order(job: &mut Job) -> Step<i32> {
    let (pair, _) = build(job)?;
    let o = &job.spec.order;
    let seed = job.spec.verification.seed;
    let mut estimates = Map::new();
    let mut plot = String::from("# member ln_r ln_T\n");
    let mut max_order = f64::NEG_INFINITY;
    for (name, e) in [("f1", pair.f1_expr()), ("f2", pair.f2_expr())] {
        let est = estimate_order(&e, &o.radii, o.samples, seed)
            .map_err(|e| (EXIT_VERIFY, format!("{name}: {e}")))?;
        for (x, y) in est.log_pairs() {
            plot.push_str(&format!("{name} {x:.17e} {y:.17e}\n"));
        }
        max_order = max_order.max(est.order);
        estimates.insert(name.into(), order_json(&est));
    }
    // the order of a pair is taken as the larger of the two
    estimates.insert("pair".into(), json!(max_order));
    job.body.insert("order".into(), Value::Object(estimates));
    job.plot = Some(plot);
    Ok(EXIT_OK)
}
