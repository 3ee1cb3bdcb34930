use std::path::PathBuf;
use std::process::Command as Proc;

use gqe_cli::{
    execute, parse_problem_file, parse_problem_str, render_report, write_report, CliError, Command,
};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_gqe"))
}

const MINIMAL: &str = r#"{
  "kind": "difference",
  "dimension": 2,
  "shift": [[1, 0], [0, 0]],
  "coefficients": {"a": [3, 0], "b": [1, 0], "alpha": [-2, 0], "beta": [2, 0], "gamma": [-2, 0], "c": [-1, 0]}
}"#;

#[test]
fn minimal_spec_gets_defaults() {
    let spec = parse_problem_str(MINIMAL).unwrap();
    assert_eq!(spec.verification.seed, 0);
    assert_eq!(spec.verification.samples, 1000);
    assert_eq!(spec.verification.tol, 1e-9);
    assert!(spec.carrier.is_none());
}

#[test]
fn zero_shift_is_a_schema_violation() {
    let text = MINIMAL.replace("[[1, 0], [0, 0]]", "[[0, 0], [0, 0]]");
    match parse_problem_str(&text) {
        Err(CliError::Schema(v)) => assert!(
            v.iter().any(|m| m.contains("shift must be nonzero")),
            "{v:?}"
        ),
        other => panic!("{other:?}"),
    }
    let bad = MINIMAL.replace("\"dimension\": 2", "\"dimension\": 3");
    assert!(matches!(parse_problem_str(&bad), Err(CliError::Schema(_))));
    match parse_problem_str("{\n  \"kind\": \"difference\",\n  \"oops\": 1\n}") {
        Err(CliError::Schema(v)) => assert!(v[0].starts_with("line "), "{v:?}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn fixtures_round_trip() {
    for name in ["example1.json", "example2.json", "probe_example2.json"] {
        let spec = parse_problem_file(&fixture(name)).unwrap();
        let again = parse_problem_str(&spec.to_json().to_string()).unwrap();
        assert_eq!(spec, again, "{name}");
    }
}

#[test]
fn derive_reports_shift_constants() {
    let spec = parse_problem_str(MINIMAL).unwrap();
    let r = execute(Command::Derive, &spec);
    assert_eq!(r.exit_code, 0);
    // T1 = (αγ − bβ)/(ab − α²) = (4 − 2)/(3 − 4)
    assert_eq!(r.body["constants"]["t1"][0].as_f64().unwrap(), -2.0);
    assert_eq!(r.body["constants"]["t2"][0].as_f64().unwrap(), -2.0);
}

#[test]
fn second_example_verifies() {
    let spec = parse_problem_file(&fixture("example2.json")).unwrap();
    let r = execute(Command::Verify, &spec);
    assert_eq!(r.exit_code, 0, "{}", render_report(&r.body));
    assert!(r.body["residuals"]["max_scaled_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn first_example_verify_reports_the_inconsistency() {
    // the family-ii constraints of the difference system need a = b
    let spec = parse_problem_file(&fixture("example1.json")).unwrap();
    let r = execute(Command::Verify, &spec);
    assert_eq!(r.exit_code, 4);
    let rows = r.body["constraints"]["rows"].as_array().unwrap();
    let row = |n: &str| {
        rows.iter().find(|x| x["name"] == n).unwrap()["pass"]
            .as_bool()
            .unwrap()
    };
    assert!(row("e^{2iL(c)}"));
    assert!(row("e^{2i(b1-b2)}"));
    assert!(!row("R11 R12 = R13"));
}

#[test]
fn probe_on_second_example_is_infeasible() {
    let spec = parse_problem_file(&fixture("probe_example2.json")).unwrap();
    let r = execute(Command::Probe, &spec);
    assert_eq!(r.exit_code, 0);
    assert_eq!(r.body["probe"]["infeasible"], true);
    let wrong = parse_problem_file(&fixture("example2.json")).unwrap();
    assert_eq!(execute(Command::Probe, &wrong).exit_code, 2);
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let spec = parse_problem_file(&fixture("example2.json")).unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    write_report(&execute(Command::Verify, &spec), &a).unwrap();
    write_report(&execute(Command::Verify, &spec), &b).unwrap();
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    // the echo re-parses to the same spec
    let body: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert_eq!(parse_problem_str(&body["spec"].to_string()).unwrap(), spec);
}

#[test]
fn unwritable_path_is_an_io_failure() {
    let spec = parse_problem_str(MINIMAL).unwrap();
    let r = execute(Command::Derive, &spec);
    let err = write_report(&r, std::path::Path::new("/nonexistent-dir/x/report.json")).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let ok = bin()
        .args(["verify", "--spec"])
        .arg(fixture("example2.json"))
        .arg("--out")
        .arg(&out)
        .args(["--seed", "7"])
        .status()
        .unwrap();
    assert_eq!(ok.code(), Some(0));
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(body["spec"]["verification"]["seed"], 7);

    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        MINIMAL.replace("[[1, 0], [0, 0]]", "[[0, 0], [0, 0]]"),
    )
    .unwrap();
    assert_eq!(
        bin()
            .args(["build", "--spec"])
            .arg(&bad)
            .status()
            .unwrap()
            .code(),
        Some(2)
    );

    let infeasible = dir.path().join("t2.json");
    // T2 != 0, so no pdde family exists
    let text = std::fs::read_to_string(fixture("example2.json"))
        .unwrap()
        .replace("\"gamma\": [-1, 0]", "\"gamma\": [1, 0]");
    std::fs::write(&infeasible, text).unwrap();
    let st = bin()
        .args(["build", "--spec"])
        .arg(&infeasible)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));

    let st = bin()
        .args(["verify", "--spec"])
        .arg(fixture("example1.json"))
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(4));

    let missing = bin()
        .args(["derive", "--spec", "/nonexistent/spec.json"])
        .status()
        .unwrap();
    assert_eq!(missing.code(), Some(1));
}

#[test]
fn order_prints_two_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("o.json");
    let spec_path = dir.path().join("spec.json");
    let mut spec = parse_problem_file(&fixture("example2.json")).unwrap();
    spec.order.samples = 256;
    spec.order.radii = vec![4.0, 8.0, 16.0, 32.0];
    std::fs::write(&spec_path, spec.to_json().to_string()).unwrap();
    let run = bin()
        .args(["order", "--spec"])
        .arg(&spec_path)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    let text = String::from_utf8(run.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 8);
    assert!(rows.iter().all(|l| l.split_whitespace().count() == 3));
    let body: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    // linear carrier: order 1
    assert!((body["order"]["pair"].as_f64().unwrap() - 1.0).abs() < 0.3);
}
