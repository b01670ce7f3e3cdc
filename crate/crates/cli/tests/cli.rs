use std::process::Command;

use sumsetlab::{run, Backend, Engine, VerifyRequest, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION};
use sumsetlab_core::{cd_bound, FiniteGroup, SubsetMask, Theorem, VerificationReport, Verifier, VerifyError};

fn invoke(backend: &dyn Backend, args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let full: Vec<&str> = std::iter::once("sumsetlab").chain(args.iter().copied()).collect();
    let code = run(full, backend, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Reports one fabricated violation on top of the real result.
struct Broken;

impl Backend for Broken {
    fn verify(
        &self,
        verifier: &Verifier,
        group: &FiniteGroup,
        theorem: Theorem,
        request: &VerifyRequest,
    ) -> Result<VerificationReport, VerifyError> {
        let mut report = Engine.verify(verifier, group, theorem, request)?;
        let a = SubsetMask::from_elements(group.order(), [0]);
        let mut fake = cd_bound(group, &a, &a, theorem);
        fake.holds = false;
        report.violations.push(fake);
        Ok(report)
    }
}

#[test]
fn clean_verification_exits_zero() {
    let (code, out, _) = invoke(&Engine, &["verify", "--group", "cyclic:7"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("violations:     0"));
    assert!(out.contains("pairs checked:  16129"));
}

#[test]
fn violation_exits_one() {
    let (code, out, _) = invoke(&Broken, &["verify", "--group", "cyclic:5"]);
    assert_eq!(code, EXIT_VIOLATION);
    assert!(out.contains("VIOLATION"));
}

#[test]
fn json_is_identical_across_worker_counts() {
    let args = |w: &'static str| {
        vec!["--json", "--workers", w, "verify", "--group", "frobenius:7:3:2", "--mode", "sampled", "--seed", "1", "--count", "3000"]
    };
    let (_, one, _) = invoke(&Engine, &args("1"));
    let (_, four, _) = invoke(&Engine, &args("4"));
    assert_eq!(one, four);
    let v: serde_json::Value = serde_json::from_str(&one).unwrap();
    assert_eq!(v["pairs_checked"], 3000);
    assert_eq!(v["p_g"], 3);
    assert!(v.get("wall_time").is_none());
}

#[test]
fn decompose_with_explicit_representatives() {
    let (code, out, err) =
        invoke(&Engine, &["--json", "decompose", "--group", "quaternion", "--kernel", "6", "--reps", "0,4"]);
    assert_eq!(code, EXIT_OK, "{err}");
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["kernel"], serde_json::json!([0, 1, 6, 7]));
    assert_eq!(v["psi"][2], serde_json::json!({"kernel": 7, "coset": 1}));
    assert_eq!(v["eta"][1][1], 1);
}

#[test]
fn decompose_rejects_bad_representatives() {
    let (code, _, err) = invoke(&Engine, &["decompose", "--group", "quaternion", "--kernel", "6", "--reps", "0,1"]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn trace_and_extremal_run() {
    let (code, out, _) = invoke(&Engine, &["trace", "--group", "heisenberg:3", "--set-a", "0,1", "--set-b", "0,3"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("block"));
    let (code, out, _) = invoke(&Engine, &["--json", "extremal", "--group", "cyclic:7", "--sizes", "2,3", "--limit", "5"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["count"], 5);
    assert_eq!(v["bound"], 4);
}

#[test]
fn trace_outside_hypothesis_is_usage_error() {
    let (code, _, err) = invoke(&Engine, &["trace", "--group", "heisenberg:3", "--set-a", "0,1,2", "--set-b", "0,3"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(!err.is_empty());
}

#[test]
fn table_files_validate_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("z3.txt");
    std::fs::write(&good, "3\n0 1 2\n1 2 0\n2 0 1\n").unwrap();
    let spec = format!("table:{}", good.display());
    let (code, out, _) = invoke(&Engine, &["validate", "--group", &spec]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("valid group of order 3"));
    let (code, _, _) = invoke(&Engine, &["verify", "--group", &spec, "--theorem", "eh"]);
    assert_eq!(code, EXIT_OK);

    let bad = dir.path().join("loop.txt");
    std::fs::write(&bad, "5\n0 1 2 3 4\n1 0 3 4 2\n2 4 0 1 3\n3 2 4 0 1\n4 3 1 2 0\n").unwrap();
    let spec = format!("table:{}", bad.display());
    let (code, out, _) = invoke(&Engine, &["--json", "validate", "--group", &spec]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.contains("not_associative"));
    let (code, _, err) = invoke(&Engine, &["verify", "--group", &spec]);
    assert_eq!(code, EXIT_USAGE);
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.to_str().unwrap();
    let (code, out, _) = invoke(&Engine, &["--json", "--out", p, "verify", "--group", "quaternion"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["order"], 8);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_sumsetlab");
    let ok = Command::new(bin).args(["verify", "--group", "cyclic:3"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bad = Command::new(bin).args(["verify", "--group", "nonsense"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&bad.stderr).lines().count(), 1);
    let env = Command::new(bin)
        .env("SUMSETLAB_WORKERS", "2")
        .args(["--json", "verify", "--group", "cyclic:5", "--mode", "sampled", "--seed", "1", "--count", "10"])
        .output()
        .unwrap();
    assert_eq!(env.status.code(), Some(0));
}
