use std::path::Path;
use std::process::{Command, Output};

fn pairspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pairspec"))
        .args(args)
        .output()
        .unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const COARSE: [&str; 6] = ["--d", "1", "--L", "4", "--h", "0.125"];

#[test]
fn solve_reports_the_isolated_eigenvalue() {
    let mut args = vec!["solve", "--sector", "a", "--k", "3", "--deterministic"];
    args.extend(COARSE);
    let out = pairspec(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["isolated_count"], 1);
    assert_eq!(v["pass"], true);
    assert_eq!(v["eigenvalues"].as_array().unwrap().len(), 3);
    assert!(v.get("timestamp").is_none());
}

#[test]
fn deterministic_output_is_byte_identical_with_canonical_order() {
    let mut args = vec!["solve", "--domain", "cross-axis", "--deterministic"];
    args.extend(COARSE);
    let a = pairspec(&args);
    let b = pairspec(&args);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let keys = [
        "\"domain\"",
        "\"sector\"",
        "\"d\"",
        "\"L\"",
        "\"h\"",
        "\"snapped_width\"",
        "\"eigenvalues\"",
        "\"residuals\"",
        "\"threshold\"",
        "\"isolated_count\"",
        "\"pass\"",
        "\"sha256\"",
    ];
    let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{positions:?}");
}

#[test]
fn timestamp_is_excluded_from_the_digest() {
    let mut args = vec!["solve", "--domain", "square"];
    args.extend(COARSE);
    let stamped = json(&pairspec(&args));
    args.push("--deterministic");
    let plain = json(&pairspec(&args));
    assert!(stamped.get("timestamp").is_some());
    assert_eq!(stamped["sha256"], plain["sha256"]);
}

#[test]
fn csv_has_one_row_per_eigenvalue() {
    let mut args = vec!["solve", "--domain", "pair", "--k", "4", "--format", "csv"];
    args.extend(COARSE);
    let out = pairspec(&args);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("domain,sector,d,L,h,n,eigenvalue,residual"));
}

#[test]
fn count_matches_solve() {
    let mut args = vec!["count", "--domain", "cross-axis", "--E", "4.5"];
    args.extend(COARSE);
    let out = pairspec(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["count"], 1);
    let mut args = vec!["count", "--E", "0"];
    args.extend(COARSE);
    assert_eq!(json(&pairspec(&args))["count"], 0);
}

#[test]
fn invalid_input_exits_with_two() {
    for args in [
        vec!["solve", "--d", "-1"],
        vec!["solve", "--domain", "disk"],
        vec!["solve", "--domain", "square", "--sector", "s"],
        vec!["solve", "--d", "1", "--h", "0.3"],
        vec!["solve", "--delta", "1.5"],
        vec!["sweep", "--plan", "/nonexistent/plan.json"],
        vec!["frobnicate"],
    ] {
        let out = pairspec(&args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn dumps_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("mesh.txt");
    let stiff = dir.path().join("a.txt");
    let mass = dir.path().join("b.txt");
    let mut args = vec!["solve", "--domain", "arms", "--k", "2", "--deterministic"];
    args.extend(COARSE);
    let (m, s, b) = (
        mesh.to_str().unwrap(),
        stiff.to_str().unwrap(),
        mass.to_str().unwrap(),
    );
    args.extend(["--dump-mesh", m, "--dump-stiffness", s, "--dump-mass", b]);
    let out = pairspec(&args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    // the arms carry no eigenvalue below the threshold
    assert_eq!(json(&out)["isolated_count"], 0);
    for p in [&mesh, &stiff, &mass] {
        assert!(Path::new(p).metadata().unwrap().len() > 0);
    }
}

#[test]
fn sweep_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.json");
    std::fs::write(
        &plan,
        r#"{"domain":"pair","d":1,"h":[0.25,0.125],"L":[4,6],"k":2}"#,
    )
    .unwrap();
    let out = pairspec(&["sweep", "--plan", plan.to_str().unwrap(), "--deterministic"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = json(&out);
    assert_eq!(v["cells"].as_array().unwrap().len(), 4);
    let csv = pairspec(&["sweep", "--plan", plan.to_str().unwrap(), "--format", "csv"]);
    // header plus one row per eigenvalue of each cell
    assert_eq!(
        String::from_utf8(csv.stdout).unwrap().lines().count(),
        1 + 4 * 2
    );
}

#[test]
fn coarse_verification_passes_and_writes_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("verify.json");
    let out = pairspec(&[
        "verify",
        "--d",
        "1",
        "--h",
        "0.125",
        "--L",
        "4",
        "--deterministic",
        "--out",
        report.to_str().unwrap(),
    ]);
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(out.status.code(), Some(0), "{:?}", v["failing_checks"]);
    assert_eq!(v["pass"], true);
    assert_eq!(v["sectors"].as_array().unwrap().len(), 3);
    assert_eq!(v["comparisons"].as_array().unwrap().len(), 3);
    assert_eq!(v["bracketing"]["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn failed_verification_exits_with_one() {
    // at d/h = 2 the antisymmetric sector has too few unknowns to resolve its gap
    let out = pairspec(&[
        "verify",
        "--d",
        "1",
        "--h",
        "0.5",
        "--L",
        "4",
        "--deterministic",
    ]);
    let v = json(&out);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(v["pass"], false);
    assert!(v["errors"].as_array().unwrap().is_empty());
    assert!(v["failing_checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c == "sector a"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("failed: sector a"));
}
