use std::path::PathBuf;
use std::process::{Command, Output};

fn sjacobi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sjacobi")).args(args).output().expect("binary runs")
}

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(format!("{name}.csv"))
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("sjacobi-cli-{}-{name}", std::process::id()))
}

#[test]
fn empty_suite_exits_zero() {
    let out = sjacobi(&["verify", "--suite", "empty"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "[]");
}

#[test]
fn configuration_errors_exit_two() {
    assert_eq!(sjacobi(&["verify", "--suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(sjacobi(&["verify", "--bogus-flag"]).status.code(), Some(2));
    assert_eq!(sjacobi(&["qexp", "dump", "--form", "phi_9_9"]).status.code(), Some(2));
}

#[test]
fn failing_claims_exit_one() {
    let out = sjacobi(&["verify", "--suite", "metric", "--tol", "1e-300", "--samples", "2"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|r| r["pass"] == false));
}

#[test]
fn committed_golden_files_match() {
    for name in ["phi_-2_1", "phi_0_1"] {
        let p = golden(name);
        let out = sjacobi(&["qexp", "check", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tampered_golden_file_fails() {
    let text = std::fs::read_to_string(golden("phi_0_1")).unwrap();
    let bad = text.replacen("\n0,0,10,1\n", "\n0,0,11,1\n", 1);
    assert_ne!(bad, text);
    let p = tmp("phi_0_1.csv");
    std::fs::write(&p, bad).unwrap();
    let out = sjacobi(&["qexp", "check", p.to_str().unwrap(), "--form", "phi_0_1"]);
    std::fs::remove_file(&p).ok();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn dump_is_reproducible() {
    let p = tmp("dump.csv");
    let out = sjacobi(&["qexp", "dump", "--form", "phi_-2_1", "--trunc", "50", "--out", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read_to_string(&p).unwrap();
    std::fs::remove_file(&p).ok();
    assert_eq!(a, std::fs::read_to_string(golden("phi_-2_1")).unwrap());
}

#[test]
fn list_ops_emits_json() {
    let out = sjacobi(&["list-ops", "--max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|o| o["name"] == "D1"));
}

fn christoffel_rows(extra: &[&str]) -> Vec<(String, f64, f64)> {
    let mut args = vec!["christoffel", "--n", "2", "--m", "1", "--seed", "3"];
    args.extend_from_slice(extra);
    let out = sjacobi(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("K_index,I_index,J_index,re,im"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[..3].join(","), f[3].parse().unwrap(), f[4].parse().unwrap())
        })
        .collect()
}

#[test]
fn christoffel_closed_form_agrees_with_formula() {
    let (a, b) = (christoffel_rows(&[]), christoffel_rows(&["--closed"]));
    let key = |v: &[(String, f64, f64)]| v.iter().map(|r| r.0.clone()).collect::<Vec<_>>();
    let lookup = |v: &[(String, f64, f64)], k: &str| v.iter().find(|r| r.0 == k).map(|r| (r.1, r.2)).unwrap_or((0.0, 0.0));
    let mut keys = key(&a);
    keys.extend(key(&b));
    assert!(!keys.is_empty());
    for k in keys {
        let (x, y) = (lookup(&a, &k), lookup(&b, &k));
        assert!((x.0 - y.0).abs() + (x.1 - y.1).abs() < 1e-9, "{k}: {x:?} vs {y:?}");
    }
}

#[test]
fn apply_on_corpus_form() {
    let out = sjacobi(&["apply", "--op", "D1", "--form", "phi_0_1", "--point", r#"{"z":"0.1+1.2i","w":"0.2+0.1i"}"#]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let bad = sjacobi(&["apply", "--op", "D1", "--form", "phi_0_1", "--point", r#"{"z":"0.1-1.2i","w":"0"}"#]);
    assert_ne!(bad.status.code(), Some(0));
}
