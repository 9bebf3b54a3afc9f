//! Acceptance suite: one PASS/FAIL line per criterion.

use sjacobi::qseries::{converged_hat_value, eisenstein_g_value};
use sjacobi::verify::{corpus_box_point, reports_json, run_suite, SuiteConfig, VerificationReport, SUITES};
use std::time::{Duration, Instant};

const SEED: u64 = 7;
const TRUNC: i64 = 50;

const TOL_CONNECTION: f64 = 1e-9;
const TOL_INVERSE: f64 = 1e-10;
const TOL_EXPLICIT: f64 = 1e-12;
const TOL_METRIC_INVARIANCE: f64 = 1e-9;
const TOL_COVARIANCE: f64 = 1e-7;
const TOL_NEGATIVE: f64 = 1e-2;
const TOL_SLASH: f64 = 1e-9;
const TOL_EISENSTEIN: f64 = 1e-6;
const TOL_HOLOMORPHY: f64 = 1e-10;
const TOL_INVARIANCE: f64 = 1e-7;
const TOL_LEMMAS: f64 = 1e-7;

const EISENSTEIN_BOUND: usize = 400;
const CONNECTION_RUNTIME: Duration = Duration::from_secs(60);
const INVERSE_RUNTIME: Duration = Duration::from_secs(10);
const FULL_RUNTIME: Duration = Duration::from_secs(600);

fn cfg(suite: &str, parallel: bool) -> SuiteConfig {
    SuiteConfig { suite: suite.into(), seed: SEED, trunc: TRUNC, parallel, ..Default::default() }
}

fn timed(suite: &str) -> (Vec<VerificationReport>, Duration) {
    let t = Instant::now();
    let r = run_suite(&cfg(suite, true)).expect("suite runs");
    (r, t.elapsed())
}

struct Outcome {
    ok: bool,
    detail: String,
}

impl Outcome {
    fn new(ok: bool, detail: impl Into<String>) -> Self {
        Outcome { ok, detail: detail.into() }
    }
}

fn select<'a>(rs: &'a [VerificationReport], pred: impl Fn(&VerificationReport) -> bool) -> Vec<&'a VerificationReport> {
    rs.iter().filter(|r| pred(r)).collect()
}

fn find<'a>(rs: &'a [VerificationReport], claim: &str) -> Option<&'a VerificationReport> {
    rs.iter().find(|r| r.claim == claim)
}

fn below(r: &VerificationReport, tol: f64, min_samples: usize) -> bool {
    r.samples >= min_samples && r.max_residual.is_finite() && r.max_residual < tol
}

fn exact(r: &VerificationReport) -> bool {
    r.samples >= 1 && r.max_residual == 0.0
}

/// All reports satisfy `ok`, with at least `expect` of them present.
fn all(rs: &[&VerificationReport], expect: usize, ok: impl Fn(&VerificationReport) -> bool) -> Outcome {
    let bad: Vec<String> = rs.iter().filter(|r| !ok(r)).map(|r| format!("{} ({:.3e})", r.claim, r.max_residual)).collect();
    let worst = rs.iter().map(|r| r.max_residual).fold(0.0f64, f64::max);
    let ok = rs.len() >= expect && bad.is_empty();
    let mut d = format!("{} claims, worst residual {worst:.3e}", rs.len());
    if rs.len() < expect {
        d.push_str(&format!(", expected at least {expect}"));
    }
    if !bad.is_empty() {
        d.push_str(&format!(", failing: {}", bad.join("; ")));
    }
    Outcome::new(ok, d)
}

fn and(a: Outcome, b: Outcome) -> Outcome {
    Outcome::new(a.ok && b.ok, format!("{}; {}", a.detail, b.detail))
}

fn connection(rs: &[VerificationReport], metric_time: Duration) -> Outcome {
    let sel = select(rs, |r| r.claim.starts_with("connection closed form"));
    let o = all(&sel, 6, |r| r.tolerance == TOL_CONNECTION && below(r, TOL_CONNECTION, 60));
    and(o, Outcome::new(metric_time < CONNECTION_RUNTIME, format!("metric suite {:.2}s", metric_time.as_secs_f64())))
}

fn inverse(rs: &[VerificationReport], metric_time: Duration) -> Outcome {
    let sel = select(rs, |r| r.claim.starts_with("inverse metric"));
    let o = all(&sel, 6, |r| r.tolerance == TOL_INVERSE && below(r, TOL_INVERSE, 60));
    and(o, Outcome::new(metric_time < INVERSE_RUNTIME, format!("metric suite {:.2}s", metric_time.as_secs_f64())))
}

fn explicit(rs: &[VerificationReport]) -> Outcome {
    let sel = select(rs, |r| r.claim == "degree-one connection coefficients");
    all(&sel, 1, |r| r.tolerance == TOL_EXPLICIT && below(r, TOL_EXPLICIT, 10))
}

fn metric_invariance(rs: &[VerificationReport]) -> Outcome {
    let sel = select(rs, |r| r.claim == "metric invariance");
    all(&sel, 1, |r| r.tolerance == TOL_METRIC_INVARIANCE && r.n == 3 && r.m == 3 && below(r, TOL_METRIC_INVARIANCE, 20))
}

fn required_ops() -> Vec<((usize, usize), Vec<&'static str>)> {
    vec![
        ((1, 1), vec!["D1", "D2", "delta1", "delta2", "heat_Lkm"]),
        ((1, 2), vec!["D1_1", "D1_2", "D2_m", "delta1_1", "delta1_2", "delta2_m", "heat_m"]),
        ((1, 3), vec!["D1_1", "D1_2", "D1_3", "D2_m", "delta1_1", "delta1_2", "delta1_3", "delta2_m", "heat_m"]),
        ((2, 2), vec!["D1_det", "delta1_det", "heat_det", "D2_det", "delta2_det", "bracket_a", "bracket_b"]),
        ((2, 3), vec!["D1_det", "delta1_det", "heat_det", "D2_det", "delta2_det", "bracket_b"]),
    ]
}

fn covariance(rs: &[VerificationReport], full_time: Duration) -> Outcome {
    let mut missing = Vec::new();
    for ((n, m), names) in required_ops() {
        for name in names {
            let claim = format!("{name} covariance ({n},{m})");
            if find(rs, &claim).is_none() {
                missing.push(claim);
            }
        }
    }
    let generic = select(rs, |r| r.claim.contains(" covariance (") && !r.negative);
    let corpus = select(rs, |r| r.claim.contains("covariance on weak Jacobi forms"));
    let negative = select(rs, |r| r.claim.contains("with output weight k'+1"));
    let g = all(&generic, 60, |r| r.tolerance == TOL_COVARIANCE && below(r, TOL_COVARIANCE, 20));
    let c = all(&corpus, 10, |r| r.n == 1 && r.tolerance == TOL_COVARIANCE && below(r, TOL_COVARIANCE, 20));
    let neg_ok = |r: &VerificationReport| r.negative && r.tolerance == TOL_NEGATIVE && r.max_residual > TOL_NEGATIVE && r.pass;
    let bad_neg: Vec<String> = negative.iter().filter(|r| !neg_ok(r)).map(|r| r.claim.clone()).collect();
    let least_neg = negative.iter().map(|r| r.max_residual).fold(f64::INFINITY, f64::min);
    let neg = Outcome::new(
        negative.len() == generic.len() && bad_neg.is_empty(),
        format!("{} negative controls, smallest residual {least_neg:.3e}{}", negative.len(), if bad_neg.is_empty() { String::new() } else { format!(", not rejected: {}", bad_neg.join("; ")) }),
    );
    let cover = Outcome::new(missing.is_empty(), if missing.is_empty() { "all required operators registered".to_string() } else { format!("missing {}", missing.join("; ")) });
    let time = Outcome::new(full_time < FULL_RUNTIME, format!("full suite {:.1}s", full_time.as_secs_f64()));
    [Outcome::new(true, "generic:"), g, Outcome::new(true, "corpus:"), c, neg, cover, time].into_iter().reduce(and).expect("nonempty")
}

fn corpus_slash(rs: &[VerificationReport]) -> Outcome {
    let sel = select(rs, |r| r.claim.contains("invariance under S, T and lattice translations"));
    all(&sel, 2, |r| r.tolerance == TOL_SLASH && below(r, TOL_SLASH, 10))
}

fn heat_exact(rs: &[VerificationReport]) -> Outcome {
    let sel = select(rs, |r| r.claim.contains("heat operator commutes with the theta correspondence"));
    all(&sel, 2, |r| r.tolerance == 0.0 && exact(r))
}

fn serre_compat(rs: &[VerificationReport]) -> Outcome {
    let sel = select(rs, |r| r.claim.contains("modified heat operator matches the Serre derivative"));
    all(&sel, 2, |r| r.tolerance == 0.0 && exact(r))
}

/// Outer-bound doubling changes each converged value by less than the tolerance.
fn eisenstein_estimator() -> Outcome {
    let mut worst = 0.0f64;
    let mut failures = 0;
    for i in 0..6 {
        let (z, w) = corpus_box_point(SEED, i);
        for n in [1, 2] {
            match converged_hat_value(n, z, w, 1e-13, EISENSTEIN_BOUND, 1 << 16) {
                Ok((v, a)) => match sjacobi::qseries::eisenstein_hat_value(n, z, w, 2 * a) {
                    Ok(u) => worst = worst.max((u - v).norm()),
                    Err(_) => failures += 1,
                },
                Err(_) => failures += 1,
            }
        }
        match (eisenstein_g_value(2, z, 2 * EISENSTEIN_BOUND), eisenstein_g_value(2, z, 4 * EISENSTEIN_BOUND)) {
            (Ok(a), Ok(b)) => worst = worst.max((a - b).norm()),
            _ => failures += 1,
        }
    }
    Outcome::new(failures == 0 && worst < TOL_EISENSTEIN, format!("estimator: {failures} non-converged, largest doubling change {worst:.3e}"))
}

fn eisenstein(rs: &[VerificationReport]) -> Outcome {
    let names = [
        "G2 anomaly under S",
        "G2 - pi/y weight-two invariance",
        "G1hat transformation laws",
        "G2hat transformation laws",
        "E1hat - v/y weight-one index-zero invariance",
    ];
    let sel = select(rs, |r| names.contains(&r.claim.as_str()));
    let o = all(&sel, names.len(), |r| r.tolerance == TOL_EISENSTEIN && r.resampled == 0 && below(r, TOL_EISENSTEIN, 6));
    and(o, eisenstein_estimator())
}

fn serre_variants(rs: &[VerificationReport]) -> Outcome {
    let cov = select(rs, |r| {
        ["serre_a", "serre_b", "serre_c", "serre_d"].iter().any(|v| r.claim == format!("{v} covariance (1,1)") || r.claim == format!("{v} covariance on weak Jacobi forms (1,1)"))
    });
    let a = all(&cov, 8, |r| r.tolerance == TOL_COVARIANCE && below(r, TOL_COVARIANCE, 20));
    let hol = select(rs, |r| r.claim.starts_with("serre (a) output holomorphy"));
    let h = all(&hol, 2, |r| r.tolerance == TOL_HOLOMORPHY && below(r, TOL_HOLOMORPHY, 10));
    let notes = select(rs, |r| r.claim.starts_with("serre (c) with coefficient") || r.claim.starts_with("serre (d) with a="));
    let written = notes.iter().all(|r| r.note.as_deref().is_some_and(|n| n.starts_with("determination:")) && r.pass);
    let d = Outcome::new(notes.len() >= 7 && written, format!("{} written determinations", notes.len()));
    [Outcome::new(true, "covariance:"), a, Outcome::new(true, "holomorphy:"), h, d].into_iter().reduce(and).expect("nonempty")
}

fn invariant_ops(rs: &[VerificationReport]) -> Outcome {
    let mut missing = Vec::new();
    for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
        for name in ["H1", "H2"] {
            let c = format!("{name} invariance ({n},{m})");
            if find(rs, &c).is_none() {
                missing.push(c);
            }
        }
    }
    for (n, m) in [(1, 2), (2, 2)] {
        for k in 1..=2 {
            for l in 1..=2 {
                for name in [format!("T1_{k}{l}"), format!("U_{k}{l}"), format!("V_{k}{l}"), format!("YmYp_{k}{l}")] {
                    let c = format!("{name} invariance ({n},{m})");
                    if find(rs, &c).is_none() {
                        missing.push(c);
                    }
                }
            }
        }
    }
    let sel = select(rs, |r| r.claim.contains(" invariance (") && !r.negative);
    let o = all(&sel, 40, |r| r.tolerance == TOL_INVARIANCE && below(r, TOL_INVARIANCE, 20));
    let neg = select(rs, |r| r.claim.starts_with("Tr(ΛK) without the shift term"));
    let n = Outcome::new(
        neg.len() == 2 && neg.iter().all(|r| r.pass && r.max_residual > TOL_NEGATIVE),
        format!("{} negative controls rejected", neg.len()),
    );
    let cover = Outcome::new(missing.is_empty(), if missing.is_empty() { "coverage complete".to_string() } else { format!("missing {}", missing.join("; ")) });
    [o, n, cover].into_iter().reduce(and).expect("nonempty")
}

fn lemmas(rs: &[VerificationReport]) -> Outcome {
    let names = ["gradient of Tr(M V Y^-1 V^t)", "gradients of Y^-1 and det Y", "second W-derivatives of f h1", "cofactor trace identity"];
    let sel = select(rs, |r| names.contains(&r.claim.as_str()));
    all(&sel, names.len(), |r| r.tolerance == TOL_LEMMAS && r.n == 3 && r.m == 3 && below(r, TOL_LEMMAS, 50))
}

fn determinism(default: &[VerificationReport]) -> Outcome {
    let mut differing = Vec::new();
    let first = reports_json(default);
    if reports_json(&run_suite(&cfg("default", false)).expect("suite runs")) != first {
        differing.push("default (sequential vs parallel)".to_string());
    }
    for suite in SUITES.iter().filter(|s| **s != "default") {
        let a = reports_json(&run_suite(&cfg(suite, true)).expect("suite runs"));
        let b = reports_json(&run_suite(&cfg(suite, true)).expect("suite runs"));
        if a != b {
            differing.push(suite.to_string());
        }
    }
    Outcome::new(differing.is_empty(), if differing.is_empty() { format!("{} suites byte-identical", SUITES.len()) } else { format!("differ: {}", differing.join(", ")) })
}

#[test]
fn acceptance() {
    let (metric, metric_time) = timed("metric");
    let (rs, full_time) = timed("default");
    assert!(!metric.is_empty());
    let results: Vec<(&str, Outcome)> = vec![
        ("connection closed form vs Christoffel symbols", connection(&rs, metric_time)),
        ("closed-form inverse metric", inverse(&rs, metric_time)),
        ("degree-one connection coefficients", explicit(&rs)),
        ("metric invariance", metric_invariance(&rs)),
        ("operator covariance", covariance(&rs, full_time)),
        ("corpus slash invariance at trunc 50", corpus_slash(&rs)),
        ("heat operator and theta correspondence, exact", heat_exact(&rs)),
        ("Serre derivative compatibility, exact", serre_compat(&rs)),
        ("Eisenstein transformation laws", eisenstein(&rs)),
        ("Serre-type operator variants", serre_variants(&rs)),
        ("invariant differential operators", invariant_ops(&rs)),
        ("differentiation identities", lemmas(&rs)),
        ("determinism under fixed seed", determinism(&rs)),
    ];
    let mut failed = Vec::new();
    for (i, (name, o)) in results.iter().enumerate() {
        println!("criterion {:>2} {} {name}: {}", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
        if !o.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
