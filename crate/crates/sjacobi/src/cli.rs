//! Command-line frontend.
//!
//! Exit codes: 0 success, 1 a claim or check failed, 2 invalid input.

use crate::calculus::ExpPolyTestFunction;
use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::metric::{christoffel_csv, MetricParams};
use crate::operators::{covariant_operators, list_ops};
use crate::qseries::{corpus_form, golden, series_map, DEFAULT_TAIL_TOL};
use crate::space::{random_point, value_at, Map, SiegelJacobiPoint, WeightIndex, C64};
use crate::verify::{corpus_inputs, default_weights, reports_json, run_suite, SuiteConfig, SUITES};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser, Debug)]
#[command(name = "sjacobi", version, about = "Siegel-Jacobi operators, q-expansions and verification suites")]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a verification suite and print the JSON report.
    Verify(VerifyArgs),
    /// Evaluate a registered operator on a corpus form or a test function.
    Apply(ApplyArgs),
    /// Dump or check golden q-expansion files.
    Qexp(QexpArgs),
    /// Print Christoffel symbols at a point as CSV.
    Christoffel(ChristoffelArgs),
    /// Print the operator registry as JSON.
    ListOps(ListOpsArgs),
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// One of default, quick, metric, covariance, corpus, eisenstein, invariance, lemmas, empty.
    #[arg(long, default_value = "default")]
    pub suite: String,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Replace every positive tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Replace every per-claim sample count.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, default_value_t = 50)]
    pub trunc: i64,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Evaluate claims and samples on one thread.
    #[arg(long)]
    pub sequential: bool,
    /// Record wall-clock times in the report.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    #[arg(long)]
    pub op: String,
    /// `phi_-2_1`, `phi_0_1` or `test:<seed>` for a random test function.
    #[arg(long)]
    pub form: String,
    /// `{"z":"a+bi","w":"a+bi"}` for n = m = 1, or `{"Z":[[..]],"W":[[..]]}`.
    #[arg(long)]
    pub point: String,
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    #[arg(long, default_value_t = 50)]
    pub trunc: i64,
}

#[derive(Args, Debug)]
pub struct QexpArgs {
    #[command(subcommand)]
    pub action: QexpAction,
}

#[derive(Subcommand, Debug)]
pub enum QexpAction {
    /// Write the expansion of a corpus form.
    Dump {
        #[arg(long)]
        form: String,
        #[arg(long, default_value_t = 50)]
        trunc: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Regenerate a golden file and compare byte for byte.
    Check {
        path: PathBuf,
        /// Corpus form; defaults to the file stem.
        #[arg(long)]
        form: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct ChristoffelArgs {
    #[arg(long, default_value_t = 1)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub m: usize,
    /// Point as in `apply`; a seeded random point when absent.
    #[arg(long)]
    pub point: Option<String>,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    /// Use the closed-form connection instead of the Christoffel formula.
    #[arg(long)]
    pub closed: bool,
}

#[derive(Args, Debug)]
pub struct ListOpsArgs {
    /// Largest `n` and `m` listed.
    #[arg(long, default_value_t = 3)]
    pub max: usize,
}

/// Parse `a+bi`, `a-bi`, `bi`, `a`, `i` or `-i`.
pub fn parse_complex(s: &str) -> Result<C64> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || SjError::Config(format!("cannot parse complex number '{s}' (expected a+bi)"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(C64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// `a+bi` with round-trip exact parts.
pub fn format_complex(c: C64) -> String {
    if c.im.is_sign_negative() {
        format!("{}-{}i", c.re, -c.im)
    } else {
        format!("{}+{}i", c.re, c.im)
    }
}

fn complex_matrix(v: &Value, rows: usize, cols: usize, what: &str) -> Result<Mat<C64>> {
    let bad = || SjError::Config(format!("{what} must be a {rows}x{cols} array of strings"));
    let outer = v.as_array().ok_or_else(bad)?;
    if outer.len() != rows {
        return Err(bad());
    }
    let mut out = Mat::czeros(rows, cols);
    for (i, row) in outer.iter().enumerate() {
        let row = row.as_array().ok_or_else(bad)?;
        if row.len() != cols {
            return Err(bad());
        }
        for (j, e) in row.iter().enumerate() {
            out.set(i, j, parse_complex(e.as_str().ok_or_else(bad)?)?);
        }
    }
    Ok(out)
}

/// Parse a point payload for `ℍ_n × ℂ^{(m,n)}`.
pub fn parse_point(s: &str, n: usize, m: usize) -> Result<SiegelJacobiPoint> {
    let v: Value = serde_json::from_str(s).map_err(|e| SjError::Config(format!("point is not JSON: {e}")))?;
    if let (Some(z), Some(w)) = (v.get("z"), v.get("w")) {
        if (n, m) != (1, 1) {
            return Err(SjError::Config("scalar \"z\"/\"w\" points need n = m = 1; use \"Z\" and \"W\"".into()));
        }
        let z = parse_complex(z.as_str().ok_or_else(|| SjError::Config("\"z\" must be a string".into()))?)?;
        let w = parse_complex(w.as_str().ok_or_else(|| SjError::Config("\"w\" must be a string".into()))?)?;
        return SiegelJacobiPoint::scalar(z, w);
    }
    match (v.get("Z"), v.get("W")) {
        (Some(z), Some(w)) => SiegelJacobiPoint::new(complex_matrix(z, n, n, "Z")?, complex_matrix(w, m, n, "W")?),
        _ => Err(SjError::Config("point needs \"z\" and \"w\" or \"Z\" and \"W\"".into())),
    }
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| SjError::Config(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<i32> {
    let cfg = SuiteConfig {
        suite: a.suite.clone(),
        seed: a.seed,
        tol: a.tol,
        samples: a.samples,
        trunc: a.trunc,
        parallel: !a.sequential,
        timing: a.timing,
    };
    let reports = run_suite(&cfg)?;
    write_or_print(a.out.as_deref(), &(reports_json(&reports) + "\n"))?;
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { 1 })
}

fn inputs(form: &str, n: usize, m: usize, arity: usize, trunc: i64) -> Result<(Vec<Map>, Vec<WeightIndex>)> {
    if let Some(seed) = form.strip_prefix("test:") {
        let seed: u64 = seed.parse().map_err(|_| SjError::Config(format!("bad test-function seed in '{form}'")))?;
        let maps = (0..arity)
            .map(|t| Arc::new(ExpPolyTestFunction::random(n, m, seed + t as u64, false)) as Map)
            .collect();
        return Ok((maps, default_weights(m, arity)));
    }
    if n != 1 {
        return Err(SjError::Config(format!("corpus forms live on degree one; got n = {n}")));
    }
    if arity == 1 {
        let s = corpus_form(form, trunc)?;
        let k = s.weight();
        if *k.denom() != 1 {
            return Err(SjError::Config(format!("{form} has half-integral weight")));
        }
        let e: Vec<i64> = (0..m * m).map(|t| i64::from(t % (m + 1) == 0)).collect();
        return Ok((vec![series_map(&s, m, DEFAULT_TAIL_TOL)], vec![WeightIndex::from_ints(k.numer() * m as i64, m, &e)]));
    }
    corpus_inputs(m, arity, trunc)
}

fn cmd_apply(a: &ApplyArgs) -> Result<i32> {
    let ops = covariant_operators(a.n, a.m);
    let op = ops.iter().find(|o| o.name == a.op).ok_or_else(|| {
        let names: Vec<&str> = ops.iter().map(|o| o.name.as_str()).collect();
        SjError::Config(format!("no operator '{}' on ({}, {}); available: {}", a.op, a.n, a.m, names.join(", ")))
    })?;
    let x = parse_point(&a.point, a.n, a.m)?;
    let (maps, wis) = inputs(&a.form, a.n, a.m, op.arity, a.trunc)?;
    let v = value_at(op.apply(&maps, &wis)?.as_ref(), &x)?;
    let out = op.output(&wis);
    let report = json!({
        "op": op.name,
        "form": a.form,
        "n": a.n,
        "m": a.m,
        "weight_out": out.k,
        "value": format_complex(v),
    });
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    Ok(0)
}

fn cmd_qexp(a: &QexpArgs) -> Result<i32> {
    match &a.action {
        QexpAction::Dump { form, trunc, out } => {
            let s = corpus_form(form, *trunc)?;
            write_or_print(out.as_deref(), &golden::dump(&s))?;
            Ok(0)
        }
        QexpAction::Check { path, form } => {
            let text = std::fs::read_to_string(path).map_err(|e| SjError::Config(format!("cannot read {}: {e}", path.display())))?;
            let parsed = golden::parse(&text)?;
            let name = match form {
                Some(f) => f.clone(),
                None => path.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string(),
            };
            let fresh = corpus_form(&name, parsed.trunc())?;
            let ok = golden::check(&text, &fresh);
            println!("{}", json!({ "file": path.display().to_string(), "form": name, "trunc": parsed.trunc(), "match": ok }));
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn cmd_christoffel(a: &ChristoffelArgs) -> Result<i32> {
    let x = match &a.point {
        Some(p) => parse_point(p, a.n, a.m)?,
        None => random_point(a.n, a.m, a.seed),
    };
    let p = MetricParams::new(a.a, a.b)?;
    print!("{}", christoffel_csv(&x, &p, a.closed));
    Ok(0)
}

fn cmd_list_ops(a: &ListOpsArgs) -> Result<i32> {
    if a.max == 0 {
        return Err(SjError::Config("--max must be positive".into()));
    }
    println!("{}", serde_json::to_string_pretty(&list_ops(a.max)).expect("json"));
    Ok(0)
}

/// Run a parsed command and return the exit code.
pub fn run(cli: &Cli) -> i32 {
    let r = match &cli.cmd {
        Command::Verify(a) => cmd_verify(a),
        Command::Apply(a) => cmd_apply(a),
        Command::Qexp(a) => cmd_qexp(a),
        Command::Christoffel(a) => cmd_christoffel(a),
        Command::ListOps(a) => cmd_list_ops(a),
    };
    match r {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, SjError::Config(_)) {
                2
            } else {
                1
            }
        }
    }
}

/// Suites accepted by `verify --suite`.
pub fn suites() -> &'static [&'static str] {
    &SUITES
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        for c in [C64::new(0.1, -2.5), C64::new(-3.0, 0.0), C64::new(1e-300, 7.25e10), C64::new(0.0, -0.0)] {
            assert_eq!(parse_complex(&format_complex(c)).unwrap(), c);
        }
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("0.2").unwrap(), C64::new(0.2, 0.0));
        assert_eq!(parse_complex("1e-3-2E+1i").unwrap(), C64::new(1e-3, -20.0));
        assert!(parse_complex("1+").is_err());
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn scalar_point_payload() {
        let x = parse_point(r#"{"z":"i","w":"0.2"}"#, 1, 1).unwrap();
        assert_eq!(*x.z.get(0, 0), C64::new(0.0, 1.0));
        assert!(parse_point(r#"{"z":"-i","w":"0"}"#, 1, 1).is_err());
    }
}
