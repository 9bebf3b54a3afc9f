//! Claim registry and suite runner.

use super::checks::*;
use super::report::{ClaimMeta, Tolerances, VerificationReport};
use crate::error::{Result, SjError};
use crate::metric::MetricParams;
use crate::operators::{
    a_j, covariant_operators, h1_without_shift, h_j, serre_like, serre_like_m, t_kl, u_kl, v_kl, ym_yp, CovariantOperator,
    InvariantOperator, SerreOptions, SerreVariant, SigKind, Signature,
};
use crate::parallel::map_indexed;
use std::time::Instant;

/// Suites accepted by [`run_suite`].
pub const SUITES: [&str; 9] = ["default", "quick", "metric", "covariance", "corpus", "eisenstein", "invariance", "lemmas", "empty"];

/// Suite selection and overrides.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteConfig {
    pub suite: String,
    pub seed: u64,
    /// Replaces every positive tolerance when set.
    pub tol: Option<f64>,
    /// Replaces every sample count when set.
    pub samples: Option<usize>,
    /// Truncation of the corpus expansions.
    pub trunc: i64,
    pub parallel: bool,
    /// Record wall-clock times; reports are then no longer reproducible.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { suite: "default".into(), seed: 7, tol: None, samples: None, trunc: 50, parallel: true, timing: false }
    }
}

type ClaimFn = Box<dyn Fn() -> VerificationReport + Send + Sync>;

/// A registered claim.
pub struct Claim {
    pub family: &'static str,
    pub name: String,
    run: ClaimFn,
}

impl Claim {
    fn new(family: &'static str, name: impl Into<String>, run: impl Fn() -> VerificationReport + Send + Sync + 'static) -> Self {
        Claim { family, name: name.into(), run: Box::new(run) }
    }

    pub fn run(&self) -> VerificationReport {
        (self.run)()
    }
}

struct Ctx {
    tol: Tolerances,
    seed: u64,
    trunc: i64,
    parallel: bool,
    samples: Option<usize>,
    quick: bool,
}

impl Ctx {
    fn opts(&self, default: usize) -> RunOpts {
        let samples = self.samples.unwrap_or(if self.quick { default.min(4) } else { default });
        RunOpts { samples, seed: self.seed, parallel: self.parallel }
    }
}

const CONNECTION_DIMS: [(usize, usize); 6] = [(1, 1), (1, 2), (2, 1), (2, 2), (2, 3), (3, 2)];
const COVARIANCE_DIMS: [(usize, usize); 5] = [(1, 1), (1, 2), (1, 3), (2, 2), (2, 3)];
const INVARIANCE_DIMS: [(usize, usize); 4] = [(1, 1), (1, 2), (2, 1), (2, 2)];

fn all_dims(max: usize) -> Vec<(usize, usize)> {
    (1..=max).flat_map(|n| (1..=max).map(move |m| (n, m))).collect()
}

fn metric_params() -> Vec<MetricParams> {
    [(1.0, 1.0), (1.0, 3.0), (2.0, 1.0)].iter().map(|&(a, b)| MetricParams { a, b }).collect()
}

fn metric_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let t = c.tol;
    for (n, m) in CONNECTION_DIMS {
        let o = c.opts(60);
        out.push(Claim::new("metric", format!("connection closed form ({n},{m})"), move || {
            let meta = ClaimMeta::new(format!("connection closed form ({n},{m})"), "closed-form connection vs Christoffel symbols", (n, m), o.seed, t.connection);
            check_connection(n, m, &metric_params(), meta, o)
        }));
        out.push(Claim::new("metric", format!("inverse metric ({n},{m})"), move || {
            let meta = ClaimMeta::new(format!("inverse metric ({n},{m})"), "closed-form inverse metric", (n, m), o.seed, t.lemma_inverse);
            check_lemma_inverse(n, m, &metric_params(), meta, o)
        }));
    }
    let o = c.opts(10);
    out.push(Claim::new("metric", "degree-one connection coefficients", move || {
        let meta = ClaimMeta::new("degree-one connection coefficients", "explicit D(dz), D(dw) for n = m = 1", (1, 1), o.seed, t.explicit_connection);
        check_explicit_connection(&metric_params(), meta, o)
    }));
    let o = c.opts(180);
    out.push(Claim::new("metric", "metric invariance", move || {
        let meta = ClaimMeta::new("metric invariance", "invariance of ds² under the Jacobi group", (3, 3), o.seed, t.metric_invariance);
        check_metric_invariance(&all_dims(3), &metric_params(), meta, o)
    }));
}

fn lemma_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let tol = c.tol.lemmas;
    for (kind, label) in [
        (LemmaKind::TraceGradient, "gradient of Tr(M V Y^-1 V^t)"),
        (LemmaKind::InverseAndDeterminant, "gradients of Y^-1 and det Y"),
        (LemmaKind::HessianKernel, "second W-derivatives of f h1"),
        (LemmaKind::CofactorTrace, "cofactor trace identity"),
    ] {
        let o = c.opts(50);
        out.push(Claim::new("lemmas", label, move || {
            let meta = ClaimMeta::new(label, "closed-form differentiation identity", (3, 3), o.seed, tol);
            check_lemma(kind, &all_dims(3), meta, o)
        }));
    }
}

fn covariance_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let t = c.tol;
    let trunc = c.trunc;
    for (n, m) in COVARIANCE_DIMS {
        for op in covariant_operators(n, m) {
            let name = op.name.clone();
            let wis = default_weights(m, op.arity);
            let (o, neg) = (c.opts(20), c.opts(8));
            let op2 = op.clone();
            let w2 = wis.clone();
            out.push(Claim::new("covariance", format!("{name} ({n},{m})"), move || {
                let meta = ClaimMeta::new(format!("{name} covariance ({n},{m})"), "intertwining with the slash action", (n, m), o.seed, t.covariance);
                check_covariance(&op2, &w2, &Source::Generic { holomorphic: false }, 0, meta, o)
            }));
            let name = op.name.clone();
            let op3 = op.clone();
            out.push(Claim::new("covariance", format!("{name} wrong weight ({n},{m})"), move || {
                let meta = ClaimMeta::new(format!("{name} with output weight k'+1 ({n},{m})"), "negative control: wrong output weight", (n, m), neg.seed, t.negative_control).negative();
                check_covariance(&op3, &wis, &Source::Generic { holomorphic: false }, 1, meta, neg)
            }));
            if n == 1 && !op.name.starts_with("delta") {
                let name = op.name.clone();
                let forms: Vec<(&'static str, i64)> = if op.name.starts_with("serre_c") || op.name.starts_with("serre_m_c") {
                    vec![("phi_0_1", 0)]
                } else {
                    vec![("phi_-2_1", -2), ("phi_0_1", 0)]
                };
                let o = c.opts(20);
                out.push(Claim::new("corpus", format!("{name} on corpus ({n},{m})"), move || {
                    let meta = ClaimMeta::new(format!("{name} covariance on weak Jacobi forms ({n},{m})"), "intertwining on the index-one corpus", (n, m), o.seed, t.covariance);
                    match corpus_inputs_of(&forms[..op.arity], m, trunc) {
                        Ok((maps, wis)) => check_covariance(&op, &wis, &Source::Fixed(maps), 0, meta, o),
                        Err(_) => super::report::aggregate(meta, vec![], 0),
                    }
                }));
            }
        }
    }
}

fn serre_variant_op(name: &str, shift: i64, opts: SerreOptions, variant: SerreVariant) -> CovariantOperator {
    CovariantOperator::new(name, (1, 1), 1, 2, false, SigKind::Unary(Signature::new(1, shift, 1)), move |fs, w| {
        serre_like(fs[0].clone(), &w[0], variant, &opts)
    })
}

fn serre_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let t = c.tol;
    let trunc = c.trunc;
    for m in [1usize, 2] {
        let o = c.opts(10);
        out.push(Claim::new("corpus", format!("serre (a) holomorphy m={m}"), move || {
            let meta = ClaimMeta::new(format!("serre (a) output holomorphy (1,{m})"), "holomorphic heat-Serre operator", (1, m), o.seed, t.holomorphy);
            let op = covariant_operators(1, m)
                .into_iter()
                .find(|op| op.name == if m == 1 { "serre_a" } else { "serre_m_a" })
                .expect("registered");
            match corpus_inputs(m, 1, trunc) {
                Ok((maps, wis)) => check_holomorphy(&op, &maps, &wis, meta, o),
                Err(_) => super::report::aggregate(meta, vec![], 0),
            }
        }));
    }
    for m in [1usize, 2] {
        let o = c.opts(10);
        out.push(Claim::new("corpus", format!("serre (c) annihilates phi_-2_1 m={m}"), move || {
            let meta = ClaimMeta::new(format!("serre (c) maps phi_-2_1 to zero (1,{m})"), "first-order Serre operator on the theta quotient", (1, m), o.seed, t.holomorphy);
            let name = if m == 1 { "serre_c" } else { "serre_m_c" };
            let op = covariant_operators(1, m).into_iter().find(|op| op.name == name).expect("registered");
            match corpus_inputs(m, 1, trunc) {
                Ok((maps, wis)) => check_annihilation(&op, &maps, &wis, meta, o),
                Err(_) => super::report::aggregate(meta, vec![], 0),
            }
        }));
    }
    let o = c.opts(12);
    out.push(Claim::new("covariance", "serre (c) literal coefficient", move || {
        let meta = ClaimMeta::new("serre (c) with coefficient 4Mπ", "first-order Serre operator coefficient", (1, 1), o.seed, t.negative_control).negative();
        let op = serre_variant_op("serre_c_literal", 1, SerreOptions { literal_c: true, ..Default::default() }, SerreVariant::C);
        let mut r = check_covariance(&op, &default_weights(1, 1), &Source::Generic { holomorphic: false }, 0, meta, o);
        r.note = Some(format!(
            "determination: the coefficient 4Mπ is rejected (max residual {:.3e}); the registered serre_c uses 4πiM",
            r.max_residual
        ));
        r
    }));
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (0.5, 0.5), (2.0, -1.0), (1.0, 1.0), (0.0, 0.0)] {
        let o = c.opts(12);
        let holds = a + b == 1.0;
        out.push(Claim::new("covariance", format!("serre (d) a={a} b={b}"), move || {
            let tol = if holds { t.covariance } else { t.negative_control };
            let mut meta = ClaimMeta::new(format!("serre (d) with a={a}, b={b}"), "second Serre operator weights a G2 + b G2hat", (1, 1), o.seed, tol);
            if !holds {
                meta = meta.negative();
            }
            let opts = SerreOptions { a, b, free_ab: true, ..Default::default() };
            let op = serre_variant_op("serre_d", 2, opts, SerreVariant::D);
            let mut r = check_covariance(&op, &default_weights(1, 1), &Source::Generic { holomorphic: false }, 0, meta, o);
            r.note = Some(format!(
                "determination: a + b = {} {}; covariance requires a + b = 1 (max residual {:.3e})",
                a + b,
                if holds { "satisfies the constraint" } else { "violates the constraint" },
                r.max_residual
            ));
            r
        }));
    }
    for m in [2usize, 3] {
        let o = c.opts(12);
        out.push(Claim::new("covariance", format!("serre_m (c) literal m={m}"), move || {
            let meta = ClaimMeta::new(format!("serre_m (c) with the unmodified coefficient (1,{m})"), "first-order Serre operator coefficient, m > 1", (1, m), o.seed, t.negative_control).negative();
            let op = CovariantOperator::new("serre_m_c_literal", (1, m), 1, 1, false, SigKind::Unary(Signature::new(1, 1, 1)), |fs, w| {
                serre_like_m(fs[0].clone(), &w[0], SerreVariant::C, 1, true)
            });
            check_covariance(&op, &default_weights(m, 1), &Source::Generic { holomorphic: false }, 0, meta, o)
        }));
    }
}

fn corpus_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let t = c.tol;
    let trunc = c.trunc;
    for (name, k) in [("phi_-2_1", -2i64), ("phi_0_1", 0)] {
        let o = c.opts(50);
        out.push(Claim::new("corpus", format!("{name} slash invariance"), move || {
            let meta = ClaimMeta::new(format!("{name} invariance under S, T and lattice translations"), "weak Jacobi form transformation law", (1, 1), o.seed, t.corpus_slash);
            check_corpus_slash(name, k, trunc, meta, o)
        }));
        let seed = c.seed;
        out.push(Claim::new("corpus", format!("{name} heat correspondence"), move || {
            let meta = ClaimMeta::new(format!("{name} heat operator commutes with the theta correspondence"), "heat operator as coefficient multiplication", (1, 1), seed, t.exact);
            check_heat_exact(name, 20, meta)
        }));
        out.push(Claim::new("corpus", format!("{name} serre compatibility"), move || {
            let meta = ClaimMeta::new(format!("{name} modified heat operator matches the Serre derivative"), "Serre derivative compatibility with the correspondence", (1, 1), seed, t.exact);
            check_serre_compat(name, k, 30, meta)
        }));
    }
}

fn eisenstein_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let tol = c.tol.eisenstein;
    for (law, label) in [
        (EisensteinLaw::G2Anomaly, "G2 anomaly under S"),
        (EisensteinLaw::G2Completion, "G2 - pi/y weight-two invariance"),
        (EisensteinLaw::G1Hat, "G1hat transformation laws"),
        (EisensteinLaw::G2Hat, "G2hat transformation laws"),
        (EisensteinLaw::E1HatCompletion, "E1hat - v/y weight-one index-zero invariance"),
    ] {
        let o = c.opts(6);
        out.push(Claim::new("eisenstein", label, move || {
            let meta = ClaimMeta::new(label, "twisted Eisenstein series transformation law", (1, 1), o.seed, tol);
            check_eisenstein(law, 400, meta, o)
        }));
    }
}

fn invariance_claims(c: &Ctx, out: &mut Vec<Claim>) {
    let tol = c.tol.invariance;
    let mut ops: Vec<(InvariantOperator, &'static str)> = Vec::new();
    for (n, m) in INVARIANCE_DIMS {
        for j in 1..=2 {
            if let Ok(op) = h_j(j, n, m) {
                ops.push((op, "trace of the Maass-type matrix"));
            }
        }
        if let Ok(op) = a_j(1, n, m) {
            ops.push((op, "Maass-type matrix transformation law"));
        }
    }
    for (n, m) in [(1usize, 2usize), (2, 2)] {
        for k in 1..=m {
            for l in 1..=m {
                for op in [t_kl(1, k, l, n, m), u_kl(k, l, n, m), v_kl(k, l, n, m), ym_yp(k, l, n, m)].into_iter().flatten() {
                    ops.push((op, "scalar invariant operator"));
                }
            }
        }
    }
    for (op, anchor) in ops {
        let o = c.opts(20);
        let (n, m) = (op.n, op.m);
        let label = format!("{} invariance ({n},{m})", op.name);
        out.push(Claim::new("invariance", label.clone(), move || check_invariance(&op, ClaimMeta::new(label.clone(), anchor, (n, m), o.seed, tol), o)));
    }
    let neg = c.tol.negative_control;
    for (n, m) in [(1usize, 1usize), (2, 2)] {
        let o = c.opts(8);
        out.push(Claim::new("invariance", format!("H1 without shift ({n},{m})"), move || {
            let meta = ClaimMeta::new(format!("Tr(ΛK) without the shift term ({n},{m})"), "negative control: dropped term", (n, m), o.seed, neg).negative();
            check_invariance(&h1_without_shift(n, m), meta, o)
        }));
    }
}

/// Claims of a named suite.
pub fn suite_claims(cfg: &SuiteConfig) -> Result<Vec<Claim>> {
    if !SUITES.contains(&cfg.suite.as_str()) {
        return Err(SjError::Config(format!("unknown suite '{}' (expected one of {})", cfg.suite, SUITES.join(", "))));
    }
    if cfg.trunc < 1 {
        return Err(SjError::Config(format!("trunc must be positive, got {}", cfg.trunc)));
    }
    if cfg.samples == Some(0) {
        return Err(SjError::Config("samples must be positive".into()));
    }
    let tol = match cfg.tol {
        Some(t) => Tolerances::uniform(t)?,
        None => Tolerances::registry(),
    };
    let c = Ctx { tol, seed: cfg.seed, trunc: cfg.trunc, parallel: cfg.parallel, samples: cfg.samples, quick: cfg.suite == "quick" };
    let mut out = Vec::new();
    let want = |f: &str| matches!(cfg.suite.as_str(), "default" | "quick") || cfg.suite == f;
    if want("metric") {
        metric_claims(&c, &mut out);
    }
    if want("lemmas") {
        lemma_claims(&c, &mut out);
    }
    if want("covariance") || want("corpus") {
        let mut v = Vec::new();
        covariance_claims(&c, &mut v);
        serre_claims(&c, &mut v);
        out.extend(v.into_iter().filter(|cl| want(cl.family)));
    }
    if want("corpus") {
        corpus_claims(&c, &mut out);
    }
    if want("eisenstein") {
        eisenstein_claims(&c, &mut out);
    }
    if want("invariance") {
        invariance_claims(&c, &mut out);
    }
    Ok(out)
}

/// Run every claim of the configured suite, claims concurrently.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<VerificationReport>> {
    crate::parallel::init_threads();
    let claims = suite_claims(cfg)?;
    Ok(map_indexed(claims.len(), cfg.parallel, |i| {
        let start = Instant::now();
        let mut r = claims[i].run();
        if cfg.timing {
            r.elapsed_ms = start.elapsed().as_millis() as u64;
        }
        r
    }))
}
