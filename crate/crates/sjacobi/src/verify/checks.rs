//! Individual claim checks. Each returns one [`VerificationReport`].

use super::covariance::{intertwining_pair, relative_residual};
use super::report::{aggregate, ClaimMeta, Measured, Offender, VerificationReport};
use super::sampling::{sample, test_functions};
use crate::calculus::fd::fd_oracle;
use crate::calculus::lemmas::{
    cofactor_trace_identity_check, grad_det_y_z, grad_r_z, grad_trace_mvrv_w, grad_trace_mvrv_z, hessian_w_kernel, zfactor,
};
use crate::calculus::ExpPolyTestFunction;
use crate::error::Result;
use crate::matrix::{Mat, Scalar};
use crate::metric::{christoffel_numeric, connection_closed, metric_blocks, metric_inverse_closed, metric_invariance_residual, MetricParams};
use crate::operators::{law_residual, CovariantOperator, InvariantOperator};
use crate::parallel::map_indexed;
use crate::qseries::{
    converged_hat_value, corpus_form, eisenstein_g_value, heat_ez_discrepancy, serre_compat_check, series_map, DEFAULT_TAIL_TOL,
};
use crate::space::{
    jet_at, jet_fn, slash_with, value_at, Dir, JacobiGroupElement, Map, SiegelJacobiPoint, TranslationLaw, WeightIndex, C64,
};
use num_traits::{Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Residuals below this magnitude of the reference value are treated as degenerate.
pub const VALUE_FLOOR: f64 = 1e-280;

/// Sample count, seed and parallelism for one claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RunOpts {
    pub samples: usize,
    pub seed: u64,
    pub parallel: bool,
}

fn rel(a: C64, b: C64) -> f64 {
    (a - b).norm() / (1.0 + b.norm())
}

/// Evaluate `f` on sample indices until `want` succeed, trying at most `4 want`
/// indices. Returns the successes in index order and the number of rejects.
pub fn collect_samples<F>(want: usize, parallel: bool, f: F) -> (Vec<Measured>, usize)
where
    F: Fn(usize) -> Option<Measured> + Sync + Send,
{
    let limit = 4 * want.max(1);
    let (mut out, mut next) = (Vec::new(), 0);
    while out.len() < want && next < limit {
        let batch = (want - out.len()).min(limit - next);
        let base = next;
        out.extend(map_indexed(batch, parallel, |i| f(base + i)).into_iter().flatten());
        next += batch;
    }
    let rejects = next - out.len();
    (out, rejects)
}

fn run(meta: ClaimMeta, opts: RunOpts, f: impl Fn(usize) -> Option<Measured> + Sync + Send) -> VerificationReport {
    let (m, rejects) = collect_samples(opts.samples, opts.parallel, f);
    aggregate(meta, m, rejects)
}

fn offender(index: usize, x: &SiegelJacobiPoint, g: Option<&JacobiGroupElement>) -> Option<Offender> {
    Some(Offender { index, point: x.to_json(), group: g.map(|g| g.to_json()) })
}

fn scalar_point(z: C64, w: C64) -> Option<SiegelJacobiPoint> {
    SiegelJacobiPoint::scalar(z, w).ok()
}

/// Where covariance test functions come from.
#[derive(Clone)]
pub enum Source {
    /// Fresh exponential-polynomial functions per sample.
    Generic { holomorphic: bool },
    /// The same maps for every sample.
    Fixed(Vec<Map>),
}

/// Input weights used with generic test functions: `(3, M)` and `(2, I)`.
pub fn default_weights(m: usize, arity: usize) -> Vec<WeightIndex> {
    let first = match m {
        1 => WeightIndex::from_ints(3, 1, &[1]),
        2 => WeightIndex::from_ints(3, 2, &[2, 1, 1, 2]),
        _ => {
            let e: Vec<i64> = (0..m * m).map(|t| if t % (m + 1) == 0 { 2 } else if (t / m).abs_diff(t % m) == 1 { 1 } else { 0 }).collect();
            WeightIndex::from_ints(3, m, &e)
        }
    };
    let e: Vec<i64> = (0..m * m).map(|t| i64::from(t % (m + 1) == 0)).collect();
    let second = WeightIndex::from_ints(2, m, &e);
    [first, second].into_iter().take(arity).collect()
}

/// Corpus inputs on `ℍ × ℂ^m`: `Π φ(z, w_i)` for each named form, index `I_m`.
pub fn corpus_inputs_of(forms: &[(&str, i64)], m: usize, trunc: i64) -> Result<(Vec<Map>, Vec<WeightIndex>)> {
    let e: Vec<i64> = (0..m * m).map(|t| i64::from(t % (m + 1) == 0)).collect();
    let mut maps = Vec::new();
    let mut wis = Vec::new();
    for &(name, k) in forms {
        maps.push(series_map(&corpus_form(name, trunc)?, m, DEFAULT_TAIL_TOL));
        wis.push(WeightIndex::from_ints(k * m as i64, m, &e));
    }
    Ok((maps, wis))
}

/// `φ₋₂,₁` (and `φ₀,₁` as second operand) as corpus inputs.
pub fn corpus_inputs(m: usize, arity: usize, trunc: i64) -> Result<(Vec<Map>, Vec<WeightIndex>)> {
    let forms = [("phi_-2_1", -2), ("phi_0_1", 0)];
    corpus_inputs_of(&forms[..arity.min(2)], m, trunc)
}

/// `|Op(f)(x)| / (1 + |f(x)|)` at sampled points.
pub fn check_annihilation(op: &CovariantOperator, fs: &[Map], wis: &[WeightIndex], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    let Ok(out) = op.apply(fs, wis) else {
        return aggregate(meta, vec![], 0);
    };
    run(meta, opts, |i| {
        let s = sample(op.n, op.m, opts.seed, i);
        let v = value_at(out.as_ref(), &s.x).ok()?;
        let f = value_at(fs[0].as_ref(), &s.x).ok()?;
        Some(Measured { index: i, residual: v.norm() / (1.0 + f.norm()), offender: offender(i, &s.x, None) })
    })
}

/// `Op(f|g)(x)` against `((Op f)|g)(x)` with the output weight shifted by `k_shift`.
pub fn check_covariance(
    op: &CovariantOperator,
    wis: &[WeightIndex],
    source: &Source,
    k_shift: i64,
    meta: ClaimMeta,
    opts: RunOpts,
) -> VerificationReport {
    let (n, m) = (op.n, op.m);
    let mut out = op.output(wis);
    out.k += k_shift;
    run(meta, opts, |i| {
        let s = sample(n, m, opts.seed, i);
        let fs = match source {
            Source::Generic { holomorphic } => test_functions(n, m, s.seed, op.arity, *holomorphic),
            Source::Fixed(v) => v.clone(),
        };
        let (a, b) = intertwining_pair(op, &fs, wis, &out, &s.g, &s.x).ok()?;
        let r = relative_residual(a, b, VALUE_FLOOR)?;
        Some(Measured { index: i, residual: r, offender: offender(i, &s.x, Some(&s.g)) })
    })
}

/// `Inv(f∘g)(x)` against `(Inv f)(g x)` under the operator's transformation law.
pub fn check_invariance(op: &InvariantOperator, meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    let (n, m) = (op.n, op.m);
    run(meta, opts, |i| {
        let s = sample(n, m, opts.seed, i);
        let f = test_functions(n, m, s.seed, 1, false).remove(0);
        let r = law_residual(op, &f, &s.g, &s.x).ok()?;
        r.is_finite().then(|| Measured { index: i, residual: r, offender: offender(i, &s.x, Some(&s.g)) })
    })
}

/// Closed-form connection against Christoffel symbols of the metric, cycling
/// through `params` across samples.
pub fn check_connection(n: usize, m: usize, params: &[MetricParams], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let x = sample(n, m, opts.seed, i).x;
        let p = &params[i % params.len()];
        let d = connection_closed(&x, p).max_diff(&christoffel_numeric(&x, p));
        Some(Measured { index: i, residual: d, offender: offender(i, &x, None) })
    })
}

/// Closed-form inverse metric times the metric, against the identity.
pub fn check_lemma_inverse(n: usize, m: usize, params: &[MetricParams], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let x = sample(n, m, opts.seed, i).x;
        let p = &params[i % params.len()];
        let g = metric_blocks(&x, p).full();
        let e = g.matmul(&metric_inverse_closed(&x, p).full()).sub(&Mat::ridentity(g.rows)).max_abs();
        Some(Measured { index: i, residual: e, offender: offender(i, &x, None) })
    })
}

/// Degree-one connection coefficients against the explicit formulas
/// `Γ^z_zz = i/y + iBv²/(2Ay²)`, `Γ^w_zz = iBv³/(2Ay³)`, `Γ^w_zw = -iBv²/(2Ay²) + i/(2y)`,
/// `Γ^z_ww = iB/(2A)`, `Γ^z_zw = -iBv/(2Ay)`, `Γ^w_ww = iBv/(2Ay)`.
pub fn check_explicit_connection(params: &[MetricParams], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let x = sample(1, 1, opts.seed, i).x;
        let p = &params[i % params.len()];
        let (a, b) = (p.a, p.b);
        let (y, v) = (x.y.get(0, 0).to_owned(), x.v.get(0, 0).to_owned());
        let cd = connection_closed(&x, p);
        let l = x.layout();
        let (z, w) = (l.z_var(0, 0), l.w_var(0, 0));
        let want = [
            ((z, z, z), I / y + I * b * v * v / (2.0 * a * y * y)),
            ((w, z, z), I * b * v.powi(3) / (2.0 * a * y.powi(3))),
            ((w, z, w), -I * b * v * v / (2.0 * a * y * y) + I / (2.0 * y)),
            ((z, w, w), I * b / (2.0 * a)),
            ((z, z, w), -I * b * v / (2.0 * a * y)),
            ((w, w, w), I * b * v / (2.0 * a * y)),
        ];
        let r = want.iter().map(|&((k, p1, p2), e)| rel(cd.get(k, p1, p2), e)).fold(0.0, f64::max);
        Some(Measured { index: i, residual: r, offender: offender(i, &x, None) })
    })
}

/// Pullback of the metric through random group elements, cycling through `dims`.
pub fn check_metric_invariance(dims: &[(usize, usize)], params: &[MetricParams], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let (n, m) = dims[i % dims.len()];
        let s = sample(n, m, opts.seed, i);
        let p = &params[i % params.len()];
        let r = metric_invariance_residual(&s.x, &s.g, p, s.seed).ok()?;
        Some(Measured { index: i, residual: r, offender: offender(i, &s.x, Some(&s.g)) })
    })
}

/// The four closed-form differentiation identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LemmaKind {
    /// Gradients of `Tr(M V Y^{-1} V^t)` in `W` and `Z`.
    TraceGradient,
    /// `∂Y^{-1}/∂Z` and `∂ det Y/∂Z`.
    InverseAndDeterminant,
    /// Second `W`-derivatives of `f h₁` over `h₁`.
    HessianKernel,
    /// `Tr(Σ M*_ij ∂²f/∂W_i∂W_j S) = |M| Tr(∂/∂W M^{-1} (∂f/∂W)^t S)`.
    CofactorTrace,
}

fn trace_mvrv(n: usize, m: usize, mm: Mat<f64>) -> Map {
    jet_fn(n, m, false, move |c| {
        let (y, v) = (c.y(), c.v());
        let one = y.get(0, 0).one_like();
        let mj = mm.map(|&a| one.scale_c(C64::new(a, 0.0)));
        Ok(mj.matmul(&v).matmul(&y.inverse()).matmul(&v.transpose()).trace())
    })
}

fn lemma_residual(kind: LemmaKind, x: &SiegelJacobiPoint, wi: &WeightIndex, seed: u64) -> Result<f64> {
    let (n, m) = (x.n, x.m);
    let l = x.layout();
    let mm = wi.index_f64();
    let mut worst = 0.0f64;
    match kind {
        LemmaKind::TraceGradient => {
            let f = trace_mvrv(n, m, mm.clone());
            let (gw, gz) = (grad_trace_mvrv_w(x, &mm), grad_trace_mvrv_z(x, &mm));
            for r in 0..m {
                for s in 0..n {
                    let fd = fd_oracle(f.as_ref(), x, &[Dir::W(r, s)], 1)?.value;
                    worst = worst.max(rel(*gw.get(s, r), fd));
                }
            }
            for (i, j) in l.omega() {
                let fd = fd_oracle(f.as_ref(), x, &[Dir::Z(i, j)], 1)?.value * zfactor(i, j);
                worst = worst.max(rel(*gz.get(i, j), fd));
            }
        }
        LemmaKind::InverseAndDeterminant => {
            let det_y = jet_fn(n, m, false, |c| Ok(c.y().det()));
            let (t, gd) = (grad_r_z(x), grad_det_y_z(x));
            for (k, q) in l.omega() {
                let fd = fd_oracle(det_y.as_ref(), x, &[Dir::Z(k, q)], 1)?.value * zfactor(k, q);
                worst = worst.max(rel(*gd.get(k, q), fd));
                for s in 0..n {
                    for u in s..n {
                        let rsu = jet_fn(n, m, false, move |c| Ok(c.y().inverse().get(s, u).clone()));
                        let fd = fd_oracle(rsu.as_ref(), x, &[Dir::Z(k, q)], 1)?.value;
                        worst = worst.max(rel(t.get(s, u, k, q), fd));
                    }
                }
            }
        }
        LemmaKind::HessianKernel => {
            let f: Map = Arc::new(ExpPolyTestFunction::random(n, m, seed, true));
            let h = trace_mvrv(n, m, mm.clone());
            let fh = {
                let (f, h) = (f.clone(), h.clone());
                jet_fn(n, m, false, move |c| Ok(f.eval(c)?.mul_jet(&h.eval(c)?.scale_c(C64::new(-4.0 * PI, 0.0)).exp_jet())))
            };
            let h1 = value_at(h.as_ref(), x)?.scale(-4.0 * PI).exp();
            let jet = jet_at(fh.as_ref(), x, 2)?;
            for i in 0..m {
                for j in 0..m {
                    let k = hessian_w_kernel(f.as_ref(), x, wi, i, j)?;
                    for a in 0..n {
                        for b in 0..n {
                            let exact = jet.partial(&[l.w_var(j, a), l.w_var(i, b)]) / h1;
                            worst = worst.max(rel(*k.get(a, b), exact));
                        }
                    }
                }
            }
            let fd = fd_oracle(fh.as_ref(), x, &[Dir::W(0, 0), Dir::W(0, 0)], 2)?.value / h1;
            worst = worst.max(rel(*hessian_w_kernel(f.as_ref(), x, wi, 0, 0)?.get(0, 0), fd));
        }
        LemmaKind::CofactorTrace => {
            let f = ExpPolyTestFunction::random(n, m, seed, true);
            let scale = 1.0 + jet_at(&f, x, 2)?.max_abs();
            worst = cofactor_trace_identity_check(&f, x, wi, seed)? / scale;
        }
    }
    Ok(worst)
}

/// One differentiation identity at sampled points, cycling through `dims`.
pub fn check_lemma(kind: LemmaKind, dims: &[(usize, usize)], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let (n, m) = dims[i % dims.len()];
        let wi = default_weights(m, 1).remove(0);
        let s = sample(n, m, opts.seed, i);
        let r = lemma_residual(kind, &s.x, &wi, s.seed).ok()?;
        Some(Measured { index: i, residual: r, offender: offender(i, &s.x, None) })
    })
}

/// Points with `Im z ∈ [0.8, 2]`, `|Re z| ≤ 0.5` and `|w| ≤ 0.4`.
pub fn corpus_box_point(seed: u64, index: usize) -> (C64, C64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let z = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..2.0));
    let w = C64::from_polar(rng.gen_range(0.0..0.4), rng.gen_range(0.0..2.0 * PI));
    (z, w)
}

/// The generators `S`, `T` and unit lattice translations of the degree-one Jacobi group.
pub fn degree_one_generators() -> Vec<JacobiGroupElement> {
    vec![
        JacobiGroupElement::sl2(0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0),
        JacobiGroupElement::sl2(1.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0),
        JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0),
        JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, 0.0, 1.0, 0.0),
        JacobiGroupElement::sl2(1.0, 0.0, 0.0, 1.0, -1.0, 1.0, 0.0),
    ]
}

/// `f|g - f` for a corpus form over the degree-one generators.
pub fn check_corpus_slash(name: &str, k: i64, trunc: i64, meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    let Ok(s) = corpus_form(name, trunc) else {
        return aggregate(meta, vec![], 0);
    };
    let f = series_map(&s, 1, DEFAULT_TAIL_TOL);
    let wi = WeightIndex::scalar_int(k, 1);
    let gens = degree_one_generators();
    run(meta, opts, |i| {
        let (z, w) = corpus_box_point(opts.seed, i / gens.len());
        let g = &gens[i % gens.len()];
        let x = scalar_point(z, w)?;
        let h = slash_with(f.clone(), g, &wi, TranslationLaw::Composite);
        let a = value_at(h.as_ref(), &x).ok()?;
        let b = value_at(f.as_ref(), &x).ok()?;
        Some(Measured { index: i, residual: (a - b).norm() / b.norm().max(1.0), offender: offender(i, &x, Some(g)) })
    })
}

fn big_to_f64(r: &num_rational::BigRational) -> f64 {
    r.abs().to_f64().unwrap_or(f64::INFINITY)
}

/// Exact heat/correspondence commutation through `q^trunc`.
pub fn check_heat_exact(name: &str, trunc: i64, meta: ClaimMeta) -> VerificationReport {
    let r = corpus_form(name, trunc).and_then(|s| heat_ez_discrepancy(&s)).map(|d| big_to_f64(&d));
    aggregate(meta, r.into_iter().map(|r| Measured::bare(0, r)).collect(), 0)
}

/// Exact Serre compatibility through `q^trunc`; the note records the discrepancy
/// obtained with `G₂(τ)` in place of `4G₂(4τ)`.
pub fn check_serre_compat(name: &str, k: i64, trunc: i64, meta: ClaimMeta) -> VerificationReport {
    match corpus_form(name, trunc).and_then(|s| serre_compat_check(&s, k, trunc)) {
        Ok(c) => {
            let v: num_rational::BigRational = c.transported.parse().unwrap_or_else(|_| num_rational::BigRational::from_integer(1.into()));
            let mut r = aggregate(meta, vec![Measured::bare(0, big_to_f64(&v))], 0);
            r.note = Some(format!(
                "through q^{}: discrepancy {} with the modular-side G2 read as 4 G2(4 tau); {} with G2(tau)",
                c.through, c.transported, c.literal
            ));
            r
        }
        Err(e) => {
            let mut r = aggregate(meta, vec![], 0);
            r.note = Some(e.to_string());
            r
        }
    }
}

/// Which Eisenstein transformation law to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EisensteinLaw {
    /// `G₂(-1/z) - z²G₂(z) + 2πiz`.
    G2Anomaly,
    /// `G₂ - π/y` under `S`.
    G2Completion,
    /// `Ĝ₁(γz, w/(cz+d)) - (cz+d)Ĝ₁ - 2πicw` and `Ĝ₁(z, w+λz+μ) - Ĝ₁ + 2πiλ`.
    G1Hat,
    /// `Ĝ₂(γz, w/(cz+d)) - (cz+d)²Ĝ₂ + 2πic(cz+d)` and lattice invariance.
    G2Hat,
    /// `Ê₁ - v/y` as weight 1, index 0.
    E1HatCompletion,
}

const MODULAR: [(f64, f64, f64, f64); 3] = [(0.0, -1.0, 1.0, 0.0), (1.0, 1.0, 0.0, 1.0), (2.0, 1.0, 1.0, 1.0)];
const LATTICE: [(f64, f64); 3] = [(1.0, 0.0), (0.0, 1.0), (-1.0, 2.0)];

fn eisenstein_residual(law: EisensteinLaw, z: C64, w: C64, bound: usize) -> Result<f64> {
    let hat = |n: usize, z: C64, w: C64| converged_hat_value(n, z, w, 1e-13, bound, 1 << 16).map(|v| v.0);
    let mut worst = 0.0f64;
    match law {
        EisensteinLaw::G2Anomaly => {
            let g = eisenstein_g_value(2, z, 2 * bound)?;
            let gs = eisenstein_g_value(2, -z.inv(), 2 * bound)?;
            worst = (gs - z * z * g + 2.0 * PI * I * z).norm();
        }
        EisensteinLaw::G2Completion => {
            let s = -z.inv();
            let a = eisenstein_g_value(2, s, 2 * bound)? - PI / s.im;
            let b = eisenstein_g_value(2, z, 2 * bound)? - PI / z.im;
            worst = (a - z * z * b).norm();
        }
        EisensteinLaw::G1Hat | EisensteinLaw::G2Hat => {
            let n = if law == EisensteinLaw::G1Hat { 1 } else { 2 };
            let base = hat(n, z, w)?;
            for (a, b, c, d) in MODULAR {
                let j = z * c + d;
                let v = hat(n, (z * a + b) / j, w / j)?;
                let want = if n == 1 { j * base + 2.0 * PI * I * c * w } else { j * j * base - 2.0 * PI * I * c * j };
                worst = worst.max((v - want).norm());
            }
            for (l, m) in LATTICE {
                let v = hat(n, z, w + z * l + m)?;
                let want = if n == 1 { base - 2.0 * PI * I * l } else { base };
                worst = worst.max((v - want).norm());
            }
        }
        EisensteinLaw::E1HatCompletion => {
            let comp = |z: C64, w: C64| hat(1, z, w).map(|v| v * I / (2.0 * PI) - w.im / z.im);
            let base = comp(z, w)?;
            for (a, b, c, d) in MODULAR {
                let j = z * c + d;
                worst = worst.max((comp((z * a + b) / j, w / j)? - j * base).norm());
            }
            for (l, m) in LATTICE {
                worst = worst.max((comp(z, w + z * l + m)? - base).norm());
            }
        }
    }
    Ok(worst)
}

/// Eisenstein transformation law at sampled points, outer bound at least `bound`.
pub fn check_eisenstein(law: EisensteinLaw, bound: usize, meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    run(meta, opts, |i| {
        let (z, w) = corpus_box_point(opts.seed, i);
        let r = eisenstein_residual(law, z, w, bound).ok()?;
        Some(Measured { index: i, residual: r, offender: offender(i, &scalar_point(z, w)?, None) })
    })
}

/// Largest `∂/∂Z̄`, `∂/∂W̄` partial of `op(f)` relative to `1 + |jet|`.
pub fn check_holomorphy(op: &CovariantOperator, fs: &[Map], wis: &[WeightIndex], meta: ClaimMeta, opts: RunOpts) -> VerificationReport {
    let Ok(out) = op.apply(fs, wis) else {
        return aggregate(meta, vec![], 0);
    };
    let m = op.m;
    run(meta, opts, |i| {
        let (z, _) = corpus_box_point(opts.seed, i);
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(i as u64));
        let w = Mat::from_fn(m, 1, |_, _| C64::from_polar(rng.gen_range(0.05..0.4), rng.gen_range(0.0..2.0 * PI)));
        let x = SiegelJacobiPoint::new(Mat::from_vec(1, 1, vec![z]), w).ok()?;
        let l = x.layout();
        let j = jet_at(out.as_ref(), &x, 1).ok()?;
        let mut bar = vec![l.zb_var(0, 0)];
        bar.extend((0..m).map(|r| l.wb_var(r, 0)));
        let r = bar.iter().map(|&v| j.partial(&[v]).norm()).fold(0.0, f64::max) / (1.0 + j.max_abs());
        Some(Measured { index: i, residual: r, offender: offender(i, &x, None) })
    })
}
