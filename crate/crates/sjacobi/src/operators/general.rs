//! Determinant operators on `ℍ_n × ℂ^{(m,n)}` and the two brackets.

use super::{check_rows, cr, require_index, select_det, Env, OpMap, I};
use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::space::{Map, WeightIndex};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Shape of the second-order determinant operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetOptions {
    /// Use `½(X + X^t)` for the `V Y^{-1}` cross terms; otherwise `X` alone.
    pub symmetrized: bool,
    /// For `delta2_det`: use `Y (∂/∂Z̄ + ½(∂/∂W̄ V Y^{-1} + Y^{-1} V^t ∂/∂W̄^t)) Y`
    /// instead of `∂/∂Z̄ Y² + ½(∂/∂W̄ V Y + Y V^t ∂/∂W̄^t)`.
    pub sandwich: bool,
}

impl Default for DetOptions {
    fn default() -> Self {
        DetOptions { symmetrized: true, sandwich: true }
    }
}

/// `Y^{-1} V^t M` as jets.
fn rvm(env: &Env, wi: &WeightIndex) -> Mat<Jet> {
    env.r.matmul(&env.v.transpose()).matmul(&env.index(wi))
}

/// `Σ_{a,b} A_ab ∂²F/∂w_ak ∂w_bl` as an `n x n` matrix.
fn w_hessian(env: &Env, f: &Jet, a: &Mat<f64>) -> Mat<Jet> {
    let l = &env.l;
    let (n, m) = (l.n, l.m);
    let first: Vec<Vec<Jet>> = (0..m).map(|r| (0..n).map(|s| f.deriv(l.w_var(r, s))).collect()).collect();
    Mat::from_fn(n, n, |k, q| {
        let mut acc = env.cst(cr(0.0));
        for (r, row) in first.iter().enumerate() {
            for b in 0..m {
                let c = *a.get(r, b);
                if c != 0.0 {
                    acc = acc.add_jet(&row[k].deriv(l.w_var(b, q)).scale_c(cr(c)));
                }
            }
        }
        acc
    })
}

fn inverse_index(wi: &WeightIndex) -> Result<Mat<f64>> {
    let det = wi.det_index();
    let d = *det.numer() as f64 / *det.denom() as f64;
    if *det.numer() == 0 {
        return Err(SjError::SingularIndex(d.abs()));
    }
    Ok(wi.index_f64().inverse())
}

/// `∂F/∂W + 4πi Y^{-1} V^t M F`.
pub fn theta_matrix(env: &Env, f: &Jet, wi: &WeightIndex) -> Mat<Jet> {
    env.grad_w(f).add(&rvm(env, wi).mul_scalar(f).scale(I * 4.0 * PI))
}

/// Determinant of `n` chosen `W`-rows of `∂f/∂W + 4πi Y^{-1} V^t M f`.
/// Weight `nk+1`, index `nM`. `rows` is required when `m > n`.
pub fn d1_det(f: Map, wi: &WeightIndex, rows: Option<&[usize]>) -> Result<Map> {
    require_index(&f, wi)?;
    let (n, m) = f.dims();
    let rows = check_rows(n, m, rows)?;
    let wi = wi.clone();
    OpMap::build("D1_det", vec![f], 1, false, move |j, env| Ok(select_det(&theta_matrix(env, &j[0], &wi), &rows)))
}

/// `det((∂f/∂W̄)_rows Y)`. Weight `nk-1`, index `nM`.
pub fn delta1_det(f: Map, wi: &WeightIndex, rows: Option<&[usize]>) -> Result<Map> {
    require_index(&f, wi)?;
    let (n, m) = f.dims();
    let rows = check_rows(n, m, rows)?;
    OpMap::build("delta1_det", vec![f], 1, false, move |j, env| {
        let idx: Vec<usize> = rows.iter().map(|r| r - 1).collect();
        let g = env.grad_wb(&j[0]).select_cols(&idx);
        Ok(g.matmul(&env.y).det())
    })
}

/// Matrix of the higher heat operator before the determinant.
pub fn heat_matrix(env: &Env, f: &Jet, k: i64, minv: &Mat<f64>) -> Mat<Jet> {
    let m = env.l.m as f64;
    let c = 2.0 * m * PI - 4.0 * PI * k as f64;
    env.grad_z(f)
        .scale(-I * 8.0 * PI)
        .add(&w_hessian(env, f, minv))
        .add(&env.r.mul_scalar(f).scale(cr(c)))
}

/// `det(-8πi ∂f/∂Z + ∂/∂W M^{-1} (∂f/∂W)^t - 4πk f Y^{-1} + 2mπ f Y^{-1})`.
/// Weight `nk+2`, index `nM`.
pub fn heat_det(f: Map, wi: &WeightIndex) -> Result<Map> {
    require_index(&f, wi)?;
    let minv = inverse_index(wi)?;
    let k = wi.k;
    OpMap::build("heat_det", vec![f], 2, false, move |j, env| Ok(heat_matrix(env, &j[0], k, &minv).det()))
}

fn cross(x: Mat<Jet>, symmetrized: bool) -> Mat<Jet> {
    if symmetrized {
        x.add(&x.transpose()).scale(cr(0.5))
    } else {
        x
    }
}

/// Matrix of `D2_det` before the determinant.
pub fn d2_matrix(env: &Env, f: &Jet, wi: &WeightIndex, opts: &DetOptions) -> Mat<Jet> {
    let k = wi.k as f64;
    let r = &env.r;
    let quad = r.matmul(&env.v.transpose()).matmul(&env.index(wi)).matmul(&env.v).matmul(r);
    let x = env.grad_w(f).matmul(&env.v).matmul(r);
    env.grad_z(f)
        .add(&r.mul_scalar(f).scale(-I * k / 2.0))
        .add(&quad.mul_scalar(f).scale(I * 2.0 * PI))
        .add(&cross(x, opts.symmetrized))
}

/// `det(∂f/∂Z - (ik/2) f Y^{-1} + 2πi Y^{-1}V^tMVY^{-1} f + ½(∂f/∂W V Y^{-1} + Y^{-1} V^t ∂f/∂W^t))`.
/// Weight `nk+2`, index `nM`.
pub fn d2_det(f: Map, wi: &WeightIndex, opts: &DetOptions) -> Result<Map> {
    require_index(&f, wi)?;
    let (wi, o) = (wi.clone(), *opts);
    OpMap::build("D2_det", vec![f], 1, false, move |j, env| Ok(d2_matrix(env, &j[0], &wi, &o).det()))
}

/// Matrix of `delta2_det` before the determinant.
pub fn delta2_matrix(env: &Env, f: &Jet, opts: &DetOptions) -> Mat<Jet> {
    let y = &env.y;
    let g = env.grad_wb(f);
    let dz = env.grad_zb(f);
    if opts.sandwich {
        let x = g.matmul(&env.v).matmul(&env.r);
        y.matmul(&dz.add(&cross(x, opts.symmetrized))).matmul(y)
    } else {
        let x = g.matmul(&env.v).matmul(y);
        let x = if opts.symmetrized {
            x.add(&y.matmul(&env.v.transpose()).matmul(&g.transpose())).scale(cr(0.5))
        } else {
            x
        };
        dz.matmul(y).matmul(y).add(&x)
    }
}

/// `det(∂f/∂Z̄ Y² + ½(∂f/∂W̄ V Y + Y V^t ∂f/∂W̄^t))` or its sandwiched form.
/// Weight `nk-2`, index `nM`.
pub fn delta2_det(f: Map, wi: &WeightIndex, opts: &DetOptions) -> Result<Map> {
    require_index(&f, wi)?;
    let o = *opts;
    OpMap::build("delta2_det", vec![f], 1, false, move |j, env| Ok(delta2_matrix(env, &j[0], &o).det()))
}

/// The two bracket-type operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BracketVariant {
    /// First-order determinant bracket, `n = m`.
    A,
    /// Heat-type determinant bracket.
    B,
}

/// Placement of the index matrices in bracket A.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum IndexPlacement {
    /// `∂f/∂W M₂ g - ∂g/∂W M₁ f`.
    Right,
    /// `M₂ ∂f/∂W g - M₁ ∂g/∂W f`.
    Left,
}

/// Bracket of `f ∈ (k₁, M₁)` and `g ∈ (k₂, M₂)`.
///
/// Variant A: `det(∂f/∂W M₂ g - ∂g/∂W M₁ f)`, weight `n(k₁+k₂)+1`, index `n(M₁+M₂)`.
/// Variant B: `det((m-2k₂) H₁(f) g - (m-2k₁) H₂(g) f)` with
/// `H_i(h) = -8πi ∂h/∂Z + ∂/∂W M_i^{-1} (∂h/∂W)^t`.
pub fn bracket(
    f: Map,
    wi1: &WeightIndex,
    g: Map,
    wi2: &WeightIndex,
    variant: BracketVariant,
    placement: IndexPlacement,
) -> Result<Map> {
    require_index(&f, wi1)?;
    require_index(&g, wi2)?;
    let (n, m) = f.dims();
    match variant {
        BracketVariant::A => {
            if n != m {
                return Err(SjError::DimensionMismatch(format!("bracket a needs n = m, got ({n}, {m})")));
            }
            let (m1, m2) = (wi1.index_f64().to_complex(), wi2.index_f64().to_complex());
            OpMap::build("bracket_a", vec![f, g], 1, false, move |j, env| {
                let (f, g) = (&j[0], &j[1]);
                let lift = |a: &Mat<crate::space::C64>| a.map(|&c| env.cst(c));
                let (a1, a2) = (lift(&m1), lift(&m2));
                let (df, dg) = (env.grad_w(f), env.grad_w(g));
                let (x, y) = match placement {
                    IndexPlacement::Right => (df.matmul(&a2), dg.matmul(&a1)),
                    IndexPlacement::Left => (a2.matmul(&df), a1.matmul(&dg)),
                };
                Ok(x.mul_scalar(g).sub(&y.mul_scalar(f)).det())
            })
        }
        BracketVariant::B => {
            let (i1, i2) = (inverse_index(wi1)?, inverse_index(wi2)?);
            let c1 = m as f64 - 2.0 * wi2.k as f64;
            let c2 = m as f64 - 2.0 * wi1.k as f64;
            OpMap::build("bracket_b", vec![f, g], 2, false, move |j, env| {
                let (f, g) = (&j[0], &j[1]);
                let h = |u: &Jet, a: &Mat<f64>| env.grad_z(u).scale(-I * 8.0 * PI).add(&w_hessian(env, u, a));
                let x = h(f, &i1).mul_scalar(g).scale(cr(c1));
                let y = h(g, &i2).mul_scalar(f).scale(cr(c2));
                Ok(x.sub(&y).det())
            })
        }
    }
}

/// Candidate output weights scanned for bracket B: the displayed `k₁+k₂+1`,
/// `n(k₁+k₂)+2` and `n(k₁+k₂+2)`.
pub fn bracket_b_weight_candidates(n: usize, k1: i64, k2: i64) -> [i64; 3] {
    let n = n as i64;
    [k1 + k2 + 1, n * (k1 + k2) + 2, n * (k1 + k2 + 2)]
}

/// Output weight and index of a bracket with the given variant.
pub fn bracket_signature(n: usize, wi1: &WeightIndex, wi2: &WeightIndex, variant: BracketVariant) -> WeightIndex {
    let n64 = n as i64;
    let k = match variant {
        BracketVariant::A => n64 * (wi1.k + wi2.k) + 1,
        BracketVariant::B => n64 * (wi1.k + wi2.k) + 2,
    };
    let m = wi1.m();
    let idx = Mat::from_fn(m, m, |i, j| (wi1.index.get(i, j) + wi2.index.get(i, j)) * n64);
    WeightIndex { k, index: idx }
}
