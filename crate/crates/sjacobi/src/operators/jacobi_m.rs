//! Operators on `ℍ × ℂ^m` (n = 1).

use super::{cr, require_index, require_n1, sum_jets, Env, OpMap, I};
use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::qseries::eisenstein::{e1hat_map, g2_map, g2hat_map};
use crate::space::{Map, WeightIndex};
use num_rational::Rational64;
use std::f64::consts::PI;

fn prepare(f: &Map, wi: &WeightIndex) -> Result<(usize, Mat<f64>)> {
    require_n1(f)?;
    require_index(f, wi)?;
    Ok((f.dims().1, wi.index_f64()))
}

fn check_i(m: usize, i: usize) -> Result<()> {
    if i == 0 || i > m {
        Err(SjError::IndexOutOfRange { index: i, max: m })
    } else {
        Ok(())
    }
}

fn rat(r: &Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// `Σ_t M_it v_t / y` as a jet, zero-based `i`.
fn mv_over_y(env: &Env, mm: &Mat<f64>, i: usize) -> Jet {
    let ry = env.y.get(0, 0).inv_jet();
    let s = sum_jets(env, (0..env.l.m).map(|t| env.v.get(t, 0).scale_c(cr(*mm.get(i, t)))));
    s.mul_jet(&ry)
}

/// `∂f/∂w_i + 4πi (Σ_t M_it v_t / y) f`, weight `k+1`; `i` one-based.
pub fn d1_i(f: Map, wi: &WeightIndex, i: usize) -> Result<Map> {
    let (m, mm) = prepare(&f, wi)?;
    check_i(m, i)?;
    OpMap::build("D1_i", vec![f], 1, false, move |j, env| {
        let f = &j[0];
        let a = mv_over_y(env, &mm, i - 1);
        Ok(f.deriv(env.l.w_var(i - 1, 0)).add_jet(&a.mul_jet(f).scale_c(I * 4.0 * PI)))
    })
}

/// `y ∂f/∂w̄_i`, weight `k-1`; `i` one-based.
pub fn delta1_i(f: Map, wi: &WeightIndex, i: usize) -> Result<Map> {
    let (m, _) = prepare(&f, wi)?;
    check_i(m, i)?;
    OpMap::build("delta1_i", vec![f], 1, false, move |j, env| {
        Ok(env.y.get(0, 0).mul_jet(&j[0].deriv(env.l.wb_var(i - 1, 0))))
    })
}

fn heat_hol(f: &Jet, env: &Env, cof: &Mat<f64>, det: f64) -> Jet {
    let l = &env.l;
    let m = l.m;
    let mut acc = f.deriv(l.z_var(0, 0)).scale_c(-I * 8.0 * PI * det);
    for a in 0..m {
        let fa = f.deriv(l.w_var(a, 0));
        for b in 0..m {
            let c = *cof.get(a, b);
            if c != 0.0 {
                acc = acc.add_jet(&fa.deriv(l.w_var(b, 0)).scale_c(cr(c)));
            }
        }
    }
    acc
}

/// Heat operator on `ℍ × ℂ^m`: `Σ M*_ij ∂²f/∂w_i∂w_j - 8πi|M| ∂f/∂z`, plus
/// `((2m|M|π - 4|M|πk)/y) f` when `full` is set. Weight `k+2`.
pub fn heat_m(f: Map, wi: &WeightIndex, full: bool) -> Result<Map> {
    let (m, _) = prepare(&f, wi)?;
    let cof = wi.cofactor().map(rat);
    let det = rat(&wi.det_index());
    let k = wi.k as f64;
    let name = if full { "heat_m" } else { "heat_m_hol" };
    OpMap::build(name, vec![f], 2, !full, move |j, env| {
        let f = &j[0];
        let mut out = heat_hol(f, env, &cof, det);
        if full {
            let c = 2.0 * m as f64 * det * PI - 4.0 * det * PI * k;
            out = out.add_jet(&f.mul_jet(&env.y.get(0, 0).inv_jet()).scale_c(cr(c)));
        }
        Ok(out)
    })
}

/// `∂f/∂z + Σ (v_i/y) ∂f/∂w_i + 2πi (v^t M v / y²) f - (ik/2y) f`, weight `k+2`.
pub fn d2_m(f: Map, wi: &WeightIndex) -> Result<Map> {
    let (m, mm) = prepare(&f, wi)?;
    let k = wi.k as f64;
    OpMap::build("D2_m", vec![f], 1, false, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        let ry = env.y.get(0, 0).inv_jet();
        let mut out = f.deriv(l.z_var(0, 0));
        for i in 0..m {
            out = out.add_jet(&env.v.get(i, 0).mul_jet(&ry).mul_jet(&f.deriv(l.w_var(i, 0))));
        }
        let mut q = env.cst(cr(0.0));
        for a in 0..m {
            for b in 0..m {
                q = q.add_jet(&env.v.get(a, 0).mul_jet(env.v.get(b, 0)).scale_c(cr(*mm.get(a, b))));
            }
        }
        out = out.add_jet(&q.mul_jet(&ry).mul_jet(&ry).mul_jet(f).scale_c(I * 2.0 * PI));
        Ok(out.add_jet(&ry.mul_jet(f).scale_c(-I * k / 2.0)))
    })
}

/// `y² ∂f/∂z̄ + y Σ v_i ∂f/∂w̄_i`, weight `k-2`.
pub fn delta2_m(f: Map, wi: &WeightIndex) -> Result<Map> {
    let (m, _) = prepare(&f, wi)?;
    OpMap::build("delta2_m", vec![f], 1, false, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        let y = env.y.get(0, 0);
        let mut out = y.mul_jet(y).mul_jet(&f.deriv(l.zb_var(0, 0)));
        for i in 0..m {
            out = out.add_jet(&y.mul_jet(env.v.get(i, 0)).mul_jet(&f.deriv(l.wb_var(i, 0))));
        }
        Ok(out)
    })
}

/// Eisenstein-corrected operators on `ℍ × ℂ^m`.
///
/// Variant A uses `G₂`, variant B uses `Ĝ₂(z, w_i)`, variant C is
/// `∂f/∂w_i + 4πi Σ_t M_it Ê₁(z, w_t) f`. With `literal` set, variant C uses
/// `4π Σ_t M_it Ê₁(z, w_i) f` instead.
pub fn serre_like_m(f: Map, wi: &WeightIndex, variant: super::SerreVariant, i: usize, literal: bool) -> Result<Map> {
    use super::SerreVariant as V;
    let (m, mm) = prepare(&f, wi)?;
    check_i(m, i)?;
    let cof = wi.cofactor().map(rat);
    let det = rat(&wi.det_index());
    let k = wi.k as f64;
    match variant {
        V::A | V::B => {
            let e = if variant == V::A { g2_map(m) } else { g2hat_map(m, i)? };
            let name = if variant == V::A { "serre_m_a" } else { "serre_m_b" };
            let c = 2.0 * det * (m as f64 - 2.0 * k);
            OpMap::build(name, vec![f, e], 2, true, move |j, env| {
                Ok(heat_hol(&j[0], env, &cof, det).add_jet(&j[1].mul_jet(&j[0]).scale_c(cr(c))))
            })
        }
        V::C => {
            let mut ins = vec![f];
            for t in 1..=m {
                ins.push(e1hat_map(m, t)?);
            }
            OpMap::build("serre_m_c", ins, 1, true, move |j, env| {
                let f = &j[0];
                let mut acc = f.deriv(env.l.w_var(i - 1, 0));
                for t in 0..m {
                    let c = *mm.get(i - 1, t);
                    let term = if literal {
                        j[i].mul_jet(f).scale_c(cr(4.0 * PI * c))
                    } else {
                        j[t + 1].mul_jet(f).scale_c(I * 4.0 * PI * c)
                    };
                    acc = acc.add_jet(&term);
                }
                Ok(acc)
            })
        }
        V::D => Err(SjError::Config("variant d is defined only for m = 1".into())),
    }
}
