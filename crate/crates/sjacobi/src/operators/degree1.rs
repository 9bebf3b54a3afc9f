//! Operators on `ℍ × ℂ` (n = m = 1).

use super::{cr, require_degree1, require_index, Env, OpMap, I};
use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::qseries::eisenstein::{e1hat_map, g2_map, g2hat_map};
use crate::space::{Map, WeightIndex};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

struct D1Vars {
    y: Jet,
    v: Jet,
}

fn vars(env: &Env) -> D1Vars {
    D1Vars { y: env.y.get(0, 0).clone(), v: env.v.get(0, 0).clone() }
}

fn scalar_index(wi: &WeightIndex) -> f64 {
    *wi.index_f64().get(0, 0)
}

fn prepare(f: &Map, wi: &WeightIndex) -> Result<f64> {
    require_degree1(f)?;
    require_index(f, wi)?;
    Ok(scalar_index(wi))
}

/// `∂f/∂w + 4πiM (v/y) f`, weight `k+1`.
pub fn d1(f: Map, wi: &WeightIndex) -> Result<Map> {
    let mm = prepare(&f, wi)?;
    OpMap::build("D1", vec![f], 1, false, move |j, env| {
        let (fw, l) = (&j[0], &env.l);
        let s = vars(env);
        let vy = s.v.mul_jet(&s.y.inv_jet());
        Ok(fw.deriv(l.w_var(0, 0)).add_jet(&vy.mul_jet(fw).scale_c(I * 4.0 * PI * mm)))
    })
}

/// `∂²f/∂w² - 8πiM ∂f/∂z + ((2Mπ - 4Mπk)/y) f`, weight `k+2`.
pub fn heat_lkm(f: Map, wi: &WeightIndex) -> Result<Map> {
    let mm = prepare(&f, wi)?;
    let k = wi.k as f64;
    OpMap::build("heat_Lkm", vec![f], 2, false, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        let s = vars(env);
        let hol = f.deriv(l.w_var(0, 0)).deriv(l.w_var(0, 0)).sub_jet(&f.deriv(l.z_var(0, 0)).scale_c(I * 8.0 * PI * mm));
        let c = 2.0 * mm * PI - 4.0 * mm * PI * k;
        Ok(hol.add_jet(&f.mul_jet(&s.y.inv_jet()).scale_c(cr(c))))
    })
}

/// Holomorphic heat operator `L_M = ∂²/∂w² - 8πiM ∂/∂z`.
pub fn heat_lm(f: Map, wi: &WeightIndex) -> Result<Map> {
    let mm = prepare(&f, wi)?;
    OpMap::build("L_M", vec![f], 2, true, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        Ok(f.deriv(l.w_var(0, 0)).deriv(l.w_var(0, 0)).sub_jet(&f.deriv(l.z_var(0, 0)).scale_c(I * 8.0 * PI * mm)))
    })
}

/// `(v/y) ∂f/∂w + ∂f/∂z + 2πiM (v²/y²) f - (ik/2y) f`, weight `k+2`.
pub fn d2(f: Map, wi: &WeightIndex) -> Result<Map> {
    let mm = prepare(&f, wi)?;
    let k = wi.k as f64;
    OpMap::build("D2", vec![f], 1, false, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        let s = vars(env);
        let ry = s.y.inv_jet();
        let vy = s.v.mul_jet(&ry);
        let t1 = vy.mul_jet(&f.deriv(l.w_var(0, 0)));
        let t2 = f.deriv(l.z_var(0, 0));
        let t3 = vy.mul_jet(&vy).mul_jet(f).scale_c(I * 2.0 * PI * mm);
        let t4 = ry.mul_jet(f).scale_c(-I * k / 2.0);
        Ok(t1.add_jet(&t2).add_jet(&t3).add_jet(&t4))
    })
}

/// `y ∂f/∂w̄`, weight `k-1`.
pub fn delta1(f: Map, wi: &WeightIndex) -> Result<Map> {
    prepare(&f, wi)?;
    OpMap::build("delta1", vec![f], 1, false, move |j, env| {
        let s = vars(env);
        Ok(s.y.mul_jet(&j[0].deriv(env.l.wb_var(0, 0))))
    })
}

/// `y² ∂f/∂z̄ + v y ∂f/∂w̄`, weight `k-2`.
pub fn delta2(f: Map, wi: &WeightIndex) -> Result<Map> {
    prepare(&f, wi)?;
    OpMap::build("delta2", vec![f], 1, false, move |j, env| {
        let (f, l) = (&j[0], &env.l);
        let s = vars(env);
        let a = s.y.mul_jet(&s.y).mul_jet(&f.deriv(l.zb_var(0, 0)));
        let b = s.v.mul_jet(&s.y).mul_jet(&f.deriv(l.wb_var(0, 0)));
        Ok(a.add_jet(&b))
    })
}

/// The four Eisenstein-corrected operators on `ℍ × ℂ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SerreVariant {
    /// Heat operator with `G₂`.
    A,
    /// Heat operator with `Ĝ₂`.
    B,
    /// First-order operator with `Ê₁`.
    C,
    /// Second-weight operator with `Ê₁` and `a G₂ + b Ĝ₂`.
    D,
}

impl SerreVariant {
    pub fn all() -> [SerreVariant; 4] {
        [SerreVariant::A, SerreVariant::B, SerreVariant::C, SerreVariant::D]
    }

    pub fn weight_shift(&self) -> i64 {
        match self {
            SerreVariant::C => 1,
            _ => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            SerreVariant::A => "a",
            SerreVariant::B => "b",
            SerreVariant::C => "c",
            SerreVariant::D => "d",
        }
    }
}

/// Coefficient conventions for the Eisenstein-corrected operators.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerreOptions {
    /// Weight of `G₂` in variant D.
    pub a: f64,
    /// Weight of `Ĝ₂` in variant D.
    pub b: f64,
    /// Allow `a + b ≠ 1`.
    pub free_ab: bool,
    /// Variant C with the coefficient `4Mπ` instead of `4πiM`.
    pub literal_c: bool,
    /// Variant D with `+ik/2π` instead of `-ik/2π`.
    pub literal_d_sign: bool,
}

impl Default for SerreOptions {
    fn default() -> Self {
        SerreOptions { a: 1.0, b: 0.0, free_ab: false, literal_c: false, literal_d_sign: false }
    }
}

impl SerreOptions {
    pub fn with_ab(a: f64, b: f64) -> Self {
        SerreOptions { a, b, ..Default::default() }
    }

    fn check(&self) -> Result<()> {
        if !self.free_ab && (self.a + self.b - 1.0).abs() > 1e-12 {
            return Err(SjError::Config(format!(
                "a + b = {} but 1 is required unless free_ab is set",
                self.a + self.b
            )));
        }
        Ok(())
    }
}

/// Eisenstein-corrected operator on `ℍ × ℂ`. Variant A preserves holomorphy.
pub fn serre_like(f: Map, wi: &WeightIndex, variant: SerreVariant, opts: &SerreOptions) -> Result<Map> {
    let mm = prepare(&f, wi)?;
    opts.check()?;
    let k = wi.k as f64;
    let o = *opts;
    match variant {
        SerreVariant::A | SerreVariant::B => {
            let e = if variant == SerreVariant::A { g2_map(1) } else { g2hat_map(1, 1)? };
            let name = if variant == SerreVariant::A { "serre_a" } else { "serre_b" };
            OpMap::build(name, vec![f, e], 2, true, move |j, env| {
                let (f, g, l) = (&j[0], &j[1], &env.l);
                let hol = f
                    .deriv(l.w_var(0, 0))
                    .deriv(l.w_var(0, 0))
                    .sub_jet(&f.deriv(l.z_var(0, 0)).scale_c(I * 8.0 * PI * mm));
                Ok(hol.add_jet(&g.mul_jet(f).scale_c(cr(2.0 * mm * (1.0 - 2.0 * k)))))
            })
        }
        SerreVariant::C => {
            let e1 = e1hat_map(1, 1)?;
            let coef = if o.literal_c { cr(4.0 * mm * PI) } else { I * 4.0 * PI * mm };
            OpMap::build("serre_c", vec![f, e1], 1, true, move |j, env| {
                let (f, e, l) = (&j[0], &j[1], &env.l);
                Ok(f.deriv(l.w_var(0, 0)).add_jet(&e.mul_jet(f).scale_c(coef)))
            })
        }
        SerreVariant::D => {
            let ins = vec![f, e1hat_map(1, 1)?, g2_map(1), g2hat_map(1, 1)?];
            let sign = if o.literal_d_sign { 1.0 } else { -1.0 };
            OpMap::build("serre_d", ins, 1, true, move |j, env| {
                let (f, e, g2, g2h, l) = (&j[0], &j[1], &j[2], &j[3], &env.l);
                let t1 = e.mul_jet(&f.deriv(l.w_var(0, 0)));
                let t2 = f.deriv(l.z_var(0, 0));
                let t3 = e.mul_jet(e).mul_jet(f).scale_c(I * 2.0 * PI * mm);
                let mix = g2.scale_c(cr(o.a)).add_jet(&g2h.scale_c(cr(o.b)));
                let t4 = mix.mul_jet(f).scale_c(I * sign * k / (2.0 * PI));
                Ok(t1.add_jet(&t2).add_jet(&t3).add_jet(&t4))
            })
        }
    }
}
