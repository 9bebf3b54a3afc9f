//! The weight kernel `h₁ = det(Y)^k exp(-4π Tr(M V Y^{-1} V^t))`.

use super::{cr, Env};
use crate::space::{jet_fn, Coords, Map, SiegelJacobiPoint, WeightIndex};
use std::f64::consts::PI;

/// `h₁` for the given weight and index as a map on `ℍ_n × ℂ^{(m,n)}`.
pub fn weight_kernel(n: usize, wi: &WeightIndex) -> Map {
    let wi = wi.clone();
    let m = wi.m();
    jet_fn(n, m, false, move |c: &Coords| {
        let env = Env::new(c.clone());
        let mm = env.index(&wi);
        let t = mm.matmul(&env.v).matmul(&env.r).matmul(&env.v.transpose()).trace();
        let det = env.det_y().powi(wi.k);
        Ok(det.mul_jet(&t.scale_c(cr(-4.0 * PI)).exp_jet()))
    })
}

/// `log h₁ = k log det Y - 4π Tr(M V Y^{-1} V^t)` at a point.
pub fn log_weight_kernel(x: &SiegelJacobiPoint, wi: &WeightIndex) -> f64 {
    let mm = wi.index_f64();
    let t = mm.matmul(&x.v).matmul(&x.r).matmul(&x.v.transpose()).trace();
    wi.k as f64 * x.y.det().ln() - 4.0 * PI * t
}
