//! Numeric evaluation of truncated expansions, as values and as maps with
//! term-wise analytic partials.

use super::series::{FourierJacobiSeries, QSeries, DQ, DZ};
use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::space::{Coords, Map, SmoothMap, C64};
use num_traits::ToPrimitive;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Arc;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default bound on the tail estimate.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Value and truncation estimate: ten times the magnitude of the top `q`-slice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Evaluated {
    pub value: C64,
    pub tail: f64,
}

fn terms(s: &FourierJacobiSeries) -> Vec<(i64, i64, f64)> {
    s.coeffs.iter().map(|((n, r), c)| (*n, *r, c.to_f64().unwrap_or(f64::NAN))).collect()
}

/// `Σ c(n, r) q^{n/24} ζ^{r/2}` at `(z, w)` with its tail estimate.
pub fn evaluate_with_tail(s: &FourierJacobiSeries, z: C64, w: C64) -> Evaluated {
    let top = s.coeffs.keys().map(|(n, _)| *n).max().unwrap_or(0);
    let mut value = C64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (n, r, c) in terms(s) {
        let t = (I * 2.0 * PI * (z * n as f64 / DQ as f64 + w * r as f64 / DZ as f64)).exp() * c;
        value += t;
        if n == top {
            tail += t.norm();
        }
    }
    Evaluated { value, tail: 10.0 * tail }
}

/// Evaluate and fail with `TruncationTooSmall` when the tail estimate exceeds `tol`.
pub fn evaluate(s: &FourierJacobiSeries, z: C64, w: C64, tol: f64) -> Result<C64> {
    check_upper(z)?;
    let e = evaluate_with_tail(s, z, w);
    if !(e.tail <= tol) {
        return Err(SjError::TruncationTooSmall(format!("tail estimate {:.3e} exceeds {tol:.1e}", e.tail)));
    }
    Ok(e.value)
}

/// `Σ a(n) q^{n/24}` at `z` with its tail estimate.
pub fn evaluate_q(s: &QSeries, z: C64) -> Evaluated {
    let top = s.coeffs.keys().copied().max().unwrap_or(0);
    let mut value = C64::new(0.0, 0.0);
    let mut tail = 0.0;
    for (n, c) in &s.coeffs {
        let t = (I * 2.0 * PI * z * *n as f64 / DQ as f64).exp() * c.to_f64().unwrap_or(f64::NAN);
        value += t;
        if *n == top {
            tail += t.norm();
        }
    }
    Evaluated { value, tail: 10.0 * tail }
}

fn check_upper(z: C64) -> Result<()> {
    if z.im > 0.0 {
        Ok(())
    } else {
        Err(SjError::NotPositiveDefinite(z.im))
    }
}

/// `Π_{i=1}^{m} φ(z, w_i)` on `ℍ × ℂ^m`, holomorphic, index `M·I_m` and weight `m·k`.
pub struct SeriesMap {
    m: usize,
    terms: Vec<(i64, i64, f64)>,
    top: i64,
    tol: f64,
}

impl SeriesMap {
    pub fn new(s: &FourierJacobiSeries, m: usize, tol: f64) -> Self {
        let top = s.coeffs.keys().map(|(n, _)| *n).max().unwrap_or(0);
        SeriesMap { m, terms: terms(s), top, tol }
    }

    fn factor(&self, z: &Jet, w: &Jet) -> Result<Jet> {
        let mut qp: BTreeMap<i64, Jet> = BTreeMap::new();
        let mut zp: BTreeMap<i64, Jet> = BTreeMap::new();
        let mut acc = z.zero();
        let mut tail = 0.0;
        for &(n, r, c) in &self.terms {
            let a = qp.entry(n).or_insert_with(|| z.scale_c(I * 2.0 * PI * n as f64 / DQ as f64).exp_jet()).clone();
            let b = zp.entry(r).or_insert_with(|| w.scale_c(I * 2.0 * PI * r as f64 / DZ as f64).exp_jet());
            let t = a.mul_jet(b).scale_c(C64::new(c, 0.0));
            if n == self.top {
                tail += t.value().norm();
            }
            acc = acc.add_jet(&t);
        }
        if !(10.0 * tail <= self.tol) {
            return Err(SjError::TruncationTooSmall(format!("tail estimate {:.3e} exceeds {:.1e}", 10.0 * tail, self.tol)));
        }
        Ok(acc)
    }
}

impl SmoothMap for SeriesMap {
    fn dims(&self) -> (usize, usize) {
        (1, self.m)
    }
    fn is_holomorphic(&self) -> bool {
        true
    }
    fn eval(&self, c: &Coords) -> Result<Jet> {
        let z = c.z.get(0, 0);
        check_upper(z.value())?;
        let mut acc = self.factor(z, c.w.get(0, 0))?;
        for i in 1..self.m {
            acc = acc.mul_jet(&self.factor(z, c.w.get(i, 0))?);
        }
        Ok(acc)
    }
}

/// Series as a map on `ℍ × ℂ^m` (product over the `m` rows of `w`).
pub fn series_map(s: &FourierJacobiSeries, m: usize, tol: f64) -> Map {
    Arc::new(SeriesMap::new(s, m, tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qseries::corpus::{eta, phi_0_1, phi_m2_1};

    #[test]
    fn eta_tail_at_two_i() {
        let e = evaluate_q(&eta(50).unwrap(), C64::new(0.0, 2.0));
        assert!(e.tail < 1e-15);
        let want = (-PI / 6.0).exp();
        assert!((e.value.re / want - 1.0).abs() < 1e-2);
    }

    #[test]
    fn phi_m2_vanishes_at_w_zero() {
        let s = phi_m2_1(50).unwrap();
        let v = evaluate(&s, C64::new(0.3, 1.1), C64::new(0.0, 0.0), 1e-10).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn even_in_w() {
        for s in [phi_m2_1(50).unwrap(), phi_0_1(50).unwrap()] {
            let (z, w) = (C64::new(-0.2, 0.9), C64::new(0.17, -0.21));
            let a = evaluate(&s, z, w, 1e-10).unwrap();
            let b = evaluate(&s, z, -w, 1e-10).unwrap();
            assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
        }
    }

    #[test]
    fn short_truncation_is_reported() {
        let s = phi_0_1(1).unwrap();
        assert!(matches!(evaluate(&s, C64::new(0.0, 0.8), C64::new(0.1, 0.0), 1e-10), Err(SjError::TruncationTooSmall(_))));
    }
}
