//! Eisenstein series `G_k`, the twisted series `Ĝ_n` and `Ê₁` as numeric values
//! and as jet-valued maps on `ℍ × ℂ^m`.
//!
//! Every inner sum over `b` is taken in closed form, `Σ_b 1/(u+b) = π cot(πu)`,
//! so only the outer sum over `a` is truncated. The outer terms decay like
//! `exp(-2π a Im z)`.

use crate::calculus::jet::{jet_space, Jet};
use crate::error::{Result, SjError};
use crate::matrix::Scalar;
use crate::space::{jet_fn, Coords, Map, C64};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Default distance from the lattice `ℤz + ℤ` below which twisted series refuse
/// to evaluate.
pub const TAU_POLE: f64 = 1e-6;

const MAX_OUTER: usize = 100_000;

/// `π cot(π u)` for a jet `u`, stable for large `|Im u|`.
pub fn pi_cot_pi(u: &Jet) -> Jet {
    let one = u.one_like();
    if u.value().im >= 0.0 {
        let e = u.scale_c(I * 2.0 * PI).exp_jet();
        let num = e.add_jet(&one);
        let den = e.sub_jet(&one);
        num.mul_jet(&den.inv_jet()).scale_c(I * PI)
    } else {
        let e = u.scale_c(-I * 2.0 * PI).exp_jet();
        let num = one.add_jet(&e);
        let den = one.sub_jet(&e);
        num.mul_jet(&den.inv_jet()).scale_c(I * PI)
    }
}

/// `π² / sin²(π u) = π² + (π cot πu)²`.
fn pi2_csc2(u: &Jet) -> Jet {
    let c = pi_cot_pi(u);
    c.mul_jet(&c).add_c(C64::new(PI * PI, 0.0))
}

/// Distance from `w` to the nearest point of `ℤz + ℤ`.
pub fn pole_distance(z: C64, w: C64) -> f64 {
    let a0 = (w.im / z.im).round() as i64;
    let mut best = f64::INFINITY;
    for a in a0 - 1..=a0 + 1 {
        let r = w - z * a as f64;
        let b0 = r.re.round() as i64;
        for b in b0 - 1..=b0 + 1 {
            best = best.min((r - C64::new(b as f64, 0.0)).norm());
        }
    }
    best
}

fn check_pole(z: C64, w: C64, tau: f64) -> Result<()> {
    let d = pole_distance(z, w);
    if d < tau {
        Err(SjError::PoleProximity(d))
    } else {
        Ok(())
    }
}

fn outer_done(term: &Jet, total: &Jet, a: usize, z: C64, w: C64) -> bool {
    a as f64 * z.im > w.im.abs() + 1.0 && term.max_abs() <= 1e-17 * (1.0 + total.max_abs())
}

/// `Ĝ₁(z, w)` on jets, Eisenstein summation.
pub fn g1hat_jet(z: &Jet, w: &Jet) -> Result<Jet> {
    let (zv, wv) = (z.value(), w.value());
    check_pole(zv, wv, TAU_POLE)?;
    let mut total = pi_cot_pi(w);
    for a in 1..MAX_OUTER {
        let az = z.scale_c(C64::new(a as f64, 0.0));
        let term = pi_cot_pi(&w.add_jet(&az)).add_jet(&pi_cot_pi(&w.sub_jet(&az)));
        total = total.add_jet(&term);
        if outer_done(&term, &total, a, zv, wv) {
            return Ok(total);
        }
    }
    Err(SjError::TruncationTooSmall(format!("outer sum exceeded {MAX_OUTER} terms")))
}

/// `Ĝ₂(z, w)` on jets.
pub fn g2hat_jet(z: &Jet, w: &Jet) -> Result<Jet> {
    let (zv, wv) = (z.value(), w.value());
    check_pole(zv, wv, TAU_POLE)?;
    let mut total = pi2_csc2(w);
    for a in 1..MAX_OUTER {
        let az = z.scale_c(C64::new(a as f64, 0.0));
        let term = pi2_csc2(&w.add_jet(&az)).add_jet(&pi2_csc2(&w.sub_jet(&az)));
        total = total.add_jet(&term);
        if outer_done(&term, &total, a, zv, wv) {
            return Ok(total);
        }
    }
    Err(SjError::TruncationTooSmall(format!("outer sum exceeded {MAX_OUTER} terms")))
}

/// `G₂(z)` on jets: `π²/3 + 2 Σ_{a≥1} π²/sin²(π a z)`.
pub fn g2_jet(z: &Jet) -> Result<Jet> {
    let zv = z.value();
    let mut total = z.one_like().scale_c(C64::new(PI * PI / 3.0, 0.0));
    for a in 1..MAX_OUTER {
        let term = pi2_csc2(&z.scale_c(C64::new(a as f64, 0.0))).scale_c(C64::new(2.0, 0.0));
        total = total.add_jet(&term);
        if outer_done(&term, &total, a, zv, C64::new(0.0, 0.0)) {
            return Ok(total);
        }
    }
    Err(SjError::TruncationTooSmall(format!("outer sum exceeded {MAX_OUTER} terms")))
}

/// `Ê₁ = (i / 2π) Ĝ₁` on jets.
pub fn e1hat_jet(z: &Jet, w: &Jet) -> Result<Jet> {
    Ok(g1hat_jet(z, w)?.scale_c(I / (2.0 * PI)))
}

fn check_column(m: usize, i: usize) -> Result<()> {
    if i == 0 || i > m {
        Err(SjError::IndexOutOfRange { index: i, max: m })
    } else {
        Ok(())
    }
}

/// `G₂(z)` as a map on `ℍ × ℂ^m`.
pub fn g2_map(m: usize) -> Map {
    jet_fn(1, m, true, |c: &Coords| g2_jet(c.z.get(0, 0)))
}

/// `Ĝ₂(z, w_i)` as a map on `ℍ × ℂ^m`, `i` one-based.
pub fn g2hat_map(m: usize, i: usize) -> Result<Map> {
    check_column(m, i)?;
    Ok(jet_fn(1, m, true, move |c: &Coords| g2hat_jet(c.z.get(0, 0), c.w.get(i - 1, 0))))
}

/// `Ê₁(z, w_i)` as a map on `ℍ × ℂ^m`, `i` one-based.
pub fn e1hat_map(m: usize, i: usize) -> Result<Map> {
    check_column(m, i)?;
    Ok(jet_fn(1, m, true, move |c: &Coords| e1hat_jet(c.z.get(0, 0), c.w.get(i - 1, 0))))
}

/// Bernoulli numbers `B_0 .. B_n` with `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Vec<BigRational> {
    let mut b: Vec<BigRational> = Vec::with_capacity(n + 1);
    for mm in 0..=n {
        if mm == 0 {
            b.push(BigRational::one());
            continue;
        }
        let mut acc = BigRational::zero();
        let mut binom = BigRational::one();
        for (k, bk) in b.iter().enumerate().take(mm) {
            acc += &binom * bk;
            binom = binom * BigRational::from_integer((mm + 1 - k).into())
                / BigRational::from_integer((k + 1).into());
        }
        b.push(-acc / BigRational::from_integer((mm + 1).into()));
    }
    b
}

/// `ζ(k)` for even `k ≥ 2`.
pub fn zeta_even(k: usize) -> f64 {
    let b = bernoulli(k);
    let bk = b[k].to_f64().unwrap_or(f64::NAN);
    let mut fact = 1.0;
    for i in 2..=k {
        fact *= i as f64;
    }
    let sign = if (k / 2) % 2 == 1 { 1.0 } else { -1.0 };
    sign * bk * (2.0 * PI).powi(k as i32) / (2.0 * fact)
}

/// `Σ_b 1/(u+b)^n` at a complex point, via derivatives of `π cot(πu)`.
fn inner_sum(n: usize, u: C64) -> C64 {
    let sp = jet_space(1, n - 1);
    let uj = Jet::var(&sp, 0, u);
    let c = pi_cot_pi(&uj);
    let mut e = vec![0u8; 1];
    e[0] = (n - 1) as u8;
    let sign = if (n - 1) % 2 == 0 { 1.0 } else { -1.0 };
    c.coeff(&e) * sign
}

/// `G_k(z) = Σ' 1/(az+b)^k` for even `k ≥ 2` with the outer sum cut at `|a| ≤ bound`.
pub fn eisenstein_g_value(k: usize, z: C64, bound: usize) -> Result<C64> {
    if k < 2 || k % 2 == 1 {
        return Err(SjError::InvalidIndex(format!("Eisenstein weight {k} must be even and at least 2")));
    }
    if z.im <= 0.0 {
        return Err(SjError::NotPositiveDefinite(z.im));
    }
    let mut total = C64::new(2.0 * zeta_even(k), 0.0);
    for a in 1..=bound {
        let az = z * a as f64;
        total += inner_sum(k, az) + inner_sum(k, -az);
    }
    Ok(total)
}

/// `Ĝ_n(z, w)` for `n ≥ 1` with the outer sum cut at `|a| ≤ bound`.
pub fn eisenstein_hat_value(n: usize, z: C64, w: C64, bound: usize) -> Result<C64> {
    if n == 0 {
        return Err(SjError::InvalidIndex("twisted Eisenstein order must be positive".into()));
    }
    if z.im <= 0.0 {
        return Err(SjError::NotPositiveDefinite(z.im));
    }
    check_pole(z, w, TAU_POLE)?;
    let mut total = inner_sum(n, w);
    for a in 1..=bound {
        let az = z * a as f64;
        total += inner_sum(n, w + az) + inner_sum(n, w - az);
    }
    Ok(total)
}

/// Outer bound at which the truncated series has converged to `tol`, found by
/// doubling from `start`. Returns the value and the bound used.
pub fn converged_hat_value(n: usize, z: C64, w: C64, tol: f64, start: usize, max: usize) -> Result<(C64, usize)> {
    let mut a = start.max(1);
    let mut prev = eisenstein_hat_value(n, z, w, a / 2)?;
    loop {
        let cur = eisenstein_hat_value(n, z, w, a)?;
        if (cur - prev).norm() <= tol * (1.0 + cur.norm()) {
            return Ok((cur, a));
        }
        if a >= max {
            return Err(SjError::TruncationTooSmall(format!(
                "outer bound {a} changes the value by {:e}",
                (cur - prev).norm()
            )));
        }
        prev = cur;
        a = (a * 2).min(max);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_two_and_four() {
        assert!((zeta_even(2) - PI * PI / 6.0).abs() < 1e-14);
        assert!((zeta_even(4) - PI.powi(4) / 90.0).abs() < 1e-13);
    }

    #[test]
    fn hat_series_is_odd_or_even_in_w() {
        let z = C64::new(0.1, 1.1);
        let w = C64::new(0.23, 0.31);
        for n in 1..=4 {
            let a = eisenstein_hat_value(n, z, w, 40).unwrap();
            let b = eisenstein_hat_value(n, z, -w, 40).unwrap();
            let s = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!((a - b * s).norm() < 1e-10 * a.norm().max(1.0));
        }
    }

    #[test]
    fn jet_and_value_agree() {
        let z = C64::new(-0.2, 0.9);
        let w = C64::new(0.3, 0.2);
        let sp = jet_space(2, 1);
        let zj = Jet::var(&sp, 0, z);
        let wj = Jet::var(&sp, 1, w);
        let g1 = g1hat_jet(&zj, &wj).unwrap().value();
        let g2 = g2hat_jet(&zj, &wj).unwrap().value();
        assert!((g1 - eisenstein_hat_value(1, z, w, 60).unwrap()).norm() < 1e-10);
        assert!((g2 - eisenstein_hat_value(2, z, w, 60).unwrap()).norm() < 1e-10);
        let d = g1hat_jet(&zj, &wj).unwrap().partial(&[1]);
        assert!((d + g2).norm() < 1e-9);
    }

    #[test]
    fn cot_matches_trig_in_both_half_planes() {
        let sp = jet_space(1, 0);
        for u in [C64::new(0.3, 0.7), C64::new(-0.4, -1.3), C64::new(0.2, 4.0), C64::new(0.1, -6.0)] {
            let want = (u * PI).cos() / (u * PI).sin() * PI;
            let got = pi_cot_pi(&Jet::constant(&sp, u)).value();
            assert!((got - want).norm() < 1e-12 * want.norm().max(1.0), "{u}");
        }
    }

    #[test]
    fn g1hat_matches_direct_lattice_sum() {
        let z = C64::new(0.15, 0.8);
        let w = C64::new(0.2, 0.3);
        let bmax = 20_000i64;
        let mut direct = C64::new(0.0, 0.0);
        for a in -12i64..=12 {
            let u = w + z * a as f64;
            let mut s = C64::new(1.0, 0.0) / u;
            for b in 1..=bmax {
                s += C64::new(1.0, 0.0) / (u + b as f64) + C64::new(1.0, 0.0) / (u - b as f64);
            }
            s -= u * 2.0 / (bmax as f64 + 0.5);
            direct += s;
        }
        let got = eisenstein_hat_value(1, z, w, 60).unwrap();
        assert!((got - direct).norm() < 1e-7, "{got} vs {direct}");
    }

    #[test]
    fn pole_is_rejected() {
        let z = C64::new(0.1, 1.0);
        let w = z * 2.0 + C64::new(1.0, 0.0);
        assert!(matches!(eisenstein_hat_value(1, z, w, 10), Err(SjError::PoleProximity(_))));
    }
}
