//! Eta and theta products, the weak Jacobi forms of index one, and Eisenstein
//! q-expansions.

use super::eisenstein::bernoulli;
use super::series::{rat, FourierJacobiSeries, QSeries, DQ};
use crate::error::{Result, SjError};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use std::collections::BTreeMap;

fn check_trunc(trunc: i64) -> Result<()> {
    if trunc < 1 {
        Err(SjError::TruncationTooSmall(format!("trunc = {trunc}, need at least 1")))
    } else {
        Ok(())
    }
}

/// `Π_{j=1}^{trunc} (1 - q^j)` through `q^{trunc}` as integer coefficients.
fn euler_product(trunc: i64) -> Vec<BigInt> {
    let t = trunc as usize;
    let mut p = vec![BigInt::zero(); t + 1];
    p[0] = BigInt::one();
    for j in 1..=t {
        for e in (j..=t).rev() {
            let d = p[e - j].clone();
            p[e] -= d;
        }
    }
    p
}

/// `η = q^{1/24} Π (1 - q^j)`, exact through `q^{trunc}`.
pub fn eta(trunc: i64) -> Result<QSeries> {
    check_trunc(trunc)?;
    let p = euler_product(trunc);
    let mut s = QSeries::zero(trunc * DQ + 1);
    for (e, c) in p.into_iter().enumerate() {
        s.set(e as i64 * DQ + 1, BigRational::from_integer(c));
    }
    Ok(s)
}

/// Two-variable integer Laurent polynomial keyed by `(q power, ζ power)`.
type Poly2 = BTreeMap<(i64, i64), BigInt>;

fn mul_binomial(p: &Poly2, dq: i64, dz: i64, trunc: i64) -> Poly2 {
    let mut out = p.clone();
    for ((n, r), c) in p {
        if n + dq > trunc {
            continue;
        }
        let e = out.entry((n + dq, r + dz)).or_insert_with(BigInt::zero);
        *e -= c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// `ϑ(τ, w) = q^{1/8} (ζ^{1/2} - ζ^{-1/2}) Π (1-q^j)(1-q^j ζ)(1-q^j ζ^{-1})`,
/// weight 1/2, index 1/2, exact through `q^{trunc}`.
pub fn theta1(trunc: i64) -> Result<FourierJacobiSeries> {
    check_trunc(trunc)?;
    let mut p: Poly2 = BTreeMap::new();
    p.insert((0, 0), BigInt::one());
    for j in 1..=trunc {
        p = mul_binomial(&p, j, 0, trunc);
        p = mul_binomial(&p, j, 1, trunc);
        p = mul_binomial(&p, j, -1, trunc);
    }
    let mut s = FourierJacobiSeries::zero(1, Rational64::new(1, 2), trunc * DQ + 3);
    for ((n, r), c) in p {
        let nn = n * DQ + 3;
        let c = BigRational::from_integer(c);
        let up = s.coeff(nn, 2 * r + 1) + &c;
        s.set(nn, 2 * r + 1, up);
        let dn = s.coeff(nn, 2 * r - 1) - &c;
        s.set(nn, 2 * r - 1, dn);
    }
    Ok(s)
}

/// The four classical theta series as direct sums.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    /// `Σ (-1)^j q^{(j+½)²/2} ζ^{j+½}`.
    One,
    /// `Σ q^{(j+½)²/2} ζ^{j+½}`.
    Two,
    /// `Σ q^{j²/2} ζ^j`.
    Three,
    /// `Σ (-1)^j q^{j²/2} ζ^j`.
    Four,
}

/// Theta series by direct summation, exact through `q^{trunc}` plus the
/// offset `3/24` that keeps the half-characteristic series aligned.
pub fn theta_sum(kind: ThetaKind, trunc: i64) -> Result<FourierJacobiSeries> {
    check_trunc(trunc)?;
    let prec = trunc * DQ + 3;
    let mut s = FourierJacobiSeries::zero(1, Rational64::new(1, 2), prec);
    let half = matches!(kind, ThetaKind::One | ThetaKind::Two);
    let signed = matches!(kind, ThetaKind::One | ThetaKind::Four);
    let bound = (prec as f64).sqrt() as i64 + 2;
    for j in -bound..=bound {
        let (nn, rr) = if half { (3 * (2 * j + 1).pow(2), 2 * j + 1) } else { (12 * j * j, 2 * j) };
        if nn > prec {
            continue;
        }
        let c = if signed && j.rem_euclid(2) == 1 { rat(-1) } else { rat(1) };
        s.set(nn, rr, c);
    }
    Ok(s)
}

/// `φ_{-2,1} = ϑ² / η⁶`, exact through `q^{trunc}`.
pub fn phi_m2_1(trunc: i64) -> Result<FourierJacobiSeries> {
    let th = theta1(trunc)?;
    let e = eta(trunc)?;
    let e6 = (0..5).fold(e.clone(), |a, _| a.mul(&e));
    let s = th.mul(&th).div_q(&e6, 6)?;
    Ok(s.truncate(trunc * DQ).with_weight_index(-4, Rational64::one()))
}

/// `φ_{0,1} = 4 Σ_{i=2,3,4} θ_i(τ,w)² / θ_i(τ,0)²`, exact through `q^{trunc}`.
pub fn phi_0_1(trunc: i64) -> Result<FourierJacobiSeries> {
    let mut acc: Option<FourierJacobiSeries> = None;
    for kind in [ThetaKind::Two, ThetaKind::Three, ThetaKind::Four] {
        let t = theta_sum(kind, trunc)?;
        let t0 = t.at_zeta_one();
        let q = t.mul(&t).div_q(&t0.mul(&t0), 2)?;
        acc = Some(match acc {
            None => q,
            Some(a) => a.add(&q),
        });
    }
    let s = acc.expect("three terms").scale(&rat(4));
    Ok(s.truncate(trunc * DQ).with_weight_index(0, Rational64::one()))
}

/// Index-one weak Jacobi form of weight `k ∈ {-2, 0}`.
pub fn weak_jacobi(k: i64, trunc: i64) -> Result<FourierJacobiSeries> {
    match k {
        -2 => phi_m2_1(trunc),
        0 => phi_0_1(trunc),
        _ => Err(SjError::Config(format!("no weak Jacobi form of weight {k} in the corpus"))),
    }
}

/// Corpus form by name: `phi_-2_1` or `phi_0_1`.
pub fn corpus_form(name: &str, trunc: i64) -> Result<FourierJacobiSeries> {
    match name {
        "phi_-2_1" | "phi_m2_1" => phi_m2_1(trunc),
        "phi_0_1" => phi_0_1(trunc),
        _ => Err(SjError::Config(format!("unknown corpus form '{name}' (expected phi_-2_1 or phi_0_1)"))),
    }
}

/// `σ_p(j)` for `j ≥ 1`.
pub fn sigma(p: u32, j: u64) -> BigInt {
    let mut s = BigInt::zero();
    let mut d = 1u64;
    while d * d <= j {
        if j % d == 0 {
            s += BigInt::from(d).pow(p);
            let e = j / d;
            if e != d {
                s += BigInt::from(e).pow(p);
            }
        }
        d += 1;
    }
    s
}

/// `(2πi)^pow · series`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiScaled {
    pub pow: u32,
    pub series: QSeries,
}

/// `G_k = 2ζ(k) + (2(2πi)^k/(k-1)!) Σ σ_{k-1}(j) q^j` with the factor `(2πi)^k` kept apart:
/// `G_k = (2πi)^k (-B_k/k! + (2/(k-1)!) Σ σ_{k-1}(j) q^j)`.
pub fn eisenstein_g(k: u32, trunc: i64) -> Result<PiScaled> {
    check_trunc(trunc)?;
    if k < 2 || k % 2 == 1 {
        return Err(SjError::InvalidIndex(format!("Eisenstein weight {k} must be even and at least 2")));
    }
    let fact = |n: u32| (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b));
    let b = bernoulli(k as usize);
    let mut a = vec![-b[k as usize].clone() / BigRational::from_integer(fact(k))];
    let two = BigRational::new(BigInt::from(2), fact(k - 1));
    for j in 1..=trunc as u64 {
        a.push(&two * BigRational::from_integer(sigma(k - 1, j)));
    }
    Ok(PiScaled { pow: k, series: QSeries::from_integer_coeffs(&a, trunc) })
}

/// `G₂ / (4π²) = 1/12 - 2 Σ σ₁(j) q^j`.
pub fn g2_over_4pi2(trunc: i64) -> Result<QSeries> {
    Ok(eisenstein_g(2, trunc)?.series.neg())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_pentagonal_signs() {
        let e = eta(30).unwrap();
        let mut want = BTreeMap::new();
        for j in -6i64..=6 {
            let g = j * (3 * j - 1) / 2;
            if g <= 30 {
                want.insert(g * DQ + 1, if j % 2 == 0 { rat(1) } else { rat(-1) });
            }
        }
        assert_eq!(e.coeffs, want);
    }

    #[test]
    fn triple_product_matches_direct_sum() {
        let a = theta1(10).unwrap();
        let b = theta_sum(ThetaKind::One, 10).unwrap();
        assert_eq!(a.coeffs, b.coeffs);
    }

    #[test]
    fn sigma_small() {
        assert_eq!(sigma(1, 12), BigInt::from(28));
        assert_eq!(sigma(3, 2), BigInt::from(9));
    }
}
