//! Heat operator on coefficients, theta decomposition and the correspondence
//! with modular forms of weight `k - 1/2`.

use super::corpus::g2_over_4pi2;
use super::series::{rat, rat_frac, FourierJacobiSeries, QSeries, DQ, DZ};
use crate::error::{Result, SjError};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeMap;

fn require_integral(s: &FourierJacobiSeries) -> Result<()> {
    if let Some(((n, r), _)) = s.coeffs.iter().find(|((n, r), _)| n % DQ != 0 || r % DZ != 0) {
        return Err(SjError::NotThetaDecomposable(format!("non-integral exponent q^({n}/24) ζ^({r}/2)")));
    }
    Ok(())
}

fn require_index_one(s: &FourierJacobiSeries) -> Result<()> {
    if s.index != Rational64::one() {
        return Err(SjError::NotThetaDecomposable(format!("index {} is not 1", s.index)));
    }
    Ok(())
}

fn index_big(m: Rational64) -> BigRational {
    BigRational::new(BigInt::from(*m.numer()), BigInt::from(*m.denom()))
}

/// Coefficientwise `c(n, r) ↦ (4Mn - r²) c(n, r)`; the heat operator
/// `∂²/∂w² - 8πiM ∂/∂z` equals `4π²` times this map. Weight rises by 2.
pub fn heat_on_series(s: &FourierJacobiSeries) -> Result<FourierJacobiSeries> {
    require_integral(s)?;
    let m4 = index_big(s.index) * rat(4);
    let mut out = FourierJacobiSeries::zero(s.weight2 + 4, s.index, s.prec);
    for ((n, r), c) in &s.coeffs {
        let (n, r) = (n / DQ, r / DZ);
        let f = &m4 * rat(n) - rat(r * r);
        out.set(n * DQ, r * DZ, c * f);
    }
    Ok(out)
}

/// `θ_{1,μ} = Σ_{r ≡ μ (2)} q^{r²/4} ζ^r`, exact through `q^{trunc}`.
pub fn theta_1mu(mu: i64, trunc: i64) -> FourierJacobiSeries {
    let prec = trunc * DQ;
    let mut s = FourierJacobiSeries::zero(1, Rational64::one(), prec);
    let bound = (2.0 * (trunc as f64).sqrt()) as i64 + 2;
    for r in -bound..=bound {
        if r.rem_euclid(2) == mu && 6 * r * r <= prec {
            s.set(6 * r * r, r * DZ, rat(1));
        }
    }
    s
}

/// Theta components `h₀, h₁` with `h_μ = Σ_N c_μ(N) q^{N/4}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaDecomposition {
    pub h: [QSeries; 2],
    pub weight2: i64,
}

/// Write an index-one series as `h₀ θ_{1,0} + h₁ θ_{1,1}`.
///
/// Every stored coefficient must agree with `c_μ(4n - r²)` for all `r ≡ μ`
/// inside the truncation.
pub fn theta_decompose(s: &FourierJacobiSeries) -> Result<ThetaDecomposition> {
    require_index_one(s)?;
    require_integral(s)?;
    let trunc = s.trunc();
    let mut cm: [BTreeMap<i64, BigRational>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for ((n, r), c) in &s.coeffs {
        let (n, r) = (n / DQ, r / DZ);
        let mu = r.rem_euclid(2) as usize;
        cm[mu].entry(4 * n - r * r).or_insert_with(|| c.clone());
    }
    for (mu, table) in cm.iter().enumerate() {
        for (big_n, c) in table {
            let bound = (2.0 * ((4 * trunc - big_n).max(0) as f64).sqrt()) as i64 + 2;
            for r in -bound..=bound {
                if r.rem_euclid(2) as usize != mu {
                    continue;
                }
                let num = big_n + r * r;
                if num % 4 != 0 || num / 4 > trunc {
                    continue;
                }
                let have = s.coeff(num / 4 * DQ, r * DZ);
                if &have != c {
                    return Err(SjError::NotThetaDecomposable(format!(
                        "c({}, {r}) = {have} but c_{mu}({big_n}) = {c}",
                        num / 4
                    )));
                }
            }
        }
    }
    let h = [0usize, 1].map(|mu| {
        let prec = 6 * (4 * trunc - (mu * mu) as i64);
        let mut q = QSeries::zero(prec);
        for (big_n, c) in &cm[mu] {
            q.set(6 * big_n, c.clone());
        }
        q
    });
    Ok(ThetaDecomposition { h, weight2: s.weight2 - 1 })
}

/// `h₀ θ_{1,0} + h₁ θ_{1,1}` through `q^{trunc}`.
pub fn theta_reconstruct(d: &ThetaDecomposition, trunc: i64) -> FourierJacobiSeries {
    let mut acc = FourierJacobiSeries::zero(d.weight2 + 1, Rational64::one(), trunc * DQ);
    for mu in 0..2 {
        let t = theta_1mu(mu as i64, trunc + 1);
        acc = acc.add(&t.mul_q(&d.h[mu], d.weight2));
    }
    acc.truncate(trunc * DQ).with_weight_index(d.weight2 + 1, Rational64::one())
}

/// `h(τ) = h₀(4τ) + h₁(4τ) = Σ_N c(N) q^N`.
pub fn ez_correspond(s: &FourierJacobiSeries) -> Result<QSeries> {
    let d = theta_decompose(s)?;
    Ok(d.h[0].rescale(4).add(&d.h[1].rescale(4)))
}

/// Discrepancies of the compatibility between `L + 2(1-2k)G₂` and the Serre
/// derivative under the correspondence, in units of `4π²`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SerreCompat {
    /// With `G₂` on the modular side read as `4 G₂(4τ)`.
    pub transported: String,
    /// With `G₂(τ)` on the modular side, as displayed.
    pub literal: String,
    /// Exponent range compared, in whole powers of `q`.
    pub through: i64,
}

impl SerreCompat {
    pub fn transported_is_zero(&self) -> bool {
        self.transported == "0"
    }
}

/// Compare `ez((L + 2(1-2k)G₂) s)` with `-2πi(∂/∂τ - (i(k-½)/2π) G₂*) ez(s)`.
///
/// With `G₂ = 4π² g`, `L = 4π² heat_on_series` and `-2πi ∂/∂τ = 4π² q d/dq` every
/// term carries the factor `4π²`, so the comparison is exact.
pub fn serre_compat_check(s: &FourierJacobiSeries, k: i64, trunc: i64) -> Result<SerreCompat> {
    if trunc > s.trunc() {
        return Err(SjError::TruncationTooSmall(format!("series known through q^{}, asked for {trunc}", s.trunc())));
    }
    let s = s.truncate(trunc * DQ);
    let g = g2_over_4pi2(trunc)?;
    let c = rat(2 * (1 - 2 * k));
    let jac = heat_on_series(&s)?.add(&s.mul_q(&g, 4).scale(&c).with_weight_index(s.weight2 + 4, s.index));
    let lhs = ez_correspond(&jac.with_weight_index(s.weight2 + 4, s.index))?;
    let h = ez_correspond(&s)?;
    let dh = h.q_derivative();
    let g4 = g.rescale(4).scale(&rat(4));
    let kh = rat_frac(2 * k - 1, 2);
    let transported = dh.sub(&g4.mul(&h).scale(&kh));
    let literal = dh.sub(&g.mul(&h).scale(&kh));
    let through = (lhs.prec.min(transported.prec)).div_euclid(DQ);
    let cut = through * DQ;
    let d1 = lhs.truncate(cut).max_abs_diff(&transported.truncate(cut));
    let d2 = lhs.truncate(cut).max_abs_diff(&literal.truncate(cut));
    Ok(SerreCompat { transported: d1.to_string(), literal: d2.to_string(), through })
}

/// Exact difference of `ez(heat(s))` and `q d/dq ez(s)`.
pub fn heat_ez_discrepancy(s: &FourierJacobiSeries) -> Result<BigRational> {
    let a = ez_correspond(&heat_on_series(s)?)?;
    let b = ez_correspond(s)?.q_derivative();
    let cut = a.prec.min(b.prec);
    Ok(a.truncate(cut).max_abs_diff(&b.truncate(cut)))
}

/// Whether every exponent `N` of `h` satisfies `N ≡ 0, 3 (mod 4)`.
pub fn ez_support_ok(h: &QSeries) -> bool {
    h.coeffs.keys().all(|n| n % DQ == 0 && matches!((n / DQ).rem_euclid(4), 0 | 3))
}
