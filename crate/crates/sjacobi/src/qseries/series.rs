//! Exact truncated expansions in `q^{1/24}` and `ζ^{1/2}`.

use crate::error::{Result, SjError};
use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

/// Denominator of every `q` exponent.
pub const DQ: i64 = 24;
/// Denominator of every `ζ` exponent.
pub const DZ: i64 = 2;
/// Precision of an exact (finite) expansion.
pub const EXACT: i64 = i64::MAX / 8;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn prec_add(p: i64, v: i64) -> i64 {
    if p >= EXACT {
        EXACT
    } else {
        p + v
    }
}

/// `Σ a(n) q^{n/24}`, exact for `n ≤ prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    pub coeffs: BTreeMap<i64, BigRational>,
    pub prec: i64,
}

impl QSeries {
    pub fn zero(prec: i64) -> Self {
        QSeries { coeffs: BTreeMap::new(), prec }
    }

    pub fn one(prec: i64) -> Self {
        QSeries::monomial(0, rat(1), prec)
    }

    pub fn monomial(n: i64, c: BigRational, prec: i64) -> Self {
        let mut s = QSeries::zero(prec);
        s.set(n, c);
        s
    }

    /// Integer-exponent series `Σ a_j q^j` with `a_j` given for `j = 0..`, exact through `q^{trunc}`.
    pub fn from_integer_coeffs(a: &[BigRational], trunc: i64) -> Self {
        let mut s = QSeries::zero(trunc * DQ);
        for (j, c) in a.iter().enumerate() {
            s.set(j as i64 * DQ, c.clone());
        }
        s
    }

    pub fn coeff(&self, n: i64) -> BigRational {
        self.coeffs.get(&n).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of `q^e` for an integer exponent `e`.
    pub fn coeff_int(&self, e: i64) -> BigRational {
        self.coeff(e * DQ)
    }

    pub fn set(&mut self, n: i64, c: BigRational) {
        if c.is_zero() || n > self.prec {
            self.coeffs.remove(&n);
        } else {
            self.coeffs.insert(n, c);
        }
    }

    fn add_to(&mut self, n: i64, c: &BigRational) {
        if n > self.prec {
            return;
        }
        let e = self.coeffs.entry(n).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&n);
        }
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        QSeries { coeffs: self.coeffs.range(..=prec).map(|(k, v)| (*k, v.clone())).collect(), prec }
    }

    pub fn add(&self, o: &QSeries) -> QSeries {
        let mut s = self.truncate(o.prec);
        for (n, c) in o.coeffs.range(..=s.prec) {
            s.add_to(*n, c);
        }
        s
    }

    pub fn neg(&self) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|(k, v)| (*k, -v)).collect(), prec: self.prec }
    }

    pub fn sub(&self, o: &QSeries) -> QSeries {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> QSeries {
        if c.is_zero() {
            return QSeries::zero(self.prec);
        }
        QSeries { coeffs: self.coeffs.iter().map(|(k, v)| (*k, v * c)).collect(), prec: self.prec }
    }

    /// Multiply by `q^{n/24}`.
    pub fn shift(&self, n: i64) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|(k, v)| (k + n, v.clone())).collect(), prec: prec_add(self.prec, n) }
    }

    /// Precision of a product with a series of valuation `v2` and precision `p2`.
    fn product_prec(&self, o: &QSeries) -> i64 {
        let v1 = self.valuation().unwrap_or(0);
        let v2 = o.valuation().unwrap_or(0);
        prec_add(self.prec, v2).min(prec_add(o.prec, v1))
    }

    pub fn mul(&self, o: &QSeries) -> QSeries {
        let prec = self.product_prec(o);
        let mut s = QSeries::zero(prec);
        for (n1, c1) in &self.coeffs {
            for (n2, c2) in &o.coeffs {
                if n1 + n2 > prec {
                    break;
                }
                s.add_to(n1 + n2, &(c1 * c2));
            }
        }
        s
    }

    /// `1 / self`; the result is exact up to `prec - 2 v`.
    pub fn inverse(&self) -> Result<QSeries> {
        let v = self.valuation().ok_or_else(|| SjError::TruncationTooSmall("inverse of zero series".into()))?;
        if self.prec >= EXACT {
            return Err(SjError::TruncationTooSmall("inverse of an exact series needs a precision".into()));
        }
        let lead = self.coeff(v);
        let inv_lead = BigRational::one() / &lead;
        let rel = self.prec - v;
        let mut b: Vec<BigRational> = Vec::with_capacity(rel as usize + 1);
        let tail: Vec<(i64, BigRational)> = self.coeffs.iter().skip(1).map(|(k, c)| (k - v, c.clone())).collect();
        for e in 0..=rel {
            if e == 0 {
                b.push(inv_lead.clone());
                continue;
            }
            let mut acc = BigRational::zero();
            for (d, c) in &tail {
                if *d > e {
                    break;
                }
                let prev = &b[(e - d) as usize];
                if !prev.is_zero() {
                    acc += c * prev;
                }
            }
            b.push(-acc * &inv_lead);
        }
        let mut s = QSeries::zero(rel - v);
        for (e, c) in b.into_iter().enumerate() {
            s.set(e as i64 - v, c);
        }
        Ok(s)
    }

    pub fn div(&self, o: &QSeries) -> Result<QSeries> {
        Ok(self.mul(&o.inverse()?))
    }

    /// `q ↦ q^k`.
    pub fn rescale(&self, k: i64) -> QSeries {
        QSeries { coeffs: self.coeffs.iter().map(|(n, c)| (n * k, c.clone())).collect(), prec: if self.prec >= EXACT { EXACT } else { self.prec * k } }
    }

    /// `q d/dq`: `a(n) ↦ (n/24) a(n)`.
    pub fn q_derivative(&self) -> QSeries {
        let mut s = QSeries::zero(self.prec);
        for (n, c) in &self.coeffs {
            s.set(*n, c * rat_frac(*n, DQ));
        }
        s
    }

    /// Largest coefficient difference in absolute value over the common range.
    pub fn max_abs_diff(&self, o: &QSeries) -> BigRational {
        let d = self.sub(o);
        d.coeffs.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }
}

/// `Σ c(n, r) q^{n/24} ζ^{r/2}` of weight `weight2 / 2` and index `index`, exact for `n ≤ prec`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FourierJacobiSeries {
    pub weight2: i64,
    pub index: Rational64,
    pub coeffs: BTreeMap<(i64, i64), BigRational>,
    pub prec: i64,
}

impl FourierJacobiSeries {
    pub fn zero(weight2: i64, index: Rational64, prec: i64) -> Self {
        FourierJacobiSeries { weight2, index, coeffs: BTreeMap::new(), prec }
    }

    pub fn monomial(n: i64, r: i64, c: BigRational, prec: i64) -> Self {
        let mut s = FourierJacobiSeries::zero(0, Rational64::zero(), prec);
        s.set(n, r, c);
        s
    }

    /// `Σ a(n) q^{n/24}` regarded as a series constant in `ζ`.
    pub fn from_q(q: &QSeries, weight2: i64) -> Self {
        let mut s = FourierJacobiSeries::zero(weight2, Rational64::zero(), q.prec);
        for (n, c) in &q.coeffs {
            s.set(*n, 0, c.clone());
        }
        s
    }

    /// Weight as a rational number.
    pub fn weight(&self) -> Rational64 {
        Rational64::new(self.weight2, 2)
    }

    pub fn with_weight_index(mut self, weight2: i64, index: Rational64) -> Self {
        self.weight2 = weight2;
        self.index = index;
        self
    }

    pub fn coeff(&self, n: i64, r: i64) -> BigRational {
        self.coeffs.get(&(n, r)).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, n: i64, r: i64, c: BigRational) {
        if c.is_zero() || n > self.prec {
            self.coeffs.remove(&(n, r));
        } else {
            self.coeffs.insert((n, r), c);
        }
    }

    fn add_to(&mut self, n: i64, r: i64, c: &BigRational) {
        if n > self.prec {
            return;
        }
        let e = self.coeffs.entry((n, r)).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.coeffs.remove(&(n, r));
        }
    }

    pub fn valuation(&self) -> Option<i64> {
        self.coeffs.keys().map(|k| k.0).min()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, prec: i64) -> Self {
        let prec = prec.min(self.prec);
        let coeffs = self.coeffs.iter().filter(|(k, _)| k.0 <= prec).map(|(k, v)| (*k, v.clone())).collect();
        FourierJacobiSeries { weight2: self.weight2, index: self.index, coeffs, prec }
    }

    /// Sum; weight and index are taken from `self`.
    pub fn add(&self, o: &FourierJacobiSeries) -> Self {
        let mut s = self.truncate(o.prec);
        for ((n, r), c) in &o.coeffs {
            s.add_to(*n, *r, c);
        }
        s
    }

    pub fn neg(&self) -> Self {
        let mut s = self.clone();
        for v in s.coeffs.values_mut() {
            *v = -v.clone();
        }
        s
    }

    pub fn sub(&self, o: &FourierJacobiSeries) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        let mut s = FourierJacobiSeries::zero(self.weight2, self.index, self.prec);
        if c.is_zero() {
            return s;
        }
        for (k, v) in &self.coeffs {
            s.coeffs.insert(*k, v * c);
        }
        s
    }

    /// Product; weights and indices add.
    pub fn mul(&self, o: &FourierJacobiSeries) -> Self {
        let v1 = self.valuation().unwrap_or(0);
        let v2 = o.valuation().unwrap_or(0);
        let prec = prec_add(self.prec, v2).min(prec_add(o.prec, v1));
        let mut s = FourierJacobiSeries::zero(self.weight2 + o.weight2, self.index + o.index, prec);
        let by_n = o.slices();
        for ((n1, r1), c1) in &self.coeffs {
            for (n2, terms) in by_n.range(..=(prec - n1)) {
                for (r2, c2) in terms {
                    s.add_to(n1 + n2, r1 + r2, &(c1 * c2));
                }
            }
        }
        s
    }

    /// Product with a `ζ`-free series of the given weight.
    pub fn mul_q(&self, q: &QSeries, weight2: i64) -> Self {
        self.mul(&FourierJacobiSeries::from_q(q, weight2))
    }

    pub fn div_q(&self, q: &QSeries, weight2: i64) -> Result<Self> {
        Ok(self.mul_q(&q.inverse()?, -weight2))
    }

    /// Coefficients grouped by `q` exponent.
    pub fn slices(&self) -> BTreeMap<i64, Vec<(i64, BigRational)>> {
        let mut m: BTreeMap<i64, Vec<(i64, BigRational)>> = BTreeMap::new();
        for ((n, r), c) in &self.coeffs {
            m.entry(*n).or_default().push((*r, c.clone()));
        }
        m
    }

    /// Specialization `ζ = 1`.
    pub fn at_zeta_one(&self) -> QSeries {
        let mut q = QSeries::zero(self.prec);
        for ((n, _), c) in &self.coeffs {
            q.add_to(*n, c);
        }
        q
    }

    /// Largest coefficient difference in absolute value over the common range.
    pub fn max_abs_diff(&self, o: &FourierJacobiSeries) -> BigRational {
        let d = self.sub(o);
        d.coeffs.values().map(|c| c.abs()).max().unwrap_or_else(BigRational::zero)
    }

    /// `q` truncation order in whole powers of `q`.
    pub fn trunc(&self) -> i64 {
        self.prec.div_euclid(DQ)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_of_geometric() {
        let s = QSeries::from_integer_coeffs(&[rat(1), rat(-1)], 10);
        let inv = s.inverse().unwrap();
        for j in 0..=10 {
            assert_eq!(inv.coeff_int(j), rat(1));
        }
        assert_eq!(s.mul(&inv).truncate(10 * DQ), QSeries::one(10 * DQ));
    }

    #[test]
    fn add_then_subtract_is_identity() {
        let a = FourierJacobiSeries::monomial(24, 2, rat(3), 240).add(&FourierJacobiSeries::monomial(0, -2, rat_frac(1, 7), 240));
        let b = FourierJacobiSeries::monomial(24, 2, rat(-5), 240);
        assert_eq!(a.add(&b).sub(&b), a);
    }
}
