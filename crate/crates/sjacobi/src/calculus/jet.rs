//! Truncated multivariate Taylor polynomials ("jets") with complex coefficients.
//!
//! Monomials are stored in graded order, so a jet of order `o` is a prefix of the
//! same jet at any higher order. Binary operations truncate to the lower order.

use crate::matrix::Scalar;
use num_complex::Complex64;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

/// Monomial tables for a fixed number of variables and maximal total degree.
pub struct JetSpace {
    pub nvars: usize,
    pub order: usize,
    exps: Vec<Vec<u8>>,
    degree: Vec<u8>,
    len_by_order: Vec<usize>,
    index: HashMap<Vec<u8>, u32>,
    mul: Vec<(u32, u32, u32)>,
    deriv: Vec<Vec<(u32, u32, f64)>>,
}

fn monomials_of_degree(nvars: usize, d: usize, out: &mut Vec<Vec<u8>>) {
    fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if pos + 1 == cur.len() {
            cur[pos] = left as u8;
            out.push(cur.clone());
            return;
        }
        for e in (0..=left).rev() {
            cur[pos] = e as u8;
            rec(pos + 1, left - e, cur, out);
        }
        cur[pos] = 0;
    }
    if nvars == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return;
    }
    let mut cur = vec![0u8; nvars];
    rec(0, d, &mut cur, out);
}

impl JetSpace {
    /// Number of monomials of total degree at most `d`.
    pub fn len_upto(&self, d: usize) -> usize {
        self.len_by_order[d.min(self.order)]
    }

    fn build(nvars: usize, order: usize) -> Self {
        let mut exps = Vec::new();
        let mut len_by_order = Vec::with_capacity(order + 1);
        for d in 0..=order {
            monomials_of_degree(nvars, d, &mut exps);
            len_by_order.push(exps.len());
        }
        let degree: Vec<u8> = exps.iter().map(|e| e.iter().sum()).collect();
        let index: HashMap<Vec<u8>, u32> =
            exps.iter().enumerate().map(|(i, e)| (e.clone(), i as u32)).collect();
        let mut mul = Vec::new();
        let mut sum = vec![0u8; nvars];
        for i in 0..exps.len() {
            let di = degree[i] as usize;
            for j in 0..len_by_order[order - di] {
                for v in 0..nvars {
                    sum[v] = exps[i][v] + exps[j][v];
                }
                mul.push((i as u32, j as u32, index[&sum]));
            }
        }
        mul.sort_by_key(|&(_, _, k)| degree[k as usize]);
        let mut deriv = vec![Vec::new(); nvars];
        for (i, e) in exps.iter().enumerate() {
            for v in 0..nvars {
                if e[v] > 0 {
                    let mut f = e.clone();
                    f[v] -= 1;
                    deriv[v].push((i as u32, index[&f], e[v] as f64));
                }
            }
        }
        JetSpace { nvars, order, exps, degree, len_by_order, index, mul, deriv }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u8] {
        &self.exps[i]
    }

    pub fn index_of(&self, exps: &[u8]) -> Option<usize> {
        self.index.get(exps).map(|&i| i as usize)
    }

    pub fn degree_of(&self, i: usize) -> usize {
        self.degree[i] as usize
    }
}

/// Shared monomial tables for `(nvars, order)`.
pub fn jet_space(nvars: usize, order: usize) -> Arc<JetSpace> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<JetSpace>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(sp) = cache.lock().unwrap().get(&(nvars, order)) {
        return sp.clone();
    }
    let sp = Arc::new(JetSpace::build(nvars, order));
    cache.lock().unwrap().entry((nvars, order)).or_insert(sp).clone()
}

/// Truncated Taylor expansion around a base point in local variables.
#[derive(Clone)]
pub struct Jet {
    sp: Arc<JetSpace>,
    pub c: Vec<Complex64>,
}

impl fmt::Debug for Jet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Jet(n={}, o={}, v={})", self.sp.nvars, self.sp.order, self.c[0])
    }
}

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

fn factorial(k: usize) -> f64 {
    (1..=k).fold(1.0, |a, b| a * b as f64)
}

impl Jet {
    pub fn constant(sp: &Arc<JetSpace>, v: Complex64) -> Self {
        let mut c = vec![ZERO; sp.len()];
        c[0] = v;
        Jet { sp: sp.clone(), c }
    }

    /// The coordinate function `base + x_var`.
    pub fn var(sp: &Arc<JetSpace>, var: usize, base: Complex64) -> Self {
        let mut j = Jet::constant(sp, base);
        if sp.order >= 1 {
            let mut e = vec![0u8; sp.nvars];
            e[var] = 1;
            let i = sp.index_of(&e).expect("variable index");
            j.c[i] = Complex64::new(1.0, 0.0);
        }
        j
    }

    pub fn space(&self) -> &Arc<JetSpace> {
        &self.sp
    }

    pub fn order(&self) -> usize {
        self.sp.order
    }

    pub fn nvars(&self) -> usize {
        self.sp.nvars
    }

    pub fn value(&self) -> Complex64 {
        self.c[0]
    }

    pub fn zero(&self) -> Self {
        Jet { sp: self.sp.clone(), c: vec![ZERO; self.c.len()] }
    }

    pub fn truncate(&self, order: usize) -> Self {
        if order >= self.sp.order {
            return self.clone();
        }
        let sp = jet_space(self.sp.nvars, order);
        let c = self.c[..sp.len()].to_vec();
        Jet { sp, c }
    }

    fn lower<'a>(a: &'a Jet, b: &'a Jet) -> &'a Arc<JetSpace> {
        debug_assert_eq!(a.sp.nvars, b.sp.nvars, "jet variable count mismatch");
        if a.sp.order <= b.sp.order {
            &a.sp
        } else {
            &b.sp
        }
    }

    pub fn add_jet(&self, o: &Jet) -> Jet {
        let sp = Jet::lower(self, o).clone();
        let c = (0..sp.len()).map(|i| self.c[i] + o.c[i]).collect();
        Jet { sp, c }
    }

    pub fn sub_jet(&self, o: &Jet) -> Jet {
        let sp = Jet::lower(self, o).clone();
        let c = (0..sp.len()).map(|i| self.c[i] - o.c[i]).collect();
        Jet { sp, c }
    }

    pub fn mul_jet(&self, o: &Jet) -> Jet {
        let sp = Jet::lower(self, o).clone();
        let mut c = vec![ZERO; sp.len()];
        if self.is_constant() {
            let a = self.c[0];
            for (ci, oi) in c.iter_mut().zip(&o.c) {
                *ci = a * oi;
            }
        } else if o.is_constant() {
            let b = o.c[0];
            for (ci, si) in c.iter_mut().zip(&self.c) {
                *ci = si * b;
            }
        } else {
            let a = &self.c;
            let b = &o.c;
            for &(i, j, k) in &sp.mul {
                c[k as usize] += a[i as usize] * b[j as usize];
            }
        }
        Jet { sp, c }
    }

    fn is_constant(&self) -> bool {
        self.c[1..].iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale_c(&self, s: Complex64) -> Jet {
        Jet { sp: self.sp.clone(), c: self.c.iter().map(|z| z * s).collect() }
    }

    pub fn add_c(&self, s: Complex64) -> Jet {
        let mut j = self.clone();
        j.c[0] += s;
        j
    }

    /// `sum_k a_k t^k` where `t` is `self` minus its constant term.
    fn nilpotent_series(&self, a: &[Complex64]) -> Jet {
        let mut t = self.clone();
        t.c[0] = ZERO;
        let o = self.sp.order.min(a.len() - 1);
        let mut r = Jet::constant(&self.sp, a[o]);
        for k in (0..o).rev() {
            r = r.mul_jet(&t).add_c(a[k]);
        }
        r
    }

    pub fn inv_jet(&self) -> Jet {
        let a0 = self.c[0];
        let o = self.sp.order;
        let r = 1.0 / a0;
        let mut coef = Vec::with_capacity(o + 1);
        let mut p = r;
        for _ in 0..=o {
            coef.push(p);
            p *= -r;
        }
        self.nilpotent_series(&coef)
    }

    pub fn exp_jet(&self) -> Jet {
        let e0 = self.c[0].exp();
        let coef: Vec<Complex64> =
            (0..=self.sp.order).map(|k| e0 / factorial(k)).collect();
        self.nilpotent_series(&coef)
    }

    /// Integer power, negative exponents allowed.
    pub fn powi(&self, p: i64) -> Jet {
        let a0 = self.c[0];
        let o = self.sp.order;
        let mut coef = Vec::with_capacity(o + 1);
        let mut binom = 1.0;
        for k in 0..=o {
            coef.push(a0.powi((p - k as i64) as i32) * binom);
            binom *= (p - k as i64) as f64 / (k as f64 + 1.0);
        }
        self.nilpotent_series(&coef)
    }

    /// Partial derivative in local variable `var`; the order drops by one.
    pub fn deriv(&self, var: usize) -> Jet {
        assert!(self.sp.order >= 1, "derivative of an order-0 jet");
        let sp = jet_space(self.sp.nvars, self.sp.order - 1);
        let mut c = vec![ZERO; sp.len()];
        for &(src, dst, f) in &self.sp.deriv[var] {
            let dst = dst as usize;
            if dst < c.len() {
                c[dst] += self.c[src as usize] * f;
            }
        }
        Jet { sp, c }
    }

    /// Taylor coefficient of the monomial with exponents `e`.
    pub fn coeff(&self, e: &[u8]) -> Complex64 {
        self.sp.index_of(e).map(|i| self.c[i]).unwrap_or(ZERO)
    }

    /// Mixed partial derivative for the multiset of variables `vars`.
    pub fn partial(&self, vars: &[usize]) -> Complex64 {
        let mut e = vec![0u8; self.sp.nvars];
        for &v in vars {
            e[v] += 1;
        }
        let f: f64 = e.iter().map(|&k| factorial(k as usize)).product();
        self.coeff(&e) * f
    }

    /// Substitute `deltas` (jets without constant term) for the local variables.
    pub fn compose(&self, deltas: &[Jet]) -> Jet {
        assert_eq!(deltas.len(), self.sp.nvars, "compose arity");
        let target = deltas[0].sp.clone();
        let target = if target.order > self.sp.order {
            jet_space(target.nvars, self.sp.order)
        } else {
            target
        };
        let mut powers: Vec<Jet> = Vec::with_capacity(self.sp.len());
        let mut out = Jet::constant(&target, self.c[0]);
        powers.push(Jet::constant(&target, Complex64::new(1.0, 0.0)));
        for i in 1..self.sp.len() {
            let e = &self.sp.exps[i];
            let v = e.iter().rposition(|&k| k > 0).unwrap();
            let mut prev = e.clone();
            prev[v] -= 1;
            let pi = self.sp.index_of(&prev).unwrap();
            let p = powers[pi].mul_jet(&deltas[v]);
            if self.c[i] != ZERO {
                out = out.add_jet(&p.scale_c(self.c[i]));
            }
            powers.push(p);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

impl Scalar for Jet {
    fn add(&self, o: &Self) -> Self {
        self.add_jet(o)
    }
    fn sub(&self, o: &Self) -> Self {
        self.sub_jet(o)
    }
    fn mul(&self, o: &Self) -> Self {
        self.mul_jet(o)
    }
    fn neg(&self) -> Self {
        self.scale_c(Complex64::new(-1.0, 0.0))
    }
    fn inv(&self) -> Self {
        self.inv_jet()
    }
    fn scale(&self, c: Complex64) -> Self {
        self.scale_c(c)
    }
    fn zero_like(&self) -> Self {
        self.zero()
    }
    fn one_like(&self) -> Self {
        Jet::constant(&self.sp, Complex64::new(1.0, 0.0))
    }
    fn pivot_size(&self) -> f64 {
        self.c[0].norm()
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        self.add_jet(o)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self.sub_jet(o)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        self.mul_jet(o)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale_c(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<Complex64> for &Jet {
    type Output = Jet;
    fn mul(self, s: Complex64) -> Jet {
        self.scale_c(s)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale_c(Complex64::new(s, 0.0))
    }
}
