//! Analytic test functions `poly * exp(Tr(PZ) + Tr(Q^t W) + Tr(P' Zbar) + Tr(Q'^t Wbar))`.

use crate::calculus::jet::Jet;
use crate::error::Result;
use crate::matrix::{Mat, Scalar};
use crate::space::{Coords, Layout, SmoothMap, C64};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Exponential-polynomial test function.
///
/// The polynomial prefactor has total degree at most two in the layout
/// coordinates: `c0 + sum lin_v x_v + sum quad_(u,v) x_u x_v`.
#[derive(Clone, Debug)]
pub struct ExpPolyTestFunction {
    pub n: usize,
    pub m: usize,
    pub p: Mat<C64>,
    pub q: Mat<C64>,
    pub pb: Mat<C64>,
    pub qb: Mat<C64>,
    pub c0: C64,
    pub lin: Vec<(usize, C64)>,
    pub quad: Vec<(usize, usize, C64)>,
}

fn sym(a: Mat<C64>) -> Mat<C64> {
    let n = a.rows;
    Mat::from_fn(n, n, |i, j| (a.get(i, j) + a.get(j, i)) * 0.5)
}

fn rc<R: Rng>(rng: &mut R, s: f64) -> C64 {
    C64::new(rng.gen_range(-s..s), rng.gen_range(-s..s))
}

impl ExpPolyTestFunction {
    /// Pure polynomial with zero exponent.
    pub fn polynomial(n: usize, m: usize, c0: C64, lin: Vec<(usize, C64)>, quad: Vec<(usize, usize, C64)>) -> Self {
        ExpPolyTestFunction {
            n,
            m,
            p: Mat::czeros(n, n),
            q: Mat::czeros(m, n),
            pb: Mat::czeros(n, n),
            qb: Mat::czeros(m, n),
            c0,
            lin,
            quad,
        }
    }

    /// Pure exponential `exp(Tr(PZ) + Tr(Q^t W))`.
    pub fn exponential(p: Mat<C64>, q: Mat<C64>) -> Self {
        let (n, m) = (p.rows, q.rows);
        ExpPolyTestFunction {
            n,
            m,
            p: sym(p),
            q,
            pb: Mat::czeros(n, n),
            qb: Mat::czeros(m, n),
            c0: C64::new(1.0, 0.0),
            lin: Vec::new(),
            quad: Vec::new(),
        }
    }

    /// Random instance with entries of modest size.
    pub fn random(n: usize, m: usize, seed: u64, holomorphic: bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = Layout::new(n, m);
        let allowed: Vec<usize> = (0..l.nvars())
            .filter(|&v| !holomorphic || v < l.nz() || (v >= 2 * l.nz() && v < 2 * l.nz() + l.nw()))
            .collect();
        let p = sym(Mat::from_fn(n, n, |_, _| rc(&mut rng, 0.4)));
        let q = Mat::from_fn(m, n, |_, _| rc(&mut rng, 0.6));
        let (pb, qb) = if holomorphic {
            (Mat::czeros(n, n), Mat::czeros(m, n))
        } else {
            (sym(Mat::from_fn(n, n, |_, _| rc(&mut rng, 0.3))), Mat::from_fn(m, n, |_, _| rc(&mut rng, 0.4)))
        };
        let c0 = C64::new(1.0, 0.0) + rc(&mut rng, 0.3);
        let lin = (0..3).map(|_| (allowed[rng.gen_range(0..allowed.len())], rc(&mut rng, 0.5))).collect();
        let quad = (0..3)
            .map(|_| {
                (
                    allowed[rng.gen_range(0..allowed.len())],
                    allowed[rng.gen_range(0..allowed.len())],
                    rc(&mut rng, 0.3),
                )
            })
            .collect();
        ExpPolyTestFunction { n, m, p, q, pb, qb, c0, lin, quad }
    }

    fn exponent(&self, c: &Coords) -> Jet {
        let n = self.n;
        let mut e = c.z.get(0, 0).zero();
        for i in 0..n {
            for j in 0..n {
                e = e.add(&c.z.get(j, i).scale(*self.p.get(i, j)));
                e = e.add(&c.zb.get(j, i).scale(*self.pb.get(i, j)));
            }
        }
        for r in 0..self.m {
            for s in 0..n {
                e = e.add(&c.w.get(r, s).scale(*self.q.get(r, s)));
                e = e.add(&c.wb.get(r, s).scale(*self.qb.get(r, s)));
            }
        }
        e
    }

    fn poly(&self, c: &Coords) -> Jet {
        let mut p = c.z.get(0, 0).one_like().scale(self.c0);
        for &(v, a) in &self.lin {
            p = p.add(&c.by_var(v).scale(a));
        }
        for &(u, v, a) in &self.quad {
            p = p.add(&c.by_var(u).mul(c.by_var(v)).scale(a));
        }
        p
    }
}

impl SmoothMap for ExpPolyTestFunction {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }

    fn is_holomorphic(&self) -> bool {
        let l = Layout::new(self.n, self.m);
        let anti = |v: usize| (l.nz()..2 * l.nz()).contains(&v) || v >= 2 * l.nz() + l.nw();
        self.pb.max_abs() == 0.0
            && self.qb.max_abs() == 0.0
            && !self.lin.iter().any(|&(v, a)| anti(v) && a.norm() > 0.0)
            && !self.quad.iter().any(|&(u, v, a)| (anti(u) || anti(v)) && a.norm() > 0.0)
    }

    fn eval(&self, c: &Coords) -> Result<Jet> {
        Ok(self.poly(c).mul(&self.exponent(c).exp_jet()))
    }
}
