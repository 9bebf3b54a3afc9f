//! The Siegel-Jacobi space, the Jacobi group, its action, and the slash action.

use crate::calculus::jet::{jet_space, Jet};
use crate::error::{Result, SjError};
use crate::matrix::{Mat, Scalar};
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

pub type C64 = Complex64;

pub(crate) fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Numerical thresholds used when validating points and group actions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpaceTolerances {
    pub sym: f64,
    pub pd: f64,
    pub sing: f64,
}

impl Default for SpaceTolerances {
    fn default() -> Self {
        SpaceTolerances { sym: 1e-12, pd: 1e-10, sing: 1e-12 }
    }
}

/// Ordering of the complexified coordinates `(Z_I, Zbar_I, W_I', Wbar_I')`.
///
/// `I` runs over pairs `i <= j` in row-major order, `I'` over all `(r, s)` with
/// `r < m`, `s < n`, row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub n: usize,
    pub m: usize,
}

impl Layout {
    pub fn new(n: usize, m: usize) -> Self {
        Layout { n, m }
    }

    pub fn nz(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn nw(&self) -> usize {
        self.m * self.n
    }

    pub fn nvars(&self) -> usize {
        2 * (self.nz() + self.nw())
    }

    pub fn omega(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.nz());
        for i in 0..self.n {
            for j in i..self.n {
                v.push((i, j));
            }
        }
        v
    }

    pub fn omega_prime(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::with_capacity(self.nw());
        for r in 0..self.m {
            for s in 0..self.n {
                v.push((r, s));
            }
        }
        v
    }

    /// Position of the unordered pair `{i, j}` in the Omega order.
    pub fn omega_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        i * self.n - i * i.saturating_sub(1) / 2 + (j - i)
    }

    pub fn z_var(&self, i: usize, j: usize) -> usize {
        self.omega_index(i, j)
    }

    pub fn zb_var(&self, i: usize, j: usize) -> usize {
        self.nz() + self.omega_index(i, j)
    }

    pub fn w_var(&self, r: usize, s: usize) -> usize {
        2 * self.nz() + r * self.n + s
    }

    pub fn wb_var(&self, r: usize, s: usize) -> usize {
        2 * self.nz() + self.nw() + r * self.n + s
    }

    pub fn var(&self, d: Dir) -> usize {
        match d {
            Dir::Z(i, j) => self.z_var(i, j),
            Dir::Zb(i, j) => self.zb_var(i, j),
            Dir::W(r, s) => self.w_var(r, s),
            Dir::Wb(r, s) => self.wb_var(r, s),
        }
    }

    /// Inverse of [`Layout::var`].
    pub fn dir(&self, v: usize) -> Dir {
        let nz = self.nz();
        let nw = self.nw();
        let om = self.omega();
        if v < nz {
            Dir::Z(om[v].0, om[v].1)
        } else if v < 2 * nz {
            Dir::Zb(om[v - nz].0, om[v - nz].1)
        } else if v < 2 * nz + nw {
            let k = v - 2 * nz;
            Dir::W(k / self.n, k % self.n)
        } else {
            let k = v - 2 * nz - nw;
            Dir::Wb(k / self.n, k % self.n)
        }
    }
}

/// A complexified coordinate direction. `Z(i, j)` is the single coordinate
/// `z_ij = z_ji`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    Z(usize, usize),
    Zb(usize, usize),
    W(usize, usize),
    Wb(usize, usize),
}

/// A point `(Z, W)` with cached `Y = Im Z`, `V = Im W` and `R = Y^{-1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct SiegelJacobiPoint {
    pub n: usize,
    pub m: usize,
    pub z: Mat<C64>,
    pub w: Mat<C64>,
    pub y: Mat<f64>,
    pub v: Mat<f64>,
    pub r: Mat<f64>,
}

fn min_eigenvalue(y: &Mat<f64>) -> f64 {
    let n = y.rows;
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (y.get(i, j) + y.get(j, i)));
    let eig = nalgebra::SymmetricEigen::new(dm);
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn sym_eigenvalues(y: &Mat<f64>) -> Vec<f64> {
    let n = y.rows;
    let dm = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (y.get(i, j) + y.get(j, i)));
    let mut v: Vec<f64> = nalgebra::SymmetricEigen::new(dm).eigenvalues.iter().cloned().collect();
    v.sort_by(f64::total_cmp);
    v
}

impl SiegelJacobiPoint {
    pub fn new(z: Mat<C64>, w: Mat<C64>) -> Result<Self> {
        Self::new_with(z, w, &SpaceTolerances::default())
    }

    /// Validate and symmetrize. `w` is `m x n`.
    pub fn new_with(z: Mat<C64>, w: Mat<C64>, tol: &SpaceTolerances) -> Result<Self> {
        let n = z.rows;
        if z.cols != n || n == 0 {
            return Err(SjError::DimensionMismatch(format!("Z is {}x{}", z.rows, z.cols)));
        }
        if w.cols != n || w.rows == 0 {
            return Err(SjError::DimensionMismatch(format!(
                "W is {}x{}, expected m x {}",
                w.rows, w.cols, n
            )));
        }
        let m = w.rows;
        let asym = crate::matrix::max_diff(&z, &z.transpose());
        if asym >= tol.sym {
            return Err(SjError::NotSymmetric(asym));
        }
        let z = Mat::from_fn(n, n, |i, j| (z.get(i, j) + z.get(j, i)) * 0.5);
        let y = z.im();
        let lmin = min_eigenvalue(&y);
        if !(lmin > tol.pd) {
            return Err(SjError::NotPositiveDefinite(lmin));
        }
        let r = y.inverse();
        let v = w.im();
        Ok(SiegelJacobiPoint { n, m, z, w, y, v, r })
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.n, self.m)
    }

    /// Degree-one convenience constructor.
    pub fn scalar(z: C64, w: C64) -> Result<Self> {
        Self::new(Mat::from_vec(1, 1, vec![z]), Mat::from_vec(1, 1, vec![w]))
    }

    /// Value of coordinate `d`.
    pub fn coord(&self, d: Dir) -> C64 {
        match d {
            Dir::Z(i, j) => *self.z.get(i, j),
            Dir::Zb(i, j) => self.z.get(i, j).conj(),
            Dir::W(r, s) => *self.w.get(r, s),
            Dir::Wb(r, s) => self.w.get(r, s).conj(),
        }
    }

    /// Identity check `R Y = I` in max-norm.
    pub fn ry_residual(&self) -> f64 {
        let p = self.r.matmul(&self.y);
        p.sub(&Mat::ridentity(self.n)).max_abs()
    }

    pub fn to_json(&self) -> PointJson {
        let nested = |m: &Mat<f64>| -> Vec<Vec<f64>> {
            (0..m.rows).map(|i| (0..m.cols).map(|j| *m.get(i, j)).collect()).collect()
        };
        PointJson {
            n: self.n,
            m: self.m,
            z_re: nested(&self.z.re()),
            z_im: nested(&self.z.im()),
            w_re: nested(&self.w.re()),
            w_im: nested(&self.w.im()),
        }
    }

    pub fn from_json(p: &PointJson) -> Result<Self> {
        let z = complex_from_nested(&p.z_re, &p.z_im, p.n, p.n)?;
        let w = complex_from_nested(&p.w_re, &p.w_im, p.m, p.n)?;
        Self::new(z, w)
    }
}

fn real_from_nested(a: &[Vec<f64>], rows: usize, cols: usize) -> Result<Mat<f64>> {
    if a.len() != rows || a.iter().any(|r| r.len() != cols) {
        return Err(SjError::DimensionMismatch(format!("expected a {rows}x{cols} array")));
    }
    Ok(Mat::from_fn(rows, cols, |i, j| a[i][j]))
}

fn complex_from_nested(re: &[Vec<f64>], im: &[Vec<f64>], rows: usize, cols: usize) -> Result<Mat<C64>> {
    let re = real_from_nested(re, rows, cols)?;
    let im = real_from_nested(im, rows, cols)?;
    Ok(Mat::from_fn(rows, cols, |i, j| c(*re.get(i, j), *im.get(i, j))))
}

fn nested(m: &Mat<f64>) -> Vec<Vec<f64>> {
    (0..m.rows).map(|i| (0..m.cols).map(|j| *m.get(i, j)).collect()).collect()
}

/// JSON form of a point, row-major nested arrays.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PointJson {
    pub n: usize,
    pub m: usize,
    #[serde(rename = "Z_re")]
    pub z_re: Vec<Vec<f64>>,
    #[serde(rename = "Z_im")]
    pub z_im: Vec<Vec<f64>>,
    #[serde(rename = "W_re")]
    pub w_re: Vec<Vec<f64>>,
    #[serde(rename = "W_im")]
    pub w_im: Vec<Vec<f64>>,
}

/// JSON form of a group element.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct GroupJson {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "B")]
    pub b: Vec<Vec<f64>>,
    #[serde(rename = "C")]
    pub c: Vec<Vec<f64>>,
    #[serde(rename = "D")]
    pub d: Vec<Vec<f64>>,
    pub lambda: Vec<Vec<f64>>,
    pub mu: Vec<Vec<f64>>,
    pub kappa: Vec<Vec<f64>>,
}

/// A symplectic block matrix `(A B; C D)` with Heisenberg data `(lambda, mu; kappa)`.
///
/// Acts by `(Z, W) -> ((AZ+B)(CZ+D)^{-1}, (W + lambda Z + mu)(CZ+D)^{-1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct JacobiGroupElement {
    pub n: usize,
    pub m: usize,
    pub a: Mat<f64>,
    pub b: Mat<f64>,
    pub c: Mat<f64>,
    pub d: Mat<f64>,
    pub lambda: Mat<f64>,
    pub mu: Mat<f64>,
    pub kappa: Mat<f64>,
}

impl JacobiGroupElement {
    pub fn identity(n: usize, m: usize) -> Self {
        JacobiGroupElement {
            n,
            m,
            a: Mat::ridentity(n),
            b: Mat::rzeros(n, n),
            c: Mat::rzeros(n, n),
            d: Mat::ridentity(n),
            lambda: Mat::rzeros(m, n),
            mu: Mat::rzeros(m, n),
            kappa: Mat::rzeros(m, m),
        }
    }

    /// Symplectic part `(A B; C D)` with trivial Heisenberg data.
    pub fn symplectic(a: Mat<f64>, b: Mat<f64>, c: Mat<f64>, d: Mat<f64>, m: usize) -> Self {
        let n = a.rows;
        JacobiGroupElement {
            n,
            m,
            a,
            b,
            c,
            d,
            lambda: Mat::rzeros(m, n),
            mu: Mat::rzeros(m, n),
            kappa: Mat::rzeros(m, m),
        }
    }

    /// Pure Heisenberg element.
    pub fn heisenberg(lambda: Mat<f64>, mu: Mat<f64>, kappa: Mat<f64>) -> Self {
        let (m, n) = (lambda.rows, lambda.cols);
        let mut g = Self::identity(n, m);
        g.lambda = lambda;
        g.mu = mu;
        g.kappa = kappa;
        g
    }

    /// Degree-one element `((a b; c d), (lambda, mu; kappa))`.
    pub fn sl2(a: f64, b: f64, cc: f64, d: f64, lambda: f64, mu: f64, kappa: f64) -> Self {
        let one = |x: f64| Mat::from_vec(1, 1, vec![x]);
        JacobiGroupElement {
            n: 1,
            m: 1,
            a: one(a),
            b: one(b),
            c: one(cc),
            d: one(d),
            lambda: one(lambda),
            mu: one(mu),
            kappa: one(kappa),
        }
    }

    /// `(I S; 0 I)`.
    pub fn translation(s: Mat<f64>, m: usize) -> Self {
        let n = s.rows;
        Self::symplectic(Mat::ridentity(n), s, Mat::rzeros(n, n), Mat::ridentity(n), m)
    }

    /// `(0 -I; I 0)`.
    pub fn inversion(n: usize, m: usize) -> Self {
        Self::symplectic(
            Mat::rzeros(n, n),
            Mat::ridentity(n).map(|x| -x),
            Mat::ridentity(n),
            Mat::rzeros(n, n),
            m,
        )
    }

    /// `(U 0; 0 U^{-t})`.
    pub fn rotation(u: Mat<f64>, m: usize) -> Self {
        let n = u.rows;
        let uit = u.inverse().transpose();
        Self::symplectic(u, Mat::rzeros(n, n), Mat::rzeros(n, n), uit, m)
    }

    /// The full `2n x 2n` symplectic matrix.
    pub fn sp_matrix(&self) -> Mat<f64> {
        let n = self.n;
        Mat::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
            (true, true) => *self.a.get(i, j),
            (true, false) => *self.b.get(i, j - n),
            (false, true) => *self.c.get(i - n, j),
            (false, false) => *self.d.get(i - n, j - n),
        })
    }

    /// `max |M^t J M - J|`.
    pub fn symplectic_residual(&self) -> f64 {
        let n = self.n;
        let mm = self.sp_matrix();
        let j = Mat::from_fn(2 * n, 2 * n, |i, k| {
            if i < n && k == i + n {
                1.0
            } else if i >= n && k + n == i {
                -1.0
            } else {
                0.0
            }
        });
        mm.transpose().matmul(&j).matmul(&mm).sub(&j).max_abs()
    }

    /// `max |K - K^t|` with `K = kappa + mu lambda^t`.
    pub fn heisenberg_residual(&self) -> f64 {
        let k = self.kappa.add(&self.mu.matmul(&self.lambda.transpose()));
        k.sub(&k.transpose()).max_abs()
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let s = self.symplectic_residual();
        if s > tol {
            return Err(SjError::InvalidGroupElement(format!("symplectic residual {s:e}")));
        }
        let h = self.heisenberg_residual();
        if h > tol {
            return Err(SjError::InvalidGroupElement(format!("kappa + mu lambda^t asymmetry {h:e}")));
        }
        Ok(())
    }

    /// Product `self * o`.
    pub fn compose(&self, o: &JacobiGroupElement) -> JacobiGroupElement {
        let a = self.a.matmul(&o.a).add(&self.b.matmul(&o.c));
        let b = self.a.matmul(&o.b).add(&self.b.matmul(&o.d));
        let cc = self.c.matmul(&o.a).add(&self.d.matmul(&o.c));
        let d = self.c.matmul(&o.b).add(&self.d.matmul(&o.d));
        let lt = self.lambda.matmul(&o.a).add(&self.mu.matmul(&o.c));
        let mt = self.lambda.matmul(&o.b).add(&self.mu.matmul(&o.d));
        let kappa = self
            .kappa
            .add(&o.kappa)
            .add(&lt.matmul(&o.mu.transpose()))
            .sub(&mt.matmul(&o.lambda.transpose()));
        JacobiGroupElement {
            n: self.n,
            m: self.m,
            a,
            b,
            c: cc,
            d,
            lambda: lt.add(&o.lambda),
            mu: mt.add(&o.mu),
            kappa,
        }
    }

    pub fn inverse(&self) -> JacobiGroupElement {
        let a = self.d.transpose();
        let b = self.b.transpose().map(|x| -x);
        let cc = self.c.transpose().map(|x| -x);
        let d = self.a.transpose();
        let lp = self.lambda.matmul(&a).add(&self.mu.matmul(&cc)).map(|x| -x);
        let mp = self.lambda.matmul(&b).add(&self.mu.matmul(&d)).map(|x| -x);
        let kappa = self
            .kappa
            .map(|x| -x)
            .add(&lp.matmul(&mp.transpose()))
            .sub(&mp.matmul(&lp.transpose()));
        JacobiGroupElement { n: self.n, m: self.m, a, b, c: cc, d, lambda: lp, mu: mp, kappa }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n, self.m)
    }

    pub fn to_json(&self) -> GroupJson {
        GroupJson {
            a: nested(&self.a),
            b: nested(&self.b),
            c: nested(&self.c),
            d: nested(&self.d),
            lambda: nested(&self.lambda),
            mu: nested(&self.mu),
            kappa: nested(&self.kappa),
        }
    }

    pub fn from_json(g: &GroupJson) -> Result<Self> {
        let n = g.a.len();
        let m = g.lambda.len();
        let e = JacobiGroupElement {
            n,
            m,
            a: real_from_nested(&g.a, n, n)?,
            b: real_from_nested(&g.b, n, n)?,
            c: real_from_nested(&g.c, n, n)?,
            d: real_from_nested(&g.d, n, n)?,
            lambda: real_from_nested(&g.lambda, m, n)?,
            mu: real_from_nested(&g.mu, m, n)?,
            kappa: real_from_nested(&g.kappa, m, m)?,
        };
        e.validate(1e-12)?;
        Ok(e)
    }
}

/// Scalars on which the group action and automorphy factor can be evaluated.
pub trait Analytic: Scalar {
    fn exp_a(&self) -> Self;
    fn powi_a(&self, p: i64) -> Self;
    /// The constant part (value at the base point).
    fn base(&self) -> C64;
}

impl Analytic for C64 {
    fn exp_a(&self) -> Self {
        self.exp()
    }
    fn powi_a(&self, p: i64) -> Self {
        self.powi(p as i32)
    }
    fn base(&self) -> C64 {
        *self
    }
}

impl Analytic for Jet {
    fn exp_a(&self) -> Self {
        self.exp_jet()
    }
    fn powi_a(&self, p: i64) -> Self {
        self.powi(p)
    }
    fn base(&self) -> C64 {
        self.value()
    }
}

fn lift<T: Scalar>(proto: &T, m: &Mat<f64>) -> Mat<T> {
    let one = proto.one_like();
    m.map(|&x| one.scale(c(x, 0.0)))
}

/// `CZ + D` for generic scalars.
pub fn cz_plus_d<T: Scalar>(g: &JacobiGroupElement, z: &Mat<T>) -> Mat<T> {
    let p = &z.data[0];
    lift(p, &g.c).matmul(z).add(&lift(p, &g.d))
}

/// The group action on generic scalars. Returns `(gZ, gW)`.
pub fn act_generic<T: Scalar>(g: &JacobiGroupElement, z: &Mat<T>, w: &Mat<T>) -> (Mat<T>, Mat<T>) {
    let p = &z.data[0];
    let inv = cz_plus_d(g, z).inverse();
    let gz = lift(p, &g.a).matmul(z).add(&lift(p, &g.b)).matmul(&inv);
    let gw = w
        .add(&lift(p, &g.lambda).matmul(z))
        .add(&lift(p, &g.mu))
        .matmul(&inv);
    (gz, gw)
}

/// Which form of the translation-law exponent to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TranslationLaw {
    /// `Tr(M W (CZ+D)^{-1} C W^t)` with the untranslated `W`.
    Literal,
    /// Same term with `W + lambda Z + mu` in place of `W`.
    Composite,
}

/// `(det(CZ+D), exponent)` with the factor equal to `det^k e(exponent)`.
pub fn factor_parts<T: Analytic>(
    g: &JacobiGroupElement,
    z: &Mat<T>,
    w: &Mat<T>,
    wi: &WeightIndex,
    law: TranslationLaw,
) -> (T, T) {
    let p = &z.data[0];
    let czd = cz_plus_d(g, z);
    let det = czd.det();
    let inv = czd.inverse();
    let lam = lift(p, &g.lambda);
    let mu = lift(p, &g.mu);
    let wt = match law {
        TranslationLaw::Literal => w.clone(),
        TranslationLaw::Composite => w.add(&lam.matmul(z)).add(&mu),
    };
    let t1 = wt.matmul(&inv).matmul(&lift(p, &g.c)).matmul(&wt.transpose());
    let t2 = lam
        .matmul(z)
        .matmul(&lam.transpose())
        .add(&lam.matmul(&w.transpose()).scale(c(2.0, 0.0)))
        .sub(&mu.matmul(&lam.transpose()));
    let mm = lift(p, &wi.index_f64());
    let expo = mm.matmul(&t1).trace().sub(&mm.matmul(&t2).trace());
    (det, expo)
}

/// Automorphy factor for generic scalars.
pub fn automorphy_factor_generic<T: Analytic>(
    g: &JacobiGroupElement,
    z: &Mat<T>,
    w: &Mat<T>,
    wi: &WeightIndex,
    law: TranslationLaw,
) -> T {
    let (det, expo) = factor_parts(g, z, w, wi, law);
    det.powi_a(wi.k).mul(&expo.scale(c(0.0, 2.0 * PI)).exp_a())
}

/// Logarithm of the automorphy factor, `k log det(CZ+D) + 2 pi i (exponent)`.
///
/// Defined modulo `2 pi i`; finite even where the factor itself overflows.
pub fn log_automorphy_factor(
    g: &JacobiGroupElement,
    x: &SiegelJacobiPoint,
    wi: &WeightIndex,
    law: TranslationLaw,
) -> Result<C64> {
    let d = det_cz_d(g, x).norm();
    if d < SpaceTolerances::default().sing {
        return Err(SjError::SingularFactor(d));
    }
    let (det, expo) = factor_parts(g, &x.z, &x.w, wi, law);
    Ok(det.ln() * wi.k as f64 + expo * c(0.0, 2.0 * PI))
}

/// Distance of a complex logarithm difference from `2 pi i Z`.
pub fn log_residual(a: C64) -> f64 {
    let t = 2.0 * PI;
    let im = a.im - t * (a.im / t).round();
    c(a.re, im).norm()
}

/// `det(CZ+D)` at a point.
pub fn det_cz_d(g: &JacobiGroupElement, x: &SiegelJacobiPoint) -> C64 {
    cz_plus_d(g, &x.z).det()
}

/// The action `g . x`.
pub fn act(g: &JacobiGroupElement, x: &SiegelJacobiPoint) -> Result<SiegelJacobiPoint> {
    act_with(g, x, &SpaceTolerances::default())
}

pub fn act_with(g: &JacobiGroupElement, x: &SiegelJacobiPoint, tol: &SpaceTolerances) -> Result<SiegelJacobiPoint> {
    let d = det_cz_d(g, x).norm();
    if d < tol.sing {
        return Err(SjError::SingularFactor(d));
    }
    let (gz, gw) = act_generic(g, &x.z, &x.w);
    let gz = Mat::from_fn(x.n, x.n, |i, j| (gz.get(i, j) + gz.get(j, i)) * 0.5);
    SiegelJacobiPoint::new_with(gz, gw, &SpaceTolerances { sym: f64::INFINITY, ..*tol })
}

/// The factor multiplying `f(Z, W)` in the translation law, in its displayed form.
pub fn automorphy_factor(g: &JacobiGroupElement, x: &SiegelJacobiPoint, wi: &WeightIndex) -> Result<C64> {
    automorphy_factor_with(g, x, wi, TranslationLaw::Literal)
}

pub fn automorphy_factor_with(
    g: &JacobiGroupElement,
    x: &SiegelJacobiPoint,
    wi: &WeightIndex,
    law: TranslationLaw,
) -> Result<C64> {
    let d = det_cz_d(g, x).norm();
    if d < SpaceTolerances::default().sing {
        return Err(SjError::SingularFactor(d));
    }
    Ok(automorphy_factor_generic(g, &x.z, &x.w, wi, law))
}

/// Linear maps `(dZ, dW) -> (d(gZ), d(gW))` at a point.
#[derive(Clone, Debug)]
pub struct CotangentMap {
    /// `(CZ+D)^{-1}`.
    pub p: Mat<C64>,
    /// `lambda - (W + lambda Z + mu)(CZ+D)^{-1} C`.
    pub q: Mat<C64>,
}

impl CotangentMap {
    pub fn apply(&self, dz: &Mat<C64>, dw: &Mat<C64>) -> (Mat<C64>, Mat<C64>) {
        let dz2 = self.p.transpose().matmul(dz).matmul(&self.p);
        let dw2 = dw.matmul(&self.p).add(&self.q.matmul(dz).matmul(&self.p));
        (dz2, dw2)
    }
}

pub fn cotangent_transforms(g: &JacobiGroupElement, x: &SiegelJacobiPoint) -> Result<CotangentMap> {
    let czd = cz_plus_d(g, &x.z);
    let d = czd.det().norm();
    if d < SpaceTolerances::default().sing {
        return Err(SjError::SingularFactor(d));
    }
    let p = czd.inverse();
    let lam = g.lambda.to_complex();
    let wt = x.w.add(&lam.matmul(&x.z)).add(&g.mu.to_complex());
    let q = lam.sub(&wt.matmul(&p).matmul(&g.c.to_complex()));
    Ok(CotangentMap { p, q })
}

/// Weight `k` and symmetric rational index matrix `M`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightIndex {
    pub k: i64,
    pub index: Mat<Rational64>,
}

impl WeightIndex {
    /// Validate symmetry. Half-integrality is checked by [`WeightIndex::is_half_integral`].
    pub fn new(k: i64, index: Mat<Rational64>) -> Result<Self> {
        if index.rows != index.cols {
            return Err(SjError::InvalidIndex("index matrix must be square".into()));
        }
        for i in 0..index.rows {
            for j in 0..index.cols {
                if index.get(i, j) != index.get(j, i) {
                    return Err(SjError::InvalidIndex("index matrix must be symmetric".into()));
                }
            }
        }
        Ok(WeightIndex { k, index })
    }

    pub fn from_ints(k: i64, m: usize, entries: &[i64]) -> Self {
        let idx = Mat::from_fn(m, m, |i, j| Rational64::from_integer(entries[i * m + j]));
        WeightIndex::new(k, idx).expect("symmetric integer index")
    }

    pub fn scalar(k: i64, mval: Rational64) -> Self {
        WeightIndex { k, index: Mat::from_vec(1, 1, vec![mval]) }
    }

    pub fn scalar_int(k: i64, mval: i64) -> Self {
        Self::scalar(k, Rational64::from_integer(mval))
    }

    pub fn zero(k: i64, m: usize) -> Self {
        WeightIndex { k, index: Mat::from_fn(m, m, |_, _| Rational64::zero()) }
    }

    pub fn m(&self) -> usize {
        self.index.rows
    }

    /// `2M` integral with integral diagonal.
    pub fn is_half_integral(&self) -> bool {
        let two = Rational64::from_integer(2);
        (0..self.m()).all(|i| {
            (0..self.m()).all(|j| {
                let x = *self.index.get(i, j);
                if i == j {
                    x.is_integer()
                } else {
                    (x * two).is_integer()
                }
            })
        })
    }

    pub fn index_f64(&self) -> Mat<f64> {
        self.index.map(|r| *r.numer() as f64 / *r.denom() as f64)
    }

    pub fn det_index(&self) -> Rational64 {
        rational_det(&self.index)
    }

    /// Cofactor matrix `M*`, with `M* _{ij} = (-1)^{i+j} det(minor_{ij})`.
    pub fn cofactor(&self) -> Mat<Rational64> {
        rational_cofactor(&self.index)
    }

    /// Same index scaled by an integer.
    pub fn scale_index(&self, s: i64) -> Mat<Rational64> {
        self.index.map(|x| x * Rational64::from_integer(s))
    }
}

pub fn rational_det(a: &Mat<Rational64>) -> Rational64 {
    let n = a.rows;
    if n == 0 {
        return Rational64::one();
    }
    if n == 1 {
        return *a.get(0, 0);
    }
    let mut acc = Rational64::zero();
    for j in 0..n {
        let minor = Mat::from_fn(n - 1, n - 1, |r, s| *a.get(r + 1, if s < j { s } else { s + 1 }));
        let t = *a.get(0, j) * rational_det(&minor);
        if j % 2 == 0 {
            acc += t;
        } else {
            acc -= t;
        }
    }
    acc
}

pub fn rational_cofactor(a: &Mat<Rational64>) -> Mat<Rational64> {
    let n = a.rows;
    if n == 1 {
        return Mat::from_vec(1, 1, vec![Rational64::one()]);
    }
    Mat::from_fn(n, n, |i, j| {
        let minor = Mat::from_fn(n - 1, n - 1, |r, s| {
            *a.get(if r < i { r } else { r + 1 }, if s < j { s } else { s + 1 })
        });
        let d = rational_det(&minor);
        if (i + j) % 2 == 0 {
            d
        } else {
            -d
        }
    })
}

/// Jet-valued coordinates `(Z, Zbar, W, Wbar)`.
///
/// `base` is set when the jets are the identity coordinates at that point.
#[derive(Clone, Debug)]
pub struct Coords {
    pub z: Mat<Jet>,
    pub zb: Mat<Jet>,
    pub w: Mat<Jet>,
    pub wb: Mat<Jet>,
    pub base: Option<SiegelJacobiPoint>,
}

impl Coords {
    /// Identity coordinates at `x`, truncated at total degree `order`.
    pub fn identity(x: &SiegelJacobiPoint, order: usize) -> Self {
        let l = x.layout();
        let sp = jet_space(l.nvars(), order);
        let z = Mat::from_fn(x.n, x.n, |i, j| Jet::var(&sp, l.z_var(i, j), *x.z.get(i, j)));
        let zb = Mat::from_fn(x.n, x.n, |i, j| Jet::var(&sp, l.zb_var(i, j), x.z.get(i, j).conj()));
        let w = Mat::from_fn(x.m, x.n, |r, s| Jet::var(&sp, l.w_var(r, s), *x.w.get(r, s)));
        let wb = Mat::from_fn(x.m, x.n, |r, s| Jet::var(&sp, l.wb_var(r, s), x.w.get(r, s).conj()));
        Coords { z, zb, w, wb, base: Some(x.clone()) }
    }

    pub fn order(&self) -> usize {
        self.z.data[0].order()
    }

    pub fn n(&self) -> usize {
        self.z.rows
    }

    pub fn m(&self) -> usize {
        self.w.rows
    }

    /// The point at the center of the jets.
    pub fn base_point(&self) -> Result<SiegelJacobiPoint> {
        if let Some(b) = &self.base {
            return Ok(b.clone());
        }
        SiegelJacobiPoint::new_with(
            self.z.map(|j| j.value()),
            self.w.map(|j| j.value()),
            &SpaceTolerances { sym: 1e-8, ..Default::default() },
        )
    }

    /// Coordinate jets minus their values, in layout order.
    pub fn deltas(&self) -> Vec<Jet> {
        let n = self.n();
        let m = self.m();
        let l = Layout::new(n, m);
        let mut out = Vec::with_capacity(l.nvars());
        let strip = |j: &Jet| j.add_c(-j.value());
        for (i, jj) in l.omega() {
            out.push(strip(self.z.get(i, jj)));
        }
        for (i, jj) in l.omega() {
            out.push(strip(self.zb.get(i, jj)));
        }
        for r in 0..m {
            for s in 0..n {
                out.push(strip(self.w.get(r, s)));
            }
        }
        for r in 0..m {
            for s in 0..n {
                out.push(strip(self.wb.get(r, s)));
            }
        }
        out
    }

    /// Coordinate jet for layout variable `v`.
    pub fn by_var(&self, v: usize) -> &Jet {
        match Layout::new(self.n(), self.m()).dir(v) {
            Dir::Z(i, j) => self.z.get(i, j),
            Dir::Zb(i, j) => self.zb.get(i, j),
            Dir::W(r, s) => self.w.get(r, s),
            Dir::Wb(r, s) => self.wb.get(r, s),
        }
    }

    /// `Y = (Z - Zbar) / 2i`.
    pub fn y(&self) -> Mat<Jet> {
        self.z.sub(&self.zb).scale(c(0.0, -0.5))
    }

    /// `V = (W - Wbar) / 2i`.
    pub fn v(&self) -> Mat<Jet> {
        self.w.sub(&self.wb).scale(c(0.0, -0.5))
    }

    /// Coordinates of `g` applied to these coordinates.
    pub fn act(&self, g: &JacobiGroupElement) -> Result<Coords> {
        let d = cz_plus_d(g, &self.z.map(|j| j.value())).det().norm();
        if d < SpaceTolerances::default().sing {
            return Err(SjError::SingularFactor(d));
        }
        let (z, w) = act_generic(g, &self.z, &self.w);
        let (zb, wb) = act_generic(g, &self.zb, &self.wb);
        Ok(Coords { z, zb, w, wb, base: None })
    }
}

/// A complex function on the Siegel-Jacobi space with exact partials.
///
/// `eval` receives jet-valued coordinates and must return the jet of the
/// function composed with them; this gives every mixed partial in the
/// complexified coordinates and makes composition with the group action exact.
pub trait SmoothMap: Send + Sync {
    fn dims(&self) -> (usize, usize);
    /// Largest derivative order available; `None` means unlimited.
    fn declared_order(&self) -> Option<usize> {
        None
    }
    fn is_holomorphic(&self) -> bool {
        false
    }
    fn eval(&self, c: &Coords) -> Result<Jet>;
}

pub type Map = Arc<dyn SmoothMap>;

pub(crate) fn check_order(f: &dyn SmoothMap, need: usize) -> Result<()> {
    match f.declared_order() {
        Some(have) if have < need => Err(SjError::OrderTooLow { need, have }),
        _ => Ok(()),
    }
}

/// Jet of `f` at `x` up to total degree `order`.
pub fn jet_at(f: &dyn SmoothMap, x: &SiegelJacobiPoint, order: usize) -> Result<Jet> {
    check_order(f, order)?;
    if f.dims() != (x.n, x.m) {
        return Err(SjError::DimensionMismatch(format!(
            "map on (n,m)={:?}, point has ({}, {})",
            f.dims(),
            x.n,
            x.m
        )));
    }
    f.eval(&Coords::identity(x, order))
}

pub fn value_at(f: &dyn SmoothMap, x: &SiegelJacobiPoint) -> Result<C64> {
    Ok(jet_at(f, x, 0)?.value())
}

/// Mixed partial derivative along the given coordinate directions.
pub fn partial_at(f: &dyn SmoothMap, x: &SiegelJacobiPoint, dirs: &[Dir]) -> Result<C64> {
    let l = x.layout();
    let j = jet_at(f, x, dirs.len())?;
    let vars: Vec<usize> = dirs.iter().map(|&d| l.var(d)).collect();
    Ok(j.partial(&vars))
}

type JetClosure = dyn Fn(&Coords) -> Result<Jet> + Send + Sync;

/// A map given directly by its action on coordinate jets.
pub struct JetFn {
    pub n: usize,
    pub m: usize,
    pub holomorphic: bool,
    f: Box<JetClosure>,
}

impl SmoothMap for JetFn {
    fn dims(&self) -> (usize, usize) {
        (self.n, self.m)
    }
    fn is_holomorphic(&self) -> bool {
        self.holomorphic
    }
    fn eval(&self, c: &Coords) -> Result<Jet> {
        (self.f)(c)
    }
}

/// Wrap a closure over coordinate jets as a map.
pub fn jet_fn(
    n: usize,
    m: usize,
    holomorphic: bool,
    f: impl Fn(&Coords) -> Result<Jet> + Send + Sync + 'static,
) -> Map {
    Arc::new(JetFn { n, m, holomorphic, f: Box::new(f) })
}

/// Evaluate a map defined at identity coordinates on arbitrary coordinates by
/// Taylor composition.
pub(crate) fn eval_via_base(
    c: &Coords,
    at_identity: impl Fn(&Coords) -> Result<Jet>,
) -> Result<Jet> {
    if c.base.is_some() {
        return at_identity(c);
    }
    let x = c.base_point()?;
    let local = at_identity(&Coords::identity(&x, c.order()))?;
    if c.order() == 0 {
        return Ok(local);
    }
    Ok(local.compose(&c.deltas()))
}

/// `(f | g)(x) = J(g, x)^{-1} f(g x)`.
pub struct Slashed {
    pub f: Map,
    pub g: JacobiGroupElement,
    pub wi: WeightIndex,
    pub law: TranslationLaw,
}

impl SmoothMap for Slashed {
    fn dims(&self) -> (usize, usize) {
        self.f.dims()
    }
    fn declared_order(&self) -> Option<usize> {
        self.f.declared_order()
    }
    fn is_holomorphic(&self) -> bool {
        self.f.is_holomorphic()
    }
    fn eval(&self, c: &Coords) -> Result<Jet> {
        check_order(self.f.as_ref(), c.order())?;
        let gc = c.act(&self.g)?;
        let fv = self.f.eval(&gc)?;
        let j = automorphy_factor_generic(&self.g, &c.z, &c.w, &self.wi, self.law);
        Ok(fv.mul_jet(&j.inv_jet()))
    }
}

/// Slash action with the displayed translation law.
pub fn slash(f: Map, g: &JacobiGroupElement, wi: &WeightIndex) -> Map {
    slash_with(f, g, wi, TranslationLaw::Literal)
}

pub fn slash_with(f: Map, g: &JacobiGroupElement, wi: &WeightIndex, law: TranslationLaw) -> Map {
    Arc::new(Slashed { f, g: g.clone(), wi: wi.clone(), law })
}

/// `x -> f(g x)`.
pub fn pullback(f: Map, g: &JacobiGroupElement) -> Map {
    let (_, m) = f.dims();
    slash_with(f, g, &WeightIndex::zero(0, m), TranslationLaw::Composite)
}

/// Sampling region for random points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleBox {
    pub eig_lo: f64,
    pub eig_hi: f64,
    pub re_max: f64,
    pub w_max: f64,
}

impl Default for SampleBox {
    fn default() -> Self {
        SampleBox { eig_lo: 0.7, eig_hi: 2.5, re_max: 1.0, w_max: 0.5 }
    }
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Point with `Y = Q^t Q + eps I`.
pub fn random_point(n: usize, m: usize, seed: u64) -> SiegelJacobiPoint {
    let mut rng = rng_from_seed(seed);
    random_point_rng(n, m, &mut rng)
}

pub fn random_point_rng<R: Rng>(n: usize, m: usize, rng: &mut R) -> SiegelJacobiPoint {
    let eps = 0.5;
    let q = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let y = q.transpose().matmul(&q).add(&Mat::ridentity(n).map(|v| v * eps));
    let x = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let z = Mat::from_fn(n, n, |i, j| c(0.5 * (x.get(i, j) + x.get(j, i)), *y.get(i, j)));
    let w = Mat::from_fn(m, n, |_, _| c(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5)));
    SiegelJacobiPoint::new(z, w).expect("Q^tQ + eps I is positive definite")
}

/// Point with `Im Z` eigenvalues in `[eig_lo, eig_hi]`, `|Re Z_ij| <= re_max`,
/// `|W_ij| <= w_max`.
pub fn box_point<R: Rng>(n: usize, m: usize, rng: &mut R, b: &SampleBox) -> SiegelJacobiPoint {
    let g = Mat::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let mut o = g.clone();
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| o.get(i, j) * o.get(i, k)).sum();
            for i in 0..n {
                let v = o.get(i, j) - dot * o.get(i, k);
                o.set(i, j, v);
            }
        }
        let norm: f64 = (0..n).map(|i| o.get(i, j).powi(2)).sum::<f64>().sqrt().max(1e-300);
        for i in 0..n {
            let v = o.get(i, j) / norm;
            o.set(i, j, v);
        }
    }
    let lam: Vec<f64> = (0..n).map(|_| rng.gen_range(b.eig_lo..b.eig_hi)).collect();
    let y = Mat::from_fn(n, n, |i, j| (0..n).map(|k| o.get(i, k) * lam[k] * o.get(j, k)).sum::<f64>());
    let x = Mat::from_fn(n, n, |_, _| rng.gen_range(-b.re_max..b.re_max));
    let z = Mat::from_fn(n, n, |i, j| {
        let re = if i <= j { *x.get(i, j) } else { *x.get(j, i) };
        c(re, 0.5 * (y.get(i, j) + y.get(j, i)))
    });
    let h = b.w_max / std::f64::consts::SQRT_2;
    let w = Mat::from_fn(m, n, |_, _| c(rng.gen_range(-h..h), rng.gen_range(-h..h)));
    SiegelJacobiPoint::new(z, w).expect("box point is valid")
}

/// Integral element: a word of at most `scale` symplectic generators (capped at
/// six letters, entries bounded by 3) times a lattice Heisenberg element.
pub fn random_group_element(n: usize, m: usize, seed: u64, scale: usize) -> JacobiGroupElement {
    let mut rng = rng_from_seed(seed);
    random_group_element_rng(n, m, &mut rng, scale)
}

pub fn random_group_element_rng<R: Rng>(n: usize, m: usize, rng: &mut R, scale: usize) -> JacobiGroupElement {
    if scale == 0 {
        return JacobiGroupElement::identity(n, m);
    }
    let bound = 3i64.min(scale as i64);
    let len = rng.gen_range(1..=scale.min(6));
    let mut g = JacobiGroupElement::identity(n, m);
    for _ in 0..len {
        let letter = match rng.gen_range(0..3) {
            0 => JacobiGroupElement::inversion(n, m),
            1 if n > 1 => {
                let (i, j) = loop {
                    let i = rng.gen_range(0..n);
                    let j = rng.gen_range(0..n);
                    if i != j {
                        break (i, j);
                    }
                };
                let t = rng.gen_range(-1i64..=1) as f64;
                let u = Mat::from_fn(n, n, |a, b| {
                    if a == b {
                        1.0
                    } else if a == i && b == j {
                        t
                    } else {
                        0.0
                    }
                });
                JacobiGroupElement::rotation(u, m)
            }
            _ => {
                let mut s = Mat::rzeros(n, n);
                for i in 0..n {
                    for j in i..n {
                        let v = rng.gen_range(-bound..=bound) as f64;
                        s.set(i, j, v);
                        s.set(j, i, v);
                    }
                }
                JacobiGroupElement::translation(s, m)
            }
        };
        g = g.compose(&letter);
    }
    let lambda = Mat::from_fn(m, n, |_, _| rng.gen_range(-bound..=bound) as f64);
    let mu = Mat::from_fn(m, n, |_, _| rng.gen_range(-bound..=bound) as f64);
    let mut s = Mat::rzeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = rng.gen_range(-bound..=bound) as f64;
            s.set(i, j, v);
            s.set(j, i, v);
        }
    }
    let kappa = s.sub(&mu.matmul(&lambda.transpose()));
    g.compose(&JacobiGroupElement::heisenberg(lambda, mu, kappa))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn omega_index_is_row_major() {
        let l = Layout::new(3, 2);
        let om = l.omega();
        for (k, &(i, j)) in om.iter().enumerate() {
            assert_eq!(l.omega_index(i, j), k);
            assert_eq!(l.omega_index(j, i), k);
        }
        for v in 0..l.nvars() {
            assert_eq!(l.var(l.dir(v)), v);
        }
    }

    #[test]
    fn s_fixes_i() {
        let x = SiegelJacobiPoint::scalar(c(0.0, 1.0), c(0.3, 0.1)).unwrap();
        let s = JacobiGroupElement::sl2(0.0, -1.0, 1.0, 0.0, 0.0, 0.0, 0.0);
        let y = act(&s, &x).unwrap();
        assert!((y.z.get(0, 0) - c(0.0, 1.0)).norm() < 1e-15);
        assert!((y.w.get(0, 0) - c(0.3, 0.1) / c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn asymmetric_z_is_rejected() {
        let z = Mat::from_vec(2, 2, vec![c(0.0, 1.0), c(0.1, 0.0), c(0.2, 0.0), c(0.0, 1.0)]);
        let w = Mat::czeros(1, 2);
        assert!(matches!(SiegelJacobiPoint::new(z, w), Err(SjError::NotSymmetric(_))));
    }
}
