//! Symmetrized matrix gradients and closed-form derivative identities.

use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::space::{jet_at, Layout, SiegelJacobiPoint, SmoothMap, WeightIndex, C64};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// `dF/dZ` (off-diagonal entries halved), `dF/dW` as an `n x m` matrix with entry
/// `(j, i)` equal to `dF/dw_ij`, and their conjugate counterparts.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGradient {
    pub dz: Mat<C64>,
    pub dw: Mat<C64>,
    pub dzbar: Mat<C64>,
    pub dwbar: Mat<C64>,
}

/// Weight of the symmetric coordinate `z_kl` inside the `dF/dZ` matrix entry.
pub fn zfactor(k: usize, l: usize) -> f64 {
    if k == l {
        1.0
    } else {
        0.5
    }
}

impl MatrixGradient {
    /// Read the first-order Taylor coefficients of `j`.
    pub fn from_jet(j: &Jet, l: &Layout) -> Self {
        let first = |v: usize| j.partial(&[v]);
        let (n, m) = (l.n, l.m);
        MatrixGradient {
            dz: Mat::from_fn(n, n, |k, q| first(l.z_var(k, q)) * zfactor(k, q)),
            dw: Mat::from_fn(n, m, |s, r| first(l.w_var(r, s))),
            dzbar: Mat::from_fn(n, n, |k, q| first(l.zb_var(k, q)) * zfactor(k, q)),
            dwbar: Mat::from_fn(n, m, |s, r| first(l.wb_var(r, s))),
        }
    }
}

/// Symmetrized gradient of `f` at `x`.
pub fn grad(f: &dyn SmoothMap, x: &SiegelJacobiPoint) -> Result<MatrixGradient> {
    let j = jet_at(f, x, 1)?;
    Ok(MatrixGradient::from_jet(&j, &x.layout()))
}

fn rmat(m: &Mat<f64>) -> Mat<C64> {
    m.to_complex()
}

/// `dTr(M V R V^t)/dW = -i R V^t M`.
pub fn grad_trace_mvrv_w(x: &SiegelJacobiPoint, mm: &Mat<f64>) -> Mat<C64> {
    rmat(&x.r.matmul(&x.v.transpose()).matmul(mm)).scale(-I)
}

/// A four-index array `T[a][b][c][d]` with all indices in `0..n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor4 {
    pub n: usize,
    pub data: Vec<C64>,
}

impl Tensor4 {
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> C64 {
        let n = self.n;
        self.data[((a * n + b) * n + c) * n + d]
    }
}

/// `dR_st/dz_kl` stored at `[s][t][k][l]`, the derivative taken with respect to
/// the single coordinate `z_kl = z_lk`.
pub fn grad_r_z(x: &SiegelJacobiPoint) -> Tensor4 {
    let n = x.n;
    let r = |a: usize, b: usize| *x.r.get(a, b);
    let mut data = Vec::with_capacity(n.pow(4));
    for s in 0..n {
        for t in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let d = if k == l { 1 } else { 0 };
                    let f = 2f64.powi(-d - 1);
                    data.push(I * f * (r(k, t) * r(s, l) + r(k, s) * r(t, l)));
                }
            }
        }
    }
    Tensor4 { n, data }
}

/// `dTr(M V R V^t)/dZ = (i/2) R V^t M V R`.
pub fn grad_trace_mvrv_z(x: &SiegelJacobiPoint, mm: &Mat<f64>) -> Mat<C64> {
    let a = x.r.matmul(&x.v.transpose()).matmul(mm).matmul(&x.v).matmul(&x.r);
    rmat(&a).scale(I * 0.5)
}

/// `d det(Y)/dZ = -(i/2) det(Y) R`.
pub fn grad_det_y_z(x: &SiegelJacobiPoint) -> Mat<C64> {
    rmat(&x.r).scale(-I * 0.5 * x.y.det())
}

/// Second-order kernel of `f h1` with `h1 = exp(-4 pi Tr(M V R V^t))`, divided by `h1`.
///
/// Entry `(k, l)` is the `(w_jk, w_il)` second derivative of `f h1` over `h1`;
/// `i`, `j` are zero-based rows of `W`.
pub fn hessian_w_kernel(
    f: &dyn SmoothMap,
    x: &SiegelJacobiPoint,
    wi: &WeightIndex,
    i: usize,
    j: usize,
) -> Result<Mat<C64>> {
    let m = x.m;
    if i >= m || j >= m {
        return Err(SjError::IndexOutOfRange { index: i.max(j) + 1, max: m });
    }
    let l = x.layout();
    let jet = jet_at(f, x, 2)?;
    let mm = wi.index_f64();
    let mvr = mm.matmul(&x.v).matmul(&x.r);
    let f0 = jet.value();
    let n = x.n;
    Ok(Mat::from_fn(n, n, |k, q| {
        let a = l.w_var(j, k);
        let b = l.w_var(i, q);
        let fjk = jet.partial(&[a]);
        let fil = jet.partial(&[b]);
        let p_il = *mvr.get(i, q);
        let p_jk = *mvr.get(j, k);
        jet.partial(&[a, b]) + I * 4.0 * PI * p_il * fjk + I * 4.0 * PI * p_jk * fil
            - f0 * 16.0 * PI * PI * p_il * p_jk
            + f0 * 2.0 * PI * mm.get(i, j) * x.r.get(k, q)
    }))
}

/// Residual of `Tr(sum M*_ij d^2f/dW_i dW_j S) = |M| Tr(d/dW M^{-1} (df/dW)^t S)`
/// for a random symmetric probe `S`.
pub fn cofactor_trace_identity_check(
    f: &dyn SmoothMap,
    x: &SiegelJacobiPoint,
    wi: &WeightIndex,
    seed: u64,
) -> Result<f64> {
    let det = wi.det_index();
    let detf = *det.numer() as f64 / *det.denom() as f64;
    if detf.abs() < 1e-12 || det.is_zero() {
        return Err(SjError::SingularIndex(detf.abs()));
    }
    let (n, m) = (x.n, x.m);
    let l = x.layout();
    let jet = jet_at(f, x, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Mat::czeros(n, n);
    for a in 0..n {
        for b in a..n {
            let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            s.set(a, b, v);
            s.set(b, a, v);
        }
    }
    let cof = wi.cofactor().map(|r| *r.numer() as f64 / *r.denom() as f64);
    let minv = wi.index_f64().inverse();
    let d2 = |r1: usize, c1: usize, r2: usize, c2: usize| jet.partial(&[l.w_var(r1, c1), l.w_var(r2, c2)]);
    let lhs_mat = Mat::from_fn(n, n, |k, q| {
        let mut acc = C64::zero();
        for i in 0..m {
            for j in 0..m {
                acc += d2(i, k, j, q) * cof.get(i, j);
            }
        }
        acc
    });
    let rhs_mat = Mat::from_fn(n, n, |k, q| {
        let mut acc = C64::zero();
        for a in 0..m {
            for b in 0..m {
                acc += d2(a, k, b, q) * minv.get(a, b);
            }
        }
        acc * detf
    });
    let lhs = lhs_mat.matmul(&s).trace();
    let rhs = rhs_mat.matmul(&s).trace();
    Ok((lhs - rhs).norm())
}
