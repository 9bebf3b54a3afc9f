//! Finite-difference oracle for complexified partial derivatives.

use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::space::{value_at, Dir, SiegelJacobiPoint, SmoothMap, C64};

/// A finite-difference value with an error estimate from step halving.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FdEstimate {
    pub value: C64,
    pub err: f64,
}

/// Base step per derivative order, scaled by `1 + |coordinate|`.
pub const FD_BASE_STEP: [f64; 5] = [1e-4, 1e-4, 2e-3, 5e-3, 1e-2];

const MIN_STEP: f64 = 1e-8;

/// A real coordinate direction `(dZ, dW)` with unit size.
#[derive(Clone)]
struct RealDir {
    dz: Mat<C64>,
    dw: Mat<C64>,
}

fn real_dirs(x: &SiegelJacobiPoint, d: Dir) -> [(RealDir, C64); 2] {
    let (n, m) = (x.n, x.m);
    let half = 0.5;
    let mk = |imag: bool| -> RealDir {
        let unit = if imag { C64::new(0.0, 1.0) } else { C64::new(1.0, 0.0) };
        let mut dz = Mat::czeros(n, n);
        let mut dw = Mat::czeros(m, n);
        match d {
            Dir::Z(i, j) | Dir::Zb(i, j) => {
                dz.set(i, j, unit);
                dz.set(j, i, unit);
            }
            Dir::W(r, s) | Dir::Wb(r, s) => dw.set(r, s, unit),
        }
        RealDir { dz, dw }
    };
    let sgn = match d {
        Dir::Z(..) | Dir::W(..) => -1.0,
        Dir::Zb(..) | Dir::Wb(..) => 1.0,
    };
    [(mk(false), C64::new(half, 0.0)), (mk(true), C64::new(0.0, sgn * half))]
}

fn mixed_central(f: &dyn SmoothMap, x: &SiegelJacobiPoint, dirs: &[(RealDir, C64)], h: f64) -> Result<C64> {
    let k = dirs.len();
    let mut acc = C64::new(0.0, 0.0);
    for signs in 0..(1u32 << k) {
        let mut z = x.z.clone();
        let mut w = x.w.clone();
        let mut parity = 1.0;
        for (b, (d, _)) in dirs.iter().enumerate() {
            let s = if signs >> b & 1 == 1 { -1.0 } else { 1.0 };
            parity *= s;
            z = z.add(&d.dz.scale(C64::new(s * h, 0.0)));
            w = w.add(&d.dw.scale(C64::new(s * h, 0.0)));
        }
        let p = SiegelJacobiPoint::new(z, w)?;
        acc += value_at(f, &p)? * parity;
    }
    Ok(acc / (2.0 * h).powi(k as i32))
}

fn wirtinger(f: &dyn SmoothMap, x: &SiegelJacobiPoint, dirs: &[Dir], h: f64) -> Result<C64> {
    let k = dirs.len();
    let parts: Vec<[(RealDir, C64); 2]> = dirs.iter().map(|&d| real_dirs(x, d)).collect();
    let mut acc = C64::new(0.0, 0.0);
    for choice in 0..(1u32 << k) {
        let mut coef = C64::new(1.0, 0.0);
        let mut sel = Vec::with_capacity(k);
        for (b, p) in parts.iter().enumerate() {
            let (d, c) = &p[(choice >> b & 1) as usize];
            coef *= c;
            sel.push((d.clone(), *c));
        }
        acc += coef * mixed_central(f, x, &sel, h)?;
    }
    Ok(acc)
}

/// Mixed partial of `f` along `dirs` at `x` by central differences with one
/// Richardson step. `order` must equal `dirs.len()` and be at most 4.
pub fn fd_oracle(f: &dyn SmoothMap, x: &SiegelJacobiPoint, dirs: &[Dir], order: usize) -> Result<FdEstimate> {
    if order > 4 || order != dirs.len() {
        return Err(SjError::DimensionMismatch(format!(
            "order {order} with {} directions (at most 4)",
            dirs.len()
        )));
    }
    let scale = 1.0 + dirs.iter().map(|&d| x.coord(d).norm()).fold(0.0, f64::max);
    fd_oracle_with_step(f, x, dirs, FD_BASE_STEP[order] * scale)
}

/// As [`fd_oracle`] with an explicit coarse step `h`; the fine step is `h / 2`.
pub fn fd_oracle_with_step(f: &dyn SmoothMap, x: &SiegelJacobiPoint, dirs: &[Dir], h: f64) -> Result<FdEstimate> {
    if dirs.is_empty() {
        return Ok(FdEstimate { value: value_at(f, x)?, err: 0.0 });
    }
    if h / 2.0 < MIN_STEP {
        return Err(SjError::StepUnderflow(h / 2.0));
    }
    let d1 = wirtinger(f, x, dirs, h)?;
    let d2 = wirtinger(f, x, dirs, h / 2.0)?;
    Ok(FdEstimate { value: (d2 * 4.0 - d1) / 3.0, err: (d2 - d1).norm() / 3.0 })
}
