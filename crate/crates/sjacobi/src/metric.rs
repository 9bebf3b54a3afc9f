//! The invariant metric, its inverse, and the Levi-Civita connection.
//!
//! Coordinates are the complexified list `(Z_I, Zbar_I, W_I', Wbar_I')` of
//! [`Layout`]. The metric is the symmetric matrix `G` with
//! `ds^2 = x^t G x`; Christoffel symbols follow the convention
//! `D(dx^K) = sum_{I,J} Gamma^K_{IJ} dx^I dx^J` with
//! `Gamma^K_{IJ} = 1/2 sum_L G^{KL} (d_J G_{IL} + d_I G_{JL} - d_L G_{IJ})`.

use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::matrix::{Mat, Scalar};
use crate::parallel::map_indexed;
use crate::space::{cotangent_transforms, Coords, Dir, JacobiGroupElement, Layout, SiegelJacobiPoint, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::fmt::Write as _;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// The two positive constants of the metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricParams {
    pub a: f64,
    pub b: f64,
}

impl MetricParams {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(SjError::Config(format!("metric parameters must be positive, got A={a}, B={b}")));
        }
        Ok(MetricParams { a, b })
    }
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { a: 1.0, b: 1.0 }
    }
}

/// Index sets `Omega` (pairs `i <= j`) and `Omega'` (all `(i', j')`), row-major.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexSets {
    pub layout: Layout,
}

impl IndexSets {
    pub fn new(n: usize, m: usize) -> Self {
        IndexSets { layout: Layout::new(n, m) }
    }

    pub fn omega(&self) -> Vec<(usize, usize)> {
        self.layout.omega()
    }

    pub fn omega_prime(&self) -> Vec<(usize, usize)> {
        self.layout.omega_prime()
    }

    /// `1` iff `Z_pa` and `Z_rs` are the same coordinate.
    pub fn sigma(p: usize, a: usize, r: usize, s: usize) -> bool {
        (p == r && a == s) || (p == s && a == r)
    }

    /// `2^{-delta(i,j)}`.
    pub fn half_if_diag(i: usize, j: usize) -> f64 {
        if i == j {
            0.5
        } else {
            1.0
        }
    }

    /// Label of coordinate `v`, e.g. `Z12`, `Wb21` (one-based).
    pub fn label(&self, v: usize) -> String {
        match self.layout.dir(v) {
            Dir::Z(i, j) => format!("Z{}{}", i + 1, j + 1),
            Dir::Zb(i, j) => format!("Zb{}{}", i + 1, j + 1),
            Dir::W(r, s) => format!("W{}{}", r + 1, s + 1),
            Dir::Wb(r, s) => format!("Wb{}{}", r + 1, s + 1),
        }
    }
}

/// Blocks `W1` (`Omega x Omega`), `W2` (`Omega x Omega'`), `W3` (`Omega' x Omega'`)
/// of a matrix with the pattern `[[0,W1,0,W2],[W1,0,W2,0],[0,W2^t,0,W3],[W2^t,0,W3,0]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricBlocks<T> {
    pub w1: Mat<T>,
    pub w2: Mat<T>,
    pub w3: Mat<T>,
}

impl<T: Scalar> MetricBlocks<T> {
    /// The full `2(|Omega|+|Omega'|)` square matrix.
    pub fn full(&self) -> Mat<T> {
        let nz = self.w1.rows;
        let nw = self.w3.rows;
        let zero = self.w1.data[0].zero_like();
        let n = 2 * (nz + nw);
        Mat::from_fn(n, n, |a, b| {
            let blk = |x: usize| if x < nz { 0 } else if x < 2 * nz { 1 } else if x < 2 * nz + nw { 2 } else { 3 };
            let loc = |x: usize| match blk(x) {
                0 => x,
                1 => x - nz,
                2 => x - 2 * nz,
                _ => x - 2 * nz - nw,
            };
            let (ba, bb) = (blk(a), blk(b));
            let (la, lb) = (loc(a), loc(b));
            match (ba, bb) {
                (0, 1) | (1, 0) => self.w1.get(la, lb).clone(),
                (0, 3) | (1, 2) => self.w2.get(la, lb).clone(),
                (3, 0) | (2, 1) => self.w2.get(lb, la).clone(),
                (2, 3) | (3, 2) => self.w3.get(la, lb).clone(),
                _ => zero.clone(),
            }
        })
    }
}

fn k<T: Scalar>(proto: &T, x: f64) -> T {
    proto.one_like().scale(C64::new(x, 0.0))
}

/// Metric blocks over generic scalars from `Y`, `V`, `R = Y^{-1}`.
pub fn blocks_generic<T: Scalar>(y: &Mat<T>, v: &Mat<T>, r: &Mat<T>, p: &MetricParams) -> MetricBlocks<T> {
    let (n, m) = (y.rows, v.rows);
    let sets = IndexSets::new(n, m);
    let om = sets.omega();
    let omp = sets.omega_prime();
    let proto = &y.data[0];
    let rr = |a: usize, b: usize| r.get(a, b);
    // P = R V^t V R
    let pm = r.matmul(&v.transpose()).matmul(v).matmul(r);
    let w1 = Mat::from_fn(om.len(), om.len(), |x, z| {
        let (i, j) = om[x];
        let (rr_, s) = om[z];
        let f = IndexSets::half_if_diag(i, j) * IndexSets::half_if_diag(rr_, s);
        let a_part = rr(i, rr_).mul(rr(j, s)).add(&rr(j, rr_).mul(rr(i, s))).scale(C64::new(p.a * f, 0.0));
        let b_part = pm
            .get(s, i)
            .mul(rr(j, rr_))
            .add(&pm.get(s, j).mul(rr(i, rr_)))
            .add(&pm.get(rr_, i).mul(rr(j, s)))
            .add(&pm.get(rr_, j).mul(rr(i, s)))
            .scale(C64::new(p.b * 0.5 * f, 0.0));
        a_part.add(&b_part)
    });
    let vr = v.matmul(r);
    let w2 = Mat::from_fn(om.len(), omp.len(), |x, z| {
        let (i, j) = om[x];
        let (rp, sp) = omp[z];
        let f = IndexSets::half_if_diag(i, j);
        vr.get(rp, i)
            .mul(rr(j, sp))
            .add(&vr.get(rp, j).mul(rr(i, sp)))
            .scale(C64::new(-p.b * 0.5 * f, 0.0))
    });
    let w3 = Mat::from_fn(omp.len(), omp.len(), |x, z| {
        let (ip, jp) = omp[x];
        let (rp, sp) = omp[z];
        if ip == rp {
            rr(jp, sp).scale(C64::new(0.5 * p.b, 0.0))
        } else {
            proto.zero_like()
        }
    });
    MetricBlocks { w1, w2, w3 }
}

/// Closed-form inverse blocks over generic scalars.
pub fn inverse_generic<T: Scalar>(y: &Mat<T>, v: &Mat<T>, r: &Mat<T>, p: &MetricParams) -> MetricBlocks<T> {
    let (n, m) = (y.rows, v.rows);
    let sets = IndexSets::new(n, m);
    let om = sets.omega();
    let omp = sets.omega_prime();
    let proto = &y.data[0];
    let ia = 1.0 / p.a;
    let m1 = Mat::from_fn(om.len(), om.len(), |x, z| {
        let (i, j) = om[x];
        let (r_, s) = om[z];
        y.get(i, r_).mul(y.get(j, s)).add(&y.get(j, r_).mul(y.get(i, s))).scale(C64::new(ia, 0.0))
    });
    let m2 = Mat::from_fn(om.len(), omp.len(), |x, z| {
        let (i, j) = om[x];
        let (rp, sp) = omp[z];
        v.get(rp, i).mul(y.get(j, sp)).add(&v.get(rp, j).mul(y.get(i, sp))).scale(C64::new(ia, 0.0))
    });
    let vrv = v.matmul(r).matmul(&v.transpose());
    let m3 = Mat::from_fn(omp.len(), omp.len(), |x, z| {
        let (pp, qp) = omp[x];
        let (rp, sp) = omp[z];
        let mut t = vrv
            .get(pp, rp)
            .mul(y.get(qp, sp))
            .add(&v.get(pp, sp).mul(v.get(rp, qp)))
            .scale(C64::new(ia, 0.0));
        if pp == rp {
            t = t.add(&y.get(qp, sp).mul(&k(proto, 2.0 / p.b)));
        }
        t
    });
    MetricBlocks { w1: m1, w2: m2, w3: m3 }
}

/// Metric blocks at a point.
pub fn metric_blocks(x: &SiegelJacobiPoint, p: &MetricParams) -> MetricBlocks<f64> {
    blocks_generic(&x.y, &x.v, &x.r, p)
}

/// Closed-form inverse blocks at a point.
pub fn metric_inverse_closed(x: &SiegelJacobiPoint, p: &MetricParams) -> MetricBlocks<f64> {
    inverse_generic(&x.y, &x.v, &x.r, p)
}

/// Metric blocks as first-order jets in the complexified coordinates.
pub fn metric_blocks_jet(x: &SiegelJacobiPoint, p: &MetricParams) -> MetricBlocks<Jet> {
    let c = Coords::identity(x, 1);
    let y = c.y();
    let v = c.v();
    let r = y.inverse();
    blocks_generic(&y, &v, &r, p)
}

/// `ds^2` by the trace formula, for independent complexified displacements.
pub fn ds2(
    x: &SiegelJacobiPoint,
    p: &MetricParams,
    dz: &Mat<C64>,
    dzb: &Mat<C64>,
    dw: &Mat<C64>,
    dwb: &Mat<C64>,
) -> C64 {
    let r = x.r.to_complex();
    let v = x.v.to_complex();
    let rvvr = r.matmul(&v.transpose()).matmul(&v).matmul(&r);
    let a = r.matmul(dz).matmul(&r).matmul(dzb).trace() * p.a;
    let b1 = rvvr.matmul(dz).matmul(&r).matmul(dzb).trace();
    let b2 = r.matmul(&dw.transpose()).matmul(dwb).trace();
    let b3 = v.matmul(&r).matmul(dz).matmul(&r).matmul(&dwb.transpose()).trace();
    let b4 = v.matmul(&r).matmul(dzb).matmul(&r).matmul(&dw.transpose()).trace();
    a + (b1 + b2 - b3 - b4) * p.b
}

/// Coordinates of a displacement in layout order.
pub fn displacement_vector(l: &Layout, dz: &Mat<C64>, dzb: &Mat<C64>, dw: &Mat<C64>, dwb: &Mat<C64>) -> Vec<C64> {
    let mut out = Vec::with_capacity(l.nvars());
    for (i, j) in l.omega() {
        out.push(*dz.get(i, j));
    }
    for (i, j) in l.omega() {
        out.push(*dzb.get(i, j));
    }
    for (r, s) in l.omega_prime() {
        out.push(*dw.get(r, s));
    }
    for (r, s) in l.omega_prime() {
        out.push(*dwb.get(r, s));
    }
    out
}

/// `x^t G x`.
pub fn quadratic_form(g: &Mat<f64>, x: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for a in 0..g.rows {
        for b in 0..g.cols {
            acc += x[a] * x[b] * g.get(a, b);
        }
    }
    acc
}

/// Random symmetric complex matrix with entries in the unit box.
pub fn random_sym<R: Rng>(n: usize, rng: &mut R) -> Mat<C64> {
    let mut a = Mat::czeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    a
}

pub fn random_rect<R: Rng>(m: usize, n: usize, rng: &mut R) -> Mat<C64> {
    Mat::from_fn(m, n, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Christoffel symbols stored sparsely by `(K, I, J)` with `I <= J`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionData {
    pub layout: Layout,
    pub entries: BTreeMap<(usize, usize, usize), C64>,
}

impl ConnectionData {
    pub fn new(layout: Layout) -> Self {
        ConnectionData { layout, entries: BTreeMap::new() }
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> C64 {
        let key = if i <= j { (k, i, j) } else { (k, j, i) };
        self.entries.get(&key).copied().unwrap_or(C64::new(0.0, 0.0))
    }

    pub fn set(&mut self, k: usize, i: usize, j: usize, v: C64) {
        let key = if i <= j { (k, i, j) } else { (k, j, i) };
        if v.re != 0.0 || v.im != 0.0 {
            self.entries.insert(key, v);
        } else {
            self.entries.remove(&key);
        }
    }

    /// Max-norm distance over the union of stored keys.
    pub fn max_diff(&self, o: &ConnectionData) -> f64 {
        let mut d: f64 = 0.0;
        for (&(k, i, j), v) in &self.entries {
            d = d.max((v - o.get(k, i, j)).norm());
        }
        for (&(k, i, j), v) in &o.entries {
            d = d.max((v - self.get(k, i, j)).norm());
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Entries whose magnitude exceeds `tol`.
    pub fn significant(&self, tol: f64) -> Vec<((usize, usize, usize), C64)> {
        self.entries.iter().filter(|(_, v)| v.norm() > tol).map(|(k, v)| (*k, *v)).collect()
    }

    /// CSV rows `K_index,I_index,J_index,re,im`, zero-based layout indices.
    pub fn to_csv(&self, tol: f64) -> String {
        let mut s = String::from("K_index,I_index,J_index,re,im\n");
        for ((k, i, j), v) in self.significant(tol) {
            let _ = writeln!(s, "{k},{i},{j},{:.17e},{:.17e}", v.re, v.im);
        }
        s
    }
}

/// Christoffel symbols from the metric, with exact metric partials.
pub fn christoffel_numeric(x: &SiegelJacobiPoint, p: &MetricParams) -> ConnectionData {
    christoffel_numeric_with(x, p, true)
}

pub fn christoffel_numeric_with(x: &SiegelJacobiPoint, p: &MetricParams, parallel: bool) -> ConnectionData {
    let l = x.layout();
    let nv = l.nvars();
    let gj = metric_blocks_jet(x, p).full();
    let g = gj.map(|j| j.value());
    let ginv = g.inverse();
    // dg[L] = d G / d x^L
    let dg: Vec<Mat<C64>> = (0..nv).map(|v| gj.map(|j| j.partial(&[v]))).collect();
    let rows = map_indexed(nv, parallel, |kk| {
        let mut out = Vec::new();
        for i in 0..nv {
            for j in i..nv {
                let mut acc = C64::new(0.0, 0.0);
                for ll in 0..nv {
                    let gi = *ginv.get(kk, ll);
                    if gi == C64::new(0.0, 0.0) {
                        continue;
                    }
                    acc += gi * (dg[j].get(i, ll) + dg[i].get(j, ll) - dg[ll].get(i, j));
                }
                out.push((i, j, acc * 0.5));
            }
        }
        out
    });
    let mut cd = ConnectionData::new(l);
    for (kk, row) in rows.into_iter().enumerate() {
        for (i, j, v) in row {
            cd.set(kk, i, j, v);
        }
    }
    cd
}

/// Basis displacement `(dZ, dW)` for a holomorphic coordinate.
fn holo_basis(l: &Layout, d: Dir) -> (Mat<C64>, Mat<C64>) {
    let mut dz = Mat::czeros(l.n, l.n);
    let mut dw = Mat::czeros(l.m, l.n);
    let one = C64::new(1.0, 0.0);
    match d {
        Dir::Z(i, j) => {
            dz.set(i, j, one);
            dz.set(j, i, one);
        }
        Dir::W(r, s) => dw.set(r, s, one),
        _ => unreachable!("holomorphic coordinate expected"),
    }
    (dz, dw)
}

/// Bilinear forms `(B_Z, B_W)` with `D(dZ) = B_Z(x, x)` and `D(dW) = B_W(x, x)`.
pub struct ClosedConnection {
    r: Mat<C64>,
    v: Mat<C64>,
    pz: Mat<C64>,
    pw: Mat<C64>,
    coef: C64,
}

impl ClosedConnection {
    pub fn new(x: &SiegelJacobiPoint, p: &MetricParams) -> Self {
        let r = x.r.to_complex();
        let v = x.v.to_complex();
        let rvvr = r.matmul(&v.transpose()).matmul(&v).matmul(&r);
        let pz = r.scale(C64::new(2.0 * p.a / p.b, 0.0)).add(&rvvr);
        ClosedConnection { r, v, pz, pw: rvvr, coef: I * (p.b / (2.0 * p.a)) }
    }

    fn core(&self, top: &Mat<C64>, x: (&Mat<C64>, &Mat<C64>), y: (&Mat<C64>, &Mat<C64>)) -> Mat<C64> {
        let (dz, dw) = x;
        let (dz2, dw2) = y;
        let rvt = self.r.matmul(&self.v.transpose());
        let vr = self.v.matmul(&self.r);
        dz.matmul(top)
            .matmul(dz2)
            .sub(&dz.matmul(&rvt).matmul(dw2))
            .sub(&dw.transpose().matmul(&vr).matmul(dz2))
            .add(&dw.transpose().matmul(dw2))
    }

    pub fn bz(&self, x: (&Mat<C64>, &Mat<C64>), y: (&Mat<C64>, &Mat<C64>)) -> Mat<C64> {
        self.core(&self.pz, x, y).scale(self.coef)
    }

    pub fn bw(&self, x: (&Mat<C64>, &Mat<C64>), y: (&Mat<C64>, &Mat<C64>)) -> Mat<C64> {
        let vr = self.v.matmul(&self.r);
        vr.matmul(&self.core(&self.pw, x, y))
            .scale(self.coef)
            .add(&x.1.matmul(&self.r).matmul(y.0).scale(I))
    }
}

/// Christoffel symbols read off the closed-form connection.
///
/// Antiholomorphic components are filled in by conjugation; mixed ones are zero.
pub fn connection_closed(x: &SiegelJacobiPoint, p: &MetricParams) -> ConnectionData {
    let l = x.layout();
    let cc = ClosedConnection::new(x, p);
    let holo: Vec<usize> = (0..l.nvars())
        .filter(|&v| matches!(l.dir(v), Dir::Z(..) | Dir::W(..)))
        .collect();
    let conj_var = |v: usize| match l.dir(v) {
        Dir::Z(i, j) => l.zb_var(i, j),
        Dir::W(r, s) => l.wb_var(r, s),
        _ => unreachable!(),
    };
    let mut cd = ConnectionData::new(l);
    for (a, &vi) in holo.iter().enumerate() {
        for &vj in &holo[a..] {
            let ei = holo_basis(&l, l.dir(vi));
            let ej = holo_basis(&l, l.dir(vj));
            let z = cc.bz((&ei.0, &ei.1), (&ej.0, &ej.1)).add(&cc.bz((&ej.0, &ej.1), (&ei.0, &ei.1)));
            let w = cc.bw((&ei.0, &ei.1), (&ej.0, &ej.1)).add(&cc.bw((&ej.0, &ej.1), (&ei.0, &ei.1)));
            for &vk in &holo {
                let val = match l.dir(vk) {
                    Dir::Z(pp, q) => *z.get(pp, q),
                    Dir::W(r, s) => *w.get(r, s),
                    _ => unreachable!(),
                } * 0.5;
                cd.set(vk, vi, vj, val);
                cd.set(conj_var(vk), conj_var(vi), conj_var(vj), val.conj());
            }
        }
    }
    cd
}

/// `max |d_L G_IJ - sum_K (Gamma^K_{LI} G_KJ + Gamma^K_{LJ} G_IK)|`.
pub fn metric_compatibility_residual(x: &SiegelJacobiPoint, p: &MetricParams, gamma: &ConnectionData) -> f64 {
    let l = x.layout();
    let nv = l.nvars();
    let gj = metric_blocks_jet(x, p).full();
    let g = gj.map(|j| j.value());
    let mut worst: f64 = 0.0;
    for ll in 0..nv {
        for i in 0..nv {
            for j in 0..nv {
                let mut acc = gj.get(i, j).partial(&[ll]);
                for kk in 0..nv {
                    acc -= gamma.get(kk, ll, i) * g.get(kk, j) + gamma.get(kk, ll, j) * g.get(i, kk);
                }
                worst = worst.max(acc.norm());
            }
        }
    }
    worst
}

/// Pull `ds^2` back through `g` on a random complexified frame and compare.
pub fn metric_invariance_residual(
    x: &SiegelJacobiPoint,
    g: &JacobiGroupElement,
    p: &MetricParams,
    seed: u64,
) -> Result<f64> {
    let gx = crate::space::act(g, x)?;
    let ct = cotangent_transforms(g, x)?;
    let ctb = crate::space::CotangentMap { p: ct.p.conj(), q: ct.q.conj() };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..8 {
        let dz = random_sym(x.n, &mut rng);
        let dzb = random_sym(x.n, &mut rng);
        let dw = random_rect(x.m, x.n, &mut rng);
        let dwb = random_rect(x.m, x.n, &mut rng);
        let (gdz, gdw) = ct.apply(&dz, &dw);
        let (gdzb, gdwb) = ctb.apply(&dzb, &dwb);
        let a = ds2(&gx, p, &gdz, &gdzb, &gdw, &gdwb);
        let b = ds2(x, p, &dz, &dzb, &dw, &dwb);
        worst = worst.max((a - b).norm() / (1.0 + b.norm()));
    }
    Ok(worst)
}

/// Christoffel symbol table as CSV, for the CLI.
pub fn christoffel_csv(x: &SiegelJacobiPoint, p: &MetricParams, closed: bool) -> String {
    let cd = if closed { connection_closed(x, p) } else { christoffel_numeric(x, p) };
    cd.to_csv(1e-14 * (1.0 + cd.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_one_metric_entries() {
        let x = SiegelJacobiPoint::scalar(C64::new(0.2, 1.5), C64::new(0.1, 0.4)).unwrap();
        let p = MetricParams::new(2.0, 3.0).unwrap();
        let g = metric_blocks(&x, &p).full();
        let (y, v) = (1.5, 0.4);
        assert!((g.get(0, 1) - (2.0 / (2.0 * y * y) + 3.0 * v * v / (2.0 * y * y * y))).abs() < 1e-14);
        assert!((g.get(0, 3) + 3.0 * v / (2.0 * y * y)).abs() < 1e-14);
        assert!((g.get(2, 3) - 3.0 / (2.0 * y)).abs() < 1e-14);
    }
}
