//! Covariant and invariant differential operators.
//!
//! Every operator output is itself a [`SmoothMap`]. It is evaluated by taking
//! the jets of its inputs `rank` orders higher than requested and forming the
//! displayed expression on jets, so the output carries exact partials of every
//! order its inputs allow.

pub mod degree1;
pub mod general;
pub mod invariant;
pub mod jacobi_m;
pub mod kernel;
pub mod registry;

pub use degree1::*;
pub use general::*;
pub use invariant::*;
pub use jacobi_m::*;
pub use kernel::*;
pub use registry::*;

use crate::calculus::jet::Jet;
use crate::calculus::lemmas::zfactor;
use crate::error::{Result, SjError};
use crate::matrix::{Mat, Scalar};
use crate::space::{eval_via_base, Coords, Layout, Map, SmoothMap, WeightIndex, C64};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

pub(crate) const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(crate) fn cr(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Jets of the coordinates and of `Y`, `V`, `Y^{-1}` at one point.
pub struct Env {
    pub l: Layout,
    pub c: Coords,
    pub y: Mat<Jet>,
    pub v: Mat<Jet>,
    pub r: Mat<Jet>,
}

impl Env {
    pub fn new(c: Coords) -> Self {
        let l = Layout::new(c.n(), c.m());
        let y = c.y();
        let v = c.v();
        let r = y.inverse();
        Env { l, c, y, v, r }
    }

    pub fn one(&self) -> Jet {
        self.c.z.get(0, 0).one_like()
    }

    pub fn cst(&self, a: C64) -> Jet {
        self.one().scale_c(a)
    }

    /// `∂F/∂Z` with halved off-diagonal entries.
    pub fn grad_z(&self, f: &Jet) -> Mat<Jet> {
        let n = self.l.n;
        Mat::from_fn(n, n, |k, q| f.deriv(self.l.z_var(k, q)).scale_c(cr(zfactor(k, q))))
    }

    pub fn grad_zb(&self, f: &Jet) -> Mat<Jet> {
        let n = self.l.n;
        Mat::from_fn(n, n, |k, q| f.deriv(self.l.zb_var(k, q)).scale_c(cr(zfactor(k, q))))
    }

    /// `∂F/∂W`, an `n x m` matrix with entry `(s, r)` equal to `∂F/∂w_rs`.
    pub fn grad_w(&self, f: &Jet) -> Mat<Jet> {
        Mat::from_fn(self.l.n, self.l.m, |s, r| f.deriv(self.l.w_var(r, s)))
    }

    pub fn grad_wb(&self, f: &Jet) -> Mat<Jet> {
        Mat::from_fn(self.l.n, self.l.m, |s, r| f.deriv(self.l.wb_var(r, s)))
    }

    /// `M` as a constant jet matrix.
    pub fn index(&self, wi: &WeightIndex) -> Mat<Jet> {
        wi.index_f64().map(|&a| self.cst(cr(a)))
    }

    pub fn det_y(&self) -> Jet {
        self.y.det()
    }
}

type Body = dyn Fn(&[Jet], &Env) -> Result<Jet> + Send + Sync;

/// The output of a differential operator applied to its operand maps.
pub struct OpMap {
    pub name: String,
    pub inputs: Vec<Map>,
    pub rank: usize,
    pub holomorphic: bool,
    dims: (usize, usize),
    body: Arc<Body>,
}

impl OpMap {
    /// Wrap `body`, which receives the input jets at `rank` extra orders.
    pub fn build(
        name: &str,
        inputs: Vec<Map>,
        rank: usize,
        holomorphic: bool,
        body: impl Fn(&[Jet], &Env) -> Result<Jet> + Send + Sync + 'static,
    ) -> Result<Map> {
        let dims = inputs[0].dims();
        for f in &inputs {
            if f.dims() != dims {
                return Err(SjError::DimensionMismatch(format!(
                    "operands on {:?} and {:?}",
                    dims,
                    f.dims()
                )));
            }
            if let Some(have) = f.declared_order() {
                if have < rank {
                    return Err(SjError::OrderTooLow { need: rank, have });
                }
            }
        }
        Ok(Arc::new(OpMap { name: name.to_string(), inputs, rank, holomorphic, dims, body: Arc::new(body) }))
    }
}

impl SmoothMap for OpMap {
    fn dims(&self) -> (usize, usize) {
        self.dims
    }

    fn declared_order(&self) -> Option<usize> {
        self.inputs.iter().filter_map(|f| f.declared_order()).min().map(|o| o - self.rank)
    }

    fn is_holomorphic(&self) -> bool {
        self.holomorphic && self.inputs.iter().all(|f| f.is_holomorphic())
    }

    fn eval(&self, c: &Coords) -> Result<Jet> {
        eval_via_base(c, |ci| {
            let o = ci.order();
            if let Some(have) = self.declared_order() {
                if have < o {
                    return Err(SjError::OrderTooLow { need: o, have });
                }
            }
            let x = ci.base_point()?;
            let full = Coords::identity(&x, o + self.rank);
            let jets = self.inputs.iter().map(|f| f.eval(&full)).collect::<Result<Vec<_>>>()?;
            let env = Env::new(full);
            Ok((self.body)(&jets, &env)?.truncate(o))
        })
    }
}

/// Output weight and index of a covariant operator as a function of the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    /// `k_out = k_scale * k + k_shift`.
    pub k_scale: i64,
    pub k_shift: i64,
    /// `M_out = index_scale * M`.
    pub index_scale: i64,
}

impl Signature {
    pub fn new(k_scale: i64, k_shift: i64, index_scale: i64) -> Self {
        Signature { k_scale, k_shift, index_scale }
    }

    pub fn apply(&self, wi: &WeightIndex) -> WeightIndex {
        WeightIndex {
            k: self.k_scale * wi.k + self.k_shift,
            index: wi.scale_index(self.index_scale),
        }
    }

    pub fn k_out(&self) -> String {
        let base = match self.k_scale {
            1 => "k".to_string(),
            s => format!("{s}k"),
        };
        match self.k_shift {
            0 => base,
            s if s > 0 => format!("{base}+{s}"),
            s => format!("{base}{s}"),
        }
    }
}

/// Determinant of the square submatrix with the given one-based columns.
pub(crate) fn select_det(a: &Mat<Jet>, cols: &[usize]) -> Jet {
    let idx: Vec<usize> = cols.iter().map(|c| c - 1).collect();
    a.select_cols(&idx).det()
}

/// Validate an `n`-subset of `1..=m` and default to all columns when `m = n`.
pub fn check_rows(n: usize, m: usize, rows: Option<&[usize]>) -> Result<Vec<usize>> {
    match rows {
        None if m == n => Ok((1..=n).collect()),
        None => Err(SjError::BadRowSelection(format!("m = {m} > n = {n} requires {n} rows"))),
        Some(r) => {
            if n > m {
                return Err(SjError::BadRowSelection(format!("n = {n} exceeds m = {m}")));
            }
            if r.len() != n {
                return Err(SjError::BadRowSelection(format!("{} rows given, {n} needed", r.len())));
            }
            let mut seen = vec![false; m + 1];
            for &i in r {
                if i == 0 || i > m {
                    return Err(SjError::BadRowSelection(format!("row {i} outside 1..={m}")));
                }
                if seen[i] {
                    return Err(SjError::BadRowSelection(format!("row {i} repeated")));
                }
                seen[i] = true;
            }
            Ok(r.to_vec())
        }
    }
}

pub(crate) fn require_degree1(f: &Map) -> Result<()> {
    match f.dims() {
        (1, 1) => Ok(()),
        d => Err(SjError::DimensionMismatch(format!("degree-one operator applied on (n,m)={d:?}"))),
    }
}

pub(crate) fn require_n1(f: &Map) -> Result<()> {
    match f.dims() {
        (1, _) => Ok(()),
        d => Err(SjError::DimensionMismatch(format!("operator needs n = 1, got (n,m)={d:?}"))),
    }
}

pub(crate) fn require_index(f: &Map, wi: &WeightIndex) -> Result<()> {
    if wi.m() != f.dims().1 {
        return Err(SjError::DimensionMismatch(format!("index is {0}x{0}, m = {1}", wi.m(), f.dims().1)));
    }
    Ok(())
}

pub(crate) fn sum_jets(env: &Env, terms: impl IntoIterator<Item = Jet>) -> Jet {
    terms.into_iter().fold(env.cst(cr(0.0)), |a, t| a.add_jet(&t))
}
