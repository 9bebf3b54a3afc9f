//! Inventory of covariant operators with their weight/index signatures.

use super::*;
use crate::space::{Map, WeightIndex};
use serde::Serialize;
use std::sync::Arc;

type Applier = dyn Fn(&[Map], &[WeightIndex]) -> Result<Map> + Send + Sync;

/// How the output weight and index depend on the inputs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SigKind {
    Unary(Signature),
    Bracket(BracketVariant),
}

/// A covariant operator `J_{k,M} → J_{k',M'}` (or a bracket of two inputs).
#[derive(Clone)]
pub struct CovariantOperator {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub arity: usize,
    pub order: usize,
    pub holomorphic: bool,
    pub sig: SigKind,
    applier: Arc<Applier>,
}

impl CovariantOperator {
    pub fn new(
        name: &str,
        (n, m): (usize, usize),
        arity: usize,
        order: usize,
        holomorphic: bool,
        sig: SigKind,
        applier: impl Fn(&[Map], &[WeightIndex]) -> Result<Map> + Send + Sync + 'static,
    ) -> Self {
        CovariantOperator { name: name.to_string(), n, m, arity, order, holomorphic, sig, applier: Arc::new(applier) }
    }

    pub fn apply(&self, fs: &[Map], wis: &[WeightIndex]) -> Result<Map> {
        if fs.len() != self.arity || wis.len() != self.arity {
            return Err(SjError::DimensionMismatch(format!("{} takes {} operands", self.name, self.arity)));
        }
        (self.applier)(fs, wis)
    }

    /// Output weight and index claimed for the given inputs.
    pub fn output(&self, wis: &[WeightIndex]) -> WeightIndex {
        match self.sig {
            SigKind::Unary(s) => s.apply(&wis[0]),
            SigKind::Bracket(v) => bracket_signature(self.n, &wis[0], &wis[1], v),
        }
    }

    pub fn info(&self) -> OpInfo {
        let (k_out, index_scale) = match self.sig {
            SigKind::Unary(s) => (s.k_out(), s.index_scale),
            SigKind::Bracket(BracketVariant::A) => (format!("{}(k1+k2)+1", self.n), self.n as i64),
            SigKind::Bracket(BracketVariant::B) => (format!("{}(k1+k2)+2", self.n), self.n as i64),
        };
        OpInfo { name: self.name.clone(), n: self.n, m: self.m, arity: self.arity, k_out, index_scale, order: self.order }
    }
}

/// Registry entry as listed by the command line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OpInfo {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub arity: usize,
    pub k_out: String,
    pub index_scale: i64,
    pub order: usize,
}

fn unary(
    name: &str,
    dims: (usize, usize),
    order: usize,
    holomorphic: bool,
    sig: Signature,
    f: impl Fn(Map, &WeightIndex) -> Result<Map> + Send + Sync + 'static,
) -> CovariantOperator {
    CovariantOperator::new(name, dims, 1, order, holomorphic, SigKind::Unary(sig), move |fs, wis| {
        f(fs[0].clone(), &wis[0])
    })
}

/// Every covariant operator defined on `ℍ_n × ℂ^{(m,n)}`, with default options.
///
/// Determinant operators use the first `n` rows of `W` when `m > n`.
pub fn covariant_operators(n: usize, m: usize) -> Vec<CovariantOperator> {
    let dims = (n, m);
    let mut ops = Vec::new();
    if n == 1 && m == 1 {
        ops.push(unary("D1", dims, 1, false, Signature::new(1, 1, 1), d1));
        ops.push(unary("heat_Lkm", dims, 2, false, Signature::new(1, 2, 1), heat_lkm));
        ops.push(unary("D2", dims, 1, false, Signature::new(1, 2, 1), d2));
        ops.push(unary("delta1", dims, 1, false, Signature::new(1, -1, 1), delta1));
        ops.push(unary("delta2", dims, 1, false, Signature::new(1, -2, 1), delta2));
        for v in SerreVariant::all() {
            let order = if matches!(v, SerreVariant::A | SerreVariant::B) { 2 } else { 1 };
            ops.push(unary(
                &format!("serre_{}", v.label()),
                dims,
                order,
                v == SerreVariant::A,
                Signature::new(1, v.weight_shift(), 1),
                move |f, wi| serre_like(f, wi, v, &SerreOptions::default()),
            ));
        }
    }
    if n == 1 {
        for i in 1..=m {
            ops.push(unary(&format!("D1_{i}"), dims, 1, false, Signature::new(1, 1, 1), move |f, wi| d1_i(f, wi, i)));
            ops.push(unary(&format!("delta1_{i}"), dims, 1, false, Signature::new(1, -1, 1), move |f, wi| {
                delta1_i(f, wi, i)
            }));
        }
        ops.push(unary("heat_m", dims, 2, false, Signature::new(1, 2, 1), |f, wi| heat_m(f, wi, true)));
        ops.push(unary("D2_m", dims, 1, false, Signature::new(1, 2, 1), d2_m));
        ops.push(unary("delta2_m", dims, 1, false, Signature::new(1, -2, 1), delta2_m));
        for v in [SerreVariant::A, SerreVariant::B, SerreVariant::C] {
            let order = if v == SerreVariant::C { 1 } else { 2 };
            ops.push(unary(
                &format!("serre_m_{}", v.label()),
                dims,
                order,
                v == SerreVariant::A,
                Signature::new(1, v.weight_shift(), 1),
                move |f, wi| serre_like_m(f, wi, v, 1, false),
            ));
        }
    }
    if m >= n {
        let n64 = n as i64;
        let rows: Vec<usize> = (1..=n).collect();
        let r1 = rows.clone();
        ops.push(unary("D1_det", dims, 1, false, Signature::new(n64, 1, n64), move |f, wi| {
            d1_det(f, wi, Some(&r1))
        }));
        let r2 = rows;
        ops.push(unary("delta1_det", dims, 1, false, Signature::new(n64, -1, n64), move |f, wi| {
            delta1_det(f, wi, Some(&r2))
        }));
    }
    let n64 = n as i64;
    ops.push(unary("heat_det", dims, 2, false, Signature::new(n64, 2, n64), heat_det));
    ops.push(unary("D2_det", dims, 1, false, Signature::new(n64, 2, n64), |f, wi| {
        d2_det(f, wi, &DetOptions::default())
    }));
    ops.push(unary("delta2_det", dims, 1, false, Signature::new(n64, -2, n64), |f, wi| {
        delta2_det(f, wi, &DetOptions::default())
    }));
    if n == m {
        ops.push(CovariantOperator::new(
            "bracket_a",
            dims,
            2,
            1,
            false,
            SigKind::Bracket(BracketVariant::A),
            |fs, wis| bracket(fs[0].clone(), &wis[0], fs[1].clone(), &wis[1], BracketVariant::A, IndexPlacement::Right),
        ));
    }
    ops.push(CovariantOperator::new(
        "bracket_b",
        dims,
        2,
        2,
        false,
        SigKind::Bracket(BracketVariant::B),
        |fs, wis| bracket(fs[0].clone(), &wis[0], fs[1].clone(), &wis[1], BracketVariant::B, IndexPlacement::Right),
    ));
    ops
}

/// Registry listing for every `(n, m)` with `1 ≤ n, m ≤ max`.
pub fn list_ops(max: usize) -> Vec<OpInfo> {
    let mut out = Vec::new();
    for n in 1..=max {
        for m in 1..=max {
            out.extend(covariant_operators(n, m).iter().map(|o| o.info()));
        }
    }
    out
}
