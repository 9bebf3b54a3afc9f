//! Matrix-valued first-order operators and the invariant operators built from them.
//!
//! Operator matrices multiply by composition: `(P Q)_ab = Σ_c P_ac ∘ Q_cb`, so
//! the left factor also differentiates the coefficients of the right one.
//! Function matrices are order-zero operators.

use super::{cr, Env, OpMap, I};
use crate::calculus::jet::Jet;
use crate::error::{Result, SjError};
use crate::matrix::Mat;
use crate::space::{cz_plus_d, jet_at, JacobiGroupElement, Map, SiegelJacobiPoint, C64};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

type LeafFn = dyn Fn(&Jet, &Env) -> Mat<Jet> + Send + Sync;

enum Node {
    Leaf { rows: usize, cols: usize, order: usize, f: Arc<LeafFn> },
    Compose(OpMatrix, OpMatrix),
    Transpose(OpMatrix),
    Add(OpMatrix, OpMatrix),
    Scale(OpMatrix, C64),
    Trace(OpMatrix),
    Diag(OpMatrix, usize),
    Select(OpMatrix, Vec<usize>, Vec<usize>),
}

/// A matrix of linear differential operators acting on scalar functions.
#[derive(Clone)]
pub struct OpMatrix(Arc<Node>);

impl OpMatrix {
    pub fn leaf(
        rows: usize,
        cols: usize,
        order: usize,
        f: impl Fn(&Jet, &Env) -> Mat<Jet> + Send + Sync + 'static,
    ) -> Self {
        OpMatrix(Arc::new(Node::Leaf { rows, cols, order, f: Arc::new(f) }))
    }

    /// Multiplication by a matrix of functions.
    pub fn func(rows: usize, cols: usize, g: impl Fn(&Env) -> Mat<Jet> + Send + Sync + 'static) -> Self {
        Self::leaf(rows, cols, 0, move |f, env| g(env).mul_scalar(f))
    }

    pub fn shape(&self) -> (usize, usize) {
        match &*self.0 {
            Node::Leaf { rows, cols, .. } => (*rows, *cols),
            Node::Compose(p, q) => (p.shape().0, q.shape().1),
            Node::Transpose(p) => {
                let (r, c) = p.shape();
                (c, r)
            }
            Node::Add(p, _) | Node::Scale(p, _) => p.shape(),
            Node::Trace(_) => (1, 1),
            Node::Diag(_, n) => (*n, *n),
            Node::Select(_, r, c) => (r.len(), c.len()),
        }
    }

    /// Highest derivative order.
    pub fn order(&self) -> usize {
        match &*self.0 {
            Node::Leaf { order, .. } => *order,
            Node::Compose(p, q) => p.order() + q.order(),
            Node::Add(p, q) => p.order().max(q.order()),
            Node::Transpose(p) | Node::Scale(p, _) | Node::Trace(p) | Node::Diag(p, _) | Node::Select(p, _, _) => {
                p.order()
            }
        }
    }

    pub fn compose(&self, o: &OpMatrix) -> OpMatrix {
        assert_eq!(self.shape().1, o.shape().0, "operator matrix shapes");
        OpMatrix(Arc::new(Node::Compose(self.clone(), o.clone())))
    }

    pub fn t(&self) -> OpMatrix {
        OpMatrix(Arc::new(Node::Transpose(self.clone())))
    }

    pub fn plus(&self, o: &OpMatrix) -> OpMatrix {
        assert_eq!(self.shape(), o.shape(), "operator matrix shapes");
        OpMatrix(Arc::new(Node::Add(self.clone(), o.clone())))
    }

    pub fn times(&self, c: C64) -> OpMatrix {
        OpMatrix(Arc::new(Node::Scale(self.clone(), c)))
    }

    pub fn trace(&self) -> OpMatrix {
        OpMatrix(Arc::new(Node::Trace(self.clone())))
    }

    /// `s I_n` for a scalar operator `s`.
    pub fn diag(&self, n: usize) -> OpMatrix {
        assert_eq!(self.shape(), (1, 1), "diag of a scalar operator");
        OpMatrix(Arc::new(Node::Diag(self.clone(), n)))
    }

    /// Sub-matrix with zero-based rows and columns.
    pub fn select(&self, rows: Vec<usize>, cols: Vec<usize>) -> OpMatrix {
        OpMatrix(Arc::new(Node::Select(self.clone(), rows, cols)))
    }

    /// Apply every entry to the function with jet `f`.
    pub fn apply(&self, f: &Jet, env: &Env) -> Mat<Jet> {
        match &*self.0 {
            Node::Leaf { f: g, .. } => g(f, env),
            Node::Compose(p, q) => {
                let qf = q.apply(f, env);
                let (rows, inner) = p.shape();
                let cols = qf.cols;
                let mut out = Mat::from_fn(rows, cols, |_, _| env.cst(cr(0.0)));
                for c in 0..inner {
                    for b in 0..cols {
                        let pv = p.apply(qf.get(c, b), env);
                        for a in 0..rows {
                            let v = out.get(a, b).add_jet(pv.get(a, c));
                            out.set(a, b, v);
                        }
                    }
                }
                out
            }
            Node::Transpose(p) => p.apply(f, env).transpose(),
            Node::Add(p, q) => p.apply(f, env).add(&q.apply(f, env)),
            Node::Scale(p, c) => p.apply(f, env).scale(*c),
            Node::Trace(p) => Mat::from_vec(1, 1, vec![p.apply(f, env).trace()]),
            Node::Diag(p, n) => {
                let s = p.apply(f, env).get(0, 0).clone();
                Mat::from_fn(*n, *n, |a, b| if a == b { s.clone() } else { s.zero() })
            }
            Node::Select(p, r, c) => {
                let v = p.apply(f, env);
                Mat::from_fn(r.len(), c.len(), |a, b| v.get(r[a], c[b]).clone())
            }
        }
    }
}

/// `∂/∂Z` with halved off-diagonal entries.
pub fn d_z(n: usize) -> OpMatrix {
    OpMatrix::leaf(n, n, 1, |f, env| env.grad_z(f))
}

pub fn d_zbar(n: usize) -> OpMatrix {
    OpMatrix::leaf(n, n, 1, |f, env| env.grad_zb(f))
}

/// `∂/∂W`, `n x m`.
pub fn d_w(n: usize, m: usize) -> OpMatrix {
    OpMatrix::leaf(n, m, 1, |f, env| env.grad_w(f))
}

pub fn d_wbar(n: usize, m: usize) -> OpMatrix {
    OpMatrix::leaf(n, m, 1, |f, env| env.grad_wb(f))
}

pub fn y_fn(n: usize) -> OpMatrix {
    OpMatrix::func(n, n, |env| env.y.clone())
}

pub fn r_fn(n: usize) -> OpMatrix {
    OpMatrix::func(n, n, |env| env.r.clone())
}

pub fn v_fn(n: usize, m: usize) -> OpMatrix {
    OpMatrix::func(m, n, |env| env.v.clone())
}

/// `Z - Z̄ = 2i Y`.
pub fn z_minus_zbar(n: usize) -> OpMatrix {
    OpMatrix::func(n, n, |env| env.y.scale(I * 2.0))
}

pub fn z_minus_zbar_inv(n: usize) -> OpMatrix {
    OpMatrix::func(n, n, |env| env.r.scale(-I * 0.5))
}

/// Names of the matrix-valued first-order operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixOpName {
    YPlus,
    YMinus,
    YPlusK(usize),
    YMinusK(usize),
    XPlus,
    XMinus,
    K,
    Lambda,
}

/// Factor appearing in a transformation law, evaluated at `(g, x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LawFactor {
    Identity,
    /// `CZ + D`.
    CzD,
    /// `(CZ + D)^{-1}`.
    CzDInv,
    /// `(CZ + D)^t`.
    CzDT,
    /// `(CZ + D)^{-t}`.
    CzDInvT,
    /// `(CZ̄ + D)^t`.
    CzbDT,
    /// `(CZ̄ + D)^{-t}`.
    CzbDInvT,
}

impl LawFactor {
    pub fn eval(&self, g: &JacobiGroupElement, x: &SiegelJacobiPoint, size: usize) -> Mat<C64> {
        let czd = cz_plus_d(g, &x.z);
        let czbd = cz_plus_d(g, &x.z.conj());
        match self {
            LawFactor::Identity => Mat::cidentity(size),
            LawFactor::CzD => czd,
            LawFactor::CzDInv => czd.inverse(),
            LawFactor::CzDT => czd.transpose(),
            LawFactor::CzDInvT => czd.inverse().transpose(),
            LawFactor::CzbDT => czbd.transpose(),
            LawFactor::CzbDInvT => czbd.inverse().transpose(),
        }
    }
}

/// Claimed law `(Op φ)(g x) = L · Op(φ ∘ g)(x) · R`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransformLaw {
    pub left: LawFactor,
    pub right: LawFactor,
}

/// An invariant (or matrix-covariant) differential operator.
#[derive(Clone)]
pub struct InvariantOperator {
    pub name: String,
    pub n: usize,
    pub m: usize,
    pub matrix: OpMatrix,
    pub law: TransformLaw,
}

impl InvariantOperator {
    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn is_scalar(&self) -> bool {
        self.matrix.shape() == (1, 1)
    }

    fn check(&self, f: &Map) -> Result<()> {
        if f.dims() != (self.n, self.m) {
            return Err(SjError::DimensionMismatch(format!(
                "{} on (n,m)=({}, {}), operand on {:?}",
                self.name,
                self.n,
                self.m,
                f.dims()
            )));
        }
        Ok(())
    }

    /// Values of every entry of the operator applied to `f` at `x`.
    pub fn apply_at(&self, f: &Map, x: &SiegelJacobiPoint) -> Result<Mat<C64>> {
        self.check(f)?;
        let r = self.order();
        let jf = jet_at(f.as_ref(), x, r)?;
        let env = Env::new(crate::space::Coords::identity(x, r));
        Ok(self.matrix.apply(&jf, &env).map(|j| j.value()))
    }

    /// Entry `(a, b)` (zero-based) of the operator applied to `f`, as a map.
    pub fn entry_map(&self, f: Map, a: usize, b: usize) -> Result<Map> {
        self.check(&f)?;
        let (rows, cols) = self.matrix.shape();
        if a >= rows || b >= cols {
            return Err(SjError::IndexOutOfRange { index: a.max(b) + 1, max: rows.max(cols) });
        }
        let mtx = self.matrix.clone();
        OpMap::build(&self.name, vec![f], self.order(), false, move |j, env| {
            Ok(mtx.apply(&j[0], env).get(a, b).clone())
        })
    }

    /// Scalar operator applied to `f`, as a map.
    pub fn to_map(&self, f: Map) -> Result<Map> {
        if !self.is_scalar() {
            return Err(SjError::DimensionMismatch(format!("{} is matrix-valued", self.name)));
        }
        self.entry_map(f, 0, 0)
    }
}

fn check_k(m: usize, k: usize) -> Result<()> {
    if k == 0 || k > m {
        Err(SjError::IndexOutOfRange { index: k, max: m })
    } else {
        Ok(())
    }
}

/// `Y^{-1} V^t (∂/∂W)^t` with functions on the left.
fn p_plus(n: usize, m: usize, conj: bool) -> OpMatrix {
    let d = if conj { d_wbar(n, m) } else { d_w(n, m) };
    r_fn(n).compose(&v_fn(n, m).t()).compose(&d.t())
}

fn x_plus(n: usize, m: usize) -> OpMatrix {
    let p = p_plus(n, m, false);
    d_z(n).times(I * 2.0).plus(&p.times(I)).plus(&p.t().times(I))
}

fn x_plus_bar(n: usize, m: usize) -> OpMatrix {
    let p = p_plus(n, m, true);
    d_zbar(n).times(-I * 2.0).plus(&p.times(-I)).plus(&p.t().times(-I))
}

fn k_op(n: usize, m: usize) -> OpMatrix {
    let a = y_fn(n).compose(&d_z(n)).times(I * 2.0);
    let b = v_fn(n, m).t().compose(&d_w(n, m).t()).times(I);
    let c = p_plus(n, m, false).compose(&y_fn(n)).t().times(I);
    a.plus(&b).plus(&c)
}

fn lambda_op(n: usize, m: usize) -> OpMatrix {
    let a = y_fn(n).compose(&d_zbar(n)).times(I * 2.0);
    let b = v_fn(n, m).t().compose(&d_wbar(n, m).t()).times(I);
    let c = p_plus(n, m, true).compose(&y_fn(n)).t().times(I);
    a.plus(&b).plus(&c)
}

fn y_minus(n: usize, m: usize) -> OpMatrix {
    d_wbar(n, m).t().compose(&y_fn(n))
}

/// A matrix-valued first-order operator with its transformation law.
pub fn build_invariant(name: MatrixOpName, n: usize, m: usize) -> Result<InvariantOperator> {
    use LawFactor as F;
    let (label, matrix, law) = match name {
        MatrixOpName::YPlus => ("Y+".to_string(), d_w(n, m), (F::CzD, F::Identity)),
        MatrixOpName::YMinus => ("Y-".to_string(), y_minus(n, m), (F::Identity, F::CzDInv)),
        MatrixOpName::YPlusK(k) => {
            check_k(m, k)?;
            (format!("Y+{k}"), d_w(n, m).select((0..n).collect(), vec![k - 1]), (F::CzD, F::Identity))
        }
        MatrixOpName::YMinusK(k) => {
            check_k(m, k)?;
            (format!("Y-{k}"), y_minus(n, m).select(vec![k - 1], (0..n).collect()), (F::Identity, F::CzDInv))
        }
        MatrixOpName::XPlus => ("X+".to_string(), x_plus(n, m), (F::CzD, F::CzDT)),
        MatrixOpName::XMinus => {
            let inner = y_fn(n).compose(&x_plus_bar(n, m)).t();
            ("X-".to_string(), y_fn(n).compose(&inner), (F::CzDInvT, F::CzDInv))
        }
        MatrixOpName::K => ("K".to_string(), k_op(n, m), (F::CzbDInvT, F::CzDT)),
        MatrixOpName::Lambda => ("Lambda".to_string(), lambda_op(n, m), (F::CzDInvT, F::CzbDT)),
    };
    Ok(InvariantOperator { name: label, n, m, matrix, law: TransformLaw { left: law.0, right: law.1 } })
}

/// The Maass-type matrices `A^(j)`.
pub fn a_j(j: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    if j == 0 {
        return Err(SjError::IndexOutOfRange { index: 0, max: usize::MAX });
    }
    let half = cr((n as f64 + 1.0) / 2.0);
    let k = k_op(n, m);
    let lam = lambda_op(n, m);
    let a1 = lam.compose(&k).plus(&k.times(half));
    let mut a = a1.clone();
    for _ in 1..j {
        let t1 = a1.compose(&a);
        let t2 = lam.compose(&a).times(-half);
        let t3 = lam.compose(&a.trace().diag(n)).times(cr(0.5));
        let inner = z_minus_zbar_inv(n).compose(&lam.t().compose(&a.t()).t());
        let t4 = z_minus_zbar(n).compose(&inner.t()).times(cr(0.5));
        a = t1.plus(&t2).plus(&t3).plus(&t4);
    }
    Ok(InvariantOperator {
        name: format!("A{j}"),
        n,
        m,
        matrix: a,
        law: TransformLaw { left: LawFactor::CzDInvT, right: LawFactor::CzDT },
    })
}

fn scalar(name: String, n: usize, m: usize, matrix: OpMatrix) -> InvariantOperator {
    InvariantOperator { name, n, m, matrix, law: TransformLaw { left: LawFactor::Identity, right: LawFactor::Identity } }
}

/// `H^j = Tr(A^(j))`.
pub fn h_j(j: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    let a = a_j(j, n, m)?;
    Ok(scalar(format!("H{j}"), n, m, a.matrix.trace()))
}

/// `Tr(ΛK)`: `H¹` without its `((n+1)/2) Tr K` term. Not invariant.
pub fn h1_without_shift(n: usize, m: usize) -> InvariantOperator {
    scalar("H1 without shift".to_string(), n, m, lambda_op(n, m).compose(&k_op(n, m)).trace())
}

/// `T^j_kl = Tr(Y_{-,k}^t Y_{+,l}^t A^(j))`, one-based `k`, `l`.
pub fn t_kl(j: usize, k: usize, l: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    let ymk = build_invariant(MatrixOpName::YMinusK(k), n, m)?.matrix;
    let ypl = build_invariant(MatrixOpName::YPlusK(l), n, m)?.matrix;
    let a = a_j(j, n, m)?.matrix;
    Ok(scalar(format!("T{j}_{k}{l}"), n, m, ymk.t().compose(&ypl.t()).compose(&a).trace()))
}

/// `U_kl = Tr(Y_{-,k}^t Y_{-,l} X_+)`.
pub fn u_kl(k: usize, l: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    let ymk = build_invariant(MatrixOpName::YMinusK(k), n, m)?.matrix;
    let yml = build_invariant(MatrixOpName::YMinusK(l), n, m)?.matrix;
    Ok(scalar(format!("U_{k}{l}"), n, m, ymk.t().compose(&yml).compose(&x_plus(n, m)).trace()))
}

/// `V_kl = Tr(Y_{+,k} Y_{+,l}^t X_-)`.
pub fn v_kl(k: usize, l: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    let ypk = build_invariant(MatrixOpName::YPlusK(k), n, m)?.matrix;
    let ypl = build_invariant(MatrixOpName::YPlusK(l), n, m)?.matrix;
    let xm = build_invariant(MatrixOpName::XMinus, n, m)?.matrix;
    Ok(scalar(format!("V_{k}{l}"), n, m, ypk.compose(&ypl.t()).compose(&xm).trace()))
}

/// Entry `(k, l)` of `Y_- Y_+`, one-based.
pub fn ym_yp(k: usize, l: usize, n: usize, m: usize) -> Result<InvariantOperator> {
    check_k(m, k)?;
    check_k(m, l)?;
    let p = y_minus(n, m).compose(&d_w(n, m)).select(vec![k - 1], vec![l - 1]);
    Ok(scalar(format!("YmYp_{k}{l}"), n, m, p))
}

/// Residual of the claimed law for a matrix operator at `(g, x)`, relative to
/// the size of the left-hand side.
pub fn law_residual(op: &InvariantOperator, f: &Map, g: &JacobiGroupElement, x: &SiegelJacobiPoint) -> Result<f64> {
    let gx = crate::space::act(g, x)?;
    let lhs = op.apply_at(f, &gx)?;
    let pulled = crate::space::pullback(f.clone(), g);
    let inner = op.apply_at(&pulled, x)?;
    let (rows, cols) = op.matrix.shape();
    let rhs = op.law.left.eval(g, x, rows).matmul(&inner).matmul(&op.law.right.eval(g, x, cols));
    let diff = crate::matrix::max_diff(&lhs, &rhs);
    Ok(diff / (1.0 + lhs.max_abs()))
}
