//! Small dense matrices over any field-like scalar.
//!
//! The same routines serve `f64`, `Complex64` and truncated Taylor jets, so the
//! group action and automorphy factor are written once and differentiated for free.

use num_complex::Complex64;

/// Field operations needed by the dense routines below.
pub trait Scalar: Clone + Send + Sync {
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Self;
    fn scale(&self, c: Complex64) -> Self;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    /// Magnitude of the leading (constant) part, used for pivoting.
    fn pivot_size(&self) -> f64;
}

impl Scalar for Complex64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c
    }
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn pivot_size(&self) -> f64 {
        self.norm()
    }
}

impl Scalar for f64 {
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        1.0 / self
    }
    fn scale(&self, c: Complex64) -> Self {
        self * c.re
    }
    fn zero_like(&self) -> Self {
        0.0
    }
    fn one_like(&self) -> Self {
        1.0
    }
    fn pivot_size(&self) -> f64 {
        self.abs()
    }
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Mat<T> {
    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Mat { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        Mat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Mat<U> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_cols(&self, idx: &[usize]) -> Self {
        Mat::from_fn(self.rows, idx.len(), |i, j| self.get(i, idx[j]).clone())
    }

    pub fn row(&self, i: usize) -> Self {
        Mat::from_fn(1, self.cols, |_, j| self.get(i, j).clone())
    }
}

impl<T: Scalar> Mat<T> {
    pub fn zeros_like(proto: &T, rows: usize, cols: usize) -> Self {
        let z = proto.zero_like();
        Mat::from_fn(rows, cols, |_, _| z.clone())
    }

    pub fn identity_like(proto: &T, n: usize) -> Self {
        let z = proto.zero_like();
        let o = proto.one_like();
        Mat::from_fn(n, n, |i, j| if i == j { o.clone() } else { z.clone() })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "add shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols), "sub shape");
        Mat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.map(|a| a.neg())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|a| a.scale(c))
    }

    /// Multiply every entry by the scalar `s`.
    pub fn mul_scalar(&self, s: &T) -> Self {
        self.map(|a| a.mul(s))
    }

    pub fn matmul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matmul shape");
        let proto = self.data.first().or(o.data.first()).expect("empty matmul");
        let mut out = Mat::zeros_like(proto, self.rows, o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = proto.zero_like();
                for k in 0..self.cols {
                    acc = acc.add(&self.get(i, k).mul(o.get(k, j)));
                }
                out.set(i, j, acc);
            }
        }
        out
    }

    pub fn trace(&self) -> T {
        assert_eq!(self.rows, self.cols, "trace of non-square matrix");
        let mut acc = self.data[0].zero_like();
        for i in 0..self.rows {
            acc = acc.add(self.get(i, i));
        }
        acc
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        assert_eq!(self.rows, self.cols, "det of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = self.data[0].one_like();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r1, &r2| {
                    a.get(r1, col).pivot_size().total_cmp(&a.get(r2, col).pivot_size())
                })
                .unwrap();
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                }
                det = det.neg();
            }
            let p = a.get(col, col).clone();
            det = det.mul(&p);
            if p.pivot_size() == 0.0 {
                return det;
            }
            let pinv = p.inv();
            for r in col + 1..n {
                let factor = a.get(r, col).mul(&pinv);
                for j in col..n {
                    let v = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, v);
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Self {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Mat::identity_like(&self.data[0], n);
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&r1, &r2| {
                    a.get(r1, col).pivot_size().total_cmp(&a.get(r2, col).pivot_size())
                })
                .unwrap();
            if piv != col {
                for j in 0..n {
                    a.data.swap(piv * n + j, col * n + j);
                    inv.data.swap(piv * n + j, col * n + j);
                }
            }
            let pinv = a.get(col, col).inv();
            for j in 0..n {
                let v = a.get(col, j).mul(&pinv);
                a.set(col, j, v);
                let v = inv.get(col, j).mul(&pinv);
                inv.set(col, j, v);
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let factor = a.get(r, col).clone();
                for j in 0..n {
                    let v = a.get(r, j).sub(&factor.mul(a.get(col, j)));
                    a.set(r, j, v);
                    let v = inv.get(r, j).sub(&factor.mul(inv.get(col, j)));
                    inv.set(r, j, v);
                }
            }
        }
        inv
    }
}

impl Mat<Complex64> {
    pub fn czeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| Complex64::new(0.0, 0.0))
    }

    pub fn cidentity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
    }

    pub fn re(&self) -> Mat<f64> {
        self.map(|c| c.re)
    }

    pub fn im(&self) -> Mat<f64> {
        self.map(|c| c.im)
    }

    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }
}

impl Mat<f64> {
    pub fn rzeros(rows: usize, cols: usize) -> Self {
        Mat::from_fn(rows, cols, |_, _| 0.0)
    }

    pub fn ridentity(n: usize) -> Self {
        Mat::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 })
    }

    pub fn to_complex(&self) -> Mat<Complex64> {
        self.map(|&x| Complex64::new(x, 0.0))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }
}

/// Max-norm distance between two complex matrices of equal shape.
pub fn max_diff(a: &Mat<Complex64>, b: &Mat<Complex64>) -> f64 {
    a.data.iter().zip(&b.data).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = Mat::from_vec(
            3,
            3,
            vec![2.0, 1.0, 0.5, 1.0, 3.0, -1.0, 0.5, -1.0, 4.0],
        )
        .to_complex();
        let p = a.matmul(&a.inverse());
        assert!(max_diff(&p, &Mat::cidentity(3)) < 1e-14);
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let a = Mat::from_vec(2, 2, vec![0.0, 2.0, 3.0, 1.0]);
        assert!((a.det() - (-6.0)).abs() < 1e-15);
    }
}
