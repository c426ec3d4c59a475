//! Small dense linear algebra: a row-major matrix, a symmetric
//! eigensolver (Householder tridiagonalization followed by implicit QL) and
//! an LU solver with partial pivoting.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![T::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_diagonal(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = x;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [T] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn max_abs(&self) -> T {
        crate::scalar::max_abs(&self.data)
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).fold(T::zero(), |acc, (&a, &x)| acc + a * x))
            .collect()
    }

    /// `selfᵀ v`, computed row by row.
    pub fn transpose_matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.rows);
        let mut out = vec![T::zero(); self.cols];
        for (i, &vi) in v.iter().enumerate() {
            if vi == T::zero() {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o = *o + a * vi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let src = other.row(k);
                for (o, &b) in out.row_mut(i).iter_mut().zip(src) {
                    *o = *o + a * b;
                }
            }
        }
        out
    }

    /// Largest entry of `|self - selfᵀ|`.
    pub fn asymmetry(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

/// Eigenpairs of a real symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymmetricEigen<T> {
    pub values: Vec<T>,
    /// Row `m` holds the unit eigenvector for `values[m]`.
    pub vectors: Matrix<T>,
}

const QL_MAX_SWEEPS: usize = 60;

impl<T: Scalar> SymmetricEigen<T> {
    /// Only the lower triangle of `a` is referenced.
    pub fn new(a: &Matrix<T>) -> Result<Self> {
        let n = a.rows();
        if a.cols() != n {
            return Err(Error::DimensionMismatch { expected: n, got: a.cols() });
        }
        if n == 0 {
            return Ok(Self { values: Vec::new(), vectors: Matrix::zeros(0, 0) });
        }
        let mut v = Matrix::from_fn(n, n, |i, j| if j <= i { a[(i, j)] } else { a[(j, i)] });
        let mut d = vec![T::zero(); n];
        let mut e = vec![T::zero(); n];
        tridiagonalize(&mut v, &mut d, &mut e);
        // QL rotations act on pairs of eigenvector columns; store them as rows.
        let mut w = v.transpose();
        implicit_ql(&mut w, &mut d, &mut e)?;

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&x, &y| d[x].partial_cmp(&d[y]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&m| d[m]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.row_mut(dst).copy_from_slice(w.row(src));
        }
        Ok(Self { values, vectors })
    }
}

/// Householder reduction to tridiagonal form; on exit `v` holds the
/// accumulated orthogonal transform, `d` the diagonal and `e[1..]` the
/// subdiagonal.
fn tridiagonalize<T: Scalar>(v: &mut Matrix<T>, d: &mut [T], e: &mut [T]) {
    let n = d.len();
    let zero = T::zero();
    for j in 0..n {
        d[j] = v[(n - 1, j)];
    }
    for i in (1..n).rev() {
        let mut scale = zero;
        let mut h = zero;
        for dk in d.iter().take(i) {
            scale = scale + dk.abs();
        }
        if scale == zero {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
                v[(j, i)] = zero;
            }
        } else {
            for dk in d.iter_mut().take(i) {
                *dk = *dk / scale;
                h = h + *dk * *dk;
            }
            let f = d[i - 1];
            let mut g = h.sqrt();
            if f > zero {
                g = -g;
            }
            e[i] = scale * g;
            h = h - f * g;
            d[i - 1] = f - g;
            for ej in e.iter_mut().take(i) {
                *ej = zero;
            }
            for j in 0..i {
                let f = d[j];
                v[(j, i)] = f;
                let mut g = e[j] + v[(j, j)] * f;
                for k in j + 1..i {
                    g = g + v[(k, j)] * d[k];
                    e[k] = e[k] + v[(k, j)] * f;
                }
                e[j] = g;
            }
            let mut f = zero;
            for j in 0..i {
                e[j] = e[j] / h;
                f = f + e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] = e[j] - hh * d[j];
            }
            for j in 0..i {
                let f = d[j];
                let g = e[j];
                for k in j..i {
                    v[(k, j)] = v[(k, j)] - (f * e[k] + g * d[k]);
                }
                d[j] = v[(i - 1, j)];
                v[(i, j)] = zero;
            }
        }
        d[i] = h;
    }

    for i in 0..n - 1 {
        v[(n - 1, i)] = v[(i, i)];
        v[(i, i)] = T::one();
        let h = d[i + 1];
        if h != zero {
            for k in 0..=i {
                d[k] = v[(k, i + 1)] / h;
            }
            for j in 0..=i {
                let mut g = zero;
                for k in 0..=i {
                    g = g + v[(k, i + 1)] * v[(k, j)];
                }
                for k in 0..=i {
                    v[(k, j)] = v[(k, j)] - g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[(k, i + 1)] = zero;
        }
    }
    for j in 0..n {
        d[j] = v[(n - 1, j)];
        v[(n - 1, j)] = zero;
    }
    v[(n - 1, n - 1)] = T::one();
    e[0] = zero;
}

/// Implicit QL on the tridiagonal `(d, e)`; `w` rows are rotated alongside.
fn implicit_ql<T: Scalar>(w: &mut Matrix<T>, d: &mut [T], e: &mut [T]) -> Result<()> {
    let n = d.len();
    let zero = T::zero();
    let one = T::one();
    let two = one + one;
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = zero;

    let mut f = zero;
    let mut tst1 = zero;
    let eps = T::epsilon();
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m == n {
            m = n - 1;
        }
        if m > l {
            let mut sweeps = 0;
            loop {
                sweeps += 1;
                if sweeps > QL_MAX_SWEEPS {
                    return Err(Error::NoConvergence { what: "symmetric eigensolver", iterations: QL_MAX_SWEEPS });
                }
                let g = d[l];
                let mut p = (d[l + 1] - g) / (two * e[l]);
                let mut r = p.hypot(one);
                if p < zero {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let h = g - d[l];
                for di in d.iter_mut().skip(l + 2) {
                    *di = *di - h;
                }
                f = f + h;

                p = d[m];
                let mut c = one;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = zero;
                let mut s2 = zero;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    let h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    rotate_rows(w, i, s, c);
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] = d[l] + f;
        e[l] = zero;
    }
    Ok(())
}

#[inline]
fn rotate_rows<T: Scalar>(w: &mut Matrix<T>, i: usize, s: T, c: T) {
    let cols = w.cols();
    let (lo, hi) = w.data.split_at_mut((i + 1) * cols);
    let row_i = &mut lo[i * cols..];
    let row_next = &mut hi[..cols];
    for (a, b) in row_i.iter_mut().zip(row_next.iter_mut()) {
        let h = *b;
        *b = s * *a + c * h;
        *a = c * *a - s * h;
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub fn lu_solve<T: Scalar>(a: &Matrix<T>, b: &[T]) -> Result<Vec<T>> {
    let n = a.rows();
    if a.cols() != n || b.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: b.len() });
    }
    let mut m = a.clone();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&p, &q| m[(p, col)].abs().partial_cmp(&m[(q, col)].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(col);
        if m[(pivot, col)] == T::zero() {
            return Err(Error::InvalidArgument("singular matrix".into()));
        }
        if pivot != col {
            for j in 0..n {
                let tmp = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            x.swap(col, pivot);
        }
        let diag = m[(col, col)];
        for r in col + 1..n {
            let factor = m[(r, col)] / diag;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                m[(r, j)] = m[(r, j)] - factor * m[(col, j)];
            }
            x[r] = x[r] - factor * x[col];
        }
    }
    for r in (0..n).rev() {
        let mut acc = x[r];
        for j in r + 1..n {
            acc = acc - m[(r, j)] * x[j];
        }
        x[r] = acc / m[(r, r)];
    }
    Ok(x)
}
