//! Space discretizations of `∂²/∂x²` on `[0, 1]` with Dirichlet data.
//!
//! Both discretizations split the discrete operator into the interior block
//! `A_{h,0}` and the boundary injection `A_h Q_h (g₀, g₁) = g₀ β_L + g₁ β_R`.
//! Interior restriction `P_h` is nodal sampling, and `L_h Q_h ∂` vanishes for
//! both, so the lift hook stays `None`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, Matrix};
use crate::quadrature::gauss_lobatto;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// Second-order central differences on a uniform grid.
    FiniteDifference,
    /// Legendre–Gauss–Lobatto collocation.
    Lgl,
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpaceKind::FiniteDifference => "fd",
            SpaceKind::Lgl => "lgl",
        })
    }
}

/// Which boundary point a trace refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn coordinate<T: Scalar>(self) -> T {
        match self {
            Side::Left => T::zero(),
            Side::Right => T::one(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SpaceDiscretization<T> {
    kind: SpaceKind,
    /// Parameter the discretization was built from (`M` or `J`).
    size: usize,
    nodes: Vec<T>,
    operator: Matrix<T>,
    symmetric: Matrix<T>,
    left: Vec<T>,
    right: Vec<T>,
    weights: Vec<T>,
    symmetrizer: Vec<T>,
    lift: Option<[Vec<T>; 2]>,
}

impl<T: Scalar> SpaceDiscretization<T> {
    /// Central differences with `m` interior points, `h = 1/(m+1)`.
    pub fn finite_difference(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("finite differences need M >= 2, got {m}")));
        }
        let h = T::one() / T::from_count(m + 1);
        let inv_h2 = T::one() / (h * h);
        let two = T::one() + T::one();
        let operator = Matrix::from_fn(m, m, |i, j| match i.abs_diff(j) {
            0 => -two * inv_h2,
            1 => inv_h2,
            _ => T::zero(),
        });
        let mut left = vec![T::zero(); m];
        let mut right = vec![T::zero(); m];
        left[0] = inv_h2;
        right[m - 1] = inv_h2;
        Ok(Self {
            kind: SpaceKind::FiniteDifference,
            size: m,
            nodes: (1..=m).map(|i| T::from_count(i) * h).collect(),
            symmetric: operator.clone(),
            operator,
            left,
            right,
            weights: vec![h; m],
            symmetrizer: vec![T::one(); m],
            lift: None,
        })
    }

    /// Collocation at the `J + 1` Legendre–Gauss–Lobatto points of `[0, 1]`.
    ///
    /// The interior rows are assembled in weak form,
    /// `α_i L_j''(x_i) = -Σ_q α_q L_i'(x_q) L_j'(x_q)`, which is exact because
    /// the Lobatto rule integrates degree `2J - 2`. This makes
    /// `D A_{h,0} D⁻¹` symmetric by construction.
    pub fn lgl_collocation(degree: usize) -> Result<Self> {
        if degree < 2 {
            return Err(Error::InvalidArgument(format!("collocation needs J >= 2, got {degree}")));
        }
        let (xi, w) = gauss_lobatto::<T>(degree + 1)?;
        let d1 = barycentric_first_derivative(&xi);
        let n = degree + 1;
        let m = degree - 1;
        // Gram matrix of derivative values: G_ij = Σ_q w_q D1[q][i] D1[q][j].
        let mut gram = Matrix::zeros(n, n);
        for (q, &wq) in w.iter().enumerate() {
            let row = d1.row(q);
            for i in 0..n {
                let a = wq * row[i];
                for j in 0..n {
                    gram[(i, j)] = gram[(i, j)] + a * row[j];
                }
            }
        }
        let four = T::lit(4.0);
        let two = T::one() + T::one();
        let operator = Matrix::from_fn(m, m, |i, j| -four * gram[(i + 1, j + 1)] / w[i + 1]);
        let symmetric = Matrix::from_fn(m, m, |i, j| {
            let g = if i >= j { gram[(i + 1, j + 1)] } else { gram[(j + 1, i + 1)] };
            -four * g / (w[i + 1] * w[j + 1]).sqrt()
        });
        let left = (0..m).map(|i| -four * gram[(i + 1, 0)] / w[i + 1]).collect();
        let right = (0..m).map(|i| -four * gram[(i + 1, n - 1)] / w[i + 1]).collect();
        let weights: Vec<T> = w[1..n - 1].iter().map(|&wi| wi / two).collect();
        Ok(Self {
            kind: SpaceKind::Lgl,
            size: degree,
            nodes: xi[1..n - 1].iter().map(|&x| (T::one() + x) / two).collect(),
            operator,
            symmetric,
            left,
            right,
            symmetrizer: weights.iter().map(|a| a.sqrt()).collect(),
            weights,
            lift: None,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// Interior dimension.
    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    /// `A_{h,0}`.
    pub fn operator(&self) -> &Matrix<T> {
        &self.operator
    }

    /// `D A_{h,0} D⁻¹`, exactly symmetric.
    pub fn symmetric(&self) -> &Matrix<T> {
        &self.symmetric
    }

    /// Column of `A_h Q_h` multiplying the left boundary value.
    pub fn left_injection(&self) -> &[T] {
        &self.left
    }

    pub fn right_injection(&self) -> &[T] {
        &self.right
    }

    pub fn injection(&self, side: Side) -> &[T] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    /// Norm weights `α_m`.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `d_m = √α_m` (FD uses `d ≡ 1`).
    pub fn symmetrizer(&self) -> &[T] {
        &self.symmetrizer
    }

    /// Columns of `L_h Q_h`. `None` means the term is identically zero,
    /// which is the case for both built-in discretizations.
    pub fn trace_lift(&self) -> Option<&[Vec<T>; 2]> {
        self.lift.as_ref()
    }

    /// Attaches explicit `L_h Q_h` columns.
    pub fn with_trace_lift(mut self, left: Vec<T>, right: Vec<T>) -> Result<Self> {
        for v in [&left, &right] {
            if v.len() != self.dim() {
                return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
            }
        }
        self.lift = Some([left, right]);
        Ok(self)
    }

    /// `P_h u`: samples `u` at the interior nodes.
    pub fn restrict(&self, u: impl Fn(T) -> T) -> Vec<T> {
        self.nodes.iter().map(|&x| u(x)).collect()
    }

    /// `√(Σ α_m v_m²)`.
    pub fn discrete_norm(&self, v: &[T]) -> Result<T> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        let sum = v.iter().zip(&self.weights).fold(T::zero(), |acc, (&x, &a)| acc + a * x * x);
        Ok(sum.sqrt())
    }

    /// `A_h Q_h (g₀, g₁)`.
    pub fn inject(&self, g_left: T, g_right: T) -> Vec<T> {
        self.left.iter().zip(&self.right).map(|(&l, &r)| l * g_left + r * g_right).collect()
    }

    /// Solves the discrete elliptic problem `A_{h,0} w + A_h Q_h (g₀, g₁) = rhs`.
    pub fn elliptic_solve(&self, rhs: &[T], g_left: T, g_right: T) -> Result<Vec<T>> {
        if rhs.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: rhs.len() });
        }
        let b: Vec<T> = rhs.iter().zip(self.inject(g_left, g_right)).map(|(&r, g)| r - g).collect();
        lu_solve(&self.operator, &b)
    }
}

/// First-derivative matrix of the Lagrange basis on `nodes`, with diagonal
/// entries set to the negated off-diagonal row sums.
pub fn barycentric_first_derivative<T: Scalar>(nodes: &[T]) -> Matrix<T> {
    let n = nodes.len();
    let lambda: Vec<T> = (0..n)
        .map(|j| {
            let prod = (0..n).filter(|&k| k != j).fold(T::one(), |acc, k| acc * (nodes[j] - nodes[k]));
            T::one() / prod
        })
        .collect();
    let mut d = Matrix::zeros(n, n);
    for i in 0..n {
        let mut diag = T::zero();
        for j in 0..n {
            if i != j {
                let v = lambda[j] / lambda[i] / (nodes[i] - nodes[j]);
                d[(i, j)] = v;
                diag = diag - v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}
