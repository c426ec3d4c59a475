//! Interpolatory quadrature rules on `[0, 1]` used by the exponential
//! integrators.
//!
//! A rule with nodes `c_1..c_s` stores the matrix `a_ij` such that the
//! Lagrange basis polynomial of node `i` reads
//!
//! ```text
//! l_i(θ) = a_i1 + a_i2 θ + a_i3 θ²/2! + … + a_is θ^{s-1}/(s-1)!
//! ```
//!
//! With that normalisation the weights of the exponential rule are
//! `b_i(z) = Σ_j a_ij φ_j(z)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::scalar::{factorials, Scalar};

const NEWTON_MAX_ITER: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleKind {
    Trapezoidal,
    Simpson,
    Gauss,
    Lobatto,
    Custom,
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            RuleKind::Trapezoidal => "trapezoidal",
            RuleKind::Simpson => "simpson",
            RuleKind::Gauss => "gauss",
            RuleKind::Lobatto => "lobatto",
            RuleKind::Custom => "custom",
        };
        f.write_str(name)
    }
}

/// Nodes and Lagrange coefficient matrix of an interpolatory rule.
///
/// Immutable once built.
#[derive(Clone, Debug)]
pub struct QuadratureRule<T> {
    kind: RuleKind,
    nodes: Vec<T>,
    coeffs: Matrix<T>,
}

impl<T: Scalar> QuadratureRule<T> {
    /// Gauss–Legendre nodes mapped to `[0, 1]`. `s = 1` is the midpoint rule.
    pub fn gauss(s: usize) -> Result<Self> {
        if s < 1 {
            return Err(Error::InvalidArgument("gauss rule needs s >= 1".into()));
        }
        let nodes = gauss_legendre_nodes::<T>(s)?.into_iter().map(to_unit_interval).collect();
        Self::build(RuleKind::Gauss, nodes)
    }

    /// Gauss–Lobatto nodes mapped to `[0, 1]` (both endpoints included).
    pub fn lobatto(s: usize) -> Result<Self> {
        if s < 2 {
            return Err(Error::InvalidArgument("lobatto rule needs s >= 2".into()));
        }
        let (nodes, _) = gauss_lobatto::<T>(s)?;
        Self::build(RuleKind::Lobatto, nodes.into_iter().map(to_unit_interval).collect())
    }

    pub fn trapezoidal() -> Self {
        Self::build(RuleKind::Trapezoidal, vec![T::zero(), T::one()]).expect("fixed nodes")
    }

    pub fn simpson() -> Self {
        Self::build(RuleKind::Simpson, vec![T::zero(), T::lit(0.5), T::one()]).expect("fixed nodes")
    }

    /// User supplied nodes. Order results are only established for the
    /// canonical families, so the rule keeps the `Custom` tag.
    pub fn custom(nodes: Vec<T>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::InvalidArgument("a rule needs at least one node".into()));
        }
        if let Some(c) = nodes.iter().find(|&&c| !(c >= T::zero() && c <= T::one())) {
            return Err(Error::InvalidArgument(format!("node {c} outside [0, 1]")));
        }
        Self::build(RuleKind::Custom, nodes)
    }

    fn build(kind: RuleKind, nodes: Vec<T>) -> Result<Self> {
        let coeffs = lagrange_coefficients(&nodes)?;
        Ok(Self { kind, nodes, coeffs })
    }

    pub fn kind(&self) -> RuleKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn coeffs(&self) -> &Matrix<T> {
        &self.coeffs
    }

    /// `a_ij` with one-based `j` as in the expansion above.
    #[inline]
    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.coeffs[(i, j - 1)]
    }

    /// Evaluates `l_i(θ)` from the stored coefficients.
    pub fn lagrange_basis(&self, i: usize, theta: T) -> T {
        let s = self.len();
        let mut acc = T::zero();
        let mut power = T::one();
        for j in 0..s {
            acc = acc + self.coeffs[(i, j)] * power;
            power = power * theta / T::from_count(j + 1);
        }
        acc
    }

    /// `∫₀¹ l_i(θ) dθ = Σ_j a_ij / j!`, the weights of the exponential rule at `z = 0`.
    pub fn weights_at_zero(&self) -> Vec<T> {
        let s = self.len();
        let fact = factorials::<T>(s);
        (0..s).map(|i| (1..=s).fold(T::zero(), |acc, j| acc + self.coeff(i, j) / fact[j])).collect()
    }

    /// Largest `d` such that the classical rule integrates `θ^r` exactly for all `r <= d`.
    /// Returns `None` when even constants fail, which cannot happen for a valid rule.
    pub fn exactness_degree(&self) -> Option<usize> {
        let tol = T::lit(1e-10).max(T::epsilon() * T::lit(1e3));
        let w = self.weights_at_zero();
        let mut degree = None;
        // No s-point interpolatory rule is exact beyond degree 2s - 1.
        for r in 0..=2 * self.len() {
            let quad = w.iter().zip(&self.nodes).fold(T::zero(), |acc, (&wi, &c)| acc + wi * c.powi(r as i32));
            let exact = T::one() / T::from_count(r + 1);
            if (quad - exact).abs() > tol {
                break;
            }
            degree = Some(r);
        }
        degree
    }

    /// Trace depth pairing the rule with its full classical order:
    /// `2s` for Gauss, `2s - 2` for Lobatto, trapezoidal and Simpson.
    pub fn default_trace_depth(&self) -> usize {
        self.exactness_degree().map_or(1, |d| d + 1)
    }
}

#[inline]
fn to_unit_interval<T: Scalar>(x: T) -> T {
    (T::one() + x) / (T::one() + T::one())
}

/// Row `i` holds `(j-1)! × [θ^{j-1}] l_i(θ)` for `j = 1..s`.
pub fn lagrange_coefficients<T: Scalar>(nodes: &[T]) -> Result<Matrix<T>> {
    let s = nodes.len();
    let tol = T::epsilon() * T::lit(4.0);
    for i in 0..s {
        for m in i + 1..s {
            if (nodes[i] - nodes[m]).abs() <= tol {
                return Err(Error::DuplicateNodes(i, m));
            }
        }
    }
    let fact = factorials::<T>(s);
    let mut out = Matrix::zeros(s, s);
    for i in 0..s {
        // Ascending monomial coefficients of Π_{m≠i} (θ - c_m).
        let mut poly = vec![T::one()];
        let mut denom = T::one();
        for (m, &cm) in nodes.iter().enumerate() {
            if m == i {
                continue;
            }
            let mut next = vec![T::zero(); poly.len() + 1];
            for (deg, &p) in poly.iter().enumerate() {
                next[deg + 1] = next[deg + 1] + p;
                next[deg] = next[deg] - cm * p;
            }
            poly = next;
            denom = denom * (nodes[i] - cm);
        }
        for (j, &p) in poly.iter().enumerate() {
            out[(i, j)] = fact[j] * p / denom;
        }
    }
    Ok(out)
}

/// `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair<T: Scalar>(n: usize, x: T) -> (T, T) {
    let mut prev = T::one();
    let mut cur = x;
    if n == 0 {
        return (prev, T::zero());
    }
    for k in 1..n {
        let kk = T::from_count(k);
        let next = ((kk + kk + T::one()) * x * cur - kk * prev) / (kk + T::one());
        prev = cur;
        cur = next;
    }
    (cur, prev)
}

/// Roots of `P_s` on `[-1, 1]`, ascending, by Newton iteration from
/// Chebyshev-type initial guesses.
pub fn gauss_legendre_nodes<T: Scalar>(s: usize) -> Result<Vec<T>> {
    let n = T::from_count(s);
    let half = s / 2;
    let mut upper = Vec::with_capacity(half);
    for i in 0..half {
        let guess = (T::PI() * (T::from_count(i) + T::lit(0.75)) / (n + T::lit(0.5))).cos();
        let mut x = guess;
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITER {
            let (p, q) = legendre_pair(s, x);
            // P'_s(x) = s (x P_s - P_{s-1}) / (x² - 1)
            let dp = n * (x * p - q) / (x * x - T::one());
            let dx = p / dp;
            x = x - dx;
            if dx.abs() <= T::epsilon() * T::lit(2.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NoConvergence { what: "Gauss-Legendre node solver", iterations: NEWTON_MAX_ITER });
        }
        upper.push(x);
    }
    let mut nodes: Vec<T> = upper.iter().map(|&x| -x).collect();
    if s % 2 == 1 {
        nodes.push(T::zero());
    }
    nodes.extend(upper.iter().rev().copied());
    Ok(nodes)
}

/// Legendre–Gauss–Lobatto nodes (ascending) and weights on `[-1, 1]` for
/// `points >= 2` nodes.
pub fn gauss_lobatto<T: Scalar>(points: usize) -> Result<(Vec<T>, Vec<T>)> {
    if points < 2 {
        return Err(Error::InvalidArgument("Gauss-Lobatto needs at least 2 points".into()));
    }
    let n = points - 1;
    let nn = T::from_count(n);
    let np = T::from_count(points);
    let mut x: Vec<T> = (0..=n).map(|i| (T::PI() * T::from_count(i) / nn).cos()).collect();
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let mut worst = T::zero();
        for xi in x.iter_mut() {
            let (p, q) = legendre_pair(n, *xi);
            let dx = (*xi * p - q) / (np * p);
            *xi = *xi - dx;
            worst = worst.max(dx.abs());
        }
        if worst <= T::epsilon() * T::lit(2.0) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence { what: "Gauss-Lobatto node solver", iterations: NEWTON_MAX_ITER });
    }
    x.reverse();
    x[0] = -T::one();
    x[n] = T::one();
    for i in 1..=n / 2 {
        let sym = (x[n - i] - x[i]) / (T::one() + T::one());
        x[i] = -sym;
        x[n - i] = sym;
    }
    if n.is_multiple_of(2) {
        x[n / 2] = T::zero();
    }
    let two = T::one() + T::one();
    let w = x
        .iter()
        .map(|&xi| {
            let (p, _) = legendre_pair(n, xi);
            two / (nn * np * p * p)
        })
        .collect();
    Ok((x, w))
}
