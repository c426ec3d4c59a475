//! Initial boundary value problems `u_t = u_xx + f`, `u(·,0) = u0`,
//! `u(0,t) = g₀(t)`, `u(1,t) = g₁(t)` on `[0, 1]`.
//!
//! With `A = ∂²/∂x²` and `∂` the boundary trace, the corrected integrator
//! needs `∂A^j u(t)` and `∂A^l f(t)`. The former follow from the data through
//! `∂A^j u = g^{(j)} - Σ_{l<j} ∂A^l f^{(j-1-l)}`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::space::Side;

/// Highest trace depth the built-in problems are used with.
pub const MAX_TRACE_DEPTH: usize = 8;

pub trait Problem<T: Scalar>: Sync {
    fn source(&self, x: T, t: T) -> T;

    fn initial(&self, x: T) -> T;

    /// `g^{(r)}(t)` on the given side.
    fn boundary_derivative(&self, r: usize, t: T, side: Side) -> T;

    /// `∂ A^l f^{(r)}(t)`: boundary value of `∂_x^{2l} ∂_t^r f`.
    fn source_trace(&self, l: usize, r: usize, t: T, side: Side) -> T;

    /// Highest derivative order (in `l + r` and in `r` for `g`) the problem supplies.
    fn max_derivative_order(&self) -> usize;

    fn boundary(&self, t: T, side: Side) -> T {
        self.boundary_derivative(0, t, side)
    }

    fn exact(&self, _x: T, _t: T) -> Option<T> {
        None
    }

    /// Analytic `∂A^j u(t)`, when known. Used only for cross-checking.
    fn solution_trace(&self, _j: usize, _t: T, _side: Side) -> Option<T> {
        None
    }
}

/// `∂A^j u(t)` from the boundary data and the source.
pub fn trace_from_data<T: Scalar, P: Problem<T> + ?Sized>(prob: &P, j: usize, t: T, side: Side) -> Result<T> {
    let max = prob.max_derivative_order();
    if j > max {
        return Err(Error::TraceOrder { requested: j, max });
    }
    let mut value = prob.boundary_derivative(j, t, side);
    for l in 0..j {
        value = value - prob.source_trace(l, j - 1 - l, t, side);
    }
    Ok(value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProblemKind {
    /// `u = x(1-x)e^{-t}`, homogeneous boundary data.
    Poly,
    /// `u = e^{x-t}`, time-dependent boundary data.
    Exp,
    /// `u = sin(πx)e^{-π²t}`, no source, homogeneous data.
    Sine,
    /// `u ≡ c`.
    Constant(f64),
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemKind::Poly => f.write_str("poly"),
            ProblemKind::Exp => f.write_str("exp"),
            ProblemKind::Sine => f.write_str("sine"),
            ProblemKind::Constant(c) => write!(f, "constant({c})"),
        }
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "poly" => Ok(ProblemKind::Poly),
            "exp" => Ok(ProblemKind::Exp),
            "sine" => Ok(ProblemKind::Sine),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

/// Problems with closed-form solutions and hand-coded derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Manufactured {
    kind: ProblemKind,
}

pub fn make_problem(name: &str) -> Result<Manufactured> {
    Ok(Manufactured::new(name.parse()?))
}

impl Manufactured {
    pub fn new(kind: ProblemKind) -> Self {
        Self { kind }
    }

    pub fn constant(c: f64) -> Self {
        Self { kind: ProblemKind::Constant(c) }
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    /// `∂_x^{2j} ∂_t^r u(x, t)`.
    pub fn solution_derivative<T: Scalar>(&self, j: usize, r: usize, x: T, t: T) -> T {
        match self.kind {
            ProblemKind::Poly => sign::<T>(r) * poly_even_derivative(j, x) * (-t).exp(),
            ProblemKind::Exp => sign::<T>(r) * (x - t).exp(),
            ProblemKind::Sine => {
                let pi = T::PI();
                let lam = -pi * pi;
                lam.powi((j + r) as i32) * (pi * x).sin() * (lam * t).exp()
            }
            ProblemKind::Constant(c) => {
                if j == 0 && r == 0 {
                    T::lit(c)
                } else {
                    T::zero()
                }
            }
        }
    }

    /// `∂_x^{2l} ∂_t^r f(x, t)`.
    pub fn source_derivative<T: Scalar>(&self, l: usize, r: usize, x: T, t: T) -> T {
        match self.kind {
            ProblemKind::Poly => {
                // f = (2 - x(1-x)) e^{-t}
                let two = if l == 0 { T::lit(2.0) } else { T::zero() };
                sign::<T>(r) * (two - poly_even_derivative(l, x)) * (-t).exp()
            }
            ProblemKind::Exp => -T::lit(2.0) * sign::<T>(r) * (x - t).exp(),
            ProblemKind::Sine | ProblemKind::Constant(_) => T::zero(),
        }
    }
}

#[inline]
fn sign<T: Scalar>(r: usize) -> T {
    if r.is_multiple_of(2) {
        T::one()
    } else {
        -T::one()
    }
}

/// `d^{2j}/dx^{2j} [x(1-x)]`.
fn poly_even_derivative<T: Scalar>(j: usize, x: T) -> T {
    match j {
        0 => x * (T::one() - x),
        1 => -T::lit(2.0),
        _ => T::zero(),
    }
}

impl<T: Scalar> Problem<T> for Manufactured {
    fn source(&self, x: T, t: T) -> T {
        self.source_derivative(0, 0, x, t)
    }

    fn initial(&self, x: T) -> T {
        self.solution_derivative(0, 0, x, T::zero())
    }

    fn boundary_derivative(&self, r: usize, t: T, side: Side) -> T {
        match (self.kind, side) {
            // sin(π) is not exactly zero in floating point.
            (ProblemKind::Sine, _) => T::zero(),
            (ProblemKind::Poly, _) => T::zero(),
            _ => self.solution_derivative(0, r, side.coordinate(), t),
        }
    }

    fn source_trace(&self, l: usize, r: usize, t: T, side: Side) -> T {
        self.source_derivative(l, r, side.coordinate(), t)
    }

    fn max_derivative_order(&self) -> usize {
        MAX_TRACE_DEPTH + 1
    }

    fn exact(&self, x: T, t: T) -> Option<T> {
        Some(self.solution_derivative(0, 0, x, t))
    }

    fn solution_trace(&self, j: usize, t: T, side: Side) -> Option<T> {
        Some(match self.kind {
            ProblemKind::Sine => T::zero(),
            _ => self.solution_derivative(j, 0, side.coordinate(), t),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn source_examples() {
        let poly = make_problem("poly").unwrap();
        assert_eq!(Problem::<f64>::source(&poly, 0.5, 0.0), 1.75);
        let exp = make_problem("exp").unwrap();
        assert_eq!(Problem::<f64>::source(&exp, 0.0, 0.0), -2.0);
        assert_eq!(Problem::<f64>::source_trace(&poly, 0, 0, 0.0, Side::Left), 2.0);
    }

    #[test]
    fn trace_recurrence_examples() {
        let exp = make_problem("exp").unwrap();
        let got: f64 = trace_from_data(&exp, 1, 0.0, Side::Right).unwrap();
        assert!((got - std::f64::consts::E).abs() < 1e-15);
        let poly = make_problem("poly").unwrap();
        let got: f64 = trace_from_data(&poly, 1, 0.0, Side::Left).unwrap();
        assert_eq!(got, -2.0);
        for side in Side::BOTH {
            let g: f64 = trace_from_data(&exp, 0, 0.3, side).unwrap();
            assert_eq!(g, Problem::<f64>::boundary(&exp, 0.3, side));
        }
    }

    #[test]
    fn trace_order_limit() {
        let exp = make_problem("exp").unwrap();
        assert!(matches!(trace_from_data::<f64, _>(&exp, 10, 0.0, Side::Left), Err(Error::TraceOrder { .. })));
    }

    #[test]
    fn unknown_name_rejected() {
        assert!(matches!(make_problem("cosh"), Err(Error::UnknownProblem(_))));
    }

    #[test]
    fn poly_traces_of_au() {
        let poly = make_problem("poly").unwrap();
        for t in [0.0, 0.4, 1.0f64] {
            for side in Side::BOTH {
                assert_eq!(poly.solution_trace(1, t, side), Some(-2.0 * (-t).exp()));
                for j in 2..=8 {
                    assert_eq!(poly.solution_trace(j, t, side), Some(0.0));
                }
            }
        }
    }
}
