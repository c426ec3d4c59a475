//! Exponential quadrature time integrators for the 1-D heat equation with
//! time-dependent Dirichlet data.
//!
//! The semidiscrete system `U' = A_{h,0} U + B_h g(t) + f_h(t)` is advanced
//! with a collocation-type exponential quadrature rule. Two variants are
//! offered. The classical scheme samples the source at the nodes and loses
//! order to boundary layers. The corrected scheme adds boundary trace terms
//! `∂A^j u(t_n)` and recovers the full classical order.
//!
//! Everything is generic over [`Scalar`] (implemented for `f32` and `f64`).
//! The aliases at the crate root fix the scalar to `f64`.

pub mod error;
pub mod harness;
pub mod integrator;
pub mod linalg;
pub mod phi;
pub mod problem;
pub mod quadrature;
pub mod scalar;
pub mod space;
pub mod tables;
pub mod verify;

pub use error::{Error, Result};
pub use harness::{run_convergence, ConvergenceRecord, RuleSpec, SpaceSpec};
pub use integrator::{integrate, integrate_trajectory, Approach, IntegratorConfig, Rational, State, Stepper};
pub use phi::{phi_scalar, PhiEvaluator, PhiTable};
pub use problem::{make_problem, trace_from_data, Manufactured, Problem, ProblemKind};
pub use quadrature::{QuadratureRule, RuleKind};
pub use scalar::Scalar;
pub use space::{Side, SpaceDiscretization, SpaceKind};

pub type Rule = QuadratureRule<f64>;
pub type Discretization = SpaceDiscretization<f64>;
pub type Evaluator<'a> = PhiEvaluator<'a, f64>;
pub type Config = IntegratorConfig<f64>;
pub type Record = ConvergenceRecord<f64>;
pub type Mat = linalg::Matrix<f64>;
