//! Exponential quadrature steppers.
//!
//! * **Classical**: discretize in space first, then apply the quadrature
//!   rule to `U' = A_{h,0} U + F(t)` with
//!   `F = P_h f + A_h Q_h g + L_h Q_h (∂f - g')`.
//! * **Corrected**: discretize in time first with boundary-aware auxiliary
//!   problems, which adds `φ`-weighted boundary-trace corrections up to
//!   depth `p` and avoids order reduction.
//!
//! All `φ` applications of one step are accumulated in the modal basis of
//! the cached factorization, so a step costs `s + 1` forward transforms and
//! one backward transform regardless of `p`.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::phi::{PhiEvaluator, PhiTable};
use crate::problem::{trace_from_data, Problem};
use crate::quadrature::QuadratureRule;
use crate::scalar::Scalar;
use crate::space::Side;

/// Exact time values (step sizes, interval endpoints).
pub type Rational = Ratio<i64>;

pub fn rational_to_scalar<T: Scalar>(r: Rational) -> T {
    T::from_i64(*r.numer()).expect("numerator") / T::from_i64(*r.denom()).expect("denominator")
}

/// Parses `"1/320"`, `"3"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::InvalidArgument(format!("cannot parse `{text}` as a rational number"));
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        if frac.is_empty() || frac.len() > 15 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let w: i64 = if whole.is_empty() || whole == "-" { 0 } else { whole.parse().map_err(|_| bad())? };
        let f: i64 = frac.parse().map_err(|_| bad())?;
        let den = 10i64.pow(frac.len() as u32);
        let mag = Rational::new(w.abs() * den + f, den);
        return Ok(if negative { -mag } else { mag });
    }
    text.parse::<i64>().map(Rational::from_integer).map_err(|_| bad())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Approach {
    Classical,
    Corrected,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Classical => "classical",
            Approach::Corrected => "corrected",
        })
    }
}

impl FromStr for Approach {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Approach::Classical),
            "corrected" => Ok(Approach::Corrected),
            other => Err(Error::InvalidArgument(format!("unknown approach `{other}`"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegratorConfig<T> {
    pub rule: QuadratureRule<T>,
    pub approach: Approach,
    /// Trace depth `p`; ignored by the classical approach.
    pub trace_depth: usize,
    pub step: Rational,
    pub t0: Rational,
    pub t_end: Rational,
}

impl<T: Scalar> IntegratorConfig<T> {
    /// Uses the rule's default trace depth on `[0, 1]`.
    pub fn new(rule: QuadratureRule<T>, approach: Approach, step: Rational) -> Self {
        let trace_depth = rule.default_trace_depth();
        Self { rule, approach, trace_depth, step, t0: Rational::zero(), t_end: Rational::from_integer(1) }
    }

    pub fn with_trace_depth(mut self, p: usize) -> Self {
        self.trace_depth = p;
        self
    }

    pub fn with_step(mut self, step: Rational) -> Self {
        self.step = step;
        self
    }

    /// Number of steps covering `[t0, t_end]` exactly.
    pub fn steps(&self) -> Result<usize> {
        if self.step <= Rational::zero() {
            return Err(Error::InvalidArgument(format!("step size must be positive, got {}", self.step)));
        }
        let length = self.t_end - self.t0;
        if length < Rational::zero() {
            return Err(Error::InvalidArgument(format!("empty interval [{}, {}]", self.t0, self.t_end)));
        }
        let n = length / self.step;
        if !n.is_integer() {
            return Err(Error::StepMismatch { step: self.step.to_string(), length: length.to_string() });
        }
        n.to_integer().to_usize().ok_or_else(|| Error::InvalidArgument("step count overflow".into()))
    }

    /// `t0 + n k`.
    pub fn time(&self, n: usize) -> T {
        rational_to_scalar(self.t0 + self.step * Rational::from_integer(n as i64))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct State<T> {
    pub t: T,
    pub u: Vec<T>,
}

/// One-step map for a fixed discretization, problem, rule and step size.
pub struct Stepper<'s, T: Scalar, P: ?Sized> {
    ev: &'s PhiEvaluator<'s, T>,
    prob: &'s P,
    rule: &'s QuadratureRule<T>,
    approach: Approach,
    depth: usize,
    k: T,
    table: PhiTable<T>,
    inject_hat: [Vec<T>; 2],
    lift_hat: Option<[Vec<T>; 2]>,
}

impl<'s, T: Scalar, P: Problem<T> + ?Sized> Stepper<'s, T, P> {
    pub fn new(
        ev: &'s PhiEvaluator<'s, T>,
        prob: &'s P,
        rule: &'s QuadratureRule<T>,
        approach: Approach,
        depth: usize,
        k: T,
    ) -> Result<Self> {
        let s = rule.len();
        let max_order = match approach {
            Approach::Classical => s,
            Approach::Corrected => {
                if depth < 1 {
                    return Err(Error::InvalidArgument("corrected scheme needs trace depth p >= 1".into()));
                }
                let max = prob.max_derivative_order();
                if depth + 1 > max {
                    return Err(Error::TraceOrder { requested: depth + 1, max });
                }
                depth + s
            }
        };
        let disc = ev.discretization();
        let table = ev.table(k, max_order)?;
        let inject_hat = [ev.to_modal(disc.left_injection())?, ev.to_modal(disc.right_injection())?];
        let lift_hat = match disc.trace_lift() {
            Some([l, r]) => Some([ev.to_modal(l)?, ev.to_modal(r)?]),
            None => None,
        };
        Ok(Self { ev, prob, rule, approach, depth, k, table, inject_hat, lift_hat })
    }

    pub fn step_size(&self) -> T {
        self.k
    }

    /// `P_h f(·, t) = L_h f - L_h Q_h ∂f`.
    fn restricted_source(&self, t: T) -> Vec<T> {
        let disc = self.ev.discretization();
        let mut v = disc.restrict(|x| self.prob.source(x, t));
        if let Some([l, r]) = disc.trace_lift() {
            let fl = self.prob.source_trace(0, 0, t, Side::Left);
            let fr = self.prob.source_trace(0, 0, t, Side::Right);
            for ((vi, &li), &ri) in v.iter_mut().zip(l).zip(r) {
                *vi = *vi - li * fl - ri * fr;
            }
        }
        v
    }

    /// Advances `u` from `t_n` to `t_n + k`.
    pub fn step(&self, t_n: T, u: &[T]) -> Result<Vec<T>> {
        let n = self.ev.dim();
        let s = self.rule.len();
        let k = self.k;
        let max_order = self.table.max_order();

        // Per φ-order coefficients of the boundary vectors (left, right) and
        // of the lift vectors, plus the combined source vector.
        let mut inject_coef = vec![[T::zero(); 2]; max_order + 1];
        let mut lift_coef = vec![[T::zero(); 2]; max_order + 1];
        let mut source_hat = vec![vec![T::zero(); n]; max_order + 1];

        let u_hat = self.ev.to_modal(u)?;

        if self.approach == Approach::Corrected {
            let p = self.depth;
            for (side_idx, side) in Side::BOTH.into_iter().enumerate() {
                let traces = (0..=p).map(|j| trace_from_data(self.prob, j, t_n, side)).collect::<Result<Vec<T>>>()?;
                for j in 1..=p {
                    let kj = k.powi(j as i32);
                    inject_coef[j][side_idx] = inject_coef[j][side_idx] + kj * traces[j - 1];
                    lift_coef[j][side_idx] = lift_coef[j][side_idx] - kj * traces[j];
                }
                inject_coef[p + 1][side_idx] = inject_coef[p + 1][side_idx] + k.powi(p as i32 + 1) * traces[p];
            }
        }

        for (i, &c) in self.rule.nodes().iter().enumerate() {
            let t_i = t_n + c * k;
            let f_hat = self.ev.to_modal(&self.restricted_source(t_i))?;
            for j in 1..=s {
                let w = k * self.rule.coeff(i, j);
                if w == T::zero() {
                    continue;
                }
                for (acc, &fh) in source_hat[j].iter_mut().zip(&f_hat) {
                    *acc = *acc + w * fh;
                }
                for (side_idx, side) in Side::BOTH.into_iter().enumerate() {
                    match self.approach {
                        Approach::Classical => {
                            let g = self.prob.boundary(t_i, side);
                            let df = self.prob.source_trace(0, 0, t_i, side);
                            let dg = self.prob.boundary_derivative(1, t_i, side);
                            inject_coef[j][side_idx] = inject_coef[j][side_idx] + w * g;
                            lift_coef[j][side_idx] = lift_coef[j][side_idx] + w * (df - dg);
                        }
                        Approach::Corrected => {
                            let p = self.depth;
                            for l in 0..p.saturating_sub(1) {
                                let kl = w * k.powi(l as i32 + 1);
                                let af = self.prob.source_trace(l, 0, t_i, side);
                                let af_next = self.prob.source_trace(l + 1, 0, t_i, side);
                                inject_coef[j + l + 1][side_idx] = inject_coef[j + l + 1][side_idx] + kl * af;
                                lift_coef[j + l + 1][side_idx] = lift_coef[j + l + 1][side_idx] - kl * af_next;
                            }
                            let last = self.prob.source_trace(p - 1, 0, t_i, side);
                            inject_coef[p + j][side_idx] = inject_coef[p + j][side_idx] + w * k.powi(p as i32) * last;
                        }
                    }
                }
            }
        }

        let [bl, br] = &self.inject_hat;
        let mut acc: Vec<T> = self.table.order(0).iter().zip(&u_hat).map(|(&e, &x)| e * x).collect();
        for j in 1..=max_order {
            let phi = self.table.order(j);
            let [cl, cr] = inject_coef[j];
            let src = &source_hat[j];
            for m in 0..n {
                acc[m] = acc[m] + phi[m] * (src[m] + cl * bl[m] + cr * br[m]);
            }
            if let Some([ll, lr]) = &self.lift_hat {
                let [dl, dr] = lift_coef[j];
                for m in 0..n {
                    acc[m] = acc[m] + phi[m] * (dl * ll[m] + dr * lr[m]);
                }
            }
        }
        self.ev.from_modal(&acc)
    }
}

pub fn classical_step<T: Scalar, P: Problem<T> + ?Sized>(
    ev: &PhiEvaluator<'_, T>,
    prob: &P,
    rule: &QuadratureRule<T>,
    state: &State<T>,
    k: T,
) -> Result<State<T>> {
    let stepper = Stepper::new(ev, prob, rule, Approach::Classical, 0, k)?;
    Ok(State { t: state.t + k, u: stepper.step(state.t, &state.u)? })
}

pub fn corrected_step<T: Scalar, P: Problem<T> + ?Sized>(
    ev: &PhiEvaluator<'_, T>,
    prob: &P,
    rule: &QuadratureRule<T>,
    p: usize,
    state: &State<T>,
    k: T,
) -> Result<State<T>> {
    let stepper = Stepper::new(ev, prob, rule, Approach::Corrected, p, k)?;
    Ok(State { t: state.t + k, u: stepper.step(state.t, &state.u)? })
}

impl<T: Scalar> IntegratorConfig<T> {
    pub fn stepper<'s, P: Problem<T> + ?Sized>(&'s self, ev: &'s PhiEvaluator<'s, T>, prob: &'s P) -> Result<Stepper<'s, T, P>> {
        Stepper::new(ev, prob, &self.rule, self.approach, self.trace_depth, rational_to_scalar(self.step))
    }
}

/// Runs the configured scheme from `P_h u0` and returns the final state.
pub fn integrate<T: Scalar, P: Problem<T> + ?Sized>(
    ev: &PhiEvaluator<'_, T>,
    prob: &P,
    config: &IntegratorConfig<T>,
) -> Result<State<T>> {
    let mut last = None;
    drive(ev, prob, config, |state| last = Some(state.clone()))?;
    Ok(last.expect("initial state is always visited"))
}

/// Like [`integrate`] but keeps every state, including the initial one.
pub fn integrate_trajectory<T: Scalar, P: Problem<T> + ?Sized>(
    ev: &PhiEvaluator<'_, T>,
    prob: &P,
    config: &IntegratorConfig<T>,
) -> Result<Vec<State<T>>> {
    let mut out = Vec::new();
    drive(ev, prob, config, |state| out.push(state.clone()))?;
    Ok(out)
}

fn drive<T: Scalar, P: Problem<T> + ?Sized>(
    ev: &PhiEvaluator<'_, T>,
    prob: &P,
    config: &IntegratorConfig<T>,
    mut visit: impl FnMut(&State<T>),
) -> Result<()> {
    let steps = config.steps()?;
    let disc = ev.discretization();
    let mut state = State { t: config.time(0), u: disc.restrict(|x| prob.initial(x)) };
    visit(&state);
    if steps == 0 {
        return Ok(());
    }
    let k: T = rational_to_scalar(config.step);
    let stepper = Stepper::new(ev, prob, &config.rule, config.approach, config.trace_depth, k)?;
    for n in 0..steps {
        let u = stepper.step(state.t, &state.u)?;
        state = State { t: config.time(n + 1), u };
        visit(&state);
    }
    Ok(())
}
