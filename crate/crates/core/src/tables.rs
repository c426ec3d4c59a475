//! Canned convergence experiments, each run with both approaches.

use std::fmt;

use crate::error::{Error, Result};
use crate::harness::{dyadic_steps, run_convergence, ConvergenceRecord, RuleSpec, SpaceSpec};
use crate::integrator::{Approach, IntegratorConfig, Rational};
use crate::phi::PhiEvaluator;
use crate::problem::{Manufactured, ProblemKind};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug)]
pub struct TableConfig {
    pub id: u8,
    pub problem: ProblemKind,
    pub space: SpaceSpec,
    pub rule: RuleSpec,
    /// Trace depth of the corrected run.
    pub trace_depth: usize,
    pub k_start: Rational,
    pub count: usize,
}

pub const TABLE_IDS: std::ops::RangeInclusive<u8> = 1..=9;

pub fn table_config(id: u8) -> Result<TableConfig> {
    use ProblemKind::{Exp, Poly};
    use RuleSpec::*;
    let lgl = SpaceSpec::Lgl(39);
    let fd = SpaceSpec::Fd(999);
    let r = Rational::new;
    let (problem, space, rule, trace_depth, k_start, count) = match id {
        1 => (Poly, fd, Trapezoidal, 2, r(1, 10), 6),
        2 => (Exp, fd, Trapezoidal, 2, r(1, 10), 6),
        3 => (Exp, lgl, Simpson, 4, r(1, 2), 6),
        4 => (Poly, lgl, Midpoint, 2, r(1, 4), 6),
        5 => (Poly, lgl, Gauss(2), 4, r(1, 2), 6),
        6 => (Exp, lgl, Midpoint, 2, r(1, 8), 6),
        7 => (Exp, lgl, Gauss(2), 4, r(1, 2), 6),
        8 => (Exp, lgl, Gauss(3), 6, r(1, 2), 6),
        9 => (Exp, lgl, Gauss(4), 8, r(1, 2), 5),
        _ => return Err(Error::InvalidArgument(format!("table id must be in 1..=9, got {id}"))),
    };
    Ok(TableConfig { id, problem, space, rule, trace_depth, k_start, count })
}

impl TableConfig {
    pub fn steps(&self) -> Vec<Rational> {
        dyadic_steps(self.k_start, self.count)
    }
}

impl fmt::Display for TableConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "table {}: {} rule, {} space, problem {}, corrected p={}", self.id, self.rule, self.space, self.problem, self.trace_depth)
    }
}

#[derive(Clone, Debug)]
pub struct TableRun<T> {
    pub config: TableConfig,
    pub classical: Vec<ConvergenceRecord<T>>,
    pub corrected: Vec<ConvergenceRecord<T>>,
}

pub fn run_table<T: Scalar>(id: u8) -> Result<TableRun<T>> {
    let config = table_config(id)?;
    let disc = config.space.build::<T>()?;
    let ev = PhiEvaluator::new(&disc)?;
    let prob = Manufactured::new(config.problem);
    let steps = config.steps();
    let rule = config.rule.build::<T>()?;
    let classical = IntegratorConfig::new(rule.clone(), Approach::Classical, steps[0]);
    let corrected = IntegratorConfig::new(rule, Approach::Corrected, steps[0]).with_trace_depth(config.trace_depth);
    Ok(TableRun {
        config,
        classical: run_convergence(&prob, &ev, &classical, &steps)?,
        corrected: run_convergence(&prob, &ev, &corrected, &steps)?,
    })
}

impl<T: Scalar> fmt::Display for TableRun<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.config)?;
        writeln!(f, "{:>7} | {:>10} {:>5} {:>10} {:>5} | {:>10} {:>5} {:>10} {:>5}", "k", "loc", "ord", "glob", "ord", "loc", "ord", "glob", "ord")?;
        writeln!(f, "{:>7} | {:^33} | {:^33}", "", "classical", "corrected")?;
        let order = |o: Option<T>| o.map(|v| format!("{:.1}", v.to_f64_lossy())).unwrap_or_default();
        for (c, s) in self.classical.iter().zip(&self.corrected) {
            writeln!(
                f,
                "{:>7} | {:>10.4e} {:>5} {:>10.4e} {:>5} | {:>10.4e} {:>5} {:>10.4e} {:>5}",
                c.k.to_string(),
                c.local_err.to_f64_lossy(),
                order(c.local_order),
                c.global_err.to_f64_lossy(),
                order(c.global_order),
                s.local_err.to_f64_lossy(),
                order(s.local_order),
                s.global_err.to_f64_lossy(),
                order(s.global_order),
            )?;
        }
        Ok(())
    }
}
