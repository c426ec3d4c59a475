//! Convergence studies: local and global errors over a sequence of step
//! sizes, order estimates and CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::integrator::{rational_to_scalar, IntegratorConfig, Rational};
use crate::phi::PhiEvaluator;
use crate::problem::Problem;
use crate::quadrature::QuadratureRule;
use crate::scalar::Scalar;
use crate::space::SpaceDiscretization;

/// Errors below this are treated as roundoff and get no order estimate.
pub const ORDER_FLOOR: f64 = 1e-13;

pub const CSV_HEADER: &str = "k,local_err,local_order,global_err,global_order,wall_time_s";

#[derive(Clone, Debug)]
pub struct ConvergenceRecord<T> {
    pub k: Rational,
    /// `max_n ‖P_h u(t_{n+1}) - step(P_h u(t_n))‖`.
    pub local_err: T,
    pub local_order: Option<T>,
    /// `‖P_h u(T) - U_N‖`.
    pub global_err: T,
    pub global_order: Option<T>,
    /// Seconds spent on the global run.
    pub wall_time: f64,
}

/// `log₂(err_coarse / err_fine)` for dyadic step pairs; `None` when either
/// error is not positive.
pub fn estimate_order<T: Scalar>(err_coarse: T, err_fine: T) -> Option<T> {
    order_between(err_coarse, err_fine, T::lit(2.0))
}

fn order_between<T: Scalar>(err_coarse: T, err_fine: T, ratio: T) -> Option<T> {
    if !(err_coarse > T::zero() && err_fine > T::zero()) {
        return None;
    }
    Some((err_coarse / err_fine).ln() / ratio.ln())
}

fn floored_order<T: Scalar>(coarse: T, fine: T, ratio: T) -> Option<T> {
    let floor = T::lit(ORDER_FLOOR);
    if coarse < floor || fine < floor {
        return None;
    }
    order_between(coarse, fine, ratio)
}

/// Local and global errors for every step size in `steps`, coarsest first.
///
/// Step sizes are processed in parallel; results do not depend on the
/// thread count.
pub fn run_convergence<T: Scalar, P: Problem<T> + ?Sized>(
    prob: &P,
    ev: &PhiEvaluator<'_, T>,
    template: &IntegratorConfig<T>,
    steps: &[Rational],
) -> Result<Vec<ConvergenceRecord<T>>> {
    let t0: T = rational_to_scalar(template.t0);
    if prob.exact(T::lit(0.5), t0).is_none() {
        return Err(Error::MissingExact);
    }
    let mut records = steps
        .par_iter()
        .map(|&k| measure(prob, ev, &template.clone().with_step(k)))
        .collect::<Result<Vec<_>>>()?;
    for i in 1..records.len() {
        let ratio: T = rational_to_scalar(records[i - 1].k / records[i].k);
        records[i].local_order = floored_order(records[i - 1].local_err, records[i].local_err, ratio);
        records[i].global_order = floored_order(records[i - 1].global_err, records[i].global_err, ratio);
    }
    Ok(records)
}

fn measure<T: Scalar, P: Problem<T> + ?Sized>(
    prob: &P,
    ev: &PhiEvaluator<'_, T>,
    config: &IntegratorConfig<T>,
) -> Result<ConvergenceRecord<T>> {
    let disc = ev.discretization();
    let steps = config.steps()?;
    let exact_at = |t: T| -> Vec<T> { disc.restrict(|x| prob.exact(x, t).expect("exact solution")) };
    let error = |a: &[T], b: &[T]| -> Result<T> {
        let diff: Vec<T> = a.iter().zip(b).map(|(&x, &y)| x - y).collect();
        disc.discrete_norm(&diff)
    };

    let started = Instant::now();
    let stepper = config.stepper(ev, prob)?;
    let mut u = disc.restrict(|x| prob.initial(x));
    for n in 0..steps {
        u = stepper.step(config.time(n), &u)?;
    }
    let wall_time = started.elapsed().as_secs_f64();
    let global_err = error(&exact_at(config.time(steps)), &u)?;

    let mut local_err = T::zero();
    let mut current = exact_at(config.time(0));
    for n in 0..steps {
        let next_exact = exact_at(config.time(n + 1));
        let stepped = stepper.step(config.time(n), &current)?;
        local_err = local_err.max(error(&next_exact, &stepped)?);
        current = next_exact;
    }

    Ok(ConvergenceRecord { k: config.step, local_err, local_order: None, global_err, global_order: None, wall_time })
}

/// Writes the CSV table. With `timings == false` the wall-time column is
/// left empty so that repeated runs are byte-identical.
pub fn write_csv<T: Scalar, W: Write>(records: &[ConvergenceRecord<T>], mut out: W, timings: bool) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        let order = |o: Option<T>| o.map(|v| format!("{:.2}", v.to_f64_lossy())).unwrap_or_default();
        let time = if timings { format!("{:.6}", r.wall_time) } else { String::new() };
        writeln!(
            out,
            "{},{:.4e},{},{:.4e},{},{}",
            r.k,
            r.local_err.to_f64_lossy(),
            order(r.local_order),
            r.global_err.to_f64_lossy(),
            order(r.global_order),
            time
        )?;
    }
    out.flush()
}

pub fn emit_csv<T: Scalar>(records: &[ConvergenceRecord<T>], path: &Path, timings: bool) -> Result<()> {
    if records.is_empty() {
        return Err(Error::EmptyRecords);
    }
    let io_err = |source| Error::Io { path: path.to_path_buf(), source };
    let file = std::fs::File::create(path).map_err(io_err)?;
    write_csv(records, std::io::BufWriter::new(file), timings).map_err(io_err)
}

/// Space discretization selector, written `fd:<M>` or `lgl:<J>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpaceSpec {
    Fd(usize),
    Lgl(usize),
}

impl SpaceSpec {
    pub fn build<T: Scalar>(self) -> Result<SpaceDiscretization<T>> {
        match self {
            SpaceSpec::Fd(m) => SpaceDiscretization::finite_difference(m),
            SpaceSpec::Lgl(j) => SpaceDiscretization::lgl_collocation(j),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpaceSpec::Fd(m) => write!(f, "fd:{m}"),
            SpaceSpec::Lgl(j) => write!(f, "lgl:{j}"),
        }
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad space `{s}` (expected fd:<M> or lgl:<J>)"));
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        match kind {
            "fd" => Ok(SpaceSpec::Fd(n)),
            "lgl" => Ok(SpaceSpec::Lgl(n)),
            _ => Err(bad()),
        }
    }
}

/// Rule selector: `gauss:<s>`, `lobatto:<s>`, `trapezoidal`, `simpson`, `midpoint`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleSpec {
    Gauss(usize),
    Lobatto(usize),
    Trapezoidal,
    Simpson,
    Midpoint,
}

impl RuleSpec {
    pub fn build<T: Scalar>(self) -> Result<QuadratureRule<T>> {
        match self {
            RuleSpec::Gauss(s) => QuadratureRule::gauss(s),
            RuleSpec::Lobatto(s) => QuadratureRule::lobatto(s),
            RuleSpec::Trapezoidal => Ok(QuadratureRule::trapezoidal()),
            RuleSpec::Simpson => Ok(QuadratureRule::simpson()),
            RuleSpec::Midpoint => QuadratureRule::gauss(1),
        }
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RuleSpec::Gauss(s) => write!(f, "gauss:{s}"),
            RuleSpec::Lobatto(s) => write!(f, "lobatto:{s}"),
            RuleSpec::Trapezoidal => f.write_str("trapezoidal"),
            RuleSpec::Simpson => f.write_str("simpson"),
            RuleSpec::Midpoint => f.write_str("midpoint"),
        }
    }
}

impl FromStr for RuleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad rule `{s}`"));
        match s {
            "trapezoidal" => return Ok(RuleSpec::Trapezoidal),
            "simpson" => return Ok(RuleSpec::Simpson),
            "midpoint" => return Ok(RuleSpec::Midpoint),
            _ => {}
        }
        let (kind, n) = s.split_once(':').ok_or_else(bad)?;
        let n: usize = n.parse().map_err(|_| bad())?;
        match kind {
            "gauss" => Ok(RuleSpec::Gauss(n)),
            "lobatto" => Ok(RuleSpec::Lobatto(n)),
            _ => Err(bad()),
        }
    }
}

/// Parses a comma separated step list such as `1/10,1/20,1/40`.
pub fn parse_steps(text: &str) -> Result<Vec<Rational>> {
    let steps = text.split(',').map(crate::integrator::parse_rational).collect::<Result<Vec<_>>>()?;
    if steps.is_empty() {
        return Err(Error::InvalidArgument("empty step list".into()));
    }
    if steps.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidArgument("step sizes must be strictly decreasing".into()));
    }
    Ok(steps)
}

/// `k_start, k_start/2, …` (`count` entries).
pub fn dyadic_steps(k_start: Rational, count: usize) -> Vec<Rational> {
    (0..count).map(|i| k_start / Rational::from_integer(1 << i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: Rational, local: f64, global: f64) -> ConvergenceRecord<f64> {
        ConvergenceRecord { k, local_err: local, local_order: None, global_err: global, global_order: None, wall_time: 0.5 }
    }

    #[test]
    fn order_examples() {
        assert!((estimate_order(1e-4, 2.5e-5).unwrap() - 2.0f64).abs() < 1e-12);
        assert!((estimate_order(8e-6, 1e-6).unwrap() - 3.0f64).abs() < 1e-12);
        let o: f64 = estimate_order(8.0170e-5, 1.2961e-5).unwrap();
        assert!((o - 2.6).abs() < 0.05, "{o}");
        assert_eq!(estimate_order(0.0, 1e-3f64), None);
        assert_eq!(estimate_order(1e-3, -1.0f64), None);
    }

    #[test]
    fn csv_single_record_has_empty_orders() {
        let mut buf = Vec::new();
        write_csv(&[record(Rational::new(1, 10), 1.23456e-4, 5.5e-5)], &mut buf, true).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "1/10,1.2346e-4,,5.5000e-5,,0.500000");
    }

    #[test]
    fn csv_without_timings() {
        let mut r = record(Rational::new(1, 320), 4.3171e-9, 5.4651e-8);
        r.local_order = Some(3.0);
        r.global_order = Some(2.0);
        let mut buf = Vec::new();
        write_csv(&[r], &mut buf, false).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("1/320,4.3171e-9,3.00,5.4651e-8,2.00,\n"));
    }

    #[test]
    fn emit_rejects_empty_and_reports_path() {
        let empty: Vec<ConvergenceRecord<f64>> = Vec::new();
        assert!(matches!(emit_csv(&empty, Path::new("/tmp/x.csv"), true), Err(Error::EmptyRecords)));
        let err = emit_csv(&[record(Rational::new(1, 2), 1.0, 1.0)], Path::new("/nonexistent-dir/out.csv"), true).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }

    #[test]
    fn parses_selectors() {
        assert_eq!("fd:999".parse::<SpaceSpec>().unwrap(), SpaceSpec::Fd(999));
        assert_eq!("lgl:39".parse::<SpaceSpec>().unwrap(), SpaceSpec::Lgl(39));
        assert!("cheb:10".parse::<SpaceSpec>().is_err());
        assert_eq!("gauss:3".parse::<RuleSpec>().unwrap(), RuleSpec::Gauss(3));
        assert_eq!("midpoint".parse::<RuleSpec>().unwrap(), RuleSpec::Midpoint);
        assert!("radau:2".parse::<RuleSpec>().is_err());
        assert_eq!(parse_steps("1/10,1/20").unwrap(), vec![Rational::new(1, 10), Rational::new(1, 20)]);
        assert!(parse_steps("1/20,1/10").is_err());
        assert_eq!(dyadic_steps(Rational::new(1, 10), 3)[2], Rational::new(1, 40));
    }
}
