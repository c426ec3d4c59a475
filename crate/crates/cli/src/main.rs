use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use expquad::harness::{emit_csv, parse_steps, write_csv};
use expquad::integrator::parse_rational;
use expquad::tables::{run_table, TableRun};
use expquad::{
    verify, Approach, ConvergenceRecord, IntegratorConfig, PhiEvaluator, ProblemKind, Rational, RuleSpec, SpaceSpec,
};

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY: u8 = 3;

#[derive(Parser)]
#[command(name = "expquad", version, about = "Exponential quadrature for the 1-D heat equation with Dirichlet data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convergence study for one configuration, written as CSV.
    Run(RunArgs),
    /// Run the invariant suite and print a per-check report.
    Verify,
    /// Reproduce one of the canned convergence tables.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=9))]
        id: u8,
        /// Directory receiving `table<id>_classical.csv` and `table<id>_corrected.csv`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        no_timings: bool,
    },
    /// Gnuplot data: error against step size and against wall time.
    Plot(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = parse_problem)]
    problem: ProblemKind,
    /// `fd:<M>` or `lgl:<J>`.
    #[arg(long)]
    space: SpaceSpec,
    /// `gauss:<s>`, `lobatto:<s>`, `trapezoidal`, `simpson` or `midpoint`.
    #[arg(long)]
    rule: RuleSpec,
    #[arg(long, default_value = "corrected")]
    approach: Approach,
    /// Trace depth of the corrected scheme (defaults to the rule's).
    #[arg(long)]
    p: Option<usize>,
    #[arg(long, default_value = "0", value_parser = parse_time)]
    t0: Rational,
    #[arg(long = "T", default_value = "1", value_parser = parse_time)]
    t_end: Rational,
    /// Comma separated, strictly decreasing step sizes, e.g. `1/10,1/20,1/40`.
    #[arg(long, value_parser = parse_step_list)]
    k: StepList,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave the wall-time column empty so output is reproducible byte for byte.
    #[arg(long)]
    no_timings: bool,
}

#[derive(Clone)]
struct StepList(Vec<Rational>);

fn parse_problem(s: &str) -> Result<ProblemKind, String> {
    s.parse().map_err(|e: expquad::Error| e.to_string())
}

fn parse_time(s: &str) -> Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_step_list(s: &str) -> Result<StepList, String> {
    parse_steps(s).map(StepList).map_err(|e| e.to_string())
}

enum Failure {
    Usage(String),
    Numerical(String),
    Verification,
}

impl From<expquad::Error> for Failure {
    fn from(e: expquad::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    let outcome = match cli.command {
        Command::Run(args) => run(&args),
        Command::Verify => run_verify(),
        Command::Tables { id, out, no_timings } => tables(id, out.as_deref(), !no_timings),
        Command::Plot(args) => plot(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
        Err(Failure::Verification) => ExitCode::from(EXIT_VERIFY),
    }
}

fn convergence(args: &RunArgs) -> Result<Vec<ConvergenceRecord<f64>>, Failure> {
    let disc = args.space.build::<f64>()?;
    let ev = PhiEvaluator::new(&disc)?;
    let rule = args.rule.build::<f64>()?;
    let prob = expquad::Manufactured::new(args.problem);
    let mut config = IntegratorConfig::new(rule, args.approach, args.k.0[0]);
    if let Some(p) = args.p {
        config = config.with_trace_depth(p);
    }
    config.t0 = args.t0;
    config.t_end = args.t_end;
    Ok(expquad::run_convergence(&prob, &ev, &config, &args.k.0)?)
}

fn io_failure(path: &str, e: std::io::Error) -> Failure {
    Failure::Usage(format!("cannot write {path}: {e}"))
}

fn run(args: &RunArgs) -> Result<(), Failure> {
    let records = convergence(args)?;
    match &args.out {
        Some(path) => emit_csv(&records, path, !args.no_timings)?,
        None => write_csv(&records, std::io::stdout().lock(), !args.no_timings).map_err(|e| io_failure("stdout", e))?,
    }
    Ok(())
}

fn plot(args: &RunArgs) -> Result<(), Failure> {
    let records = convergence(args)?;
    let render = |out: &mut dyn Write| -> std::io::Result<()> {
        writeln!(out, "# {} {} {} {}", args.problem, args.space, args.rule, args.approach)?;
        writeln!(out, "# error vs step size")?;
        writeln!(out, "# k local_err global_err")?;
        for r in &records {
            writeln!(out, "{:.16e} {:.6e} {:.6e}", expquad::integrator::rational_to_scalar::<f64>(r.k), r.local_err, r.global_err)?;
        }
        writeln!(out, "\n")?;
        writeln!(out, "# error vs wall time")?;
        writeln!(out, "# wall_time_s global_err")?;
        for r in &records {
            writeln!(out, "{:.6e} {:.6e}", r.wall_time, r.global_err)?;
        }
        Ok(())
    };
    match &args.out {
        Some(path) => {
            let mut file = std::fs::File::create(path).map_err(|e| io_failure(&path.display().to_string(), e))?;
            render(&mut file).map_err(|e| io_failure(&path.display().to_string(), e))
        }
        None => render(&mut std::io::stdout().lock()).map_err(|e| io_failure("stdout", e)),
    }
}

fn run_verify() -> Result<(), Failure> {
    let checks = verify::run_all();
    let failed = checks.iter().filter(|c| !c.passed).count();
    for c in &checks {
        println!("{c}");
    }
    println!("{} checks, {} failed", checks.len(), failed);
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn tables(id: u8, out: Option<&Path>, timings: bool) -> Result<(), Failure> {
    let table: TableRun<f64> = run_table(id)?;
    print!("{table}");
    if let Some(dir) = out {
        std::fs::create_dir_all(dir).map_err(|e| io_failure(&dir.display().to_string(), e))?;
        emit_csv(&table.classical, &dir.join(format!("table{id}_classical.csv")), timings)?;
        emit_csv(&table.corrected, &dir.join(format!("table{id}_corrected.csv")), timings)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_failures_map_to_numerical() {
        let e = expquad::Error::NoConvergence { what: "eigensolver", iterations: 60 };
        assert!(matches!(Failure::from(e), Failure::Numerical(_)));
        assert!(matches!(Failure::from(expquad::Error::NotDissipative(1.0)), Failure::Numerical(_)));
        assert!(matches!(Failure::from(expquad::Error::MissingExact), Failure::Usage(_)));
    }
}
