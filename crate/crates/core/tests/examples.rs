//! Worked examples for the public API, including reference values from the
//! published convergence tables.

use expquad::harness::{dyadic_steps, estimate_order, write_csv, CSV_HEADER};
use expquad::integrator::rational_to_scalar;
use expquad::{
    integrate, run_convergence, Approach, IntegratorConfig, Manufactured, PhiEvaluator, ProblemKind, QuadratureRule,
    Rational, Record, RuleSpec, SpaceDiscretization, SpaceSpec,
};

fn study(
    problem: ProblemKind,
    space: SpaceSpec,
    rule: RuleSpec,
    approach: Approach,
    p: Option<usize>,
    steps: &[Rational],
) -> Vec<Record> {
    let disc = space.build::<f64>().unwrap();
    let ev = PhiEvaluator::new(&disc).unwrap();
    let mut cfg = IntegratorConfig::new(rule.build().unwrap(), approach, steps[0]);
    if let Some(p) = p {
        cfg = cfg.with_trace_depth(p);
    }
    run_convergence(&Manufactured::new(problem), &ev, &cfg, steps).unwrap()
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

fn r(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

#[test]
fn table1_trapezoidal_classical_fd() {
    let recs = study(ProblemKind::Poly, SpaceSpec::Fd(999), RuleSpec::Trapezoidal, Approach::Classical, None, &[r(1, 160), r(1, 320)]);
    let last = &recs[1];
    assert!(within_factor(last.global_err, 5.4651e-8, 1.05), "{}", last.global_err);
    assert!((last.global_order.unwrap() - 2.0).abs() < 0.05);
}

#[test]
fn table2_trapezoidal_corrected_fd() {
    let recs = study(ProblemKind::Exp, SpaceSpec::Fd(999), RuleSpec::Trapezoidal, Approach::Corrected, Some(2), &[r(1, 160), r(1, 320)]);
    assert!(within_factor(recs[1].global_err, 9.8459e-8, 1.05), "{}", recs[1].global_err);
}

#[test]
fn table1_first_local_order() {
    // First pair of the published trapezoidal column.
    let o = estimate_order(8.0170e-5f64, 1.2961e-5).unwrap();
    assert!((o - 2.6).abs() < 0.05);
}

// The LGL tables are reproduced up to a constant factor close to √2, which
// corresponds to a norm weighted by the unmapped [-1, 1] quadrature weights.

#[test]
fn table6_midpoint_classical_lgl() {
    let recs = study(ProblemKind::Exp, SpaceSpec::Lgl(39), RuleSpec::Midpoint, Approach::Classical, None, &[r(1, 128), r(1, 256)]);
    assert!(within_factor(recs[1].global_err * 2f64.sqrt(), 3.7813e-4, 1.1), "{}", recs[1].global_err);
    let o = recs[1].global_order.unwrap();
    assert!((1.1..=1.4).contains(&o), "{o}");
}

#[test]
fn table7_gauss2_corrected_lgl() {
    let recs = study(ProblemKind::Exp, SpaceSpec::Lgl(39), RuleSpec::Gauss(2), Approach::Corrected, Some(4), &[r(1, 32), r(1, 64)]);
    let last = &recs[1];
    assert!(within_factor(last.global_err, 2.9580e-11, 3.0), "{}", last.global_err);
    assert!(within_factor(last.local_err, 1.4918e-11, 3.0), "{}", last.local_err);
    assert!((last.local_order.unwrap() - 5.1).abs() < 0.2);
    assert!(last.global_order.unwrap() >= 4.0);
}

#[test]
fn table4_midpoint_corrected_poly_orders() {
    let recs = study(ProblemKind::Poly, SpaceSpec::Lgl(39), RuleSpec::Midpoint, Approach::Corrected, Some(2), &dyadic_steps(r(1, 32), 3));
    for rec in &recs[1..] {
        let o = rec.global_order.unwrap();
        assert!((1.95..2.15).contains(&o), "k={} order {o}", rec.k);
    }
}

#[test]
fn sine_error_plateaus_at_space_error() {
    let recs = study(ProblemKind::Sine, SpaceSpec::Lgl(39), RuleSpec::Gauss(2), Approach::Classical, None, &[r(1, 256)]);
    assert!(recs[0].global_err <= 1e-10, "{}", recs[0].global_err);
}

#[test]
fn classical_order_reduction_with_gauss_nodes() {
    for s in 1..=3usize {
        let recs = study(ProblemKind::Exp, SpaceSpec::Lgl(39), RuleSpec::Gauss(s), Approach::Classical, None, &dyadic_steps(r(1, 16), 3));
        for rec in &recs[1..] {
            let o = rec.global_order.unwrap();
            assert!(o >= s as f64 - 0.2 && o <= s as f64 + 0.6, "s={s} k={} order {o}", rec.k);
        }
    }
}

#[test]
fn corrected_restores_order_with_gauss_nodes() {
    for (s, start) in [(1usize, r(1, 16)), (2, r(1, 4)), (3, r(1, 2))] {
        let recs = study(ProblemKind::Exp, SpaceSpec::Lgl(39), RuleSpec::Gauss(s), Approach::Corrected, Some(2 * s), &dyadic_steps(start, 3));
        for rec in &recs[1..] {
            if let Some(o) = rec.global_order {
                assert!(o >= 2.0 * s as f64 - 0.4, "s={s} k={} order {o}", rec.k);
            }
        }
    }
}

#[test]
fn integrate_with_zero_steps_returns_initial_data() {
    let disc = SpaceDiscretization::<f64>::lgl_collocation(10).unwrap();
    let ev = PhiEvaluator::new(&disc).unwrap();
    let prob = Manufactured::new(ProblemKind::Exp);
    let mut cfg = IntegratorConfig::new(QuadratureRule::gauss(2).unwrap(), Approach::Corrected, r(1, 4));
    cfg.t_end = cfg.t0;
    let state = integrate(&ev, &prob, &cfg).unwrap();
    assert_eq!(state.u, disc.restrict(|x: f64| x.exp()));
    assert_eq!(state.t, 0.0);
}

#[test]
fn sine_final_state_tracks_exact_solution() {
    let disc = SpaceDiscretization::<f64>::lgl_collocation(20).unwrap();
    let ev = PhiEvaluator::new(&disc).unwrap();
    let prob = Manufactured::new(ProblemKind::Sine);
    let cfg = IntegratorConfig::new(QuadratureRule::simpson(), Approach::Classical, r(1, 10));
    let state = integrate(&ev, &prob, &cfg).unwrap();
    let pi = std::f64::consts::PI;
    let exact = disc.restrict(|x| (pi * x).sin() * (-pi * pi).exp());
    let diff: Vec<f64> = state.u.iter().zip(&exact).map(|(a, b)| a - b).collect();
    assert!(disc.discrete_norm(&diff).unwrap() < 1e-12);
    assert_eq!(state.t, 1.0);
}

#[test]
fn table2_shaped_csv_has_six_rows() {
    let recs = study(ProblemKind::Exp, SpaceSpec::Fd(99), RuleSpec::Trapezoidal, Approach::Corrected, Some(2), &dyadic_steps(r(1, 10), 6));
    let mut buf = Vec::new();
    write_csv(&recs, &mut buf, false).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], CSV_HEADER);
    assert_eq!(lines.len(), 7);
    assert!(lines[6].starts_with("1/320,"));
    assert!(lines[1].ends_with(",,"), "{}", lines[1]);
}

#[test]
fn f32_pipeline_runs() {
    let disc = SpaceDiscretization::<f32>::finite_difference(20).unwrap();
    let ev = PhiEvaluator::new(&disc).unwrap();
    let prob = Manufactured::new(ProblemKind::Exp);
    let cfg = IntegratorConfig::<f32>::new(QuadratureRule::gauss(2).unwrap(), Approach::Corrected, r(1, 8));
    let state = integrate(&ev, &prob, &cfg).unwrap();
    let exact = disc.restrict(|x| (x - 1.0).exp());
    let err = state.u.iter().zip(&exact).fold(0f32, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-3, "{err}");
    assert_eq!(rational_to_scalar::<f32>(r(1, 4)), 0.25);
}
