use expquad::integrator::parse_rational;
use expquad::verify::{interpolation_residual, sine_gap};
use expquad::{
    integrate, phi_scalar, Approach, IntegratorConfig, Manufactured, PhiEvaluator, Problem, ProblemKind, QuadratureRule,
    Rational, Side, SpaceDiscretization,
};
use proptest::prelude::*;

/// `c` times a manufactured problem: every datum scales linearly.
struct Scaled {
    inner: Manufactured,
    c: f64,
}

impl Problem<f64> for Scaled {
    fn source(&self, x: f64, t: f64) -> f64 {
        self.c * self.inner.source(x, t)
    }
    fn initial(&self, x: f64) -> f64 {
        self.c * Problem::<f64>::initial(&self.inner, x)
    }
    fn boundary_derivative(&self, r: usize, t: f64, side: Side) -> f64 {
        self.c * self.inner.boundary_derivative(r, t, side)
    }
    fn source_trace(&self, l: usize, r: usize, t: f64, side: Side) -> f64 {
        self.c * self.inner.source_trace(l, r, t, side)
    }
    fn max_derivative_order(&self) -> usize {
        Problem::<f64>::max_derivative_order(&self.inner)
    }
}

fn rule(index: usize) -> QuadratureRule<f64> {
    match index {
        0 => QuadratureRule::gauss(1).unwrap(),
        1 => QuadratureRule::gauss(2).unwrap(),
        2 => QuadratureRule::gauss(3).unwrap(),
        3 => QuadratureRule::lobatto(3).unwrap(),
        4 => QuadratureRule::trapezoidal(),
        _ => QuadratureRule::simpson(),
    }
}

fn space(lgl: bool, size: usize) -> SpaceDiscretization<f64> {
    if lgl {
        SpaceDiscretization::lgl_collocation(size).unwrap()
    } else {
        SpaceDiscretization::finite_difference(size).unwrap()
    }
}

fn approach(corrected: bool) -> Approach {
    if corrected {
        Approach::Corrected
    } else {
        Approach::Classical
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|m| m as f64).product()
}

proptest! {
    #[test]
    fn phi_positive_and_bounded(j in 1usize..=12, z in -1e4f64..=0.0) {
        let p = phi_scalar(j, z).unwrap();
        prop_assert!(p > 0.0);
        prop_assert!(p <= (1.0 + 1e-15) / factorial(j));
    }

    #[test]
    fn phi_recursion_holds(j in 0usize..=12, z in -1e4f64..-1e-10) {
        let lhs = phi_scalar(j + 1, z).unwrap() * z;
        let rhs = phi_scalar(j, z).unwrap() - 1.0 / factorial(j);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs().max(1.0));
    }

    #[test]
    fn phi_decreasing_in_argument(j in 0usize..=8, a in -50f64..0.0, b in -50f64..0.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(phi_scalar(j, lo).unwrap() <= phi_scalar(j, hi).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn gauss_nodes_symmetric_and_sorted(s in 1usize..=16) {
        let r = QuadratureRule::<f64>::gauss(s).unwrap();
        let c = r.nodes();
        for i in 0..s {
            prop_assert!((c[i] + c[s - 1 - i] - 1.0).abs() <= 1e-14);
            prop_assert!(c[i] > 0.0 && c[i] < 1.0);
        }
        prop_assert!(c.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn custom_rules_interpolate(gaps in prop::collection::vec(0.08f64..0.3, 1..=5), start in 0.0f64..0.1) {
        let mut nodes = vec![start];
        for g in &gaps {
            let next = nodes.last().unwrap() + g;
            nodes.push(next);
        }
        let scale = nodes.last().unwrap().max(1.0);
        let nodes: Vec<f64> = nodes.iter().map(|x| x / scale).collect();
        let r = QuadratureRule::custom(nodes).unwrap();
        prop_assert!(interpolation_residual(&r) <= 1e-9);
    }

    #[test]
    fn rational_round_trip(n in 1i64..1000, d in 1i64..1000) {
        let q = Rational::new(n, d);
        prop_assert_eq!(parse_rational(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn discrete_norm_is_a_norm(
        lgl in any::<bool>(),
        size in 3usize..20,
        seed in prop::collection::vec(-5f64..5.0, 20),
        scale in -3f64..3.0,
    ) {
        let disc = space(lgl, size);
        let v: Vec<f64> = seed[..disc.dim()].to_vec();
        let w: Vec<f64> = seed.iter().rev().take(disc.dim()).copied().collect();
        let sum: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a + b).collect();
        let scaled: Vec<f64> = v.iter().map(|a| a * scale).collect();
        let nv = disc.discrete_norm(&v).unwrap();
        prop_assert!((disc.discrete_norm(&scaled).unwrap() - scale.abs() * nv).abs() <= 1e-12 * nv.max(1.0));
        prop_assert!(disc.discrete_norm(&sum).unwrap() <= nv + disc.discrete_norm(&w).unwrap() + 1e-12);
    }

    #[test]
    fn phi0_acts_on_eigenvectors(lgl in any::<bool>(), size in 3usize..25, mode in 0usize..25, k in 1e-4f64..0.5) {
        let disc = space(lgl, size);
        let ev = PhiEvaluator::new(&disc).unwrap();
        let m = mode % disc.dim();
        let mut e = vec![0.0; disc.dim()];
        e[m] = 1.0;
        let v = ev.from_modal(&e).unwrap();
        let got = ev.phi_apply(0, k, &v).unwrap();
        let factor = (k * ev.eigenvalues()[m]).exp();
        let scale = v.iter().fold(0f64, |a, x| a.max(x.abs()));
        for (g, x) in got.iter().zip(&v) {
            prop_assert!((g - factor * x).abs() <= 1e-10 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn step_map_is_linear_in_the_data(
        which in 0usize..6,
        corrected in any::<bool>(),
        lgl in any::<bool>(),
        exp in any::<bool>(),
        c in 0.1f64..10.0,
        steps in 1i64..6,
    ) {
        let disc = space(lgl, if lgl { 12 } else { 30 });
        let ev = PhiEvaluator::new(&disc).unwrap();
        let inner = Manufactured::new(if exp { ProblemKind::Exp } else { ProblemKind::Poly });
        let cfg = IntegratorConfig::new(rule(which), approach(corrected), Rational::new(1, steps));
        let base = integrate(&ev, &inner, &cfg).unwrap();
        let scaled = integrate(&ev, &Scaled { inner, c }, &cfg).unwrap();
        let scale = base.u.iter().fold(0f64, |a, x| a.max(x.abs()));
        for (a, b) in base.u.iter().zip(&scaled.u) {
            prop_assert!((c * a - b).abs() <= 1e-12 * c * scale);
        }
    }

    #[test]
    fn constants_are_steady_states(
        which in 0usize..6,
        corrected in any::<bool>(),
        lgl in any::<bool>(),
        size in 3usize..30,
        c in -10f64..10.0,
        steps in 1i64..12,
    ) {
        let disc = space(lgl, size);
        let ev = PhiEvaluator::new(&disc).unwrap();
        let prob = Manufactured::constant(c);
        let cfg = IntegratorConfig::new(rule(which), approach(corrected), Rational::new(1, steps));
        let state = integrate(&ev, &prob, &cfg).unwrap();
        for x in &state.u {
            prop_assert!((x - c).abs() <= 1e-11 * c.abs().max(1.0));
        }
    }

    #[test]
    fn corrected_equals_classical_without_traces(
        which in 0usize..6,
        lgl in any::<bool>(),
        size in 3usize..30,
        p in 1usize..=6,
        steps in 1i64..10,
    ) {
        let gap = sine_gap(&space(lgl, size), &rule(which), p, Rational::new(1, steps)).unwrap();
        prop_assert!(gap <= 1e-12);
    }
}
