//! Invariant suite behind `expquad verify`.
//!
//! Every check runs in double precision and reports the worst residual it
//! saw next to the threshold it was held to.

use std::fmt;

use crate::harness::ORDER_FLOOR;
use crate::integrator::{integrate_trajectory, Approach, IntegratorConfig, Rational};
use crate::linalg::Matrix;
use crate::phi::{phi_scalar, PhiEvaluator};
use crate::problem::{trace_from_data, Manufactured, Problem, ProblemKind};
use crate::quadrature::QuadratureRule;
use crate::scalar::factorial;
use crate::space::{Side, SpaceDiscretization};

#[derive(Clone, Debug)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn bound(name: &'static str, worst: f64, limit: f64) -> Self {
        Self { name, passed: worst <= limit, detail: format!("worst {worst:.3e} (limit {limit:.1e})") }
    }

    fn failed(name: &'static str, detail: impl Into<String>) -> Self {
        Self { name, passed: false, detail: detail.into() }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {:<36} {}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.detail)
    }
}

macro_rules! try_check {
    ($name:expr, $e:expr) => {
        match $e {
            Ok(v) => v,
            Err(err) => return Check::failed($name, err.to_string()),
        }
    };
}

pub fn run_all() -> Vec<Check> {
    vec![
        phi_recursion(),
        phi_bounds(),
        quadrature_identities(),
        quadrature_exactness(),
        gauss_symmetry(),
        lgl_symmetrizable(),
        negative_spectrum(),
        factorization_accuracy(),
        constant_consistency(),
        phi_oracle(),
        constant_preservation(),
        classical_corrected_equivalence(),
        trace_recurrence(),
        manufactured_residual(),
        elliptic_fd_order(),
        elliptic_lgl_accuracy(),
        discrete_maximum_principle(),
        parabolic_sum_bound(),
    ]
}

const Z_GRID: [f64; 6] = [-1e6, -1e3, -10.0, -1.0, -1e-3, -1e-8];

pub fn phi_recursion() -> Check {
    const NAME: &str = "phi recursion identity";
    let mut worst: f64 = 0.0;
    for &z in &Z_GRID {
        for j in 0..=12 {
            let pj = try_check!(NAME, phi_scalar(j, z));
            let pn = try_check!(NAME, phi_scalar(j + 1, z));
            let resid = (pn * z - pj + 1.0 / factorial::<f64>(j)).abs();
            worst = worst.max(resid / pj.abs().max(1.0));
        }
    }
    Check::bound(NAME, worst, 1e-12)
}

pub fn phi_bounds() -> Check {
    const NAME: &str = "phi bounds 0 < phi_j <= 1/j!";
    for &z in &Z_GRID {
        for j in 0..=12 {
            let p = try_check!(NAME, phi_scalar(j, z));
            let upper = 1.0 / factorial::<f64>(j);
            // e^z underflows at z = -1e6; every j >= 1 must stay positive.
            let positive = if j == 0 { p >= 0.0 } else { p > 0.0 };
            if !positive || p > upper * (1.0 + 1e-15) {
                return Check::failed(NAME, format!("phi_{j}({z}) = {p:e}"));
            }
        }
    }
    Check { name: NAME, passed: true, detail: "z grid x j=0..12".into() }
}

fn canonical_rules() -> Vec<QuadratureRule<f64>> {
    let mut rules = vec![QuadratureRule::trapezoidal(), QuadratureRule::simpson()];
    for s in 1..=4 {
        rules.push(QuadratureRule::gauss(s).expect("gauss"));
    }
    for s in 2..=4 {
        rules.push(QuadratureRule::lobatto(s).expect("lobatto"));
    }
    rules
}

/// Largest deviation from `Σ_i c_i^r a_{i,l} = r! δ_{l,r+1}` and
/// `l_i(c_m) = δ_im` over the rule.
pub fn interpolation_residual(rule: &QuadratureRule<f64>) -> f64 {
    let s = rule.len();
    let c = rule.nodes();
    let mut worst: f64 = 0.0;
    for r in 0..s {
        for l in 1..=s {
            let sum: f64 = (0..s).map(|i| c[i].powi(r as i32) * rule.coeff(i, l)).sum();
            let want = if l == r + 1 { factorial::<f64>(r) } else { 0.0 };
            worst = worst.max((sum - want).abs());
        }
    }
    for i in 0..s {
        for (m, &cm) in c.iter().enumerate() {
            let want = if i == m { 1.0 } else { 0.0 };
            worst = worst.max((rule.lagrange_basis(i, cm) - want).abs());
        }
    }
    let total: f64 = rule.weights_at_zero().iter().sum();
    worst.max((total - 1.0).abs())
}

pub fn quadrature_identities() -> Check {
    let worst = canonical_rules().iter().map(interpolation_residual).fold(0.0, f64::max);
    Check::bound("quadrature interpolation identities", worst, 1e-12)
}

pub fn quadrature_exactness() -> Check {
    const NAME: &str = "quadrature exactness degree";
    for s in 1..=4 {
        let d = try_check!(NAME, QuadratureRule::<f64>::gauss(s)).exactness_degree();
        if d != Some(2 * s - 1) {
            return Check::failed(NAME, format!("gauss s={s}: {d:?}"));
        }
    }
    for s in 2..=4 {
        let d = try_check!(NAME, QuadratureRule::<f64>::lobatto(s)).exactness_degree();
        if d != Some(2 * s - 3) {
            return Check::failed(NAME, format!("lobatto s={s}: {d:?}"));
        }
    }
    Check { name: NAME, passed: true, detail: "gauss 2s-1, lobatto 2s-3".into() }
}

pub fn gauss_symmetry() -> Check {
    const NAME: &str = "gauss nodes symmetric about 1/2";
    let mut worst: f64 = 0.0;
    for s in 1..=10 {
        let rule = try_check!(NAME, QuadratureRule::<f64>::gauss(s));
        let c = rule.nodes();
        for i in 0..s {
            worst = worst.max((c[i] + c[s - 1 - i] - 1.0).abs());
        }
    }
    Check::bound(NAME, worst, 1e-14)
}

/// `max |S - Sᵀ| / max |S|` for `S = D A_{h,0} D⁻¹` assembled from the operator.
pub fn symmetrizer_asymmetry(disc: &SpaceDiscretization<f64>) -> f64 {
    let d = disc.symmetrizer();
    let a = disc.operator();
    let s = Matrix::from_fn(disc.dim(), disc.dim(), |i, j| d[i] * a[(i, j)] / d[j]);
    s.asymmetry() / s.max_abs()
}

pub fn lgl_symmetrizable() -> Check {
    const NAME: &str = "LGL J=39 symmetrizable";
    let disc = try_check!(NAME, SpaceDiscretization::<f64>::lgl_collocation(39));
    Check::bound(NAME, symmetrizer_asymmetry(&disc), 1e-9)
}

fn sample_discretizations() -> Vec<SpaceDiscretization<f64>> {
    vec![
        SpaceDiscretization::finite_difference(10).expect("fd"),
        SpaceDiscretization::finite_difference(100).expect("fd"),
        SpaceDiscretization::lgl_collocation(10).expect("lgl"),
        SpaceDiscretization::lgl_collocation(39).expect("lgl"),
    ]
}

pub fn negative_spectrum() -> Check {
    const NAME: &str = "interior operators negative definite";
    let mut largest = f64::NEG_INFINITY;
    for disc in sample_discretizations() {
        let ev = try_check!(NAME, PhiEvaluator::new(&disc));
        largest = largest.max(*ev.eigenvalues().last().expect("nonempty"));
    }
    Check { name: NAME, passed: largest < 0.0, detail: format!("largest eigenvalue {largest:.4e}") }
}

/// `(‖V Vᵀ - I‖_max, ‖D⁻¹ V Λ Vᵀ D - A‖_max / max|λ|)`.
pub fn factorization_residuals(ev: &PhiEvaluator<'_, f64>) -> (f64, f64) {
    let n = ev.dim();
    let v = ev.basis();
    let vvt = v.matmul(&v.transpose());
    let mut ortho: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            ortho = ortho.max((vvt[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    let lam = ev.eigenvalues();
    let d = ev.discretization().symmetrizer();
    let a = ev.discretization().operator();
    let scaled = Matrix::from_fn(n, n, |m, j| v[(m, j)] * lam[m]);
    let s = v.transpose().matmul(&scaled);
    let scale = lam.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let mut recon: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            recon = recon.max((s[(i, j)] * d[j] / d[i] - a[(i, j)]).abs());
        }
    }
    (ortho, recon / scale)
}

pub fn factorization_accuracy() -> Check {
    const NAME: &str = "spectral factorization accuracy";
    let mut ortho: f64 = 0.0;
    let mut recon: f64 = 0.0;
    for disc in sample_discretizations() {
        let ev = try_check!(NAME, PhiEvaluator::new(&disc));
        let (o, r) = factorization_residuals(&ev);
        ortho = ortho.max(o);
        recon = recon.max(r);
    }
    Check {
        name: NAME,
        passed: ortho <= 1e-10 && recon <= 1e-8,
        detail: format!("orthogonality {ortho:.3e} (limit 1e-10), reconstruction {recon:.3e} (limit 1e-8)"),
    }
}

pub fn constant_consistency() -> Check {
    let mut worst: f64 = 0.0;
    for disc in sample_discretizations() {
        let ones = vec![1.0; disc.dim()];
        let r = disc.operator().matvec(&ones);
        let scale = disc.operator().max_abs();
        for (ri, gi) in r.iter().zip(disc.inject(1.0, 1.0)) {
            worst = worst.max((ri + gi).abs() / scale);
        }
    }
    Check::bound("constants annihilated", worst, 1e-8)
}

pub mod oracle {
    //! Reference values computed without the spectral factorization:
    //! Taylor scaling-and-squaring for `e^{tA}` and composite five-point
    //! Gauss–Legendre quadrature of `φ_j(kA)v = ∫₀¹ e^{k(1-θ)A} θ^{j-1}/(j-1)! v dθ`.

    use crate::linalg::Matrix;

    const GAUSS5_NODES: [f64; 5] = [
        -0.906_179_845_938_664,
        -0.538_469_310_105_683,
        0.0,
        0.538_469_310_105_683,
        0.906_179_845_938_664,
    ];
    const GAUSS5_WEIGHTS: [f64; 5] = [
        0.236_926_885_056_189_1,
        0.478_628_670_499_366_5,
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
    ];

    fn inf_norm(a: &Matrix<f64>) -> f64 {
        (0..a.rows()).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `e^{tA}` by scaling and squaring around a degree-24 Taylor polynomial.
    pub fn expm(a: &Matrix<f64>, t: f64) -> Matrix<f64> {
        let n = a.rows();
        let norm = inf_norm(a) * t.abs();
        let mut squarings = 0;
        while norm / 2f64.powi(squarings) > 0.25 {
            squarings += 1;
        }
        let scale = t / 2f64.powi(squarings);
        let b = Matrix::from_fn(n, n, |i, j| a[(i, j)] * scale);
        let mut result = Matrix::identity(n);
        let mut term = Matrix::identity(n);
        for m in 1..=24 {
            term = term.matmul(&b);
            let inv = 1.0 / m as f64;
            term = Matrix::from_fn(n, n, |i, j| term[(i, j)] * inv);
            result = Matrix::from_fn(n, n, |i, j| result[(i, j)] + term[(i, j)]);
        }
        for _ in 0..squarings {
            result = result.matmul(&result);
        }
        result
    }

    /// `φ_j(kA) v` by brute-force quadrature over `panels` equal panels.
    pub fn phi_action(a: &Matrix<f64>, j: usize, k: f64, v: &[f64], panels: usize) -> Vec<f64> {
        if j == 0 {
            return expm(a, k).matvec(v);
        }
        let h = 1.0 / panels as f64;
        let inv_fact = 1.0 / (1..j).map(|m| m as f64).product::<f64>();
        // σ = 1 - θ runs over panel p as σ = (p + η_q) h with η_q = (1 - ξ_q)/2.
        let step = expm(a, k * h);
        let mut carried: Vec<Vec<f64>> =
            GAUSS5_NODES.iter().map(|&xi| expm(a, k * h * (1.0 - xi) / 2.0).matvec(v)).collect();
        let mut out = vec![0.0; v.len()];
        for p in 0..panels {
            for (q, &xi) in GAUSS5_NODES.iter().enumerate() {
                let sigma = (p as f64 + (1.0 - xi) / 2.0) * h;
                let theta = 1.0 - sigma;
                let w = GAUSS5_WEIGHTS[q] / 2.0 * h * theta.powi(j as i32 - 1) * inv_fact;
                for (o, &x) in out.iter_mut().zip(&carried[q]) {
                    *o += w * x;
                }
            }
            for c in carried.iter_mut() {
                *c = step.matvec(c);
            }
        }
        out
    }
}

/// Worst relative deviation of `phi_apply` from the quadrature oracle.
pub fn phi_oracle_deviation(disc: &SpaceDiscretization<f64>, k: f64, orders: std::ops::RangeInclusive<usize>) -> crate::Result<f64> {
    let ev = PhiEvaluator::new(disc)?;
    let v = vec![1.0; disc.dim()];
    let mut worst: f64 = 0.0;
    for j in orders {
        let got = ev.phi_apply(j, k, &v)?;
        let want = oracle::phi_action(disc.operator(), j, k, &v, 10_000);
        let scale = want.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let diff = got.iter().zip(&want).fold(0.0f64, |m, (g, w)| m.max((g - w).abs()));
        worst = worst.max(diff / scale);
    }
    Ok(worst)
}

pub fn phi_oracle() -> Check {
    const NAME: &str = "phi action vs quadrature oracle";
    let mut worst: f64 = 0.0;
    for disc in [
        try_check!(NAME, SpaceDiscretization::finite_difference(5)),
        try_check!(NAME, SpaceDiscretization::finite_difference(2)),
        try_check!(NAME, SpaceDiscretization::lgl_collocation(7)),
        try_check!(NAME, SpaceDiscretization::lgl_collocation(4)),
    ] {
        worst = worst.max(try_check!(NAME, phi_oracle_deviation(&disc, 0.1, 0..=4)));
        worst = worst.max(try_check!(NAME, phi_oracle_deviation(&disc, 0.003, 1..=3)));
    }
    Check::bound(NAME, worst, 1e-10)
}

fn rule_families() -> Vec<QuadratureRule<f64>> {
    vec![
        QuadratureRule::gauss(1).expect("gauss"),
        QuadratureRule::gauss(2).expect("gauss"),
        QuadratureRule::gauss(3).expect("gauss"),
        QuadratureRule::lobatto(4).expect("lobatto"),
        QuadratureRule::trapezoidal(),
        QuadratureRule::simpson(),
    ]
}

/// Largest `‖U_n - c𝟙‖` over all steps, rules and both approaches.
pub fn constant_drift(disc: &SpaceDiscretization<f64>, c: f64, k: Rational) -> crate::Result<f64> {
    let ev = PhiEvaluator::new(disc)?;
    let prob = Manufactured::constant(c);
    let mut worst: f64 = 0.0;
    for rule in rule_families() {
        for approach in [Approach::Classical, Approach::Corrected] {
            let cfg = IntegratorConfig::new(rule.clone(), approach, k);
            for state in integrate_trajectory(&ev, &prob, &cfg)? {
                let diff: Vec<f64> = state.u.iter().map(|x| x - c).collect();
                worst = worst.max(disc.discrete_norm(&diff)?);
            }
        }
    }
    Ok(worst)
}

pub fn constant_preservation() -> Check {
    const NAME: &str = "constant state preserved";
    let mut worst: f64 = 0.0;
    for disc in [
        try_check!(NAME, SpaceDiscretization::finite_difference(60)),
        try_check!(NAME, SpaceDiscretization::lgl_collocation(20)),
    ] {
        worst = worst.max(try_check!(NAME, constant_drift(&disc, 1.5, Rational::new(1, 16))));
    }
    Check::bound(NAME, worst, 1e-11)
}

/// `max_n ‖U_n^classical - U_n^corrected‖` on the sine problem.
pub fn sine_gap(disc: &SpaceDiscretization<f64>, rule: &QuadratureRule<f64>, p: usize, k: Rational) -> crate::Result<f64> {
    let ev = PhiEvaluator::new(disc)?;
    let prob = Manufactured::new(ProblemKind::Sine);
    let classical = integrate_trajectory(&ev, &prob, &IntegratorConfig::new(rule.clone(), Approach::Classical, k))?;
    let corrected = integrate_trajectory(
        &ev,
        &prob,
        &IntegratorConfig::new(rule.clone(), Approach::Corrected, k).with_trace_depth(p),
    )?;
    let mut worst: f64 = 0.0;
    for (a, b) in classical.iter().zip(&corrected) {
        let diff: Vec<f64> = a.u.iter().zip(&b.u).map(|(x, y)| x - y).collect();
        worst = worst.max(disc.discrete_norm(&diff)?);
    }
    Ok(worst)
}

pub fn classical_corrected_equivalence() -> Check {
    const NAME: &str = "classical = corrected on sine";
    let disc = try_check!(NAME, SpaceDiscretization::lgl_collocation(24));
    let mut worst: f64 = 0.0;
    for rule in rule_families() {
        for p in [1, 2, rule.default_trace_depth()] {
            worst = worst.max(try_check!(NAME, sine_gap(&disc, &rule, p, Rational::new(1, 8))));
        }
    }
    Check::bound(NAME, worst, 1e-12)
}

pub fn trace_recurrence() -> Check {
    let mut worst: f64 = 0.0;
    for kind in [ProblemKind::Poly, ProblemKind::Exp] {
        let prob = Manufactured::new(kind);
        for t in [0.0, 0.3, 1.0] {
            for side in Side::BOTH {
                for j in 0..=8 {
                    let from_data = trace_from_data(&prob, j, t, side).unwrap_or(f64::NAN);
                    let analytic = prob.solution_trace(j, t, side).unwrap_or(f64::NAN);
                    let d = (from_data - analytic).abs();
                    worst = worst.max(if d.is_nan() { f64::INFINITY } else { d });
                }
            }
        }
    }
    Check::bound("trace recurrence vs analytic", worst, 1e-9)
}

pub fn manufactured_residual() -> Check {
    let mut worst: f64 = 0.0;
    for kind in [ProblemKind::Poly, ProblemKind::Exp, ProblemKind::Sine] {
        let prob = Manufactured::new(kind);
        for a in 0..20 {
            for b in 0..20 {
                let x = a as f64 / 19.0;
                let t = b as f64 / 19.0;
                let r = prob.solution_derivative(0, 1, x, t) - prob.solution_derivative(1, 0, x, t) - Problem::<f64>::source(&prob, x, t);
                worst = worst.max(r.abs());
            }
        }
    }
    Check::bound("manufactured PDE residual", worst, 1e-12)
}

/// Max-norm error of the discrete elliptic solve for `w = e^x`.
pub fn elliptic_error(disc: &SpaceDiscretization<f64>) -> crate::Result<f64> {
    let rhs = disc.restrict(f64::exp);
    let w = disc.elliptic_solve(&rhs, 1.0, std::f64::consts::E)?;
    Ok(w.iter().zip(disc.nodes()).fold(0.0, |m, (wi, &x)| m.max((wi - x.exp()).abs())))
}

/// Observed orders between consecutive FD grids `M ∈ {50, 100, 200, 400}`.
pub fn elliptic_fd_orders() -> crate::Result<Vec<f64>> {
    let sizes = [50usize, 100, 200, 400];
    let mut errs = Vec::new();
    let mut hs = Vec::new();
    for m in sizes {
        errs.push(elliptic_error(&SpaceDiscretization::finite_difference(m)?)?);
        hs.push(1.0 / (m + 1) as f64);
    }
    Ok((1..errs.len()).map(|i| (errs[i - 1] / errs[i]).ln() / (hs[i - 1] / hs[i]).ln()).collect())
}

pub fn elliptic_fd_order() -> Check {
    const NAME: &str = "FD elliptic order 2";
    let orders = try_check!(NAME, elliptic_fd_orders());
    let passed = orders.iter().all(|o| (o - 2.0).abs() <= 0.1);
    Check { name: NAME, passed, detail: format!("orders {orders:.3?} (2.0 +- 0.1)") }
}

pub fn elliptic_lgl_accuracy() -> Check {
    const NAME: &str = "LGL J=20 elliptic accuracy";
    let disc = try_check!(NAME, SpaceDiscretization::lgl_collocation(20));
    Check::bound(NAME, try_check!(NAME, elliptic_error(&disc)), 1e-10)
}

/// `‖A_{h,0}⁻¹ A_h Q_h‖` with the discrete norm on the interior and the
/// max norm on the boundary data.
pub fn harmonic_lift_norm(disc: &SpaceDiscretization<f64>) -> crate::Result<f64> {
    let zero = vec![0.0; disc.dim()];
    let left = disc.elliptic_solve(&zero, 1.0, 0.0)?;
    let right = disc.elliptic_solve(&zero, 0.0, 1.0)?;
    Ok(disc.discrete_norm(&left)? + disc.discrete_norm(&right)?)
}

pub fn discrete_maximum_principle() -> Check {
    const NAME: &str = "discrete maximum principle proxy";
    let mut worst: f64 = 0.0;
    for m in [10, 100, 1000] {
        let disc = try_check!(NAME, SpaceDiscretization::finite_difference(m));
        worst = worst.max(try_check!(NAME, harmonic_lift_norm(&disc)));
    }
    Check::bound(NAME, worst, 2.0)
}

/// `max_m max_{n k <= 1} |kλ_m (e^{kλ_m} - e^{n k λ_m}) / (1 - e^{kλ_m})|`.
pub fn parabolic_sum(eigenvalues: &[f64], k: f64) -> f64 {
    let steps = (1.0 / k).round() as usize;
    let mut worst: f64 = 0.0;
    for &l in eigenvalues {
        let z = k * l;
        let denom = -(z.exp_m1());
        if denom == 0.0 {
            continue;
        }
        for n in 1..=steps {
            let v = (z * (z.exp() - (n as f64 * z).exp()) / denom).abs();
            worst = worst.max(v);
        }
    }
    worst
}

pub fn parabolic_sum_bound() -> Check {
    const NAME: &str = "parabolic sum bound";
    let mut worst: f64 = 0.0;
    for disc in [
        try_check!(NAME, SpaceDiscretization::finite_difference(200)),
        try_check!(NAME, SpaceDiscretization::lgl_collocation(39)),
    ] {
        let ev = try_check!(NAME, PhiEvaluator::new(&disc));
        for k in [1e-3, 1e-2, 1e-1] {
            worst = worst.max(parabolic_sum(ev.eigenvalues(), k));
        }
    }
    Check::bound(NAME, worst, 1.1)
}

/// Whether an error is above the roundoff floor used for order estimates.
pub fn resolvable(err: f64) -> bool {
    err >= ORDER_FLOOR
}
