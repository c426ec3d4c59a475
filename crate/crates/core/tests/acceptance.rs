//! Acceptance criteria. Runs without the libtest harness so that every
//! criterion prints one PASS/FAIL line; the process fails if any criterion does.

use expquad::harness::ORDER_FLOOR;
use expquad::tables::{run_table, TableRun};
use expquad::verify;
use expquad::{Rational, Record};

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn table(id: u8) -> TableRun<f64> {
    run_table(id).unwrap_or_else(|e| panic!("table {id}: {e}"))
}

fn at(records: &[Record], k: Rational) -> &Record {
    records.iter().find(|r| r.k == k).unwrap_or_else(|| panic!("no record for k={k}"))
}

fn within_factor(got: f64, want: f64, factor: f64) -> bool {
    got <= want * factor && got >= want / factor
}

/// Orders of the records whose step lies in `[fine, coarse]`, excluding the
/// coarsest (which has no predecessor in the range).
fn orders(records: &[Record], coarse: Rational, fine: Rational, pick: fn(&Record) -> Option<f64>) -> Vec<f64> {
    records.iter().filter(|r| r.k < coarse && r.k >= fine).filter_map(pick).collect()
}

fn local(r: &Record) -> Option<f64> {
    r.local_order
}

fn global(r: &Record) -> Option<f64> {
    r.global_order
}

fn fmt(orders: &[f64]) -> String {
    orders.iter().map(|o| format!("{o:.2}")).collect::<Vec<_>>().join(" ")
}

fn k(d: i64) -> Rational {
    Rational::new(1, d)
}

fn criterion1() -> Outcome {
    let t = table(1);
    let finest = orders(&t.classical, k(80), k(320), global);
    let err = at(&t.classical, k(320)).global_err;
    let passed = finest.len() == 2 && finest.iter().all(|o| (o - 2.0).abs() <= 0.15) && within_factor(err, 5.4651e-8, 2.0);
    outcome(passed, format!("global orders {} ; e(1/320) = {err:.4e} vs 5.4651e-8", fmt(&finest)))
}

fn criterion2() -> Outcome {
    let t = table(2);
    let corrected = at(&t.corrected, k(320));
    let classical = at(&t.classical, k(320));
    let lo = corrected.local_order.unwrap_or(f64::NAN);
    let cl = classical.local_order.unwrap_or(f64::NAN);
    let passed = (lo - 3.0).abs() <= 0.2 && within_factor(corrected.global_err, 9.8459e-8, 2.0) && cl <= 2.4;
    outcome(
        passed,
        format!(
            "corrected local order {lo:.2}, e(1/320) = {:.4e} vs 9.8459e-8 ; classical local order {cl:.2}",
            corrected.global_err
        ),
    )
}

fn criterion3() -> Outcome {
    let t = table(3);
    let lo = orders(&t.corrected, k(8), k(64), local);
    let go = orders(&t.corrected, k(8), k(64), global);
    let cg = orders(&t.classical, k(8), k(64), global);
    let passed = lo.len() == 3
        && lo.iter().all(|o| (o - 5.0).abs() <= 0.3)
        && go.len() == 3
        && go.iter().all(|&o| o >= 4.0)
        && !cg.is_empty()
        && cg.iter().all(|&o| o <= 3.5);
    outcome(passed, format!("corrected local {} global {} ; classical global {}", fmt(&lo), fmt(&go), fmt(&cg)))
}

fn criterion4() -> Outcome {
    let t6 = table(6);
    let t7 = table(7);
    let mid_classical: Vec<f64> = t6.classical.iter().filter_map(global).collect();
    let mid_corrected: Vec<f64> = t6.corrected.iter().filter_map(global).collect();
    let gauss: Vec<f64> = t7.corrected.iter().filter_map(global).collect();
    let err = at(&t7.corrected, k(64)).global_err;
    let passed = mid_classical.iter().all(|&o| o <= 1.5)
        && mid_corrected.iter().all(|&o| o >= 1.9)
        && gauss.iter().all(|&o| o >= 4.0)
        && within_factor(err, 2.9580e-11, 3.0);
    outcome(
        passed,
        format!(
            "midpoint classical {} ; midpoint corrected {} ; gauss2 corrected {} ; e(1/64) = {err:.4e} vs 2.9580e-11",
            fmt(&mid_classical),
            fmt(&mid_corrected),
            fmt(&gauss)
        ),
    )
}

fn criterion5() -> Outcome {
    let t = table(8);
    let kept: Vec<&Record> = t.corrected.iter().filter(|r| r.k >= k(8) && r.local_err >= ORDER_FLOOR).collect();
    let lo: Vec<f64> = kept.iter().skip(1).filter_map(|r| r.local_order).collect();
    let passed = lo.len() == 2 && lo.iter().all(|o| (o - 7.0).abs() <= 0.4);
    outcome(passed, format!("local orders over k in {{1/2, 1/4, 1/8}}: {}", fmt(&lo)))
}

fn criterion6() -> Outcome {
    let checks = verify::run_all();
    let failed: Vec<&str> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    outcome(failed.is_empty(), format!("{} checks, failed: [{}]", checks.len(), failed.join(", ")))
}

fn criterion7() -> Outcome {
    let fd = verify::elliptic_fd_order();
    let lgl = verify::elliptic_lgl_accuracy();
    outcome(fd.passed && lgl.passed, format!("fd {} ; lgl J=20 {}", fd.detail, lgl.detail))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("table 1 classical trapezoidal", criterion1),
        ("table 2 corrected vs classical", criterion2),
        ("table 3 simpson", criterion3),
        ("tables 6-7 order reduction contrast", criterion4),
        ("table 8 gauss s=3 local order", criterion5),
        ("invariant suite", criterion6),
        ("elliptic space error", criterion7),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.passed {
            failures += 1;
        }
        println!("criterion {}: {} [{name}] {}", i + 1, if o.passed { "PASS" } else { "FAIL" }, o.detail);
    }
    if failures > 0 {
        eprintln!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
