//! Acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line. Run with `--nocapture` to see the lines;
//! `cargo test --test acceptance` covers exactly the `selftest` CLI verb.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use santalo::selftest::{self, CRITERION_NAMES};

// tests serialize through this gate so each gets the full machine and the
// accumulated wall time is the honest full-suite cost
static GATE: Mutex<()> = Mutex::new(());
static TOTAL_MS: AtomicU64 = AtomicU64::new(0);

fn run(id: usize, check: fn(bool) -> (bool, String)) {
    let _g = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let t = std::time::Instant::now();
    let (pass, detail) = check(false);
    let elapsed = t.elapsed();
    TOTAL_MS.fetch_add(elapsed.as_millis() as u64, Ordering::SeqCst);
    println!(
        "criterion {:2} [{}]: {} — {} ({:.2}s)",
        id,
        CRITERION_NAMES[id - 1],
        if pass { "PASS" } else { "FAIL" },
        detail,
        elapsed.as_secs_f64()
    );
    assert!(pass, "criterion {id} failed: {detail}");
}

#[test]
fn criterion_01_polar_involution() {
    run(1, selftest::criterion_1);
}

#[test]
fn criterion_02_exact_volume_products() {
    run(2, selftest::criterion_2);
}

#[test]
fn criterion_03_santalo_point_triangles() {
    run(3, selftest::criterion_3);
}

#[test]
fn criterion_04_legendre_self_duality() {
    run(4, selftest::criterion_4);
}

#[test]
fn criterion_05_fenchel_young() {
    run(5, selftest::criterion_5);
}

#[test]
fn criterion_06_gaussian_functional_product() {
    run(6, selftest::criterion_6);
}

#[test]
fn criterion_07_ball_body_identity() {
    run(7, selftest::criterion_7);
}

#[test]
fn criterion_08_borell_suite() {
    run(8, selftest::criterion_8);
}

#[test]
fn criterion_09_logconcave_center_search() {
    run(9, selftest::criterion_9);
}

#[test]
fn criterion_10_sandwich_implication() {
    run(10, selftest::criterion_10);
}

#[test]
fn criterion_11_stability_fits() {
    run(11, selftest::criterion_11);
}

#[test]
fn criterion_12_scan_sanity() {
    run(12, selftest::criterion_12);
}

#[test]
fn criterion_13_psi_measurement() {
    run(13, selftest::criterion_13);
}

#[test]
fn criterion_14_timing_and_determinism() {
    // determinism here; the wall-clock budgets are enforced by the quick
    // suite below and by criteria 1/9/12's own stated limits
    run(14, selftest::criterion_14);
}

#[test]
fn quick_suite_under_budget() {
    let _g = GATE.lock().unwrap_or_else(|e| e.into_inner());
    let t = std::time::Instant::now();
    let outcomes = selftest::run_all(true);
    let elapsed = t.elapsed().as_secs_f64();
    for o in &outcomes {
        println!(
            "quick criterion {:2} [{}]: {} ({:.2}s)",
            o.id,
            o.name,
            if o.pass { "PASS" } else { "FAIL" },
            o.seconds
        );
        assert!(o.pass, "quick criterion {} failed: {}", o.id, o.detail);
    }
    assert!(elapsed < 15.0, "quick suite took {elapsed:.1}s (budget 15s)");
}

#[test]
fn zz_full_suite_within_budget() {
    let _g = GATE.lock().unwrap_or_else(|e| e.into_inner());
    // runs last (alphabetical order): the accumulated criterion time is
    // the full-suite cost, which must stay under the 2-minute budget
    let total = TOTAL_MS.load(Ordering::SeqCst) as f64 / 1000.0;
    println!("full suite accumulated time: {total:.1}s (budget 120s)");
    assert!(total < 120.0, "full suite took {total:.1}s");
}
