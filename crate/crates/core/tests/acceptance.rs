use std::io::Write;
use std::sync::Mutex;

use epspectra::acceptance::{self, AcceptanceConfig};

// Runtime budgets are measured, so the tests must not compete for cores.
static SERIAL: Mutex<()> = Mutex::new(());

#[test]
fn acceptance_criteria() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let outcomes = acceptance::run_all(&AcceptanceConfig::default());
    // Written straight to stderr so the summary shows even when output is captured.
    let mut stderr = std::io::stderr().lock();
    for o in &outcomes {
        writeln!(
            stderr,
            "{} {:>2} {} [{:.2}s / {}s]: {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.title,
            o.elapsed.as_secs_f64(),
            o.budget.as_secs(),
            o.detail
        )
        .unwrap();
    }
    let failed: Vec<usize> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
    let slow: Vec<usize> = outcomes.iter().filter(|o| !o.within_budget()).map(|o| o.id).collect();
    assert!(slow.is_empty(), "criteria over their runtime budget: {slow:?}");
}

#[test]
fn report_is_deterministic() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let config = AcceptanceConfig::default();
    let a: Vec<_> = [3, 5, 11].iter().map(|&id| acceptance::run_criterion(id, &config)).collect();
    let b: Vec<_> = [3, 5, 11].iter().map(|&id| acceptance::run_criterion(id, &config)).collect();
    assert_eq!(acceptance::render(&a), acceptance::render(&b));
}

#[test]
fn zero_tolerance_fails() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let config = AcceptanceConfig { tolerance_scale: 0.0 };
    let outcomes: Vec<_> = [1, 5, 8, 10, 11].iter().map(|&id| acceptance::run_criterion(id, &config)).collect();
    for o in &outcomes {
        assert!(!o.passed, "criterion {} passed with zero tolerance: {}", o.id, o.detail);
    }
}
