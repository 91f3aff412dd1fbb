//! Acceptance suite: one test per verification check, each printing a
//! single PASS/FAIL line (visible with `--nocapture`). The thresholds live
//! in the library's selftest module and are fixed constants there.

use slext::selftest::{run_check, CheckOutcome};
use slext::NumericsConfig;

fn run(id: usize) {
    let cfg = NumericsConfig::default();
    let CheckOutcome { name, passed, detail, seconds, .. } = run_check(id, &cfg, false);
    let verdict = if passed { "PASS" } else { "FAIL" };
    println!("[{verdict}] {id:2} {name}: {detail} ({seconds:.2}s)");
    assert!(passed, "{name}: {detail}");
}

#[test]
fn criterion_01_closed_form_regular_spectrum() {
    run(1);
}

#[test]
fn criterion_02_symmetric_separated_union() {
    run(2);
}

#[test]
fn criterion_03_symmetric_coupled_union() {
    run(3);
}

#[test]
fn criterion_04_krein_extension() {
    run(4);
}

#[test]
fn criterion_05_admissible_range_floor() {
    run(5);
}

#[test]
fn criterion_06_extension_ordering() {
    run(6);
}

#[test]
fn criterion_07_characteristic_factorization() {
    run(7);
}

#[test]
fn criterion_08_lamb_zeros() {
    run(8);
}

#[test]
fn criterion_09_hardy_inequality() {
    run(9);
}

#[test]
fn criterion_10_two_interval_interface() {
    run(10);
}

#[test]
fn criterion_11_boundary_identities() {
    run(11);
}
