//! One test per acceptance criterion; each prints its PASS/FAIL line.

use dephaser::acceptance::run_criterion;

fn check(id: usize) {
    let report = run_criterion(id);
    println!("{report}");
    assert!(report.passed, "{report}");
}

#[test]
fn criterion_01_ohmic_zero_temperature_closed_form() {
    check(1);
}

#[test]
fn criterion_02_ohmic_high_temperature_slope() {
    check(2);
}

#[test]
fn criterion_03_supraohmic_saturation() {
    check(3);
}

#[test]
fn criterion_04_unitary_limit() {
    check(4);
}

#[test]
fn criterion_05_perturbative_closed_forms() {
    check(5);
}

#[test]
fn criterion_06_second_order_residual() {
    check(6);
}

#[test]
fn criterion_07_route_equivalence() {
    check(7);
}

#[test]
fn criterion_08_decoherence_times() {
    check(8);
}

#[test]
fn criterion_09_eigen_and_dynamics_properties() {
    check(9);
}

#[test]
fn criterion_10_master_equation_residual_order() {
    check(10);
}

#[test]
fn criterion_11_figure_determinism() {
    check(11);
}
