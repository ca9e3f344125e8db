//! Randomized property suites over the torsion machinery: the pairing
//! duality square, the eigenvalue product formula, direct-sum stability,
//! and threshold independence.

use torsion::suites::{
    direct_sum_suite, eigenvalue_product_suite, pairing_dual_suite, spectrum_bounds_suite,
    threshold_sweep_suite,
};

#[test]
fn eigenvalue_product_formula_holds() {
    let outcome = eigenvalue_product_suite(40, 2024, 1e-8).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    assert!(outcome.worst_rel_err < 1e-8);
}

#[test]
fn pairing_dual_torsion_is_tau_squared() {
    let outcome = pairing_dual_suite(40, 2025, 1e-8).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
}

#[test]
fn direct_sum_multiplicativity_holds() {
    let outcome = direct_sum_suite(40, 2026, 1e-8).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
}

#[test]
fn total_torsion_survives_threshold_sweeps() {
    let (outcome, trials) = threshold_sweep_suite(15, 2027, 1e-8, 1e-10).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    assert!(trials.iter().all(|t| t.thresholds_used >= 2));
}

#[test]
fn spectrum_bounds_hold_for_random_probes() {
    let outcome = spectrum_bounds_suite(120, 2028, 8, false).unwrap();
    assert!(
        outcome.passed(),
        "failures: {:?}",
        outcome.failure_details
    );
    let zero_alpha = spectrum_bounds_suite(30, 2029, 6, true).unwrap();
    assert!(zero_alpha.passed());
}
