mod support;

use readease_core::stats::steiger_test;
use support::{eye_oracle, formula_oracle, stats_calibration};

#[test]
fn formulas_match_spreadsheet_recomputation() {
    for seed in [1, 2, 3] {
        let dev = formula_oracle::max_deviation(seed, 20);
        assert!(dev < 1e-9, "seed {seed}: deviation {dev}");
    }
}

#[test]
fn formula_worked_examples() {
    for (label, got, want, tol) in formula_oracle::worked_examples() {
        assert!((got - want).abs() <= tol, "{label}: {got} vs {want}");
    }
}

#[test]
fn eye_measures_match_brute_force() {
    let bad = eye_oracle::mismatches(7, 1000);
    assert!(
        bad.is_empty(),
        "{} mismatches, first {:?}",
        bad.len(),
        &bad[..bad.len().min(5)]
    );
}

#[test]
fn eye_hand_example() {
    for (m, got, want) in eye_oracle::hand_example_checks() {
        assert_eq!(got, Some(want), "{m}");
    }
}

#[test]
fn steiger_matches_hand_formula() {
    let lib = steiger_test(0.6, 0.3, 0.5, 100).unwrap();
    let hand = stats_calibration::steiger_by_hand(0.6, 0.3, 0.5, 100.0);
    assert!((lib.z - hand).abs() < 1e-12);
    assert!((lib.z - 3.487).abs() < 1e-3, "z = {}", lib.z);
    assert!((lib.p_value - 4.9e-4).abs() < 0.2e-4, "p = {}", lib.p_value);
}

#[test]
fn steiger_null_rejection_is_calibrated() {
    let rate = stats_calibration::steiger_null_rejection(11, 2000, 100, 0.4, 0.5, 0.05);
    assert!((rate - 0.05).abs() <= 0.02, "rejection rate {rate}");
}

#[test]
fn bootstrap_coverage_is_calibrated() {
    let cov = stats_calibration::bootstrap_coverage(5, 300, 162, 0.6);
    assert!((cov - 0.95).abs() <= 0.04, "coverage {cov}");
}
