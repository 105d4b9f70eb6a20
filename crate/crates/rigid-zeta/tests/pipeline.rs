//! End-to-end pipeline tests against the enumeration oracle.

use num_bigint::{BigInt, BigUint};
use rigid_zeta::{run_hyperelliptic, RunOptions};

fn f(coeffs: &[i64]) -> Vec<BigInt> {
    coeffs.iter().map(|&c| BigInt::from(c)).collect()
}

#[test]
fn elliptic_f5_full_run_matches_oracle() {
    let opts = RunOptions {
        oracle_depth: 2,
        ..Default::default()
    };
    let report = run_hyperelliptic(&BigUint::from(5u8), 1, &f(&[1, 1, 0, 1]), &opts).unwrap();
    assert_eq!(report.genus, 1);
    assert_eq!(report.chi, vec!["1", "3", "5"]);
    assert_eq!(report.counts[0], "9");
    assert_eq!(report.counts[1], "27");
    let ob = report.oracle.unwrap();
    assert!(ob.matches);
}

#[test]
fn genus2_f7_full_run_matches_oracle() {
    let opts = RunOptions {
        oracle_depth: 2,
        ..Default::default()
    };
    let report = run_hyperelliptic(&BigUint::from(7u8), 1, &f(&[1, 2, 0, 0, 0, 1]), &opts).unwrap();
    assert_eq!(report.genus, 2);
    assert!(report.oracle.unwrap().matches);
}

#[test]
fn extension_field_genus1_matches_oracle() {
    // y^2 = x^3 + t x + 1 over F_9, t a generator of F_9 over F_3
    use rigid_zeta::doc::{CurveDocument, JsonInt};
    let p = BigUint::from(3u8);
    let mut doc = CurveDocument::hyperelliptic(&p, 2, &f(&[1, 0, 0, 1]));
    // set the x-coefficient of f to t: q[0][1] = -t
    doc.q[0][1] = vec![JsonInt(BigInt::from(0)), JsonInt(BigInt::from(-1))];
    let opts = RunOptions {
        oracle_depth: 2,
        ..Default::default()
    };
    let report = rigid_zeta::run(&doc, &opts).unwrap();
    assert_eq!(report.genus, 1);
    assert!(report.oracle.unwrap().matches);
}

#[test]
fn determinism_and_thread_independence() {
    let opts1 = RunOptions {
        oracle_depth: 1,
        ..Default::default()
    };
    let a = run_hyperelliptic(&BigUint::from(7u8), 1, &f(&[3, 1, 0, 1]), &opts1).unwrap();
    let b = run_hyperelliptic(&BigUint::from(7u8), 1, &f(&[3, 1, 0, 1]), &opts1).unwrap();
    assert_eq!(a.deterministic_view(), b.deterministic_view());
    let opts4 = RunOptions {
        oracle_depth: 1,
        threads: 4,
        ..Default::default()
    };
    let c = run_hyperelliptic(&BigUint::from(7u8), 1, &f(&[3, 1, 0, 1]), &opts4).unwrap();
    assert_eq!(a.deterministic_view(), c.deterministic_view());
}

#[test]
fn doubling_precision_keeps_chi() {
    let base = run_hyperelliptic(
        &BigUint::from(11u8),
        1,
        &f(&[1, 4, 0, 1]),
        &RunOptions::default(),
    )
    .unwrap();
    let plan = base.precision.clone().unwrap();
    let doubled = run_hyperelliptic(
        &BigUint::from(11u8),
        1,
        &f(&[1, 4, 0, 1]),
        &RunOptions {
            forced_n: Some(plan.n_used * 2),
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(base.chi, doubled.chi);
}

#[test]
fn lift_independence() {
    // two lifts of the same curve mod 5: f and f + 5 h
    let a = run_hyperelliptic(
        &BigUint::from(5u8),
        1,
        &f(&[1, 1, 0, 1]),
        &RunOptions::default(),
    )
    .unwrap();
    let b = run_hyperelliptic(
        &BigUint::from(5u8),
        1,
        &f(&[6, 1, 5, 1]),
        &RunOptions::default(),
    )
    .unwrap();
    assert_eq!(a.chi, b.chi);
}
