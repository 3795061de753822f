mod common;

use common::solve_vs_elimination;
use ellfree::modealg::{mode_range, ModeAlgebra, ModeError};
use ellfree::scalar::parse_real;
use ellfree::QParams;
use proptest::prelude::*;

fn ma(n: usize) -> ModeAlgebra {
    ModeAlgebra::new(&QParams::defaults(n))
}

#[test]
fn commutator_reference_value() {
    let got = ma(2).b_commutator(1, 1, 1, -1).unwrap();
    let want = parse_real(128, "0.1379240234597505555942955").unwrap();
    let rel = (got - &want).abs() / want;
    assert!(rel.to_f64() < 1e-24);
}

#[test]
fn commutator_vanishes_off_diagonal_in_m() {
    let a = ma(3);
    assert!(a.b_commutator(1, 2, 3, -2).unwrap().is_zero());
    assert!(matches!(a.b_commutator(1, 2, 0, 0), Err(ModeError::ZeroMode)));
    assert!(matches!(a.b_commutator(4, 1, 1, -1), Err(ModeError::IndexOutOfRange { .. })));
}

#[test]
fn solve_matches_elimination() {
    for n in 2..=4 {
        let a = ma(n);
        for m in mode_range(12) {
            let d = solve_vs_elimination(&a, m);
            assert!(d < 1e-25, "N = {n}, m = {m}: {d:.3e}");
        }
    }
}

#[test]
fn solve_residuals_and_constraint() {
    for n in 2..=4 {
        let a = ma(n);
        for m in [-12, -3, -1, 1, 5, 12] {
            assert!(a.solve_residual(m).unwrap() < 1e-30, "N = {n}, m = {m}");
            assert!(a.constraint_residual(m).unwrap() < 1e-30, "N = {n}, m = {m}");
        }
    }
}

#[test]
fn suites_pass_at_defaults() {
    for n in 2..=4 {
        for rep in ellfree::modealg::all_reports(&ma(n), 12) {
            assert!(rep.pass, "{}", rep.summary_line());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn commutator_is_antisymmetric(n in 2usize..=4, j in 1usize..=4, k in 1usize..=4, m in 1i64..=12) {
        prop_assume!(j <= n && k <= n);
        let a = ma(n);
        let lhs = a.b_commutator(j, k, m, -m).unwrap();
        let rhs = a.b_commutator(k, j, -m, m).unwrap();
        let scale = lhs.clone().abs().to_f64().max(1e-300);
        prop_assert!((lhs + rhs).abs().to_f64() / scale < 1e-30);
    }

    #[test]
    fn solve_agrees_with_oracle_at_other_q(qn in 15u32..85, m in -10i64..=10) {
        prop_assume!(m != 0);
        let pp = QParams::parse(&format!("0.{qn:02}"), "5.7", 3, 1, 128).unwrap();
        let d = solve_vs_elimination(&ModeAlgebra::new(&pp), m);
        prop_assert!(d < 1e-25, "{d:.3e}");
    }
}
