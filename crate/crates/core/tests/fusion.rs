mod common;

use common::{c, rel_to};
use ellfree::fusionwn::{
    build_lambda, build_ttilde, build_ttilde_with_unit, eval_cn, fusion_leading_check, lambda_exchanges,
    osc_mod_constraint, psi_pair_form, psi_pair_pole, s_matrix, verify_lambda_exchange, verify_smatrix_unitarity,
    verify_tn_nontrivial, FusionError, NONTRIVIAL,
};
use ellfree::lin::Lin;
use ellfree::opecalc::Bench;
use ellfree::qspecial::QSpecial;
use ellfree::{QParams, Scalar};
use proptest::prelude::*;

// Products of phi_N at x = 0.8 + 0.3i, N = 3, from a 50-digit evaluation.
const S21: &str = "0.01221952169054065054677182-0.7901755120275102202246665i";
const S22: &str = "-0.3222262335490121739579513-0.6014613039470428666207965i";

fn qs(n: usize) -> QSpecial {
    QSpecial::new(&QParams::defaults(n))
}

fn bench(n: usize) -> Bench {
    Bench::new(&QParams::defaults(n), 12, 7, 24)
}

#[test]
fn s_matrix_against_reference() {
    let s = qs(3);
    let x = c("0.8+0.3i");
    assert!(rel_to(&s_matrix(&s, 2, 1, &x).unwrap().value, S21) < 1e-24);
    assert!(rel_to(&s_matrix(&s, 1, 2, &x).unwrap().value, S21) < 1e-24);
    assert!(rel_to(&s_matrix(&s, 2, 2, &x).unwrap().value, S22) < 1e-24);
    let s11 = s_matrix(&s, 1, 1, &x).unwrap().value;
    assert!(s11.rel_dist(&s.phi_n_z(&x).unwrap().value, 1e-300) < 1e-36);
}

#[test]
fn fusion_constants_and_range() {
    let s = qs(2);
    assert!(rel_to(&eval_cn(&s, 0).unwrap().value, "-0.1676916759404436723215208") < 1e-24);
    assert!(rel_to(&eval_cn(&s, 2).unwrap().value, "30.66604091421837807660321") < 1e-24);
    assert!(matches!(eval_cn(&s, 3), Err(FusionError::Range { got: 3, max: 2, .. })));
    assert!(build_lambda(0, 3).is_err());
    assert!(build_ttilde(4, 3).is_err());
}

#[test]
fn fused_term_counts() {
    for nn in 2..=4 {
        for n in 1..=nn {
            let t = build_ttilde(n, nn).unwrap();
            let want = (1..=n).fold(1, |acc, k| acc * (nn + 1 - k) / k);
            assert_eq!(t.terms.len(), want, "T_{n} at N = {nn}");
            assert!(t.terms.iter().all(|t| t.indices.windows(2).all(|w| w[0] < w[1])));
        }
    }
}

#[test]
fn top_current_profile() {
    let pp = QParams::defaults(3);
    let t = build_ttilde(3, 3).unwrap();
    assert_eq!(t.terms.len(), 1);
    let d = &t.terms[0].desc;
    assert!(osc_mod_constraint(d, 24, &pp) > NONTRIVIAL);
    assert!(d.zero.normal_form().1.is_central());
    let sl = build_ttilde_with_unit(3, 3, Lin::int(1)).unwrap();
    assert!(osc_mod_constraint(&sl.terms[0].desc, 24, &pp) < 1e-30);
}

#[test]
fn every_lambda_pair_shares_one_exchange_function() {
    let b = bench(3);
    let ex = lambda_exchanges(&b).unwrap();
    for s in b.samples.iter().take(4) {
        let want = s_matrix(&b.qs, 1, 1, &s.x()).unwrap().value;
        for row in &ex {
            for e in row {
                assert!(e.eval(s).value.rel_dist(&want, 1e-300) < 1e-28);
            }
        }
    }
}

#[test]
fn psi_pair_has_one_simple_pole() {
    for n in 2..=3 {
        let b = bench(n);
        let pf = psi_pair_form(&b).unwrap();
        assert_eq!(pf.order_at(psi_pair_pole(n), &b.pp).0, -1);
        assert_eq!(pf.order_at(Lin::int(n as i64), &b.pp).0, 0);
    }
}

#[test]
fn suites_pass() {
    for n in 2..=3 {
        let b = bench(n);
        for rep in [verify_lambda_exchange(&b), verify_smatrix_unitarity(&b), verify_tn_nontrivial(&b), fusion_leading_check(&b)] {
            assert!(rep.pass, "{}", rep.summary_line());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn s_matrix_unitarity(rho in 0.5f64..1.6, arg in -2.8f64..2.8, n in 1usize..=3, m in 1usize..=3) {
        let s = qs(3);
        let x = Scalar::from_f64_pair(128, rho * arg.cos(), rho * arg.sin());
        let (Ok(a), Ok(b)) = (s_matrix(&s, n, m, &x), s_matrix(&s, m, n, &x.recip())) else { return Ok(()); };
        prop_assume!(a.value.abs_f64() < 1e30 && b.value.abs_f64() < 1e30);
        prop_assert!((a.value * b.value).rel_dist(&Scalar::one(128), 1.0) < 1e-25);
    }

    #[test]
    fn s_matrix_is_symmetric(rho in 0.5f64..1.6, arg in -2.8f64..2.8, n in 1usize..=3, m in 1usize..=3) {
        let s = qs(3);
        let x = Scalar::from_f64_pair(128, rho * arg.cos(), rho * arg.sin());
        let a = s_matrix(&s, n, m, &x).unwrap().value;
        let b = s_matrix(&s, m, n, &x).unwrap().value;
        prop_assert!(a.rel_dist(&b, 1e-300) < 1e-30);
    }
}
