mod common;

use common::{c, rel_to};
use ellfree::qspecial::QSpecial;
use ellfree::rmatrix::{
    build_rbar, build_rplus, build_rstar, check_dybe, check_dybe_once, check_initial, check_weight_conservation,
    generic_point, s_partial, weight_mask, DybeConvention, RMatError,
};
use ellfree::{QParams, Scalar};
use proptest::prelude::*;

fn qs(n: usize) -> QSpecial {
    QSpecial::new(&QParams::defaults(n))
}

#[test]
fn rank_two_entries_against_direct_brackets() {
    let m = build_rbar(&qs(2), &c("0.3"), &[c("2.1")]).unwrap();
    assert!(rel_to(m.get(0, 1, 0, 1), "0.1582827161537054764295493") < 1e-24);
    assert!(rel_to(m.get(1, 0, 1, 0), "0.2352295919796922430437254") < 1e-24);
    assert!(rel_to(m.get(0, 1, 1, 0), "0.8482417397634187943425592") < 1e-24);
    assert!(rel_to(m.get(1, 0, 0, 1), "0.6889549940095823885948855") < 1e-24);
    assert!(rel_to(m.get(0, 0, 0, 0), "1") < 1e-38);
    assert!(m.get(0, 0, 1, 1).is_zero());
}

#[test]
fn dressed_matrices_are_scalar_multiples() {
    let s = qs(3);
    let (u, dyn_s) = generic_point(&s.pp);
    let bar = build_rbar(&s, &u, &dyn_s).unwrap();
    let plus = build_rplus(&s, &u, &dyn_s).unwrap();
    let rho = s.rho_plus(&u, false).value;
    for (a, b) in bar.entries.iter().zip(&plus.entries) {
        assert!((a * &rho - b).abs_f64() <= 1e-34 * (1.0 + b.abs_f64()));
    }
    let star = build_rstar(&s, &u, &dyn_s).unwrap();
    assert!(star.get(0, 1, 0, 1).rel_dist(plus.get(0, 1, 0, 1), 1e-300) > 1e-6);
}

#[test]
fn partial_sums_and_shape_errors() {
    let s = [c("1"), c("2"), c("4")];
    assert!(rel_to(&s_partial(&s, 1, 4), "7") < 1e-38);
    assert!(rel_to(&s_partial(&s, 2, 3), "2") < 1e-38);
    let e = build_rbar(&qs(3), &c("0.3"), &[c("2.1")]).unwrap_err();
    assert!(matches!(e, RMatError::Dynamical { expected: 2, got: 1 }));
    assert!(build_rbar(&qs(2), &c("0.3"), &[c("0")]).is_err());
}

#[test]
fn mask_counts() {
    for n in 2..=4 {
        assert_eq!(weight_mask(n).iter().filter(|b| **b).count(), n + 2 * n * (n - 1));
    }
}

#[test]
fn structural_suites_pass() {
    for n in 2..=3 {
        let s = qs(n);
        let (u, dyn_s) = generic_point(&s.pp);
        assert!(check_weight_conservation(&s, &u, &dyn_s).pass);
        assert!(check_initial(&s, &dyn_s).pass);
    }
}

#[test]
fn conventions() {
    let s = qs(2);
    for (name, pass) in [("standard+", true), ("mirrored-", true), ("standard-", false), ("mirrored+", false)] {
        let conv: DybeConvention = name.parse().unwrap();
        assert_eq!(conv.to_string(), name);
        let rep = check_dybe(&s, 8, 3, conv);
        assert_eq!(rep.pass, pass, "{name}: {}", rep.summary_line());
        if !pass {
            assert!(rep.max_residual > 0.1, "{name}");
        }
    }
    assert!("sideways".parse::<DybeConvention>().is_err());
}

fn spectral() -> impl Strategy<Value = (f64, f64)> {
    (-0.8f64..0.8, -0.4f64..0.4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn dybe_holds_at_random_parameters(
        us in prop::array::uniform3(spectral()),
        ss in prop::collection::vec((0.3f64..2.7, -0.5f64..0.5), 2),
    ) {
        let q = qs(3);
        let u: Vec<Scalar> = us.iter().map(|(a, b)| Scalar::from_f64_pair(128, *a, *b)).collect();
        let s: Vec<Scalar> = ss.iter().map(|(a, b)| Scalar::from_f64_pair(128, *a, *b)).collect();
        match check_dybe_once(&q, [&u[0], &u[1], &u[2]], &s, DybeConvention::default()) {
            Ok((res, tail)) => prop_assert!(res < 1e-25 && tail < 1e-26, "{res:.3e} {tail:.3e}"),
            Err(RMatError::Singular { .. }) => {}
            Err(e) => prop_assert!(false, "{e}"),
        }
    }
}
