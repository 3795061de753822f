mod common;

use common::c;
use ellfree::currents::{
    all_reports, e_current, f_current, h_current, k_current, psi1_reference_value, psi_1, psi_star_n,
};
use ellfree::lin::Lin;
use ellfree::modealg::ModeAlgebra;
use ellfree::opecalc::{contraction_template, exchange_ratio, recognize, specialize_compose, Bench};
use ellfree::scalar::Real;
use ellfree::QParams;

fn bench(n: usize) -> Bench {
    Bench::new(&QParams::defaults(n), 12, 7, 24)
}

#[test]
fn current_suites_at_rank_two() {
    let b = bench(2);
    for rep in all_reports(&b) {
        if rep.suite == "cur.psi" {
            continue;
        }
        assert!(rep.pass, "{}", rep.summary_line());
    }
}

#[test]
fn psi_star_self_exchange_is_minus_mu_star_at_rank_two() {
    // Known disagreement with the stated structure function: the engine
    // produces exactly -mu*(v) at N = 2.
    let b = bench(2);
    let x = psi_star_n(2).unwrap();
    let ex = exchange_ratio(&x, &x, &b.ma).unwrap();
    for s in &b.samples {
        let mu = b.qs.mu_star(&s.v(&b.pp)).value;
        let got = ex.eval(s).value;
        assert!(got.rel_dist(&(-mu), 1e-300) < 1e-25);
    }
}

#[test]
fn psi1_exchange_regression() {
    for (n, want) in [(2, (-2.485016789847827, -0.8671690759979692)), (3, (-2.291561164334912, -0.6884391193312088))] {
        let b = bench(n);
        let x = psi_1(n).unwrap();
        let ex = exchange_ratio(&x, &x, &b.ma).unwrap();
        let (re, im) = psi1_reference_value(&b, &ex).to_f64_pair();
        assert!((re - want.0).abs() < 1e-13 && (im - want.1).abs() < 1e-13, "N = {n}: {re} {im}");
    }
}

#[test]
fn ef_poles_and_residues() {
    let n = 3;
    let pp = QParams::defaults(n);
    let ma = ModeAlgebra::new(&pp);
    let e1 = e_current(1, n).unwrap();
    let f1 = f_current(1, n).unwrap();
    let f2 = f_current(2, n).unwrap();
    let diag = recognize(&contraction_template(&e1, &f1, &ma).unwrap(), &pp).unwrap();
    let off = recognize(&contraction_template(&e1, &f2, &ma).unwrap(), &pp).unwrap();
    let dq = Real::with_val(128, &pp.q - pp.q.clone().recip());
    for (x0, want) in [(Lin::int(-1), "0.4"), (Lin::int(1), "-2.5")] {
        assert_eq!(diag.order_at(x0, &pp).0, -1);
        assert!(off.order_at(x0, &pp).0 >= 0);
        let comp = specialize_compose(&e1, &f1, x0, &ma).unwrap();
        let res = comp.leading.value.scale(&dq);
        assert!(res.rel_dist(&c(want), 1e-300) < 1e-30, "{:?}", res.to_f64_pair());
    }
}

#[test]
fn ef_composite_is_h_at_the_poles() {
    let n = 3;
    let pp = QParams::defaults(n);
    let ma = ModeAlgebra::new(&pp);
    for j in 1..n {
        let e = e_current(j, n).unwrap();
        let f = f_current(j, n).unwrap();
        for (x0, plus, s) in [(Lin::int(-1), true, Lin::rat(1, 2)), (Lin::int(1), false, Lin::rat(-1, 2))] {
            let comp = specialize_compose(&e, &f, x0, &ma).unwrap();
            let h = h_current(j, n, plus).unwrap().shift(s);
            let d = ellfree::currents::osc_sum_distance(&[&e.shift(-x0), &f], &h, 24, &pp);
            assert!(d < 1e-30, "j = {j}: {d:.3e}");
            assert!(comp.desc.zero.normal_form().1.same_operator(&h.zero.normal_form().1));
        }
    }
}

#[test]
fn h_plus_and_minus_differ() {
    let pp = QParams::defaults(3);
    let hp = h_current(1, 3, true).unwrap();
    let hm = h_current(1, 3, false).unwrap();
    assert!(ellfree::currents::osc_distance(&hp, &hm, 8, &pp) > 1e-3);
}

#[test]
fn index_errors() {
    assert!(e_current(3, 3).is_err());
    assert!(f_current(0, 3).is_err());
    assert!(k_current(3, 3).is_ok());
    assert!(k_current(4, 3).is_err());
}
