mod common;

use common::{c, rel_to};
use ellfree::qspecial::{pochhammer, theta, PochCutoff, QError, QSpecial};
use ellfree::scalar::{parse_real, Real};
use ellfree::{QParams, Scalar};
use proptest::prelude::*;

// Reference values from an independent 50-digit evaluation of the truncated
// products (60 factors per base), q = 0.4, r = 6.3.
const THETA_01_05: &str = "0.3288670640968430156889922";
const CURLY_02_N3: &str = "0.7993403926192539161795708";
const BRACKET_V: &str = "0.5495923373238054806139995+0.1829714500831769017788499i";
const BRACKET_STAR_V: &str = "0.5486813457722561531448251+0.1816586409309430101639103i";
const PHI_05_N3: &str = "0.07500262301994079790334642";
const PHI_05_N2: &str = "0.06834045476309334312079332";
const G_N2: &str = "-0.1676916759404436723215208";
const G_N3: &str = "-0.017726421218738244667547i";
const C_N2: [&str; 3] = ["-0.1676916759404436723215208", "-1.352961393636480552226793", "30.66604091421837807660321"];
const C_N3: [&str; 4] = [
    "-0.017726421218738244667547i",
    "-0.007757249186875188058967519i",
    "0.01486650297190771547033243i",
    "-0.03178038330403878698824124i",
];

fn qs(n: usize) -> QSpecial {
    QSpecial::new(&QParams::defaults(n))
}

#[test]
fn qnum_values() {
    let s = qs(3);
    assert!((s.qnum_f64(1.0) - Real::with_val(128, 1)).abs().to_f64() < 1e-36);
    let want = Real::with_val(128, &s.pp.q + s.pp.q.clone().recip());
    assert!((s.qnum_f64(2.0) - want).abs().to_f64() < 1e-36);
    assert!((s.qnum_f64(3.0).to_f64() - 7.41).abs() < 1e-14);
}

#[test]
fn theta_against_reference() {
    let t = theta(&c("0.5"), &parse_real(128, "0.1").unwrap()).unwrap();
    assert!(rel_to(&t.value, THETA_01_05) < 1e-24);
    assert_eq!(theta(&c("0"), &parse_real(128, "0.1").unwrap()).unwrap_err(), QError::ZeroArgument);
}

#[test]
fn curly_against_double_product() {
    assert!(rel_to(&qs(3).curly(&c("0.2")).value, CURLY_02_N3) < 1e-24);
}

#[test]
fn brackets_against_reference() {
    let s = qs(2);
    let v = c("0.3+0.1i");
    assert!(rel_to(&s.bracket(&v).value, BRACKET_V) < 1e-24);
    assert!(rel_to(&s.bracket_star(&v).value, BRACKET_STAR_V) < 1e-24);
    assert!(s.bracket(&c("0")).value.abs_f64() < 1e-38);
}

#[test]
fn phi_and_constants_against_reference() {
    assert!(rel_to(&qs(3).phi_n_z(&c("0.5")).unwrap().value, PHI_05_N3) < 1e-24);
    assert!(rel_to(&qs(2).phi_n_z(&c("0.5")).unwrap().value, PHI_05_N2) < 1e-24);
    assert!(rel_to(&qs(2).g_n().value, G_N2) < 1e-24);
    assert!(rel_to(&qs(3).g_n().value, G_N3) < 1e-24);
    for (k, want) in C_N2.iter().enumerate() {
        assert!(rel_to(&qs(2).c_n(k).value, want) < 1e-24, "C_{k}");
    }
    for (k, want) in C_N3.iter().enumerate() {
        assert!(rel_to(&qs(3).c_n(k).value, want) < 1e-24, "C_{k}");
    }
}

#[test]
fn rho_is_ratio_of_rho_plus() {
    let s = qs(3);
    let v = c("0.27-0.41i");
    let want = s.rho_plus(&v, true).div(&s.rho_plus(&v, false)).value;
    assert!(s.rho(&v).value.rel_dist(&want, 1e-300) < 1e-36);
}

#[test]
fn tail_bounds_cover_doubled_cutoff() {
    let pp = QParams::defaults(3);
    let bases = [pp.p.clone(), pp.qpow_f64(6.0)];
    let z = c("0.7+0.2i");
    for m in [2usize, 4, 8] {
        let coarse = pochhammer(&z, &bases, PochCutoff::Degree(m)).unwrap();
        let fine = pochhammer(&z, &bases, PochCutoff::Degree(2 * m)).unwrap();
        let err = coarse.value.rel_dist(&fine.value, 1e-300);
        assert!(err <= coarse.rel_tail, "M = {m}: error {err:.3e} above bound {:.3e}", coarse.rel_tail);
    }
}

#[test]
fn contour_quadrature_converges() {
    let s = qs(3);
    let coarse = s.contour_norm_residual(32, 0.5, false).unwrap();
    let fine = s.contour_norm_residual(64, 0.5, false).unwrap();
    assert!(fine < coarse, "{fine:.3e} !< {coarse:.3e}");
    assert!(s.contour_norm_residual(2048, 0.5, false).unwrap() < 1e-10);
    assert!(s.contour_norm_residual(2048, 0.5, true).unwrap() < 1e-10);
}

#[test]
fn named_evaluation() {
    let s = qs(3);
    assert!(s.eval_named("bracket", &[c("0")]).unwrap().value.abs_f64() < 1e-38);
    assert!(rel_to(&s.eval_named("phiN", &[c("0.5")]).unwrap().value, PHI_05_N3) < 1e-24);
    assert!(matches!(s.eval_named("zeta", &[c("1")]), Err(QError::Unknown(_))));
    assert!(matches!(s.eval_named("theta", &[c("1")]), Err(QError::Arity { want: 2, .. })));
    assert!(matches!(s.eval_named("C_n", &[c("1.5")]), Err(QError::Argument { .. })));
}

fn spectral() -> impl Strategy<Value = Scalar> {
    (-2.5f64..2.5, -1.0f64..1.0).prop_map(|(a, b)| Scalar::from_f64_pair(128, a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pochhammer_shift(a in -1.5f64..1.5, b in -1.5f64..1.5, t in 0.05f64..0.9) {
        let z = Scalar::from_f64_pair(128, a, b);
        let tr = Real::with_val(128, t);
        let lhs = pochhammer(&z, std::slice::from_ref(&tr), PochCutoff::default()).unwrap();
        let zt = z.scale(&tr);
        let rhs = pochhammer(&zt, std::slice::from_ref(&tr), PochCutoff::default()).unwrap();
        let want = z.one_minus() * rhs.value;
        prop_assert!(lhs.value.rel_dist(&want, 1e-300) < 1e-30);
    }

    #[test]
    fn bracket_is_odd_and_r_antiperiodic(v in spectral()) {
        let s = qs(3);
        let b = s.bracket(&v).value;
        prop_assert!((&s.bracket(&(-&v)).value + &b).abs_f64() <= 1e-30 * b.abs_f64());
        let r = Scalar::from_real(&s.pp.r);
        prop_assert!((&s.bracket(&(&v + &r)).value + &b).abs_f64() <= 1e-30 * b.abs_f64());
        let bs = s.bracket_star(&v).value;
        let rs = Scalar::from_real(&s.pp.rs);
        prop_assert!((&s.bracket_star(&(&v + &rs)).value + &bs).abs_f64() <= 1e-30 * bs.abs_f64());
    }

    #[test]
    fn theta_quasi_periodic(v in spectral()) {
        let s = qs(2);
        let z = s.z_of_v(&v);
        let p = Scalar::from_real(&s.pp.p);
        let lhs = s.theta_p(&(&p * &z)).unwrap().value;
        let want = -(s.theta_p(&z).unwrap().value / &z);
        prop_assert!(lhs.rel_dist(&want, 1e-300) < 1e-30);
    }

    #[test]
    fn phi_inversion(v in spectral(), n in 2usize..=4) {
        let s = qs(n);
        let (Ok(a), Ok(b)) = (s.phi_n(&v), s.phi_n(&(-&v))) else { return Ok(()); };
        prop_assert!((a.value * b.value).rel_dist(&Scalar::one(128), 1.0) < 1e-28);
    }
}
