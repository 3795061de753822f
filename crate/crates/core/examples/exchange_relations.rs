//! The OPE engine on a single pair: contract `E_1(z1) E_1(z2)`, recognize the
//! contraction as a Pochhammer product, and compare the exchange function with
//! `[v+1]*/[v-1]*` at a few sample points.
//!
//!     cargo run --release --example exchange_relations

use ellfree::currents::e_current;
use ellfree::opecalc::{contraction_template, exchange_ratio, recognize, Bench};
use ellfree::{QParams, Scalar};

fn main() {
    let pp = QParams::defaults(2);
    let b = Bench::new(&pp, 6, 7, 24);
    let e = e_current(1, 2).unwrap();

    let g = contraction_template(&e, &e, &b.ma).unwrap();
    let pf = recognize(&g, &pp).unwrap();
    println!("<E_1(z1) E_1(z2)> = exp(sum_m g_m x^m) with x = z2/z1, recognized as:");
    for f in &pf.factors {
        let bases: Vec<String> = f.bases.iter().map(|l| format!("q^({l})")).collect();
        println!("  (q^({}) x; {})^{}", f.arg, bases.join(", "), f.exp);
    }

    let ex = exchange_ratio(&e, &e, &b.ma).unwrap();
    let one = Scalar::one(pp.prec);
    for s in &b.samples {
        let v = s.v(&pp);
        let got = ex.eval(s).value;
        let want = b.qs.bracket_star(&(&v + &one)).div(&b.qs.bracket_star(&(&v - &one))).value;
        println!("|x| = {:.2}: engine {:.18}  printed {:.18}  rel {:.1e}", s.x().abs_f64(), got, want, got.rel_dist(&want, 1e-300));
    }
}
