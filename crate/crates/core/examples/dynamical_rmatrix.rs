//! The face-type R-matrix: entries at a generic point, the weight mask, the
//! initial condition and the dynamical Yang-Baxter equation under each shift
//! convention.
//!
//!     cargo run --release --example dynamical_rmatrix

use ellfree::qspecial::QSpecial;
use ellfree::rmatrix::{self, build_rbar, check_dybe_once, DybeConvention};
use ellfree::{QParams, Scalar};

fn main() {
    let pp = QParams::defaults(2);
    let qs = QSpecial::new(&pp);
    let u = Scalar::from_f64(pp.prec, 0.3);
    let s = [Scalar::from_f64(pp.prec, 2.1)];
    let r = build_rbar(&qs, &u, &s).unwrap();
    println!("Rbar(u = 0.3, s = 2.1), N = 2, nonzero entries:");
    for a in 0..2 {
        for b2 in 0..2 {
            for c in 0..2 {
                for d in 0..2 {
                    let x = r.get(a, b2, c, d);
                    if !x.is_zero() {
                        println!("  R[{a}{b2},{c}{d}] = {:.20}", x);
                    }
                }
            }
        }
    }

    let qs3 = QSpecial::new(&QParams::defaults(3));
    let draw = &rmatrix::random_draws(1, 7, &qs3.pp)[0];
    let us = [&draw.u[0], &draw.u[1], &draw.u[2]];
    for conv in ["standard+", "standard-", "mirrored+", "mirrored-"] {
        let conv: DybeConvention = conv.parse().unwrap();
        let (res, _) = check_dybe_once(&qs3, us, &draw.s, conv).unwrap();
        println!("N = 3, convention {conv:<10} Yang-Baxter residual {res:.3e}");
    }

    for rep in rmatrix::all_reports(&qs3, 100, 7, DybeConvention::default()) {
        println!("{}", rep.summary_line());
    }
}
