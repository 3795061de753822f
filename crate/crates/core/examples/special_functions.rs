//! Brackets, theta functions and the closed-form constants at the default
//! parameters, plus the special-function suites.
//!
//!     cargo run --release --example special_functions

use ellfree::qspecial::{self, QSpecial};
use ellfree::{QParams, Scalar};

fn main() {
    let pp = QParams::defaults(3);
    let qs = QSpecial::new(&pp);
    println!("q = 0.4, r = 6.3, N = 3: p = {:.6e}, p* = {:.6e}", pp.p.to_f64(), pp.ps.to_f64());

    let v = Scalar::from_f64_pair(pp.prec, 0.3, 0.1);
    println!("[v]        = {:.25}", qs.bracket(&v).value);
    println!("[v]*       = {:.25}", qs.bracket_star(&v).value);
    println!("rho(v)     = {:.25}", qs.rho(&v).value);
    println!("mu*(v)     = {:.25}", qs.mu_star(&v).value);

    let z = Scalar::from_f64(pp.prec, 0.5);
    let phi = qs.phi_n_z(&z).unwrap();
    println!("phi_N(0.5) = {:.25}  (rel. tail {:.1e})", phi.value, phi.rel_tail);

    println!("g_N        = {:.25}", qs.g_n().value);
    for k in 0..=pp.n {
        println!("C_{k}        = {:.25}", qs.c_n(k).value);
    }

    // Named evaluation, as used by `ellfree eval`.
    let t = qs.eval_named("theta", &[z.clone(), Scalar::from_f64(pp.prec, 0.1)]).unwrap();
    println!("Theta_0.1(0.5) = {:.25}", t.value);

    for rep in qspecial::all_reports(&qs, 100, 7) {
        println!("{}", rep.summary_line());
    }
}
