//! The zero-mode algebra: central commutators, normal forms and exchange
//! records of the zero-mode words carried by the currents.
//!
//!     cargo run --release --example zero_modes

use ellfree::currents::{e_current, k_current};
use ellfree::zeromode::{central_value, commutator_scalar, exchange_record, Gen, GenKind};
use ellfree::QParams;

fn main() {
    let n = 3;
    let pp = QParams::defaults(n);
    let pairs = [
        (Gen::new(GenKind::P, 1), Gen::new(GenKind::Q, 1)),
        (Gen::new(GenKind::P, 1), Gen::new(GenKind::Q, 2)),
        (Gen::new(GenKind::Q, 1), Gen::new(GenKind::Q, 2)),
        (Gen::new(GenKind::Eta, 2), Gen::new(GenKind::Eta, 1)),
        (Gen::new(GenKind::Lat, 1), Gen::new(GenKind::Lat, 2)),
    ];
    for (a, b) in pairs {
        let c = commutator_scalar(a, b, n);
        println!("[{a}, {b}] = {}  ~ {:.12}", c.record(), central_value(&c, &pp));
    }

    let e1 = e_current(1, n).unwrap();
    let (rec, canon) = e1.zero.normal_form();
    println!("E_1 zero word: {} factors, normal-ordering exponent {rec}", canon.factors.len());

    let e2 = e_current(2, n).unwrap();
    println!("E_1(z1) E_1(z2): exponent {}", exchange_record(&e1.zero, &e1.zero));
    println!("E_1(z1) E_2(z2): exponent {}", exchange_record(&e1.zero, &e2.zero));
    let k1 = k_current(1, n).unwrap();
    println!("K_1(z1) E_1(z2): exponent {}", exchange_record(&k1.zero, &e1.zero));
}
