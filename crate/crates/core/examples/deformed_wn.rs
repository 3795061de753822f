//! The deformed W_N currents: Lambda_j, the fused T_n, their exchange
//! S-matrices and the fusion constants.
//!
//!     cargo run --release --example deformed_wn

use ellfree::fusionwn::{self, build_ttilde, s_matrix};
use ellfree::opecalc::Bench;
use ellfree::{QParams, Scalar};

fn main() {
    let n = 3;
    let b = Bench::new(&QParams::defaults(n), 30, 7, 24);
    for k in 1..=n {
        let t = build_ttilde(k, n).unwrap();
        let names: Vec<&str> = t.terms.iter().map(|x| x.desc.name.as_str()).collect();
        println!("T_{k} = {}", names.join(" + "));
    }

    let x = Scalar::from_f64_pair(b.pp.prec, 0.8, 0.3);
    for (i, j) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let s = s_matrix(&b.qs, i, j, &x).unwrap();
        println!("S_{i}{j}(0.8+0.3i) = {:.20}", s.value);
    }
    for k in 0..=n {
        println!("C_{k} = {:.20}", fusionwn::eval_cn(&b.qs, k).unwrap().value);
    }

    for rep in fusionwn::all_reports(&b) {
        println!("{}", rep.summary_line());
        for note in &rep.notes {
            println!("    {note}");
        }
    }
}
