//! Every current relation at rank 2 and 3: exchange relations, the EF
//! residues, the H decomposition and the vertex operators.
//!
//!     cargo run --release --example currents

use ellfree::currents;
use ellfree::opecalc::Bench;
use ellfree::QParams;

fn main() {
    for n in [2usize, 3] {
        let b = Bench::new(&QParams::defaults(n), 100, 7, 24);
        println!("N = {n}");
        for rep in currents::all_reports(&b) {
            println!("  {}", rep.summary_line());
            if !rep.pass || rep.suite.starts_with("cur.ef.11") || rep.suite.starts_with("cur.h.1") {
                for note in &rep.notes {
                    println!("      {note}");
                }
            }
        }
    }
}
