//! Oscillator commutators `[B_m^j, B_{-m}^k]`, the solve from the difference
//! modes `b_{j,m}` and the constraint consistency of the commutator table.
//!
//!     cargo run --release --example mode_algebra

use ellfree::modealg::{self, ModeAlgebra};
use ellfree::QParams;

fn main() {
    for n in [2usize, 3, 4] {
        let ma = ModeAlgebra::new(&QParams::defaults(n));
        println!("N = {n}");
        for (j, k) in [(1, 1), (1, 2), (2, 1)] {
            let c = ma.b_commutator(j, k, 1, -1).unwrap();
            println!("  [B_1^{j}, B_-1^{k}] = {:.20e}", c.to_f64());
        }
        let m = 2;
        let sol = ma.solve_b_from_b(m).unwrap();
        println!("  B_{m}^j in terms of b_(i,{m}):");
        for (j, row) in sol.iter().enumerate() {
            let cols: Vec<String> = row.iter().map(|x| format!("{:+.6e}", x.to_f64())).collect();
            println!("    B^{} = [{}]", j + 1, cols.join(", "));
        }
        println!("  solve residual at m = {m}: {:.2e}", ma.solve_residual(m).unwrap());
        for rep in modealg::all_reports(&ma, 12) {
            println!("  {}", rep.summary_line());
        }
    }
}
