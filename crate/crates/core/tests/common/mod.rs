//! Oracles shared by the integration tests. They deliberately avoid the
//! library's own product and solve routines.
#![allow(dead_code)]

use ellfree::modealg::ModeAlgebra;
use ellfree::scalar::{parse_scalar, Real};
use ellfree::{QParams, Scalar};
use rug::ops::Pow;
use rug::Float;

pub const ORACLE_PREC: u32 = 256;

pub fn c(s: &str) -> Scalar {
    parse_scalar(128, s).expect("literal")
}

/// Relative distance of `got` from the decimal literal `want`.
pub fn rel_to(got: &Scalar, want: &str) -> f64 {
    got.rel_dist(&c(want), 1e-300)
}

/// Solve the defining system of `B_m^j` by Gaussian elimination with partial
/// pivoting at 256 bits: `N - 1` difference equations plus the constraint,
/// one right-hand side per `b_{i,m}`. Returns `M[j][i]`.
pub fn elimination_solve(pp: &QParams, m: i64) -> Vec<Vec<Float>> {
    let n = pp.n;
    let prec = ORACLE_PREC;
    let q = Float::with_val(prec, Float::parse(pp.record().q.as_str()).unwrap());
    let qpow = |e: i64| Float::with_val(prec, q.clone().pow(e as i32));
    let qnum = |k: i64| (qpow(k) - qpow(-k)) / (q.clone() - q.clone().recip());
    let mut a = vec![vec![Float::new(prec); n]; n];
    let mut rhs = vec![vec![Float::new(prec); n - 1]; n];
    for j in 0..n - 1 {
        a[j][j] = Float::with_val(prec, -1);
        a[j][j + 1] = Float::with_val(prec, 1);
        rhs[j][j] = Float::with_val(prec, m) / qnum(m) * qpow((n as i64 - 1 - j as i64) * m);
    }
    for j in 0..n {
        a[n - 1][j] = qpow(2 * (j as i64 + 1) * m);
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|x, y| a[*x][col].clone().abs().partial_cmp(&a[*y][col].clone().abs()).unwrap())
            .unwrap();
        a.swap(col, piv);
        rhs.swap(col, piv);
        for row in 0..n {
            if row == col {
                continue;
            }
            let f = Float::with_val(prec, &a[row][col] / &a[col][col]);
            for k in 0..n {
                let t = Float::with_val(prec, &f * &a[col][k]);
                a[row][k] -= t;
            }
            for k in 0..n - 1 {
                let t = Float::with_val(prec, &f * &rhs[col][k]);
                rhs[row][k] -= t;
            }
        }
    }
    (0..n).map(|j| (0..n - 1).map(|i| Float::with_val(prec, &rhs[j][i] / &a[j][j])).collect()).collect()
}

/// Largest entrywise relative difference between the library solve and the
/// elimination oracle, each entry relative to the oracle value.
pub fn solve_vs_elimination(ma: &ModeAlgebra, m: i64) -> f64 {
    let lib = ma.solve_b_from_b(m).unwrap();
    let ora = elimination_solve(&ma.pp, m);
    let n = ma.pp.n;
    let mut worst = 0.0f64;
    for i in 0..n - 1 {
        for j in 0..n {
            let d = Float::with_val(ORACLE_PREC, &ora[j][i] - &lib[j][i]).abs().to_f64();
            let s = ora[j][i].clone().abs().to_f64().max(1e-300);
            worst = worst.max(d / s);
        }
    }
    worst
}

pub fn real_of(x: &Real) -> f64 {
    x.to_f64()
}
