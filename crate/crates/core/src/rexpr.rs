//! Exact coefficients that are Laurent polynomials in `r` and `r*` with
//! rational coefficients.
//!
//! `r` and `r*` are stored as independent symbols, so one rational function
//! can have several representations (`r - r*` and `1` at level one).
//! [`RExpr::is_zero_exact`] decides equality by exact evaluation at a fixed
//! set of rational points, which is sound for the low degrees that occur.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::lin::{Lin, Q};
use crate::params::QParams;
use crate::scalar::{powi_real, Real};

/// `sum c_{a,b} r^a r*^b`
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RExpr(BTreeMap<(i32, i32), Q>);

impl RExpr {
    pub fn zero() -> Self {
        RExpr(BTreeMap::new())
    }

    pub fn constant(c: Q) -> Self {
        RExpr::mono(c, 0, 0)
    }

    pub fn int(c: i64) -> Self {
        RExpr::constant(Q::from_integer(c))
    }

    pub fn rat(n: i64, d: i64) -> Self {
        RExpr::constant(Q::new(n, d))
    }

    /// `c r^a r*^b`
    pub fn mono(c: Q, a: i32, b: i32) -> Self {
        let mut m = BTreeMap::new();
        if !c.is_zero() {
            m.insert((a, b), c);
        }
        RExpr(m)
    }

    pub fn r() -> Self {
        RExpr::mono(Q::one(), 1, 0)
    }

    pub fn rs() -> Self {
        RExpr::mono(Q::one(), 0, 1)
    }

    pub fn inv_r() -> Self {
        RExpr::mono(Q::one(), -1, 0)
    }

    pub fn inv_rs() -> Self {
        RExpr::mono(Q::one(), 0, -1)
    }

    /// `k + a r` as an expression.
    pub fn from_lin(l: Lin) -> Self {
        RExpr::constant(l.k) + RExpr::mono(l.a, 1, 0)
    }

    /// Syntactically zero (no terms).
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i32, i32), &Q)> {
        self.0.iter()
    }

    pub fn scale(&self, s: Q) -> Self {
        if s.is_zero() {
            return RExpr::zero();
        }
        RExpr(self.0.iter().map(|(k, v)| (*k, *v * s)).collect())
    }

    /// The constant term when the expression is a pure rational, else `None`.
    pub fn as_rational(&self) -> Option<Q> {
        match self.0.len() {
            0 => Some(Q::zero()),
            1 => self.0.get(&(0, 0)).copied(),
            _ => None,
        }
    }

    pub fn value(&self, pp: &QParams) -> Real {
        let mut acc = Real::new(pp.prec);
        for (&(a, b), c) in &self.0 {
            let mut t = Real::with_val(pp.prec, *c.numer()) / *c.denom();
            t *= powi_real(&pp.r, a);
            t *= powi_real(&pp.rs, b);
            acc += t;
        }
        acc
    }

    pub fn value_f64(&self, r: f64) -> f64 {
        self.0
            .iter()
            .map(|(&(a, b), c)| *c.numer() as f64 / *c.denom() as f64 * r.powi(a) * (r - 1.0).powi(b))
            .sum()
    }

    /// Exact value at a rational `r` (with `r* = r - 1`).
    pub fn exact_at(&self, r: &rug::Rational) -> rug::Rational {
        let rs = rug::Rational::from(r - 1u32);
        let mut acc = rug::Rational::new();
        for (&(a, b), c) in &self.0 {
            let mut t = rug::Rational::from((*c.numer(), *c.denom()));
            t *= rpow_rat(r, a);
            t *= rpow_rat(&rs, b);
            acc += t;
        }
        acc
    }

    /// Zero as a function of `r` at level one.
    pub fn is_zero_exact(&self) -> bool {
        if self.0.is_empty() {
            return true;
        }
        EQ_POINTS.iter().all(|&(n, d)| self.exact_at(&rug::Rational::from((n, d))) == 0)
    }

    pub fn eq_exact(&self, other: &RExpr) -> bool {
        (self.clone() - other.clone()).is_zero_exact()
    }
}

/// Sample points for exact equality; well away from the poles `r = 0, 1`.
const EQ_POINTS: [(i64, i64); 9] =
    [(37, 7), (101, 13), (9973, 1009), (-53, 11), (17, 3), (1234, 5), (7, 19), (-3, 2), (61, 41)];

fn rpow_rat(x: &rug::Rational, e: i32) -> rug::Rational {
    let mut out = rug::Rational::from(1);
    for _ in 0..e.unsigned_abs() {
        out *= x;
    }
    if e < 0 {
        out.recip_mut();
    }
    out
}

impl Add for RExpr {
    type Output = RExpr;
    fn add(mut self, o: RExpr) -> RExpr {
        for (k, v) in o.0 {
            let e = self.0.entry(k).or_insert_with(Q::zero);
            *e += v;
            if e.is_zero() {
                self.0.remove(&k);
            }
        }
        self
    }
}

impl Add for &RExpr {
    type Output = RExpr;
    fn add(self, o: &RExpr) -> RExpr {
        self.clone() + o.clone()
    }
}

impl Sub for RExpr {
    type Output = RExpr;
    fn sub(self, o: RExpr) -> RExpr {
        self + (-o)
    }
}

impl Sub for &RExpr {
    type Output = RExpr;
    fn sub(self, o: &RExpr) -> RExpr {
        self.clone() - o.clone()
    }
}

impl Neg for RExpr {
    type Output = RExpr;
    fn neg(self) -> RExpr {
        RExpr(self.0.into_iter().map(|(k, v)| (k, -v)).collect())
    }
}

impl Mul for &RExpr {
    type Output = RExpr;
    fn mul(self, o: &RExpr) -> RExpr {
        let mut out = RExpr::zero();
        for (&(a1, b1), c1) in &self.0 {
            for (&(a2, b2), c2) in &o.0 {
                out = out + RExpr::mono(*c1 * *c2, a1 + a2, b1 + b2);
            }
        }
        out
    }
}

impl Mul for RExpr {
    type Output = RExpr;
    fn mul(self, o: RExpr) -> RExpr {
        &self * &o
    }
}

impl fmt::Display for RExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&(a, b), c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            if a != 0 {
                write!(f, "*r^{a}")?;
            }
            if b != 0 {
                write!(f, "*r*^{b}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lin::q;

    #[test]
    fn r_minus_rs_is_one() {
        let e = RExpr::r() - RExpr::rs() - RExpr::int(1);
        assert!(!e.is_empty());
        assert!(e.is_zero_exact());
    }

    #[test]
    fn partial_fractions_agree() {
        // 1/(r r*) = 1/r* - 1/r
        let lhs = &RExpr::inv_r() * &RExpr::inv_rs();
        let rhs = RExpr::inv_rs() - RExpr::inv_r();
        assert!(lhs.eq_exact(&rhs));
        assert!(!lhs.eq_exact(&RExpr::inv_rs()));
    }

    #[test]
    fn numeric_value() {
        let pp = QParams::defaults(2);
        let e = RExpr::mono(q(3, 2), 1, -1);
        let want = 1.5 * 6.3 / 5.3;
        assert!((e.value(&pp).to_f64() - want).abs() < 1e-14);
        assert!((e.value_f64(6.3) - want).abs() < 1e-14);
    }
}
