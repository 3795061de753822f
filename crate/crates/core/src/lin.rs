//! Exact exponents of the form `k + a r` with rational `k`, `a`.
//!
//! Every q-power that appears in the free-field currents (shifts like
//! `q^{N-j}`, `q^{r-1/2}`, `p* = q^{2r-2}`) is an exact linear form in `r` once
//! the level is fixed to one. Keeping them exact lets zero/pole bookkeeping be
//! decided symbolically for generic `r`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::params::QParams;
use crate::scalar::Real;

pub type Q = Rational64;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(n)
}

/// `k + a r`
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lin {
    pub k: Q,
    pub a: Q,
}

impl Lin {
    pub const ZERO: Lin = Lin { k: Q::new_raw(0, 1), a: Q::new_raw(0, 1) };

    pub fn new(k: Q, a: Q) -> Self {
        Lin { k, a }
    }

    pub fn int(k: i64) -> Self {
        Lin { k: qi(k), a: qi(0) }
    }

    pub fn rat(n: i64, d: i64) -> Self {
        Lin { k: q(n, d), a: qi(0) }
    }

    /// `r`
    pub fn r() -> Self {
        Lin { k: qi(0), a: qi(1) }
    }

    /// `r* = r - 1` (level one)
    pub fn rs() -> Self {
        Lin { k: qi(-1), a: qi(1) }
    }

    pub fn is_zero(&self) -> bool {
        self.k.is_zero() && self.a.is_zero()
    }

    pub fn scale(&self, s: Q) -> Self {
        Lin { k: self.k * s, a: self.a * s }
    }

    pub fn value(&self, pp: &QParams) -> Real {
        let k = Real::with_val(pp.prec, *self.k.numer()) / *self.k.denom();
        let a = Real::with_val(pp.prec, *self.a.numer()) / *self.a.denom();
        k + a * &pp.r
    }

    pub fn value_f64(&self, r: f64) -> f64 {
        let k = *self.k.numer() as f64 / *self.k.denom() as f64;
        let a = *self.a.numer() as f64 / *self.a.denom() as f64;
        k + a * r
    }

    /// Sign of the numerical value at the given parameters.
    pub fn sign(&self, pp: &QParams) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let v = self.value(pp);
        if v.is_zero() {
            0
        } else if v.is_sign_negative() {
            -1
        } else {
            1
        }
    }

    /// `q^{self}` at working precision.
    pub fn qpow(&self, pp: &QParams) -> Real {
        pp.qpow(&self.value(pp))
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(self, o: Lin) -> Lin {
        Lin { k: self.k + o.k, a: self.a + o.a }
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(self, o: Lin) -> Lin {
        Lin { k: self.k - o.k, a: self.a - o.a }
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        Lin { k: -self.k, a: -self.a }
    }
}

impl Mul<Q> for Lin {
    type Output = Lin;
    fn mul(self, s: Q) -> Lin {
        self.scale(s)
    }
}

impl fmt::Display for Lin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.k.is_zero(), self.a.is_zero()) {
            (true, true) => write!(f, "0"),
            (false, true) => write!(f, "{}", self.k),
            (true, false) => write!(f, "{}r", self.a),
            (false, false) => {
                let sign = if self.a.is_negative() { '-' } else { '+' };
                write!(f, "{}{}{}r", self.k, sign, self.a.abs())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rs_is_r_minus_one() {
        let pp = QParams::defaults(2);
        let d = Lin::rs().value(&pp) - &pp.rs;
        assert!(d.is_zero());
        assert_eq!((Lin::r() - Lin::int(1)), Lin::rs());
        assert_eq!(format!("{}", Lin::rs()), "-1+1r");
    }
}
