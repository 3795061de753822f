//! Closed-form functions of the mode number `m`.
//!
//! A [`Term`] is `coef * (q - 1/q)^qq * m^mpow * q^{alpha m} * prod [beta m]_q^e`
//! with exact `alpha`, `beta`. Oscillator coefficients of every current and
//! the `[B, B]` commutator are sums of such terms, which keeps contraction
//! templates exact until product recognition.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::lin::{Lin, Q};
use crate::params::QParams;
use crate::scalar::{powi_real, Real};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: Q,
    pub qq: i32,
    pub mpow: i32,
    pub alpha: Lin,
    pub qn: BTreeMap<Lin, i32>,
}

/// `[-x] = -[x]`: keep the representative with positive leading symbol.
fn canonical_key(b: Lin) -> (Lin, bool) {
    let neg = b.a.is_negative() || (b.a.is_zero() && b.k.is_negative());
    if neg {
        (-b, true)
    } else {
        (b, false)
    }
}

impl Term {
    pub fn new(coef: Q) -> Self {
        Term { coef, qq: 0, mpow: 0, alpha: Lin::ZERO, qn: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Term::new(Q::one())
    }

    pub fn with_qq(mut self, qq: i32) -> Self {
        self.qq += qq;
        self
    }

    pub fn with_mpow(mut self, k: i32) -> Self {
        self.mpow += k;
        self
    }

    /// Multiply by `q^{s m}`.
    pub fn with_qexp(mut self, s: Lin) -> Self {
        self.alpha = self.alpha + s;
        self
    }

    /// Multiply by `[beta m]_q^e`.
    pub fn with_qnum(mut self, beta: Lin, e: i32) -> Self {
        assert!(!beta.is_zero(), "[0]_q vanishes");
        let (key, flipped) = canonical_key(beta);
        if flipped && e % 2 != 0 {
            self.coef = -self.coef;
        }
        let slot = self.qn.entry(key).or_insert(0);
        *slot += e;
        if *slot == 0 {
            self.qn.remove(&key);
        }
        self
    }

    pub fn mul(&self, o: &Term) -> Term {
        let mut t = Term {
            coef: self.coef * o.coef,
            qq: self.qq + o.qq,
            mpow: self.mpow + o.mpow,
            alpha: self.alpha + o.alpha,
            qn: self.qn.clone(),
        };
        for (b, e) in &o.qn {
            t = t.with_qnum(*b, *e);
        }
        t
    }

    /// The same term as a function of `-m`.
    pub fn neg_m(&self) -> Term {
        let parity = self.mpow + self.qn.values().sum::<i32>();
        let coef = if parity.rem_euclid(2) == 1 { -self.coef } else { self.coef };
        Term { coef, qq: self.qq, mpow: self.mpow, alpha: -self.alpha, qn: self.qn.clone() }
    }

    pub fn eval(&self, m: i64, pp: &QParams) -> Real {
        let prec = pp.prec;
        let mut v = Real::with_val(prec, *self.coef.numer()) / *self.coef.denom();
        if self.qq != 0 {
            let d = Real::with_val(prec, &pp.q - pp.q.clone().recip());
            v *= powi_real(&d, self.qq);
        }
        if self.mpow != 0 {
            v *= powi_real(&Real::with_val(prec, m), self.mpow);
        }
        if !self.alpha.is_zero() {
            v *= pp.qpow(&(self.alpha.value(pp) * m));
        }
        for (b, e) in &self.qn {
            let x = b.value(pp) * m;
            let qn = qnum_real(pp, &x);
            v *= powi_real(&qn, *e);
        }
        v
    }
}

/// `[x]_q` for real `x`.
pub fn qnum_real(pp: &QParams, x: &Real) -> Real {
    let num = pp.qpow(x) - pp.qpow(&Real::with_val(pp.prec, -x));
    let den = Real::with_val(pp.prec, &pp.q - pp.q.clone().recip());
    num / den
}

/// A finite sum of [`Term`]s.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ModeFn {
    pub terms: Vec<Term>,
}

impl ModeFn {
    pub fn zero() -> Self {
        ModeFn { terms: Vec::new() }
    }

    pub fn term(t: Term) -> Self {
        ModeFn { terms: vec![t] }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.iter().all(|t| t.coef.is_zero())
    }

    pub fn add(&self, o: &ModeFn) -> ModeFn {
        let mut terms = self.terms.clone();
        terms.extend(o.terms.iter().cloned());
        ModeFn { terms }
    }

    pub fn mul(&self, o: &ModeFn) -> ModeFn {
        let mut terms = Vec::with_capacity(self.terms.len() * o.terms.len());
        for a in &self.terms {
            for b in &o.terms {
                terms.push(a.mul(b));
            }
        }
        ModeFn { terms }
    }

    pub fn scale(&self, s: Q) -> ModeFn {
        ModeFn { terms: self.terms.iter().map(|t| Term { coef: t.coef * s, ..t.clone() }).collect() }
    }

    pub fn neg_m(&self) -> ModeFn {
        ModeFn { terms: self.terms.iter().map(Term::neg_m).collect() }
    }

    /// Multiply every term by `q^{s m}`.
    pub fn qshift(&self, s: Lin) -> ModeFn {
        ModeFn { terms: self.terms.iter().map(|t| t.clone().with_qexp(s)).collect() }
    }

    pub fn eval(&self, m: i64, pp: &QParams) -> Real {
        let mut acc = Real::new(pp.prec);
        for t in &self.terms {
            acc += t.eval(m, pp);
        }
        acc
    }
}
