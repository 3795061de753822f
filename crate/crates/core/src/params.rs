//! The global parameter pack `(q, r, c, N)` and its derived nomes.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_real, rpow, Real, DEFAULT_PREC};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("field `{field}`: {msg}")]
    Invalid { field: &'static str, msg: String },
}

fn invalid(field: &'static str, msg: impl Into<String>) -> ParamError {
    ParamError::Invalid { field, msg: msg.into() }
}

/// Plain-text echo of a parameter pack, used in reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamRecord {
    pub n: usize,
    pub q: String,
    pub r: String,
    pub c: i64,
    pub prec: u32,
}

#[derive(Clone, Debug)]
pub struct QParams {
    pub n: usize,
    pub c: i64,
    pub prec: u32,
    q_text: String,
    r_text: String,
    pub q: Real,
    pub r: Real,
    /// `r* = r - c`
    pub rs: Real,
    /// `p = q^{2r}`
    pub p: Real,
    /// `p* = q^{2r*}`
    pub ps: Real,
    pub ln_q: Real,
}

impl QParams {
    /// Build from decimal strings so that e.g. `q = 0.4` is exact to the working precision.
    pub fn parse(q: &str, r: &str, n: usize, c: i64, prec: u32) -> Result<Self, ParamError> {
        if prec < 32 {
            return Err(invalid("prec", "precision below 32 bits"));
        }
        let qv = parse_real(prec, q).ok_or_else(|| invalid("q", format!("not a number: {q}")))?;
        let rv = parse_real(prec, r).ok_or_else(|| invalid("r", format!("not a number: {r}")))?;
        if !(qv > 0 && qv < 1) {
            return Err(invalid("q", "q must lie in (0, 1)"));
        }
        if n < 2 {
            return Err(invalid("N", "N must be at least 2"));
        }
        if c < 1 {
            return Err(invalid("c", "level must be positive"));
        }
        let rs = Real::with_val(prec, &rv - c);
        if !(rs > 0) {
            return Err(invalid("r", "r must exceed the level c"));
        }
        let ln_q = Real::with_val(prec, qv.ln_ref());
        let p = Real::with_val(prec, (Real::with_val(prec, &ln_q * &rv) * 2u32).exp_ref());
        let ps = Real::with_val(prec, (Real::with_val(prec, &ln_q * &rs) * 2u32).exp_ref());
        Ok(QParams {
            n,
            c,
            prec,
            q_text: q.trim().to_string(),
            r_text: r.trim().to_string(),
            q: qv,
            r: rv,
            rs,
            p,
            ps,
            ln_q,
        })
    }

    /// The default generic pack `q = 0.4, r = 6.3, c = 1` at 128 bits.
    pub fn defaults(n: usize) -> Self {
        QParams::parse("0.4", "6.3", n, 1, DEFAULT_PREC).expect("default parameters are valid")
    }

    pub fn with_n(&self, n: usize) -> Result<Self, ParamError> {
        QParams::parse(&self.q_text, &self.r_text, n, self.c, self.prec)
    }

    pub fn with_prec(&self, prec: u32) -> Result<Self, ParamError> {
        QParams::parse(&self.q_text, &self.r_text, self.n, self.c, prec)
    }

    pub fn record(&self) -> ParamRecord {
        ParamRecord {
            n: self.n,
            q: self.q_text.clone(),
            r: self.r_text.clone(),
            c: self.c,
            prec: self.prec,
        }
    }

    pub fn real(&self, x: f64) -> Real {
        Real::with_val(self.prec, x)
    }

    /// `q^e` for a real exponent.
    pub fn qpow(&self, e: &Real) -> Real {
        Real::with_val(self.prec, (Real::with_val(self.prec, &self.ln_q * e)).exp_ref())
    }

    pub fn qpow_f64(&self, e: f64) -> Real {
        self.qpow(&self.real(e))
    }

    /// `base^e` at working precision.
    pub fn pow(&self, base: &Real, e: &Real) -> Real {
        rpow(base, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pstar_is_p_times_q_to_minus_2c() {
        let pp = QParams::defaults(3);
        let want = Real::with_val(pp.prec, &pp.p * pp.qpow_f64(-2.0));
        let rel = Real::with_val(pp.prec, Real::with_val(pp.prec, &pp.ps - &want) / &pp.ps).to_f64().abs();
        assert!(rel < 1e-36, "{rel}");
        assert!(pp.p > 0 && pp.p < 1 && pp.ps > 0 && pp.ps < 1);
    }

    #[test]
    fn rejects_bad_fields() {
        let e = QParams::parse("1.2", "6.3", 3, 1, 128).unwrap_err();
        assert!(e.to_string().contains("`q`"));
        let e = QParams::parse("0.4", "0.5", 3, 1, 128).unwrap_err();
        assert!(e.to_string().contains("`r`"));
        let e = QParams::parse("0.4", "6.3", 1, 1, 128).unwrap_err();
        assert!(e.to_string().contains("`N`"));
    }
}
