//! Truncated Laurent series in one named variable with a fractional prefactor
//! `x^lead`.

use thiserror::Error;

use crate::scalar::{Real, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("series variables differ: `{0}` vs `{1}`")]
    VarMismatch(String, String),
    #[error("cannot add series with different lead exponents")]
    LeadMismatch,
    #[error("exp requires a zero lead exponent")]
    FractionalLead,
    #[error("log requires a nonzero constant term")]
    VanishingConstant,
}

/// `x^lead * sum_{k=0}^{order} coeffs[k] x^k`
#[derive(Clone, Debug)]
pub struct TruncSeries {
    coeffs: Vec<Scalar>,
    lead: Real,
    var: String,
}

impl TruncSeries {
    pub fn new(var: &str, coeffs: Vec<Scalar>, lead: Real) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least the constant term");
        TruncSeries { coeffs, lead, var: var.to_string() }
    }

    pub fn zero(var: &str, order: usize, prec: u32) -> Self {
        TruncSeries::new(var, vec![Scalar::zero(prec); order + 1], Real::new(prec))
    }

    pub fn one(var: &str, order: usize, prec: u32) -> Self {
        let mut s = TruncSeries::zero(var, order, prec);
        s.coeffs[0] = Scalar::one(prec);
        s
    }

    pub fn from_coeffs(var: &str, coeffs: Vec<Scalar>) -> Self {
        let prec = coeffs.first().map(|c| c.prec()).unwrap_or(crate::scalar::DEFAULT_PREC);
        TruncSeries::new(var, coeffs, Real::new(prec))
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn lead(&self) -> &Real {
        &self.lead
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &Scalar {
        &self.coeffs[k]
    }

    fn prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).max().unwrap_or(crate::scalar::DEFAULT_PREC)
    }

    fn check_var(&self, other: &TruncSeries) -> Result<(), SeriesError> {
        if self.var != other.var {
            return Err(SeriesError::VarMismatch(self.var.clone(), other.var.clone()));
        }
        Ok(())
    }

    pub fn truncate(&self, order: usize) -> TruncSeries {
        let n = order.min(self.order());
        TruncSeries::new(&self.var, self.coeffs[..=n].to_vec(), self.lead.clone())
    }

    pub fn add(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check_var(other)?;
        if self.lead != other.lead {
            return Err(SeriesError::LeadMismatch);
        }
        let n = self.order().min(other.order());
        let coeffs = (0..=n).map(|k| &self.coeffs[k] + &other.coeffs[k]).collect();
        Ok(TruncSeries::new(&self.var, coeffs, self.lead.clone()))
    }

    pub fn sub(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.add(&other.scale(&Scalar::from_f64(other.prec(), -1.0)))
    }

    pub fn scale(&self, k: &Scalar) -> TruncSeries {
        let coeffs = self.coeffs.iter().map(|c| c * k).collect();
        TruncSeries::new(&self.var, coeffs, self.lead.clone())
    }

    /// Cauchy product truncated at the smaller order.
    pub fn mul(&self, other: &TruncSeries) -> Result<TruncSeries, SeriesError> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        let prec = self.prec().max(other.prec());
        let mut out = vec![Scalar::zero(prec); n + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(n + 1 - i) {
                out[i + j] += &(a * b);
            }
        }
        let lead = Real::with_val(prec, &self.lead + &other.lead);
        Ok(TruncSeries::new(&self.var, out, lead))
    }

    /// `exp(a)` through the recursion `k b_k = sum_j j a_j b_{k-j}`.
    pub fn exp(&self) -> Result<TruncSeries, SeriesError> {
        if !self.lead.is_zero() {
            return Err(SeriesError::FractionalLead);
        }
        let n = self.order();
        let prec = self.prec();
        let mut b = Vec::with_capacity(n + 1);
        b.push(self.coeffs[0].exp());
        for k in 1..=n {
            let mut acc = Scalar::zero(prec);
            for j in 1..=k {
                if self.coeffs[j].is_zero() {
                    continue;
                }
                acc += &(self.coeffs[j].mul_i64(j as i64) * &b[k - j]);
            }
            b.push(acc.div_i64(k as i64));
        }
        Ok(TruncSeries::new(&self.var, b, self.lead.clone()))
    }

    /// Principal logarithm; the constant term must not vanish.
    pub fn log(&self) -> Result<TruncSeries, SeriesError> {
        if !self.lead.is_zero() {
            return Err(SeriesError::FractionalLead);
        }
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::VanishingConstant);
        }
        let n = self.order();
        let prec = self.prec();
        let mut c: Vec<Scalar> = Vec::with_capacity(n + 1);
        c.push(a0.ln());
        for k in 1..=n {
            let mut acc = Scalar::zero(prec);
            for j in 1..k {
                acc += &(c[j].mul_i64(j as i64) * &self.coeffs[k - j]);
            }
            let ck = (&self.coeffs[k] - acc.div_i64(k as i64)) / a0;
            c.push(ck);
        }
        Ok(TruncSeries::new(&self.var, c, self.lead.clone()))
    }

    /// Largest coefficient-wise distance to `other` over the common order.
    pub fn max_coeff_dist(&self, other: &TruncSeries) -> Result<f64, SeriesError> {
        self.check_var(other)?;
        let n = self.order().min(other.order());
        Ok((0..=n)
            .map(|k| (&self.coeffs[k] - &other.coeffs[k]).abs_f64())
            .fold(0.0, f64::max))
    }

    /// Evaluate the polynomial part at `x` (the `x^lead` prefactor is left out).
    pub fn eval_poly(&self, x: &Scalar) -> Scalar {
        let mut acc = Scalar::zero(self.prec());
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(cs: &[f64]) -> TruncSeries {
        TruncSeries::from_coeffs("x", cs.iter().map(|&c| Scalar::from_f64(128, c)).collect())
    }

    #[test]
    fn one_plus_x_times_one_minus_x() {
        let p = s(&[1.0, 1.0, 0.0, 0.0]).mul(&s(&[1.0, -1.0, 0.0, 0.0])).unwrap();
        let want = s(&[1.0, 0.0, -1.0, 0.0]);
        assert!(p.max_coeff_dist(&want).unwrap() < 1e-38);
    }

    #[test]
    fn var_mismatch_is_an_error() {
        let a = s(&[1.0, 2.0]);
        let b = TruncSeries::from_coeffs("y", vec![Scalar::one(128), Scalar::one(128)]);
        assert!(matches!(a.mul(&b), Err(SeriesError::VarMismatch(_, _))));
    }

    #[test]
    fn log_of_one_minus_x() {
        let l = s(&[1.0, -1.0, 0.0, 0.0, 0.0, 0.0]).log().unwrap();
        for k in 1..=5 {
            let want = -1.0 / k as f64;
            assert!((l.coeff(k).re().to_f64() - want).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_of_zero_lead_only() {
        let mut a = s(&[0.0, 1.0]);
        a.lead = Real::with_val(128, 0.5);
        assert_eq!(a.exp().unwrap_err(), SeriesError::FractionalLead);
        assert_eq!(s(&[0.0, 1.0]).log().unwrap_err(), SeriesError::VanishingConstant);
    }
}
