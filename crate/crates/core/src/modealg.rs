//! The Heisenberg sector: commutators of the `B_m^j` and their relation to
//! the difference modes `b_{j,m}`.

use thiserror::Error;

use crate::lin::{qi, Lin};
use crate::modefn::{qnum_real, ModeFn, Term};
use crate::params::QParams;
use crate::report::RelationReport;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("oscillator index {j} outside 1..={n}")]
    IndexOutOfRange { j: usize, n: usize },
    #[error("mode number must be nonzero")]
    ZeroMode,
    #[error("defining system for B_m is singular at m = {0}")]
    Singular(i64),
}

#[derive(Clone, Debug)]
pub struct ModeAlgebra {
    pub pp: QParams,
}

impl ModeAlgebra {
    pub fn new(pp: &QParams) -> Self {
        ModeAlgebra { pp: pp.clone() }
    }

    fn check(&self, j: usize) -> Result<(), ModeError> {
        if j == 0 || j > self.pp.n {
            return Err(ModeError::IndexOutOfRange { j, n: self.pp.n });
        }
        Ok(())
    }

    fn qn(&self, x: f64) -> Real {
        qnum_real(&self.pp, &self.pp.real(x))
    }

    /// `[B_m^j, B_{m'}^k]` evaluated directly.
    pub fn b_commutator(&self, j: usize, k: usize, m: i64, m2: i64) -> Result<Real, ModeError> {
        self.check(j)?;
        self.check(k)?;
        if m == 0 || m2 == 0 {
            return Err(ModeError::ZeroMode);
        }
        let pp = &self.pp;
        if m + m2 != 0 {
            return Ok(Real::new(pp.prec));
        }
        let n = pp.n as f64;
        let mf = m as f64;
        let rsm = qnum_real(pp, &Real::with_val(pp.prec, &pp.rs * m));
        let rm = qnum_real(pp, &Real::with_val(pp.prec, &pp.r * m));
        let pre = Real::with_val(pp.prec, mf) * rsm * self.qn(pp.c as f64 * mf) / (rm * self.qn(mf) * self.qn(n * mf));
        let tail = if j == k {
            self.qn((n - 1.0) * mf)
        } else {
            let s = if j > k { 1.0 } else { -1.0 };
            -(pp.qpow_f64(-mf * n * s) * self.qn(mf))
        };
        Ok(pre * tail)
    }

    /// `[B_m^j, B_{-m}^k]` as a closed-form function of `m` (level one).
    pub fn commutator_template(&self, j: usize, k: usize) -> Result<ModeFn, ModeError> {
        self.check(j)?;
        self.check(k)?;
        let n = self.pp.n as i64;
        let base = Term::one()
            .with_mpow(1)
            .with_qnum(Lin::rs(), 1)
            .with_qnum(Lin::r(), -1)
            .with_qnum(Lin::int(n), -1);
        let t = if j == k {
            base.with_qnum(Lin::int(n - 1), 1)
        } else {
            let s = if j > k { 1 } else { -1 };
            Term { coef: -base.coef, ..base }.with_qexp(Lin::int(-n * s)).with_qnum(Lin::int(1), 1)
        };
        Ok(ModeFn::term(t))
    }

    /// Matrix `M` with `B_m^j = sum_i M[j-1][i-1] b_{i,m}`: the difference
    /// equations fix `B^j` up to a common shift, which the constraint removes.
    pub fn solve_b_from_b(&self, m: i64) -> Result<Vec<Vec<Real>>, ModeError> {
        if m == 0 {
            return Err(ModeError::ZeroMode);
        }
        let pp = &self.pp;
        let n = pp.n;
        let mf = m as f64;
        let w: Vec<Real> = (1..=n).map(|j| pp.qpow_f64(2.0 * j as f64 * mf)).collect();
        let mut s = Real::new(pp.prec);
        for x in &w {
            s += x;
        }
        let scale: Real = w.iter().map(|x| Real::with_val(pp.prec, x.abs_ref())).fold(Real::new(pp.prec), |a, b| a + b);
        if Real::with_val(pp.prec, s.abs_ref()) < scale * 1e-30 {
            return Err(ModeError::Singular(m));
        }
        // d_i = (m/[m]) q^{(N-i)m} b_i
        let dcoef: Vec<Real> =
            (1..n).map(|i| Real::with_val(pp.prec, mf) / self.qn(mf) * pp.qpow_f64((n - i) as f64 * mf)).collect();
        // B^j = sum_k w_k (D_j - D_k) / S with D_j = sum_{i<j} d_i, so the b_i
        // coefficient is d_i sum_{k<=i} w_k / S for i < j and -d_i sum_{k>i} w_k / S
        // otherwise. Both sums are positive, so nothing cancels.
        let mut head = Vec::with_capacity(n - 1);
        let mut acc = Real::new(pp.prec);
        for x in &w[..n - 1] {
            acc += x;
            head.push(acc.clone());
        }
        let tail: Vec<Real> = (1..n)
            .map(|i| w[i..].iter().fold(Real::new(pp.prec), |a, b| a + b))
            .collect();
        let mut out = Vec::with_capacity(n);
        for j in 1..=n {
            let row = (1..n)
                .map(|i| {
                    let part = if i < j { &head[i - 1] } else { &tail[i - 1] };
                    let v = Real::with_val(pp.prec, &dcoef[i - 1] * part) / &s;
                    if i < j {
                        v
                    } else {
                        -v
                    }
                })
                .collect();
            out.push(row);
        }
        Ok(out)
    }

    /// Relative size of `sum_j q^{2jm} [B_m^j, B_{-m}^k]`, maximized over `k`.
    pub fn constraint_residual(&self, m: i64) -> Result<f64, ModeError> {
        let pp = &self.pp;
        let mut worst = 0.0f64;
        for k in 1..=pp.n {
            let mut acc = Real::new(pp.prec);
            let mut size = Real::new(pp.prec);
            for j in 1..=pp.n {
                let t = pp.qpow_f64(2.0 * j as f64 * m as f64) * self.b_commutator(j, k, m, -m)?;
                size += Real::with_val(pp.prec, t.abs_ref());
                acc += t;
            }
            worst = worst.max((acc.abs() / size).to_f64());
        }
        Ok(worst)
    }

    /// Constraint consistency of the commutator for every `k` and each listed mode.
    pub fn consistency_check(&self, ms: &[i64], threshold: f64) -> RelationReport {
        let mut rep = RelationReport::new("modes.consistency", "sum_j q^{2jm}[B^j_m,B^k_-m]=0", self.pp.record(), 0, threshold);
        for &m in ms {
            match self.constraint_residual(m) {
                Ok(r) => rep.push(r),
                Err(e) => return rep.fail(e.to_string()),
            }
        }
        rep.note("residual is |sum| / sum of |terms|");
        rep.finish()
    }

    /// Residual of the defining system after `solve_b_from_b`: each difference
    /// equation and the constraint, relative to the size of their terms.
    pub fn solve_residual(&self, m: i64) -> Result<f64, ModeError> {
        let pp = &self.pp;
        let n = pp.n;
        let sol = self.solve_b_from_b(m)?;
        let mf = m as f64;
        let mut worst = 0.0f64;
        for j in 1..n {
            let rhs = Real::with_val(pp.prec, mf) / self.qn(mf) * pp.qpow_f64((n - j) as f64 * mf);
            for i in 1..n {
                let want = if i == j { rhs.clone() } else { Real::new(pp.prec) };
                let got = Real::with_val(pp.prec, &sol[j][i - 1] - &sol[j - 1][i - 1]);
                let size = rhs.clone().abs().max(&sol[j][i - 1].clone().abs()).max(&sol[j - 1][i - 1].clone().abs());
                worst = worst.max((got - want).abs().to_f64() / size.to_f64());
            }
        }
        for i in 1..n {
            let mut acc = Real::new(pp.prec);
            let mut size = Real::new(pp.prec);
            for j in 1..=n {
                let t = pp.qpow_f64(2.0 * j as f64 * mf) * &sol[j - 1][i - 1];
                size += Real::with_val(pp.prec, t.abs_ref());
                acc += t;
            }
            if !size.is_zero() {
                worst = worst.max((acc.abs() / size).to_f64());
            }
        }
        Ok(worst)
    }

    /// The defining system is satisfied by `solve_b_from_b` at each listed mode.
    pub fn solve_check(&self, ms: &[i64], threshold: f64) -> RelationReport {
        let mut rep = RelationReport::new(
            "modes.solve",
            "-B^j_m + B^(j+1)_m = m/[m] q^((N-j)m) b_(j,m), sum_j q^(2jm) B^j_m = 0",
            self.pp.record(),
            0,
            threshold,
        );
        for &m in ms {
            match self.solve_residual(m) {
                Ok(r) => rep.push(r),
                Err(e) => return rep.fail(e.to_string()),
            }
        }
        rep.finish()
    }

    /// Antisymmetry of the printed commutator over every `(j, k)` and listed mode.
    pub fn antisymmetry_check(&self, ms: &[i64], threshold: f64) -> RelationReport {
        let mut rep =
            RelationReport::new("modes.antisym", "[B^j_m, B^k_-m] = -[B^k_-m, B^j_m]", self.pp.record(), 0, threshold);
        for &m in ms {
            for j in 1..=self.pp.n {
                for k in 1..=self.pp.n {
                    match self.antisymmetry_residual(j, k, m) {
                        Ok(r) => rep.push(r),
                        Err(e) => return rep.fail(e.to_string()),
                    }
                }
            }
        }
        rep.finish()
    }

    /// `|[B_m^j, B_{-m}^k] + [B_{-m}^k, B_m^j]|` relative to the first value.
    pub fn antisymmetry_residual(&self, j: usize, k: usize, m: i64) -> Result<f64, ModeError> {
        let a = self.b_commutator(j, k, m, -m)?;
        let b = self.b_commutator(k, j, -m, m)?;
        let size = Real::with_val(self.pp.prec, a.abs_ref()).to_f64().max(f64::MIN_POSITIVE);
        Ok((a + b).abs().to_f64() / size)
    }
}

/// Modes `0 < |m| <= max_m`.
pub fn mode_range(max_m: i64) -> Vec<i64> {
    (-max_m..=max_m).filter(|&m| m != 0).collect()
}

/// Consistency, solve and antisymmetry suites for `0 < |m| <= max_m`.
pub fn all_reports(ma: &ModeAlgebra, max_m: i64) -> Vec<RelationReport> {
    let ms = mode_range(max_m);
    vec![ma.consistency_check(&ms, 1e-25), ma.solve_check(&ms, 1e-25), ma.antisymmetry_check(&ms, 1e-25)]
}

/// Level-one shorthand used by descriptor builders: `[r m]/(m [r* m])`.
pub fn r_over_rs_template() -> Term {
    Term::new(qi(1)).with_mpow(-1).with_qnum(Lin::r(), 1).with_qnum(Lin::rs(), -1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn off_diagonal_modes_commute() {
        let ma = ModeAlgebra::new(&QParams::defaults(3));
        assert!(ma.b_commutator(1, 2, 2, -1).unwrap().is_zero());
        assert_eq!(ma.b_commutator(0, 1, 1, -1).unwrap_err(), ModeError::IndexOutOfRange { j: 0, n: 3 });
    }

    #[test]
    fn template_matches_numeric() {
        let pp = QParams::defaults(3);
        let ma = ModeAlgebra::new(&pp);
        for (j, k) in [(1, 1), (1, 3), (3, 2)] {
            let t = ma.commutator_template(j, k).unwrap();
            for m in [-3i64, -1, 1, 4] {
                let a = t.eval(m, &pp);
                let b = ma.b_commutator(j, k, m, -m).unwrap();
                let rel = (Real::with_val(128, &a - &b) / &b).abs().to_f64();
                assert!(rel < 1e-30, "{j} {k} {m}: {rel}");
            }
        }
    }
}
