//! Zero modes `P, Q, eta, h` and the root-lattice exponentials, with central
//! commutators, symmetric BCH normal ordering and exchange factors.
//!
//! Every zero-mode factor of a current is `exp(sum_g c_g(z) g)` where the
//! coefficient `c_g(z) = lz log z + lq log q + c` is exact ([`Coef`]).
//! Reordering produces scalars collected in an [`ExpRecord`]: a polynomial in
//! `log z1`, `log z2`, `log q` and `pi i` with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::lin::{Lin, Q};
use crate::params::QParams;
use crate::rexpr::RExpr;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZeroModeError {
    #[error("generator index {idx} outside 1..={n}")]
    IndexOutOfRange { idx: usize, n: usize },
    #[error("eta coefficients of a factor must sum to zero")]
    EtaSum,
}

/// Generator kinds in canonical order: `P < Q < eta < lattice < h`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GenKind {
    P,
    Q,
    Eta,
    /// The `eps-bar_j` part of the lattice exponential `e^{alpha-hat}`.
    Lat,
    H,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub kind: GenKind,
    pub idx: usize,
}

impl Gen {
    pub fn new(kind: GenKind, idx: usize) -> Self {
        Gen { kind, idx }
    }
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = match self.kind {
            GenKind::P => "P",
            GenKind::Q => "Q",
            GenKind::Eta => "eta",
            GenKind::Lat => "lat",
            GenKind::H => "h",
        };
        write!(f, "{k}{}", self.idx)
    }
}

/// `lz log z + lq log q + c`
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coef {
    pub lz: RExpr,
    pub lq: RExpr,
    pub c: RExpr,
}

impl Coef {
    pub fn new(lz: RExpr, lq: RExpr, c: RExpr) -> Self {
        Coef { lz, lq, c }
    }

    pub fn constant(c: RExpr) -> Self {
        Coef { c, ..Default::default() }
    }

    pub fn int(c: i64) -> Self {
        Coef::constant(RExpr::int(c))
    }

    pub fn rat(c: Q) -> Self {
        Coef::constant(RExpr::constant(c))
    }

    pub fn lz(lz: RExpr) -> Self {
        Coef { lz, ..Default::default() }
    }

    pub fn lq(lq: RExpr) -> Self {
        Coef { lq, ..Default::default() }
    }

    /// `e (log z + s log q)`: the exponent of `(q^s z)^e`.
    pub fn power_of_shifted_z(e: RExpr, s: Lin) -> Self {
        Coef { lq: &e * &RExpr::from_lin(s), lz: e, c: RExpr::zero() }
    }

    pub fn add(&self, o: &Coef) -> Coef {
        Coef { lz: &self.lz + &o.lz, lq: &self.lq + &o.lq, c: &self.c + &o.c }
    }

    pub fn neg(&self) -> Coef {
        self.scale(-Q::one())
    }

    pub fn scale(&self, s: Q) -> Coef {
        Coef { lz: self.lz.scale(s), lq: self.lq.scale(s), c: self.c.scale(s) }
    }

    /// Substitute `z -> q^s z`.
    pub fn shift(&self, s: Lin) -> Coef {
        Coef { lz: self.lz.clone(), lq: &self.lq + &(&self.lz * &RExpr::from_lin(s)), c: self.c.clone() }
    }

    pub fn is_zero_exact(&self) -> bool {
        self.lz.is_zero_exact() && self.lq.is_zero_exact() && self.c.is_zero_exact()
    }

    pub fn eq_exact(&self, o: &Coef) -> bool {
        self.lz.eq_exact(&o.lz) && self.lq.eq_exact(&o.lq) && self.c.eq_exact(&o.c)
    }

    /// As an exponent record in the variable slot `slot` (1 or 2).
    pub fn record(&self, slot: u8) -> ExpRecord {
        let mut r = ExpRecord::zero();
        r.add_term(Mono::z(slot), self.lz.clone());
        r.add_term(Mono::LQ, self.lq.clone());
        r.add_term(Mono::ONE, self.c.clone());
        r
    }

    pub fn eval(&self, lz: &Scalar, pp: &QParams) -> Scalar {
        lz.scale(&self.lz.value(pp)) + Scalar::from_real(&(self.lq.value(pp) * &pp.ln_q)) + Scalar::from_real(&self.c.value(pp))
    }
}

/// The central value `c + lq log q + pi pi i` of a generator commutator.
#[derive(Clone, Debug, PartialEq)]
pub struct Central {
    pub c: RExpr,
    pub lq: RExpr,
    pub pi: Q,
}

impl Central {
    pub fn zero() -> Self {
        Central { c: RExpr::zero(), lq: RExpr::zero(), pi: Q::zero() }
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_zero_exact() && self.lq.is_zero_exact() && self.pi.is_zero()
    }

    pub fn neg(&self) -> Central {
        Central { c: -self.c.clone(), lq: -self.lq.clone(), pi: -self.pi }
    }

    pub fn record(&self) -> ExpRecord {
        let mut r = ExpRecord::zero();
        r.add_term(Mono::ONE, self.c.clone());
        r.add_term(Mono::LQ, self.lq.clone());
        r.add_term(Mono::PI, RExpr::constant(self.pi));
        r
    }
}

fn sgn(x: i64) -> i64 {
    x.signum()
}

/// `[g1, g2]` for the generators of the zero-mode algebra of rank `n`.
///
/// The lattice cocycle is the antisymmetric choice
/// `[lat_j, lat_k] = pi i sgn(k - j)`, which gives
/// `e^{alpha_j} e^{alpha_k} = (-1)^{A_jk} e^{alpha_k} e^{alpha_j}` for simple roots.
pub fn commutator_scalar(g1: Gen, g2: Gen, n: usize) -> Central {
    use GenKind as K;
    let (j, k) = (g1.idx as i64, g2.idx as i64);
    let pair = Q::from_integer((j == k) as i64) - Q::new(1, n as i64);
    let mut out = Central::zero();
    match (g1.kind, g2.kind) {
        (K::P, K::Q) | (K::H, K::Lat) => out.c = RExpr::constant(pair),
        (K::Q, K::P) | (K::Lat, K::H) => out.c = RExpr::constant(-pair),
        (K::Q, K::Q) => out.lq = (RExpr::inv_r() - RExpr::inv_rs()).scale(Q::from_integer(sgn(j - k))),
        (K::Q, K::Eta) | (K::Eta, K::Eta) => out.lq = RExpr::inv_r().scale(Q::from_integer(sgn(j - k))),
        (K::Eta, K::Q) => out.lq = RExpr::inv_r().scale(Q::from_integer(sgn(j - k))),
        (K::Lat, K::Lat) => out.pi = Q::from_integer(sgn(k - j)),
        _ => {}
    }
    out
}

/// Monomial `log z1^a log z2^b log q^c (pi i)^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub z1: u8,
    pub z2: u8,
    pub lq: u8,
    pub pi: u8,
}

impl Mono {
    pub const ONE: Mono = Mono { z1: 0, z2: 0, lq: 0, pi: 0 };
    pub const LQ: Mono = Mono { z1: 0, z2: 0, lq: 1, pi: 0 };
    pub const PI: Mono = Mono { z1: 0, z2: 0, lq: 0, pi: 1 };

    pub fn z(slot: u8) -> Mono {
        if slot == 1 {
            Mono { z1: 1, ..Mono::ONE }
        } else {
            Mono { z2: 1, ..Mono::ONE }
        }
    }

    fn mul(self, o: Mono) -> Mono {
        Mono { z1: self.z1 + o.z1, z2: self.z2 + o.z2, lq: self.lq + o.lq, pi: self.pi + o.pi }
    }
}

/// Exact scalar exponent: `sum coef * monomial`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExpRecord(BTreeMap<Mono, RExpr>);

impl ExpRecord {
    pub fn zero() -> Self {
        ExpRecord(BTreeMap::new())
    }

    pub fn add_term(&mut self, m: Mono, c: RExpr) {
        if c.is_empty() {
            return;
        }
        let e = self.0.entry(m).or_default();
        *e = &*e + &c;
        if e.is_empty() {
            self.0.remove(&m);
        }
    }

    pub fn add(&self, o: &ExpRecord) -> ExpRecord {
        let mut out = self.clone();
        for (m, c) in &o.0 {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, o: &ExpRecord) -> ExpRecord {
        self.add(&o.scale(-Q::one()))
    }

    pub fn scale(&self, s: Q) -> ExpRecord {
        let mut out = ExpRecord::zero();
        for (m, c) in &self.0 {
            out.add_term(*m, c.scale(s));
        }
        out
    }

    pub fn mul(&self, o: &ExpRecord) -> ExpRecord {
        let mut out = ExpRecord::zero();
        for (m1, c1) in &self.0 {
            for (m2, c2) in &o.0 {
                out.add_term(m1.mul(*m2), c1 * c2);
            }
        }
        out
    }

    /// Substitute `log z_slot -> log z_slot + s log q` (degree at most one in each log z).
    pub fn shift(&self, slot: u8, s: Lin) -> ExpRecord {
        let mut out = ExpRecord::zero();
        let sr = RExpr::from_lin(s);
        for (m, c) in &self.0 {
            let deg = if slot == 1 { m.z1 } else { m.z2 };
            assert!(deg <= 1, "shift supports records linear in log z");
            if deg == 1 {
                let mut lower = *m;
                if slot == 1 {
                    lower.z1 = 0;
                } else {
                    lower.z2 = 0;
                }
                lower.lq += 1;
                out.add_term(lower, c * &sr);
            }
            out.add_term(*m, c.clone());
        }
        out
    }

    /// Rename slot 1 to slot 2 and vice versa.
    pub fn swap_slots(&self) -> ExpRecord {
        let mut out = ExpRecord::zero();
        for (m, c) in &self.0 {
            out.add_term(Mono { z1: m.z2, z2: m.z1, ..*m }, c.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Mono, &RExpr)> {
        self.0.iter().filter(|(_, c)| !c.is_zero_exact())
    }

    pub fn is_zero_exact(&self) -> bool {
        self.terms().next().is_none()
    }

    pub fn eq_exact(&self, o: &ExpRecord) -> bool {
        self.sub(o).is_zero_exact()
    }

    /// True when no monomial involves `log z1` or `log z2`.
    pub fn is_z_independent(&self) -> bool {
        self.terms().all(|(m, _)| m.z1 == 0 && m.z2 == 0)
    }

    /// True when the record is `c log q` only (a pure power of `q`).
    pub fn is_pure_q_power(&self) -> bool {
        self.terms().all(|(m, _)| *m == Mono::LQ)
    }

    pub fn eval(&self, l1: &Scalar, l2: &Scalar, pp: &QParams) -> Scalar {
        let prec = pp.prec;
        let lq = Scalar::from_real(&pp.ln_q);
        let pii = Scalar::i_pi_times(prec, 1, 1);
        let mut acc = Scalar::zero(prec);
        for (m, c) in &self.0 {
            let mut t = Scalar::from_real(&c.value(pp));
            t = t * l1.powi(m.z1 as i64) * l2.powi(m.z2 as i64) * lq.powi(m.lq as i64) * pii.powi(m.pi as i64);
            acc += &t;
        }
        acc
    }

    /// The coefficient of `(pi i)^1` when that is the only `pi` content.
    pub fn pi_multiple(&self) -> Option<Q> {
        let mut out = Q::zero();
        for (m, c) in self.terms() {
            if m.pi > 0 {
                if *m != Mono::PI {
                    return None;
                }
                out += c.as_rational()?;
            }
        }
        Some(out)
    }
}

impl fmt::Display for ExpRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (m, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (name, p) in [("log z1", m.z1), ("log z2", m.z2), ("log q", m.lq), ("pi i", m.pi)] {
                match p {
                    0 => {}
                    1 => write!(f, " {name}")?,
                    _ => write!(f, " ({name})^{p}")?,
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `exp(sum_g c_g g)`
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZeroFactor {
    pub terms: BTreeMap<Gen, Coef>,
}

impl ZeroFactor {
    pub fn new() -> Self {
        ZeroFactor::default()
    }

    pub fn single(g: Gen, c: Coef) -> Self {
        let mut f = ZeroFactor::new();
        f.terms.insert(g, c);
        f
    }

    pub fn with(mut self, g: Gen, c: Coef) -> Self {
        let e = self.terms.entry(g).or_default();
        *e = e.add(&c);
        self
    }

    pub fn shift(&self, s: Lin) -> ZeroFactor {
        ZeroFactor { terms: self.terms.iter().map(|(g, c)| (*g, c.shift(s))).collect() }
    }

    pub fn neg(&self) -> ZeroFactor {
        ZeroFactor { terms: self.terms.iter().map(|(g, c)| (*g, c.neg())).collect() }
    }

    /// `[A, B]` with `A` in variable slot `sa` and `B` in slot `sb`.
    pub fn commutator(&self, o: &ZeroFactor, sa: u8, sb: u8, n: usize) -> ExpRecord {
        let mut out = ExpRecord::zero();
        for (g, cg) in &self.terms {
            let rg = cg.record(sa);
            for (h, ch) in &o.terms {
                let w = commutator_scalar(*g, *h, n);
                if w.is_zero() {
                    continue;
                }
                out = out.add(&rg.mul(&ch.record(sb)).mul(&w.record()));
            }
        }
        out
    }
}

/// An ordered product of zero-mode factors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ZeroWord {
    pub n: usize,
    pub factors: Vec<ZeroFactor>,
}

impl ZeroWord {
    pub fn empty(n: usize) -> Self {
        ZeroWord { n, factors: Vec::new() }
    }

    /// Validate indices and the `sum_j eta_j = 0` gauge of every factor.
    pub fn new(n: usize, factors: Vec<ZeroFactor>) -> Result<Self, ZeroModeError> {
        for f in &factors {
            let mut eta = Coef::default();
            for (g, c) in &f.terms {
                if g.idx == 0 || g.idx > n {
                    return Err(ZeroModeError::IndexOutOfRange { idx: g.idx, n });
                }
                if g.kind == GenKind::Eta {
                    eta = eta.add(c);
                }
            }
            if !eta.is_zero_exact() {
                return Err(ZeroModeError::EtaSum);
            }
        }
        Ok(ZeroWord { n, factors })
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().all(|f| f.terms.is_empty())
    }

    pub fn shift(&self, s: Lin) -> ZeroWord {
        ZeroWord { n: self.n, factors: self.factors.iter().map(|f| f.shift(s)).collect() }
    }

    /// `X Y` as a word (both in the same variable).
    pub fn concat(&self, o: &ZeroWord) -> ZeroWord {
        let mut factors = self.factors.clone();
        factors.extend(o.factors.iter().cloned());
        ZeroWord { n: self.n.max(o.n), factors }
    }

    /// The word of the inverse operator: reversed order, negated exponents.
    pub fn inverse(&self) -> ZeroWord {
        ZeroWord { n: self.n, factors: self.factors.iter().rev().map(ZeroFactor::neg).collect() }
    }

    /// Sum of all exponents (the single-exponential content).
    pub fn total(&self) -> BTreeMap<Gen, Coef> {
        let mut tot: BTreeMap<Gen, Coef> = BTreeMap::new();
        for f in &self.factors {
            for (g, c) in &f.terms {
                let e = tot.entry(*g).or_default();
                *e = e.add(c);
            }
        }
        tot.retain(|_, c| !c.is_zero_exact());
        tot
    }

    /// Canonical form: `self = exp(record) * canonical`, where `canonical` has
    /// one single-generator factor per generator in canonical order.
    pub fn normal_form(&self) -> (ExpRecord, ZeroWord) {
        let n = self.n;
        let half = Q::new(1, 2);
        let mut rec = ExpRecord::zero();
        for i in 0..self.factors.len() {
            for j in (i + 1)..self.factors.len() {
                rec = rec.add(&self.factors[i].commutator(&self.factors[j], 1, 1, n).scale(half));
            }
        }
        let canon: Vec<ZeroFactor> =
            self.total().into_iter().map(|(g, c)| ZeroFactor::single(g, c)).collect();
        for i in 0..canon.len() {
            for j in (i + 1)..canon.len() {
                rec = rec.sub(&canon[i].commutator(&canon[j], 1, 1, n).scale(half));
            }
        }
        (rec, ZeroWord { n, factors: canon })
    }

    /// Operator equality of two canonical words (exact, coefficient-wise).
    pub fn same_operator(&self, o: &ZeroWord) -> bool {
        let a = self.total();
        let b = o.total();
        a.len() == b.len() && a.iter().zip(b.iter()).all(|((g1, c1), (g2, c2))| g1 == g2 && c1.eq_exact(c2))
    }

    /// True when the word commutes with every generator (acts as a scalar on each sector).
    pub fn is_central(&self) -> bool {
        use GenKind::*;
        let tot = self.total();
        for kind in [P, Q, Eta, Lat, H] {
            for idx in 1..=self.n {
                let h = Gen::new(kind, idx);
                let probe = ZeroFactor::single(h, Coef::int(1));
                let mut acc = ExpRecord::zero();
                for (g, c) in &tot {
                    acc = acc.add(&ZeroFactor::single(*g, c.clone()).commutator(&probe, 1, 2, self.n));
                }
                if !acc.is_zero_exact() {
                    return false;
                }
            }
        }
        true
    }
}

/// Scalar `f` in `X(z1) Y(z2) = e^f Y(z2) X(z1)` on the zero-mode sector.
pub fn exchange_record(x: &ZeroWord, y: &ZeroWord) -> ExpRecord {
    let n = x.n.max(y.n);
    let mut rec = ExpRecord::zero();
    for a in &x.factors {
        for b in &y.factors {
            rec = rec.add(&a.commutator(b, 1, 2, n));
        }
    }
    rec
}

/// `exp` of an exponent record at given logs.
pub fn eval_exp(rec: &ExpRecord, l1: &Scalar, l2: &Scalar, pp: &QParams) -> Scalar {
    rec.eval(l1, l2, pp).exp()
}

/// Numerical value of a central commutator (for display and tests).
pub fn central_value(c: &Central, pp: &QParams) -> Scalar {
    let z = Scalar::zero(pp.prec);
    c.record().eval(&z, &z, pp)
}


#[cfg(test)]
mod tests {
    use super::*;
    use GenKind::{Eta, P};
    use crate::lin::Q;

    #[test]
    fn table_entries() {
        let n = 3;
        assert!(commutator_scalar(Gen::new(P, 1), Gen::new(P, 2), n).is_zero());
        assert_eq!(commutator_scalar(Gen::new(P, 2), Gen::new(GenKind::Q, 2), n).c.as_rational(), Some(Q::new(2, 3)));
        assert_eq!(commutator_scalar(Gen::new(P, 1), Gen::new(GenKind::Q, 2), n).c.as_rational(), Some(Q::new(-1, 3)));
        assert!(commutator_scalar(Gen::new(Eta, 2), Gen::new(Eta, 2), n).is_zero());
    }

    #[test]
    fn eta_gauge_is_enforced() {
        let f = ZeroFactor::single(Gen::new(Eta, 1), Coef::int(1));
        assert_eq!(ZeroWord::new(2, vec![f]).unwrap_err(), ZeroModeError::EtaSum);
    }

    #[test]
    fn canonical_word_has_trivial_record() {
        let w = ZeroWord::new(
            3,
            vec![
                ZeroFactor::single(Gen::new(P, 1), Coef::lz(RExpr::inv_rs())),
                ZeroFactor::single(Gen::new(GenKind::Q, 2), Coef::int(1)),
            ],
        )
        .unwrap();
        let (rec, canon) = w.normal_form();
        assert!(rec.is_zero_exact());
        let (rec2, canon2) = canon.normal_form();
        assert!(rec2.is_zero_exact());
        assert!(canon2.same_operator(&canon));
    }
}
