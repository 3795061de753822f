//! Operator products of normal-ordered exponentials.
//!
//! For `X(z1) Y(z2)` the oscillator contraction is `exp(sum_{m>0} g_m x^m)`
//! with `x = z2/z1`. The coefficient `g_m` is kept as a closed-form
//! [`ModeFn`], recognized as a product of multi-base Pochhammer symbols and
//! then evaluated anywhere off its poles. Exchange relations are compared as
//! identities of these meromorphic continuations.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::sync::Arc;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::lin::{Lin, Q};
use crate::modealg::{ModeAlgebra, ModeError};
use crate::modefn::ModeFn;
use crate::params::QParams;
use crate::qspecial::{Approx, PochCutoff, PochPlan};
use crate::report::RelationReport;
use crate::scalar::{Real, Scalar};
use crate::series::{SeriesError, TruncSeries};
use crate::zeromode::{exchange_record, Coef, ExpRecord, ZeroWord};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpeError {
    #[error("cannot recognize contraction term: {0}")]
    Recognition(String),
    #[error("pole of order {order} at x = q^({x0})")]
    HigherOrderPole { order: i64, x0: String },
    #[error("evaluation at a pole")]
    Pole,
    #[error("every sample point was degenerate")]
    Degenerate,
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// One normal-ordered exponential `:exp(sum_{j,m} a_j(m) B_m^j z^{-m}): * zero word * scalar`.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexDescriptor {
    pub name: String,
    /// Coefficient of `B_m^j z^{-m}` as a function of `m` (all `m != 0`).
    pub osc: BTreeMap<usize, ModeFn>,
    pub zero: ZeroWord,
    /// Exponent of the scalar prefactor (`lz log z + lq log q + c`).
    pub pre: Coef,
}

impl VertexDescriptor {
    pub fn new(name: &str, n: usize) -> Self {
        VertexDescriptor { name: name.into(), osc: BTreeMap::new(), zero: ZeroWord::empty(n), pre: Coef::default() }
    }

    pub fn with_osc(mut self, j: usize, f: ModeFn) -> Self {
        let e = self.osc.entry(j).or_default();
        *e = e.add(&f);
        self
    }

    /// The same operator at the argument `q^s z`.
    pub fn shift(&self, s: Lin) -> Self {
        VertexDescriptor {
            name: format!("{}(q^({s})z)", self.name),
            osc: self.osc.iter().map(|(j, f)| (*j, f.qshift(-s))).collect(),
            zero: self.zero.shift(s),
            pre: self.pre.shift(s),
        }
    }

    pub fn inverse(&self) -> Self {
        VertexDescriptor {
            name: format!("{}^-1", self.name),
            osc: self.osc.iter().map(|(j, f)| (*j, f.scale(-Q::from_integer(1)))).collect(),
            zero: self.zero.inverse(),
            pre: self.pre.neg(),
        }
    }

    /// The normal-ordered product `:X Y:` at a common argument.
    pub fn normal_product(&self, o: &VertexDescriptor) -> Self {
        let mut osc = self.osc.clone();
        for (j, f) in &o.osc {
            let e = osc.entry(*j).or_default();
            *e = e.add(f);
        }
        VertexDescriptor {
            name: format!(":{} {}:", self.name, o.name),
            osc,
            zero: self.zero.concat(&o.zero),
            pre: self.pre.add(&o.pre),
        }
    }

    pub fn osc_coeff(&self, j: usize, m: i64, pp: &QParams) -> Real {
        self.osc.get(&j).map(|f| f.eval(m, pp)).unwrap_or_else(|| Real::new(pp.prec))
    }

    /// Largest `|a_j(m)|` over `j` and `0 < |m| <= order`.
    pub fn osc_max(&self, order: i64, pp: &QParams) -> f64 {
        let mut best = 0.0f64;
        for f in self.osc.values() {
            for m in (-order..=order).filter(|m| *m != 0) {
                best = best.max(f.eval(m, pp).abs().to_f64());
            }
        }
        best
    }
}

/// `(q^{arg} x; q^{b_1}, .., q^{b_k})_inf ^ exp`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PFactor {
    pub arg: Lin,
    pub bases: Vec<Lin>,
    pub exp: i64,
}

/// A finite product of multi-base Pochhammer powers in the variable `x`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ProductForm {
    pub factors: Vec<PFactor>,
}

/// Symbolic coefficient `g_m` of `x^m` in the log of the contraction of `X(z1) Y(z2)`.
pub fn contraction_template(x: &VertexDescriptor, y: &VertexDescriptor, ma: &ModeAlgebra) -> Result<ModeFn, OpeError> {
    let mut out = ModeFn::zero();
    for (j, a) in &x.osc {
        for (k, b) in &y.osc {
            let c = ma.commutator_template(*j, *k)?;
            out = out.add(&a.mul(&b.neg_m()).mul(&c));
        }
    }
    Ok(out)
}

/// The same coefficients evaluated numerically from the mode algebra, as a
/// series `sum_{m=1}^{order} g_m x^m`.
pub fn log_contraction(
    x: &VertexDescriptor,
    y: &VertexDescriptor,
    ma: &ModeAlgebra,
    order: usize,
) -> Result<TruncSeries, OpeError> {
    let pp = &ma.pp;
    let mut coeffs = vec![Scalar::zero(pp.prec); order + 1];
    for (m, slot) in coeffs.iter_mut().enumerate().skip(1) {
        let m = m as i64;
        let mut acc = Real::new(pp.prec);
        for (j, a) in &x.osc {
            let av = a.eval(m, pp);
            for (k, b) in &y.osc {
                acc += Real::with_val(pp.prec, &av * b.eval(-m, pp)) * ma.b_commutator(*j, *k, m, -m)?;
            }
        }
        *slot = Scalar::from_real(&acc);
    }
    Ok(TruncSeries::from_coeffs("x", coeffs))
}

/// Rewrite `sum_m g_m x^m` as a product of Pochhammer powers.
///
/// Each term with `m^{-1}` is expanded with `[b m] = (q^{bm} - q^{-bm})/(q - 1/q)`
/// in the numerator and `1/[b m] = -(q - 1/q) q^{bm} / (1 - q^{2bm})` in the
/// denominator; `sum_m c (q^a x)^m / (m prod(1 - t^m))` is `(q^a x; t..)^{-c}`.
pub fn recognize(g: &ModeFn, pp: &QParams) -> Result<ProductForm, OpeError> {
    let mut groups: BTreeMap<(Lin, i32, Vec<Lin>), Q> = BTreeMap::new();
    for t in &g.terms {
        if t.coef.is_zero() {
            continue;
        }
        if t.mpow != -1 {
            return Err(OpeError::Recognition(format!("power m^{} (need m^-1)", t.mpow)));
        }
        let mut poly: BTreeMap<Lin, Q> = BTreeMap::new();
        poly.insert(t.alpha, t.coef);
        let mut qq = t.qq;
        let mut bases = Vec::new();
        for (b0, e) in &t.qn {
            let (b, sgn) = if b0.sign(pp) < 0 { (-*b0, -1i64) } else { (*b0, 1) };
            if b0.sign(pp) == 0 {
                return Err(OpeError::Recognition(format!("[{b0} m] vanishes at these parameters")));
            }
            let s = Q::from_integer(sgn);
            if *e > 0 {
                for _ in 0..*e {
                    qq -= 1;
                    let mut next: BTreeMap<Lin, Q> = BTreeMap::new();
                    for (k, v) in &poly {
                        *next.entry(*k + b).or_default() += *v * s;
                        *next.entry(*k - b).or_default() -= *v * s;
                    }
                    poly = next;
                }
            } else {
                for _ in 0..(-*e) {
                    qq += 1;
                    poly = poly.into_iter().map(|(k, v)| (k + b, -v * s)).collect();
                    bases.push(b.scale(Q::from_integer(2)));
                }
            }
        }
        bases.sort();
        for (k, v) in poly {
            if !v.is_zero() {
                *groups.entry((k, qq, bases.clone())).or_default() += v;
            }
        }
    }
    let mut factors = Vec::new();
    for ((arg, qq, bases), c) in groups {
        if c.is_zero() {
            continue;
        }
        if qq != 0 {
            return Err(OpeError::Recognition(format!("leftover (q-1/q)^{qq} with coefficient {c}")));
        }
        if !c.is_integer() {
            return Err(OpeError::Recognition(format!("non-integer exponent {c}")));
        }
        factors.push(PFactor { arg, bases, exp: -c.to_integer() });
    }
    Ok(ProductForm { factors })
}

/// A zero of one Pochhammer factor at a special point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vanishing {
    pub factor: usize,
    pub index: Vec<u32>,
}

impl ProductForm {
    /// Order of the product at `x = q^{x0}` (negative for a pole), decided
    /// exactly: a factor vanishes iff `arg + x0 + sum n_i b_i = 0` as a linear form.
    pub fn order_at(&self, x0: Lin, pp: &QParams) -> (i64, Vec<Vanishing>) {
        let mut order = 0;
        let mut hits = Vec::new();
        for (fi, f) in self.factors.iter().enumerate() {
            let target = f.arg + x0;
            let mut idx = vec![0u32; f.bases.len()];
            let mut sols = Vec::new();
            solve_lattice(&f.bases, 0, target, pp, &mut idx, &mut sols);
            for s in sols {
                order += f.exp;
                hits.push(Vanishing { factor: fi, index: s });
            }
        }
        (order, hits)
    }

    /// Bind to numerical Pochhammer plans.
    pub fn bind(&self, pp: &QParams) -> BoundForm {
        let mut cache: HashMap<Vec<Lin>, Arc<PochPlan>> = HashMap::new();
        let mut plans = Vec::new();
        let mut args = Vec::new();
        for f in &self.factors {
            let plan = cache
                .entry(f.bases.clone())
                .or_insert_with(|| {
                    let b: Vec<Real> = f.bases.iter().map(|l| l.qpow(pp)).collect();
                    Arc::new(PochPlan::new(&b, PochCutoff::default(), pp.prec).expect("bases lie in (0,1)"))
                })
                .clone();
            plans.push(plan);
            args.push(f.arg.qpow(pp));
        }
        BoundForm { pf: self.clone(), plans, args, pp: pp.clone() }
    }
}

fn solve_lattice(bases: &[Lin], depth: usize, rest: Lin, pp: &QParams, idx: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if depth == bases.len() {
        if rest.is_zero() {
            out.push(idx.clone());
        }
        return;
    }
    let bv = bases[depth].value_f64(pp.r.to_f64());
    let rv = rest.value_f64(pp.r.to_f64());
    let max_n = if rv > 1e-9 { -1 } else { ((-rv) / bv + 1e-9).floor() as i64 };
    for n in 0..=max_n.max(-1) {
        idx[depth] = n as u32;
        solve_lattice(bases, depth + 1, rest + bases[depth].scale(Q::from_integer(n)), pp, idx, out);
    }
    idx[depth] = 0;
}

/// A product form with precomputed plans.
#[derive(Clone, Debug)]
pub struct BoundForm {
    pub pf: ProductForm,
    plans: Vec<Arc<PochPlan>>,
    args: Vec<Real>,
    pp: QParams,
}

impl BoundForm {
    fn factor_value(&self, i: usize, x: &Scalar, skip: &[Vec<u32>]) -> Approx {
        let z = x.scale(&self.args[i]);
        let plan = &self.plans[i];
        let v = if plan.tail_bound(z.abs_f64()).is_finite() {
            plan.eval_skipping(&z, skip)
        } else {
            let fresh = PochPlan::new(plan.bases(), PochCutoff::Adaptive { zmax: 2.0 * z.abs_f64() }, self.pp.prec)
                .expect("bases lie in (0,1)");
            fresh.eval_skipping(&z, skip)
        };
        v.powi(self.pf.factors[i].exp)
    }

    pub fn eval(&self, x: &Scalar) -> Approx {
        let mut acc = Approx::exact(Scalar::one(self.pp.prec));
        for i in 0..self.pf.factors.len() {
            acc = acc.mul(&self.factor_value(i, x, &[]));
        }
        acc
    }

    /// `lim_{x -> q^{x0}} (1 - x q^{-x0})^{k} PF(x)` where `-k` is the order at
    /// `x0`, obtained by dropping the vanishing factors.
    pub fn leading_coefficient(&self, x0: Lin) -> (i64, Approx) {
        let (order, hits) = self.pf.order_at(x0, &self.pp);
        let x = Scalar::from_real(&x0.qpow(&self.pp));
        let mut acc = Approx::exact(Scalar::one(self.pp.prec));
        for i in 0..self.pf.factors.len() {
            let skip: Vec<Vec<u32>> = hits.iter().filter(|h| h.factor == i).map(|h| h.index.clone()).collect();
            acc = acc.mul(&self.factor_value(i, &x, &skip));
        }
        (order, acc)
    }

    /// Re-expansion as a power series in `x`, built from the finite products.
    /// Each factor contributes `log(1 - w x) = -sum_k (w x)^k / k` directly.
    pub fn series(&self, order: usize) -> Result<TruncSeries, OpeError> {
        let prec = self.pp.prec;
        let mut logc = vec![Real::new(prec); order + 1];
        for (i, f) in self.pf.factors.iter().enumerate() {
            for t in self.plans[i].monomials() {
                let w = Real::with_val(prec, t * &self.args[i]);
                let mut wk = Real::with_val(prec, 1);
                for (k, slot) in logc.iter_mut().enumerate().skip(1) {
                    wk *= &w;
                    *slot -= Real::with_val(prec, &wk * f.exp) / k as u32;
                }
            }
        }
        let coeffs = logc.iter().map(Scalar::from_real).collect();
        Ok(TruncSeries::from_coeffs("x", coeffs).exp()?)
    }
}

/// One sample point `(log z1, log z2)` with `v = v1 - v2`.
#[derive(Clone, Debug)]
pub struct Sample {
    pub l1: Scalar,
    pub l2: Scalar,
}

impl Sample {
    pub fn new(l1: Scalar, l2: Scalar) -> Self {
        Sample { l1, l2 }
    }

    /// `v1 - v2 = (log z1 - log z2) / (2 log q)`
    pub fn v(&self, pp: &QParams) -> Scalar {
        let two = Real::with_val(pp.prec, &pp.ln_q * 2u32);
        (&self.l1 - &self.l2).scale(&two.recip())
    }

    /// `x = z2 / z1`
    pub fn x(&self) -> Scalar {
        (&self.l2 - &self.l1).exp()
    }

    pub fn swapped(&self) -> Sample {
        Sample { l1: self.l2.clone(), l2: self.l1.clone() }
    }
}

/// Seeded sample points with `|x|` cycling through 0.7, 1.0, 1.3 and phases
/// kept away from the negative real axis.
pub fn sample_points(count: usize, seed: u64, pp: &QParams) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radii = [0.7f64, 1.0, 1.3];
    (0..count)
        .map(|i| {
            let rho = radii[i % 3];
            let ax: f64 = rng.gen_range(-0.9 * PI..0.9 * PI);
            let a2: f64 = rng.gen_range(-0.9 * PI..0.9 * PI);
            let l2 = Scalar::from_f64_pair(pp.prec, 0.0, a2);
            let lx = Scalar::from_f64_pair(pp.prec, rho.ln(), ax);
            Sample { l1: &l2 - &lx, l2 }
        })
        .collect()
}

/// The scalar exchange function `f` in `X(z1) Y(z2) = f Y(z2) X(z1)`.
#[derive(Clone, Debug)]
pub struct Exchange {
    pub xy: BoundForm,
    pub yx: BoundForm,
    pub zero: ExpRecord,
    pp: QParams,
}

impl Exchange {
    pub fn eval(&self, s: &Sample) -> Approx {
        let a = self.xy.eval(&s.x());
        let b = self.yx.eval(&s.swapped().x());
        let z = self.zero.eval(&s.l1, &s.l2, &self.pp).exp();
        a.div(&b).scale(&z)
    }

    /// True when both contractions and the zero-mode factor are trivial.
    pub fn is_identically_one(&self) -> bool {
        self.xy.pf.factors.is_empty() && self.yx.pf.factors.is_empty() && self.zero.is_zero_exact()
    }
}

/// Build the exchange function of two descriptors from their recognized contractions.
pub fn exchange_ratio(x: &VertexDescriptor, y: &VertexDescriptor, ma: &ModeAlgebra) -> Result<Exchange, OpeError> {
    let pp = &ma.pp;
    let gxy = recognize(&contraction_template(x, y, ma)?, pp)?;
    let gyx = recognize(&contraction_template(y, x, ma)?, pp)?;
    Ok(Exchange { xy: gxy.bind(pp), yx: gyx.bind(pp), zero: exchange_record(&x.zero, &y.zero), pp: pp.clone() })
}

/// The normal-ordered composite at a special ratio and its scalar data.
#[derive(Clone, Debug)]
pub struct Composite {
    /// `:X(q^{-x0} z) Y(z):` as a descriptor in `z`.
    pub desc: VertexDescriptor,
    /// Order of the contraction at `x0` (`-1` for a simple pole).
    pub order: i64,
    /// Leading coefficient of the contraction at `x0`.
    pub leading: Approx,
}

/// `X(z1) Y(z2)` at `z2/z1 = q^{x0}`: regular points and simple poles only.
pub fn specialize_compose(
    x: &VertexDescriptor,
    y: &VertexDescriptor,
    x0: Lin,
    ma: &ModeAlgebra,
) -> Result<Composite, OpeError> {
    let pp = &ma.pp;
    let pf = recognize(&contraction_template(x, y, ma)?, pp)?;
    let bound = pf.bind(pp);
    let (order, leading) = bound.leading_coefficient(x0);
    if order < -1 {
        return Err(OpeError::HigherOrderPole { order: -order, x0: x0.to_string() });
    }
    let desc = x.shift(-x0).normal_product(y);
    Ok(Composite { desc, order, leading })
}

/// Compare an engine function with a target at every sample.
///
/// Samples where either side is not finite or vanishes are skipped; the
/// residual is `|f - target| / |target|`.
pub fn compare_structure_function<F, T>(
    mut report: RelationReport,
    samples: &[Sample],
    f: F,
    target: T,
) -> RelationReport
where
    F: Fn(&Sample) -> Result<Approx, OpeError> + Sync,
    T: Fn(&Sample) -> Result<Approx, OpeError> + Sync,
{
    let results: Vec<Option<(f64, f64)>> = samples
        .par_iter()
        .map(|s| {
            let a = f(s).ok()?;
            let b = target(s).ok()?;
            let (na, nb) = (a.value.abs_f64(), b.value.abs_f64());
            if !a.value.is_finite() || !b.value.is_finite() || nb < 1e-200 || na < 1e-200 {
                return None;
            }
            Some((a.value.rel_dist(&b.value, 0.0), a.rel_tail + b.rel_tail))
        })
        .collect();
    let mut used = 0;
    for (r, tail) in results.into_iter().flatten() {
        report.push(r);
        report.bound(tail);
        used += 1;
    }
    if used == 0 {
        return report.fail(OpeError::Degenerate.to_string());
    }
    if used < samples.len() {
        report.note(format!("{} of {} samples skipped as degenerate", samples.len() - used, samples.len()));
    }
    report.finish()
}

/// Coefficient-wise relative distance `max_k |a_k - b_k| / max(|b_k|, 1)`.
pub fn series_distance(a: &TruncSeries, b: &TruncSeries) -> f64 {
    let n = a.order().min(b.order());
    (0..=n)
        .map(|k| (a.coeff(k) - b.coeff(k)).abs_f64() / b.coeff(k).abs_f64().max(1.0))
        .fold(0.0, f64::max)
}

/// `|series(PF) - exp(g)|` for the contraction of `X(z1) Y(z2)`.
pub fn reexpansion_residual(
    x: &VertexDescriptor,
    y: &VertexDescriptor,
    ma: &ModeAlgebra,
    order: usize,
) -> Result<f64, OpeError> {
    let pf = recognize(&contraction_template(x, y, ma)?, &ma.pp)?;
    let from_pf = pf.bind(&ma.pp).series(order)?;
    let direct = log_contraction(x, y, ma, order)?.exp()?;
    Ok(series_distance(&from_pf, &direct))
}

/// Shared state of the relation suites at one parameter pack.
#[derive(Clone, Debug)]
pub struct Bench {
    pub pp: QParams,
    pub ma: ModeAlgebra,
    pub qs: crate::qspecial::QSpecial,
    pub samples: Vec<Sample>,
    pub order: usize,
}

impl Bench {
    pub fn new(pp: &QParams, n_samples: usize, seed: u64, order: usize) -> Self {
        Bench {
            pp: pp.clone(),
            ma: ModeAlgebra::new(pp),
            qs: crate::qspecial::QSpecial::new(pp),
            samples: sample_points(n_samples, seed, pp),
            order,
        }
    }

    pub fn n(&self) -> usize {
        self.pp.n
    }

    pub fn report(&self, suite: &str, relation: &str, threshold: f64) -> RelationReport {
        RelationReport::new(suite, relation, self.pp.record(), self.order, threshold)
    }

    /// Exchange function of `x`, `y` against `target(v1 - v2)` at every sample.
    pub fn exchange_suite<T>(
        &self,
        report: RelationReport,
        x: &VertexDescriptor,
        y: &VertexDescriptor,
        target: T,
    ) -> RelationReport
    where
        T: Fn(&Scalar) -> Result<Approx, OpeError> + Sync,
    {
        let ex = match exchange_ratio(x, y, &self.ma) {
            Ok(ex) => ex,
            Err(e) => return report.fail(e.to_string()),
        };
        let pp = &self.pp;
        compare_structure_function(report, &self.samples, |s| Ok(ex.eval(s)), |s| target(&s.v(pp)))
    }
}
