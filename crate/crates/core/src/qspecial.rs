//! Multi-base q-Pochhammer symbols, theta functions, the brackets `[v]`,
//! `[v]*` and the closed-form structure functions built from them.
//!
//! Functions of a spectral variable take `v` with `z = q^{2v}`; fractional
//! powers `z^a` are then `q^{2av}` and need no branch choice.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::params::QParams;
use crate::report::RelationReport;
use crate::scalar::{Real, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("Pochhammer base {0} is outside (0, 1)")]
    BaseOutOfRange(f64),
    #[error("theta function evaluated at z = 0")]
    ZeroArgument,
    #[error("pole of {0}")]
    Pole(String),
    #[error("contour passes through a zero of the bracket")]
    ContourHitsZero,
    #[error("unknown function `{0}` (known: {known})", known = FUNCTIONS.join(", "))]
    Unknown(String),
    #[error("`{name}` takes {want} argument(s), got {got}")]
    Arity { name: String, want: usize, got: usize },
    #[error("`{name}`: {msg}")]
    Argument { name: String, msg: String },
}

/// Names accepted by [`QSpecial::eval_named`].
pub const FUNCTIONS: &[&str] = &[
    "qnum", "theta", "theta_p", "bracket", "bracket_star", "kappa", "rho_plus", "rho_plus_star", "rho", "mu_star",
    "phiN", "g_N", "g_N_prime", "C_n",
];

/// How far the infinite products are expanded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PochCutoff {
    /// Keep every factor whose base monomial exceeds `2^-(prec+24) / zmax`.
    Adaptive { zmax: f64 },
    /// Keep every factor of total degree at most `M` in the bases.
    Degree(usize),
}

impl Default for PochCutoff {
    fn default() -> Self {
        PochCutoff::Adaptive { zmax: 64.0 }
    }
}

/// A value together with a bound on its relative truncation error.
#[derive(Clone, Debug)]
pub struct Approx {
    pub value: Scalar,
    pub rel_tail: f64,
}

impl Approx {
    pub fn exact(value: Scalar) -> Self {
        Approx { value, rel_tail: 0.0 }
    }

    pub fn mul(&self, o: &Approx) -> Approx {
        Approx { value: &self.value * &o.value, rel_tail: self.rel_tail + o.rel_tail }
    }

    pub fn div(&self, o: &Approx) -> Approx {
        Approx { value: &self.value / &o.value, rel_tail: self.rel_tail + o.rel_tail }
    }

    pub fn powi(&self, n: i64) -> Approx {
        Approx { value: self.value.powi(n), rel_tail: self.rel_tail * n.unsigned_abs() as f64 }
    }

    pub fn scale(&self, s: &Scalar) -> Approx {
        Approx { value: &self.value * s, rel_tail: self.rel_tail }
    }
}

/// Precomputed base monomials `t_1^{n_1} ... t_k^{n_k}` of a multi-base
/// Pochhammer symbol together with a bound on the omitted part.
#[derive(Clone, Debug)]
pub struct PochPlan {
    bases: Vec<Real>,
    monomials: Vec<Real>,
    indices: Vec<Vec<u32>>,
    /// Upper bound on the sum of omitted monomials.
    omitted: f64,
    /// Largest omitted monomial (bounds `|z| T` in the log estimate).
    largest_omitted: f64,
    prec: u32,
}

impl PochPlan {
    pub fn new(bases: &[Real], cutoff: PochCutoff, prec: u32) -> Result<Self, QError> {
        for t in bases {
            if !(*t > 0 && *t < 1) {
                return Err(QError::BaseOutOfRange(t.to_f64()));
            }
        }
        let mut monomials = Vec::new();
        let mut indices = Vec::new();
        let mut idx = vec![0u32; bases.len()];
        let (omitted, largest_omitted) = match cutoff {
            PochCutoff::Adaptive { zmax } => {
                let tau = 2f64.powi(-(prec as i32 + 24)) / zmax.max(1.0);
                let tau_r = Real::with_val(prec, tau);
                enumerate_adaptive(bases, 0, Real::with_val(prec, 1), &tau_r, &mut idx, &mut monomials, &mut indices);
                // Omitted monomials satisfy T < tau, so T <= tau^(7/8) T^(1/8).
                let theta = 0.125;
                let mut s = tau.powf(1.0 - theta);
                for t in bases {
                    s /= 1.0 - t.to_f64().powf(theta);
                }
                if bases.is_empty() {
                    s = 0.0;
                }
                (s, tau)
            }
            PochCutoff::Degree(m) => {
                enumerate_degree(bases, 0, m as i64, Real::with_val(prec, 1), &mut idx, &mut monomials, &mut indices);
                let k = bases.len();
                if k == 0 {
                    (0.0, 0.0)
                } else {
                    let s_max = bases.iter().map(|t| t.to_f64()).fold(0.0, f64::max);
                    (degree_tail(k, m, s_max), s_max.powi(m as i32 + 1))
                }
            }
        };
        Ok(PochPlan { bases: bases.to_vec(), monomials, indices, omitted, largest_omitted, prec })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn bases(&self) -> &[Real] {
        &self.bases
    }

    pub fn indices(&self) -> &[Vec<u32>] {
        &self.indices
    }

    /// The kept monomials `t_1^{n_1} ... t_k^{n_k}`.
    pub fn monomials(&self) -> &[Real] {
        &self.monomials
    }

    /// `(z; t_1..t_k)_inf` and its relative tail bound.
    pub fn eval(&self, z: &Scalar) -> Approx {
        self.eval_skipping(z, &[])
    }

    /// The product with the factors of the listed multi-indices left out.
    pub fn eval_skipping(&self, z: &Scalar, skip: &[Vec<u32>]) -> Approx {
        let prec = self.prec.max(z.prec());
        let mut acc = rug::Complex::with_val(prec, 1);
        let zc = z.inner();
        let mut term = rug::Complex::new(prec);
        for (t, ix) in self.monomials.iter().zip(&self.indices) {
            if skip.iter().any(|s| s == ix) {
                continue;
            }
            term.assign_from_mul(zc, t);
            let one_minus = rug::Complex::with_val(prec, 1 - &term);
            acc *= &one_minus;
        }
        Approx { value: Scalar::from_complex(acc), rel_tail: self.tail_bound(z.abs_f64()) }
    }

    /// Relative error bound `exp(2 |z| S) - 1`, valid while `|z| T <= 1/2` for omitted `T`.
    pub fn tail_bound(&self, zabs: f64) -> f64 {
        if self.omitted == 0.0 {
            return 0.0;
        }
        if zabs * self.largest_omitted > 0.5 {
            return f64::INFINITY;
        }
        (2.0 * zabs * self.omitted).exp_m1()
    }
}

trait AssignMul {
    fn assign_from_mul(&mut self, z: &rug::Complex, t: &Real);
}

impl AssignMul for rug::Complex {
    fn assign_from_mul(&mut self, z: &rug::Complex, t: &Real) {
        use rug::Assign;
        self.assign(z * t);
    }
}

fn enumerate_adaptive(
    bases: &[Real],
    depth: usize,
    acc: Real,
    tau: &Real,
    idx: &mut Vec<u32>,
    out: &mut Vec<Real>,
    out_idx: &mut Vec<Vec<u32>>,
) {
    if depth == bases.len() {
        out.push(acc);
        out_idx.push(idx.clone());
        return;
    }
    let mut a = acc;
    let mut n = 0u32;
    while a >= *tau {
        idx[depth] = n;
        enumerate_adaptive(bases, depth + 1, a.clone(), tau, idx, out, out_idx);
        a *= &bases[depth];
        n += 1;
    }
    idx[depth] = 0;
}

fn enumerate_degree(
    bases: &[Real],
    depth: usize,
    left: i64,
    acc: Real,
    idx: &mut Vec<u32>,
    out: &mut Vec<Real>,
    out_idx: &mut Vec<Vec<u32>>,
) {
    if depth == bases.len() {
        out.push(acc);
        out_idx.push(idx.clone());
        return;
    }
    let mut a = acc;
    for n in 0..=left {
        idx[depth] = n as u32;
        enumerate_degree(bases, depth + 1, left - n, a.clone(), idx, out, out_idx);
        a *= &bases[depth];
    }
    idx[depth] = 0;
}

/// `sum_{d > M} C(d+k-1, k-1) s^d`, summed until negligible.
fn degree_tail(k: usize, m: usize, s: f64) -> f64 {
    let mut total = 0.0;
    let mut d = m + 1;
    loop {
        let ln_binom = ln_binomial(d + k - 1, k - 1);
        let term = (ln_binom + d as f64 * s.ln()).exp();
        total += term;
        if term < total * 1e-18 || term < 1e-320 || d > m + 100_000 {
            break;
        }
        d += 1;
    }
    total
}

fn ln_binomial(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| ((n + 1 - i) as f64 / i as f64).ln()).sum()
}

/// One-shot multi-base Pochhammer symbol `(z; t_1..t_k)_inf`.
pub fn pochhammer(z: &Scalar, bases: &[Real], cutoff: PochCutoff) -> Result<Approx, QError> {
    let plan = PochPlan::new(bases, cutoff, z.prec())?;
    Ok(plan.eval(z))
}

/// `Theta_t(z) = (z; t)(t/z; t)(t; t)` for an arbitrary nome `t`.
pub fn theta(z: &Scalar, t: &Real) -> Result<Approx, QError> {
    if z.is_zero() {
        return Err(QError::ZeroArgument);
    }
    let zmax = z.abs_f64().max(1.0 / z.abs_f64()).max(64.0);
    let plan = PochPlan::new(std::slice::from_ref(t), PochCutoff::Adaptive { zmax }, z.prec())?;
    let tz = Scalar::from_real(t) / z;
    Ok(plan.eval(z).mul(&plan.eval(&tz)).mul(&plan.eval(&Scalar::from_real(t))))
}

/// Evaluator for the special functions at a fixed parameter pack.
#[derive(Clone, Debug)]
pub struct QSpecial {
    pub pp: QParams,
    plan_p: PochPlan,
    plan_ps: PochPlan,
    plan_q2n: PochPlan,
    curly: PochPlan,
    curly_star: PochPlan,
    /// `(q^{2N}, p*)` as used by the inversion and fusion constants.
    q2n_ps: PochPlan,
    pp_poch: Scalar,
    psps_poch: Scalar,
    tail_p: f64,
    tail_ps: f64,
}

impl QSpecial {
    pub fn new(pp: &QParams) -> Self {
        let prec = pp.prec;
        let cut = PochCutoff::default();
        let q2n = pp.qpow_f64(2.0 * pp.n as f64);
        let plan = |b: &[Real]| PochPlan::new(b, cut, prec).expect("nomes lie in (0, 1)");
        let plan_p = plan(std::slice::from_ref(&pp.p));
        let plan_ps = plan(std::slice::from_ref(&pp.ps));
        let plan_q2n = plan(std::slice::from_ref(&q2n));
        let curly = plan(&[pp.p.clone(), q2n.clone()]);
        let curly_star = plan(&[pp.ps.clone(), q2n.clone()]);
        let q2n_ps = plan(&[q2n.clone(), pp.ps.clone()]);
        let a = plan_p.eval(&Scalar::from_real(&pp.p));
        let b = plan_ps.eval(&Scalar::from_real(&pp.ps));
        QSpecial {
            pp: pp.clone(),
            plan_p,
            plan_ps,
            plan_q2n,
            curly,
            curly_star,
            q2n_ps,
            pp_poch: a.value,
            psps_poch: b.value,
            tail_p: a.rel_tail,
            tail_ps: b.rel_tail,
        }
    }

    fn s(&self, x: &Real) -> Scalar {
        Scalar::from_real(x)
    }

    fn qs(&self, e: f64) -> Scalar {
        Scalar::from_real(&self.pp.qpow_f64(e))
    }

    /// `z = q^{2v}`
    pub fn z_of_v(&self, v: &Scalar) -> Scalar {
        v.scale(&self.pp.ln_q).mul_i64(2).exp()
    }

    /// `v = log z / (2 log q)` on the principal branch.
    pub fn v_of_z(&self, z: &Scalar) -> Scalar {
        let two_ln_q = Real::with_val(self.pp.prec, &self.pp.ln_q * 2u32);
        z.ln().scale(&two_ln_q.recip())
    }

    /// `q^{a}` for a complex exponent.
    pub fn qpow_c(&self, e: &Scalar) -> Scalar {
        e.scale(&self.pp.ln_q).exp()
    }

    /// `[n]_q = (q^n - q^{-n}) / (q - q^{-1})`
    pub fn qnum(&self, n: &Real) -> Real {
        let pp = &self.pp;
        let num = pp.qpow(n) - pp.qpow(&Real::with_val(pp.prec, -n));
        let den = Real::with_val(pp.prec, &pp.q - pp.q.clone().recip());
        num / den
    }

    pub fn qnum_f64(&self, n: f64) -> Real {
        self.qnum(&self.pp.real(n))
    }

    fn poch_with(&self, plan: &PochPlan, z: &Scalar) -> Approx {
        if plan.tail_bound(z.abs_f64()).is_finite() {
            plan.eval(z)
        } else {
            let fresh = PochPlan::new(plan.bases(), PochCutoff::Adaptive { zmax: 2.0 * z.abs_f64() }, self.pp.prec)
                .expect("plan bases are valid");
            fresh.eval(z)
        }
    }

    /// `(z; p)_inf`
    pub fn poch_p(&self, z: &Scalar) -> Approx {
        self.poch_with(&self.plan_p, z)
    }

    /// `(z; p*)_inf`
    pub fn poch_ps(&self, z: &Scalar) -> Approx {
        self.poch_with(&self.plan_ps, z)
    }

    /// `{z} = (z; p, q^{2N})_inf`
    pub fn curly(&self, z: &Scalar) -> Approx {
        self.poch_with(&self.curly, z)
    }

    /// `{z}* = (z; p*, q^{2N})_inf`
    pub fn curly_star(&self, z: &Scalar) -> Approx {
        self.poch_with(&self.curly_star, z)
    }

    /// `(z; q^{2N}, p*)_inf`
    pub fn poch_q2n_ps(&self, z: &Scalar) -> Approx {
        self.poch_with(&self.q2n_ps, z)
    }

    /// `Theta_p(z)`
    pub fn theta_p(&self, z: &Scalar) -> Result<Approx, QError> {
        self.theta_with(&self.plan_p, &self.pp.p, z)
    }

    /// `Theta_{p*}(z)`
    pub fn theta_ps(&self, z: &Scalar) -> Result<Approx, QError> {
        self.theta_with(&self.plan_ps, &self.pp.ps, z)
    }

    /// `Theta_{q^{2N}}(z)`
    pub fn theta_q2n(&self, z: &Scalar) -> Result<Approx, QError> {
        let t = self.pp.qpow_f64(2.0 * self.pp.n as f64);
        self.theta_with(&self.plan_q2n, &t, z)
    }

    fn theta_with(&self, plan: &PochPlan, t: &Real, z: &Scalar) -> Result<Approx, QError> {
        if z.is_zero() {
            return Err(QError::ZeroArgument);
        }
        let ts = self.s(t);
        let a = self.poch_with(plan, z);
        let b = self.poch_with(plan, &(&ts / z));
        let c = self.poch_with(plan, &ts);
        Ok(a.mul(&b).mul(&c))
    }

    /// `[v] = q^{v^2/r - v} Theta_p(q^{2v}) / (p;p)^3`
    pub fn bracket(&self, v: &Scalar) -> Approx {
        self.bracket_impl(v, false)
    }

    /// `[v]*`, the bracket with `r` replaced by `r*`.
    pub fn bracket_star(&self, v: &Scalar) -> Approx {
        self.bracket_impl(v, true)
    }

    fn bracket_impl(&self, v: &Scalar, star: bool) -> Approx {
        let pp = &self.pp;
        let (rr, nome_poch, tail) = if star {
            (&pp.rs, &self.psps_poch, self.tail_ps)
        } else {
            (&pp.r, &self.pp_poch, self.tail_p)
        };
        let expo = v.sqr().scale(&rr.clone().recip()) - v;
        let gauss = self.qpow_c(&expo);
        let z = self.z_of_v(v);
        let th = if star { self.theta_ps(&z) } else { self.theta_p(&z) }.expect("q^{2v} is never zero");
        let denom = nome_poch.powi(3);
        Approx { value: gauss * th.value / denom, rel_tail: th.rel_tail + 3.0 * tail }
    }

    /// `kappa = (p;p)(p* q^2; p*) / ((p*;p*)(p q^2; p))`
    pub fn kappa(&self) -> Approx {
        let q2 = self.qs(2.0);
        let a = self.poch_ps(&(&self.s(&self.pp.ps) * &q2));
        let b = self.poch_p(&(&self.s(&self.pp.p) * &q2));
        let num = Approx { value: self.pp_poch.clone(), rel_tail: self.tail_p }.mul(&a);
        let den = Approx { value: self.psps_poch.clone(), rel_tail: self.tail_ps }.mul(&b);
        num.div(&den)
    }

    /// `rho^+(v)`, or `rho^{+*}(v)` when `star` is set (all of `r, p, {.}` starred).
    pub fn rho_plus(&self, v: &Scalar, star: bool) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let (rr, nome) = if star { (&pp.rs, &pp.ps) } else { (&pp.r, &pp.p) };
        let cu = |w: Scalar| if star { self.curly_star(&w) } else { self.curly(&w) };
        let z = self.z_of_v(v);
        let zi = z.recip();
        let pn = self.s(nome);
        // q^{(N-1)/N} z^{(N-1)/(rN)} = q^{(N-1)/N + 2v(N-1)/(rN)}
        let frac = Real::with_val(pp.prec, pp.n - 1) / pp.n as u32;
        let e = v.scale(&(Real::with_val(pp.prec, &frac * 2u32) / rr)) + Scalar::from_real(&frac);
        let pre = Approx::exact(self.qpow_c(&e));
        let num = cu(&pn * &self.qs(2.0) * &z)
            .mul(&cu(&pn * &self.qs(2.0 * n - 2.0) * &z))
            .mul(&cu(zi.clone()))
            .mul(&cu(&self.qs(2.0 * n) * &zi));
        let den = cu(&pn * &z)
            .mul(&cu(&pn * &self.qs(2.0 * n) * &z))
            .mul(&cu(&self.qs(2.0) * &zi))
            .mul(&cu(&self.qs(2.0 * n - 2.0) * &zi));
        pre.mul(&num).div(&den)
    }

    /// `rho(v) = rho^{+*}(v) / rho^+(v)`
    pub fn rho(&self, v: &Scalar) -> Approx {
        self.rho_plus(v, true).div(&self.rho_plus(v, false))
    }

    /// `mu*(v)`, with `{.}*` read as the full substitution `p -> p*`
    /// (base and arguments alike).
    pub fn mu_star(&self, v: &Scalar) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let z = self.z_of_v(v);
        let zi = z.recip();
        let ps = self.s(&pp.ps);
        let cu = |w: Scalar| self.curly_star(&w);
        let frac = Real::with_val(pp.prec, pp.n - 1) / pp.n as u32;
        let a = Real::with_val(pp.prec, pp.rs.clone().recip() - 1u32) * frac * 2u32;
        let pre = Approx::exact(self.qpow_c(&v.scale(&a)));
        let num = cu(&ps * &self.qs(2.0 * n - 2.0) * &z)
            .mul(&cu(&self.qs(2.0) * &z))
            .mul(&cu(&ps * &zi))
            .mul(&cu(&self.qs(2.0 * n) * &zi));
        let den = cu(&ps * &z)
            .mul(&cu(&self.qs(2.0 * n) * &z))
            .mul(&cu(&ps * &self.qs(2.0 * n - 2.0) * &zi))
            .mul(&cu(&self.qs(2.0) * &zi));
        pre.mul(&num).div(&den)
    }

    /// `phi_N` as a function of `v` (`z = q^{2v}`).
    pub fn phi_n(&self, v: &Scalar) -> Result<Approx, QError> {
        let z = self.z_of_v(v);
        self.phi_n_z(&z)
    }

    pub fn phi_n_z(&self, z: &Scalar) -> Result<Approx, QError> {
        let ps = self.s(&self.pp.ps);
        let psi = ps.recip();
        let q2 = self.qs(2.0);
        let qm2 = self.qs(-2.0);
        let num = self
            .theta_q2n(&(&q2 * z))?
            .mul(&self.theta_q2n(&(&ps * z))?)
            .mul(&self.theta_q2n(&(&psi * &qm2 * z))?);
        let den = self
            .theta_q2n(&(&qm2 * z))?
            .mul(&self.theta_q2n(&(&psi * z))?)
            .mul(&self.theta_q2n(&(&ps * &q2 * z))?);
        if den.value.is_zero() {
            return Err(QError::Pole("phi_N".into()));
        }
        Ok(num.div(&den))
    }

    fn sqrt_m1_pow(&self, k: i64) -> Scalar {
        let prec = self.pp.prec;
        match k.rem_euclid(4) {
            0 => Scalar::one(prec),
            1 => Scalar::from_f64_pair(prec, 0.0, 1.0),
            2 => Scalar::from_f64(prec, -1.0),
            _ => Scalar::from_f64_pair(prec, 0.0, -1.0),
        }
    }

    /// Shared prefactor of `g_N` and `C_n`.
    fn inversion_prefactor(&self) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let e = Real::with_val(pp.prec, (n + 1.0) / 2.0) / &pp.rs + (n * n - 1.0) / 2.0;
        let qpart = Scalar::from_real(&pp.qpow(&e));
        let ps = self.s(&pp.ps);
        let ratio = self.poch_ps(&(&ps * &self.qs(2.0))).div(&Approx { value: self.psps_poch.clone(), rel_tail: self.tail_ps });
        ratio.powi(pp.n as i64).scale(&(self.sqrt_m1_pow(pp.n as i64) * qpart))
    }

    /// The inversion constant `g_N`.
    pub fn g_n(&self) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let ps = self.s(&pp.ps);
        let p = self.s(&pp.p);
        let q2n = self.qs(2.0 * n);
        let num = self.poch_q2n_ps(&(&p * &q2n)).mul(&self.poch_q2n_ps(&(&q2n * &self.qs(-2.0))));
        let den = self.poch_q2n_ps(&(&q2n * &ps)).mul(&self.poch_q2n_ps(&q2n));
        self.inversion_prefactor().mul(&num).div(&den)
    }

    /// The dual inversion constant `g'_N`.
    pub fn g_n_prime(&self) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let e = -(Real::with_val(pp.prec, (n + 1.0) / 2.0) / &pp.rs) - (n * n - 1.0) / 2.0;
        let qpart = Scalar::from_real(&pp.qpow(&e));
        let ps = self.s(&pp.ps);
        let p = self.s(&pp.p);
        let qm2 = self.qs(-2.0);
        let psps = Approx { value: self.psps_poch.clone(), rel_tail: self.tail_ps };
        let den1 = psps.powi(2 * pp.n as i64 - 3).mul(&self.poch_ps(&qm2).powi(pp.n as i64));
        let num = self.poch_q2n_ps(&p).mul(&self.poch_q2n_ps(&qm2));
        let den = self.poch_q2n_ps(&ps).mul(&self.poch_q2n_ps(&self.qs(2.0 * n)));
        num.div(&den).div(&den1).scale(&(self.sqrt_m1_pow(-(pp.n as i64)) * qpart))
    }

    /// The fusion constant `C_n`.
    pub fn c_n(&self, k: usize) -> Approx {
        let pp = &self.pp;
        let n = pp.n as f64;
        let ps = self.s(&pp.ps);
        let p = self.s(&pp.p);
        let q2n = self.qs(2.0 * n);
        let psk = ps.powi(-(k as i64));
        let qmn = self.qs(-n);
        let one = Scalar::one(pp.prec);
        let ratio = (&one - &p * &qmn) / (&one - &qmn);
        let num = self
            .poch_q2n_ps(&(&p * &q2n * &psk))
            .mul(&self.poch_q2n_ps(&(&self.qs(2.0 * n - 2.0) * &psk)));
        let den = self.poch_q2n_ps(&(&q2n * &psk)).mul(&self.poch_q2n_ps(&(&q2n * &ps * &psk)));
        self.inversion_prefactor().scale(&ratio.powi(k as i64)).mul(&num).div(&den)
    }

    /// `|oint dz/(2 pi i z) 1/[-v] - target|` on the circle `|z - 1| = radius`
    /// with an `m_quad`-point trapezoid rule. The target is 1 for `[v]` and the
    /// limit of `[v]/[v]*` at `v -> 0` for `[v]*`.
    pub fn contour_norm_residual(&self, m_quad: usize, radius: f64, star: bool) -> Result<f64, QError> {
        let prec = self.pp.prec;
        let one = Scalar::one(prec);
        let mut acc = Scalar::zero(prec);
        for k in 0..m_quad {
            let w = Scalar::i_pi_times(prec, 2 * k as i64, m_quad as i64).exp().scale_f64(radius);
            let z = &one + &w;
            let v = self.v_of_z(&z);
            let b = if star { self.bracket_star(&(-&v)) } else { self.bracket(&(-&v)) };
            if b.value.abs_f64() < 1e-300 {
                return Err(QError::ContourHitsZero);
            }
            acc += &(&w / &z / &b.value);
        }
        let integral = acc.div_i64(m_quad as i64);
        let target = if star {
            let eps = Scalar::from_real(&Real::with_val(prec, Real::i_exp(1, -(prec as i32) / 2)));
            self.bracket(&eps).value / self.bracket_star(&eps).value
        } else {
            one
        };
        Ok((integral - target).abs_f64())
    }
}

impl QSpecial {
    /// Evaluate a function by name: `qnum n`, `theta z t`, `theta_p z`,
    /// `bracket v`, `bracket_star v`, `kappa`, `rho_plus v`, `rho_plus_star v`,
    /// `rho v`, `mu_star v`, `phiN z`, `g_N`, `g_N_prime`, `C_n n`.
    pub fn eval_named(&self, name: &str, args: &[Scalar]) -> Result<Approx, QError> {
        let want = match name {
            "kappa" | "g_N" | "g_N_prime" => 0,
            "theta" => 2,
            n if FUNCTIONS.contains(&n) => 1,
            _ => return Err(QError::Unknown(name.to_string())),
        };
        if args.len() != want {
            return Err(QError::Arity { name: name.to_string(), want, got: args.len() });
        }
        let bad = |msg: &str| QError::Argument { name: name.to_string(), msg: msg.to_string() };
        let real_arg = |x: &Scalar| if x.im().is_zero() { Ok(x.re()) } else { Err(bad("argument must be real")) };
        Ok(match name {
            "qnum" => Approx::exact(Scalar::from_real(&self.qnum(&real_arg(&args[0])?))),
            "theta" => theta(&args[0], &real_arg(&args[1])?)?,
            "theta_p" => self.theta_p(&args[0])?,
            "bracket" => self.bracket(&args[0]),
            "bracket_star" => self.bracket_star(&args[0]),
            "kappa" => self.kappa(),
            "rho_plus" => self.rho_plus(&args[0], false),
            "rho_plus_star" => self.rho_plus(&args[0], true),
            "rho" => self.rho(&args[0]),
            "mu_star" => self.mu_star(&args[0]),
            "phiN" => self.phi_n_z(&args[0])?,
            "g_N" => self.g_n(),
            "g_N_prime" => self.g_n_prime(),
            "C_n" => {
                let k = real_arg(&args[0])?.to_f64();
                if k < 0.0 || k.fract() != 0.0 || k > 64.0 {
                    return Err(bad("n must be an integer in 0..=64"));
                }
                self.c_n(k as usize)
            }
            _ => unreachable!("checked above"),
        })
    }
}

/// Seeded spectral points `v` with `Re v` in (-2, 2) and `Im v` in (-1, 1).
pub fn random_points(count: usize, seed: u64, prec: u32) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Scalar::from_f64_pair(prec, rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

fn suite(qs: &QSpecial, name: &str, relation: &str, threshold: f64) -> RelationReport {
    RelationReport::new(name, relation, qs.pp.record(), 0, threshold)
}

/// Zero, oddness and `r`-antiperiodicity of `[v]` and `[v]*`.
pub fn check_brackets(qs: &QSpecial, pts: &[Scalar]) -> RelationReport {
    let mut rep = suite(qs, "qs.bracket", "[0] = 0, [-v] = -[v], [v+r] = -[v] (and starred)", 1e-25);
    let prec = qs.pp.prec;
    for star in [false, true] {
        let br = |v: &Scalar| if star { qs.bracket_star(v) } else { qs.bracket(v) };
        let period = Scalar::from_real(if star { &qs.pp.rs } else { &qs.pp.r });
        rep.push(br(&Scalar::zero(prec)).value.abs_f64());
        for v in pts {
            let a = br(v);
            let odd = br(&(-v));
            let per = br(&(v + &period));
            rep.push((&odd.value + &a.value).abs_f64() / a.value.abs_f64().max(1e-300));
            rep.push((&per.value + &a.value).abs_f64() / a.value.abs_f64().max(1e-300));
            rep.bound(a.rel_tail + odd.rel_tail + per.rel_tail);
        }
    }
    rep.finish()
}

/// `Theta_p(1) = 0` and `Theta_p(p z) = -z^{-1} Theta_p(z)` at `z = q^{2v}`.
pub fn check_theta(qs: &QSpecial, pts: &[Scalar]) -> RelationReport {
    let mut rep = suite(qs, "qs.theta", "Theta_p(1) = 0, Theta_p(pz) = -Theta_p(z)/z", 1e-25);
    let prec = qs.pp.prec;
    let p = Scalar::from_real(&qs.pp.p);
    match qs.theta_p(&Scalar::one(prec)) {
        Ok(t) => rep.push(t.value.abs_f64()),
        Err(e) => return rep.fail(e.to_string()),
    }
    for v in pts {
        let z = qs.z_of_v(v);
        let (Ok(a), Ok(b)) = (qs.theta_p(&z), qs.theta_p(&(&p * &z))) else {
            return rep.fail("theta evaluated at zero");
        };
        let want = -(&a.value / &z);
        rep.push(b.value.rel_dist(&want, 1e-300));
        rep.bound(a.rel_tail + b.rel_tail);
    }
    rep.finish()
}

/// Contour normalization of `1/[-v]` and `1/[-v]*` around `z = 1`.
pub fn check_contour(qs: &QSpecial, m_quad: usize) -> RelationReport {
    let mut rep = suite(qs, "qs.contour", "oint dz/(2 pi i z [-v]) = 1, starred against [v]/[v]* at v -> 0", 1e-10);
    for star in [false, true] {
        match qs.contour_norm_residual(m_quad, 0.5, star) {
            Ok(r) => rep.push(r),
            Err(e) => return rep.fail(e.to_string()),
        }
        if let Ok(half) = qs.contour_norm_residual(m_quad / 2, 0.5, star) {
            rep.note(format!("star={star}: residual at {} points {half:.3e}", m_quad / 2));
        }
    }
    rep.finish()
}

/// `phi_N(z) phi_N(1/z) = 1`.
pub fn check_phi_unitarity(qs: &QSpecial, pts: &[Scalar]) -> RelationReport {
    let mut rep = suite(qs, "qs.phi", "phi_N(z) phi_N(1/z) = 1", 1e-25);
    let one = Scalar::one(qs.pp.prec);
    for v in pts {
        let (Ok(a), Ok(b)) = (qs.phi_n(v), qs.phi_n(&(-v))) else {
            rep.note("sample at a pole of phi_N skipped");
            continue;
        };
        rep.push((&a.value * &b.value).rel_dist(&one, 1.0));
        rep.bound(a.rel_tail + b.rel_tail);
    }
    rep.finish()
}

/// All special-function suites.
pub fn all_reports(qs: &QSpecial, count: usize, seed: u64) -> Vec<RelationReport> {
    let pts = random_points(count, seed, qs.pp.prec);
    vec![check_brackets(qs, &pts), check_theta(qs, &pts), check_contour(qs, 2048), check_phi_unitarity(qs, &pts)]
}
