//! The dynamical R-matrix on `C^N (x) C^N` and its consistency checks.
//!
//! `Rbar(u, s) = sum_j E_jj (x) E_jj
//!   + sum_{j<l} ( b(u, s_jl) E_jj (x) E_ll + bbar(u) E_ll (x) E_jj )
//!   + sum_{j<l} ( c(u, s_jl) E_jl (x) E_lj + cbar(u, s_jl) E_lj (x) E_jl )`
//!
//! with `s_jl = s_j + .. + s_{l-1}`. Matrices are stored row-major over the
//! pair basis `v_a (x) v_b -> a N + b` (indices 0-based in code, 1-based in
//! the formulas).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::params::QParams;
use crate::qspecial::{Approx, QSpecial};
use crate::report::RelationReport;
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum RMatError {
    #[error("bracket [{what}] vanishes at {at}")]
    Singular { what: &'static str, at: String },
    #[error("expected {expected} dynamical parameters, got {got}")]
    Dynamical { expected: usize, got: usize },
}

/// Below this modulus a bracket in a denominator is treated as a zero.
const BRACKET_ZERO: f64 = 1e-30;

/// Which family of brackets the entries use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    /// `[v]` with nome `p = q^{2r}`
    Plain,
    /// `[v]*` with nome `p* = q^{2r*}`
    Star,
}

#[derive(Clone, Debug)]
pub struct DynRMatrix {
    pub n: usize,
    pub u: Scalar,
    pub s: Vec<Scalar>,
    /// `N^2 x N^2`, row-major
    pub entries: Vec<Scalar>,
    /// Largest relative truncation error of the bracket evaluations.
    pub rel_tail: f64,
}

impl DynRMatrix {
    pub fn dim(&self) -> usize {
        self.n * self.n
    }

    /// Matrix element `<v_a (x) v_b | R | v_c (x) v_d>` (0-based).
    pub fn get(&self, a: usize, b: usize, c: usize, d: usize) -> &Scalar {
        let n = self.n;
        &self.entries[(a * n + b) * n * n + c * n + d]
    }

    fn set(&mut self, a: usize, b: usize, c: usize, d: usize, v: Scalar) {
        let n = self.n;
        self.entries[(a * n + b) * n * n + c * n + d] = v;
    }

    pub fn scale(&self, k: &Scalar) -> DynRMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = &*e * k;
        }
        out
    }
}

/// `s_jl = s_j + .. + s_{l-1}` (1-based `j < l`).
pub fn s_partial(s: &[Scalar], j: usize, l: usize) -> Scalar {
    let prec = s.first().map_or(128, Scalar::prec);
    s[j - 1..l - 1].iter().fold(Scalar::zero(prec), |acc, x| &acc + x)
}

fn bracket(qs: &QSpecial, flavor: Flavor, v: &Scalar) -> Approx {
    match flavor {
        Flavor::Plain => qs.bracket(v),
        Flavor::Star => qs.bracket_star(v),
    }
}

fn nonzero(qs: &QSpecial, flavor: Flavor, what: &'static str, v: &Scalar) -> Result<Approx, RMatError> {
    let b = bracket(qs, flavor, v);
    if !(b.value.abs_f64() > BRACKET_ZERO) {
        let (re, im) = v.to_f64_pair();
        return Err(RMatError::Singular { what, at: format!("{re}{im:+}i") });
    }
    Ok(b)
}

/// The four weights `(b(u,s), bbar(u), c(u,s), cbar(u,s))`.
pub fn weights(qs: &QSpecial, flavor: Flavor, u: &Scalar, s: &Scalar) -> Result<[Approx; 4], RMatError> {
    let prec = u.prec();
    let one = Scalar::one(prec);
    let br = |v: &Scalar| bracket(qs, flavor, v);
    let bs = nonzero(qs, flavor, "s", s)?;
    let bu1 = nonzero(qs, flavor, "u+1", &(u + &one))?;
    let b1 = br(&one);
    let bu = br(u);
    let b = br(&(s + &one)).mul(&br(&(s - &one))).mul(&bu).div(&bs.powi(2)).div(&bu1);
    let bbar = bu.div(&bu1);
    let c = b1.mul(&br(&(s + u))).div(&bs).div(&bu1);
    let cbar = b1.mul(&br(&(s - u))).div(&bs).div(&bu1);
    Ok([b, bbar, c, cbar])
}

fn build(qs: &QSpecial, flavor: Flavor, u: &Scalar, s: &[Scalar]) -> Result<DynRMatrix, RMatError> {
    let n = qs.pp.n;
    if s.len() != n - 1 {
        return Err(RMatError::Dynamical { expected: n - 1, got: s.len() });
    }
    let prec = u.prec();
    let mut m = DynRMatrix {
        n,
        u: u.clone(),
        s: s.to_vec(),
        entries: vec![Scalar::zero(prec); n * n * n * n],
        rel_tail: 0.0,
    };
    for j in 0..n {
        m.set(j, j, j, j, Scalar::one(prec));
    }
    for j in 1..=n {
        for l in j + 1..=n {
            let [b, bbar, c, cbar] = weights(qs, flavor, u, &s_partial(s, j, l))?;
            for w in [&b, &bbar, &c, &cbar] {
                m.rel_tail = m.rel_tail.max(w.rel_tail);
            }
            let (a, d) = (j - 1, l - 1);
            m.set(a, d, a, d, b.value);
            m.set(d, a, d, a, bbar.value);
            // E_jl (x) E_lj : v_l (x) v_j -> v_j (x) v_l
            m.set(a, d, d, a, c.value);
            m.set(d, a, a, d, cbar.value);
        }
    }
    Ok(m)
}

/// `Rbar(u, s)` with the plain brackets.
pub fn build_rbar(qs: &QSpecial, u: &Scalar, s: &[Scalar]) -> Result<DynRMatrix, RMatError> {
    build(qs, Flavor::Plain, u, s)
}

/// `R^+(u, s) = rho^+(u) Rbar(u, s)`
pub fn build_rplus(qs: &QSpecial, u: &Scalar, s: &[Scalar]) -> Result<DynRMatrix, RMatError> {
    let m = build(qs, Flavor::Plain, u, s)?;
    let rho = qs.rho_plus(u, false);
    let mut out = m.scale(&rho.value);
    out.rel_tail += rho.rel_tail;
    Ok(out)
}

/// `R^{+*}(u, s)`: `R^+` with `r` replaced by `r*` throughout.
pub fn build_rstar(qs: &QSpecial, u: &Scalar, s: &[Scalar]) -> Result<DynRMatrix, RMatError> {
    let m = build(qs, Flavor::Star, u, s)?;
    let rho = qs.rho_plus(u, true);
    let mut out = m.scale(&rho.value);
    out.rel_tail += rho.rel_tail;
    Ok(out)
}

/// Positions allowed by weight conservation: `{a, b} = {c, d}` as multisets.
pub fn weight_mask(n: usize) -> Vec<bool> {
    let mut mask = vec![false; n * n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    mask[(a * n + b) * n * n + c * n + d] = (a == c && b == d) || (a == d && b == c);
                }
            }
        }
    }
    mask
}

/// Where the dynamical shift in the face-type Yang-Baxter equation comes from.
///
/// With `Standard` the checked identity is
/// `R12(u12, s + sign h3) R13(u13, s) R23(u23, s + sign h1)
///  = R23(u23, s) R13(u13, s + sign h2) R12(u12, s)`,
/// where `h_k` shifts `s_m` by `delta(k, m) - delta(k, m+1)` for the basis
/// vector `v_k` in that slot. `Mirrored` moves the shifts to the other side:
/// `R12(u12, s) R13(u13, s + sign h2) R23(u23, s)
///  = R23(u23, s + sign h1) R13(u13, s) R12(u12, s + sign h3)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DybeConvention {
    pub mirrored: bool,
    pub sign: i64,
}

impl Default for DybeConvention {
    fn default() -> Self {
        DybeConvention { mirrored: false, sign: 1 }
    }
}

impl std::str::FromStr for DybeConvention {
    type Err = String;
    fn from_str(t: &str) -> Result<Self, String> {
        let (mirrored, sign) = match t {
            "standard" | "standard+" => (false, 1),
            "standard-" => (false, -1),
            "mirrored" | "mirrored+" => (true, 1),
            "mirrored-" => (true, -1),
            _ => return Err(format!("unknown convention `{t}` (standard[+-], mirrored[+-])")),
        };
        Ok(DybeConvention { mirrored, sign })
    }
}

impl std::fmt::Display for DybeConvention {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let base = if self.mirrored { "mirrored" } else { "standard" };
        write!(f, "{base}{}", if self.sign > 0 { "+" } else { "-" })
    }
}

/// `s` shifted by `sign` times the weight of `v_k` (0-based `k`).
pub fn shift_by_weight(s: &[Scalar], k: usize, sign: i64) -> Vec<Scalar> {
    s.iter()
        .enumerate()
        .map(|(m, x)| {
            let w = i64::from(k == m) - i64::from(k == m + 1);
            if w == 0 {
                x.clone()
            } else {
                x + &Scalar::from_f64(x.prec(), (sign * w) as f64)
            }
        })
        .collect()
}

/// Dense `N^3 x N^3` operator on three tensor slots.
#[derive(Clone, Debug)]
struct Op3 {
    n: usize,
    m: Vec<Scalar>,
}

impl Op3 {
    fn dim(&self) -> usize {
        self.n * self.n * self.n
    }

    fn mul(&self, o: &Op3) -> Op3 {
        let d = self.dim();
        let prec = self.m[0].prec();
        let mut out = vec![Scalar::zero(prec); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.m[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let b = &o.m[k * d + j];
                    if !b.is_zero() {
                        out[i * d + j] += &(a * b);
                    }
                }
            }
        }
        Op3 { n: self.n, m: out }
    }
}

/// Embed `R(u, s + sign h_spectator)` acting on slots `(x, y)` of three.
/// `rm(k)` returns the two-slot matrix for spectator basis vector `k`,
/// or the same matrix for every `k` when the factor carries no shift.
fn embed(n: usize, slots: (usize, usize), rm: &dyn Fn(usize) -> DynRMatrix) -> Op3 {
    let d = n * n * n;
    let spectator = 3 - slots.0 - slots.1;
    let prec = rm(0).u.prec();
    let mut m = vec![Scalar::zero(prec); d * d];
    let idx = |t: [usize; 3]| (t[0] * n + t[1]) * n + t[2];
    for k in 0..n {
        let r = rm(k);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for e in 0..n {
                        let v = r.get(a, b, c, e);
                        if v.is_zero() {
                            continue;
                        }
                        let mut row = [0; 3];
                        let mut col = [0; 3];
                        row[slots.0] = a;
                        row[slots.1] = b;
                        row[spectator] = k;
                        col[slots.0] = c;
                        col[slots.1] = e;
                        col[spectator] = k;
                        m[idx(row) * d + idx(col)] = v.clone();
                    }
                }
            }
        }
    }
    Op3 { n, m }
}

/// Relative residual of the face-type Yang-Baxter equation for `Rbar`.
///
/// Returns `(max |LHS - RHS| / max |LHS|, truncation bound)`.
pub fn check_dybe_once(
    qs: &QSpecial,
    us: [&Scalar; 3],
    s: &[Scalar],
    conv: DybeConvention,
) -> Result<(f64, f64), RMatError> {
    let n = qs.pp.n;
    let u12 = us[0] - us[1];
    let u13 = us[0] - us[2];
    let u23 = us[1] - us[2];
    // Precompute every matrix, propagating errors before embedding.
    let plain = |u: &Scalar| build_rbar(qs, u, s);
    let shifted = |u: &Scalar| -> Result<Vec<DynRMatrix>, RMatError> {
        (0..n).map(|k| build_rbar(qs, u, &shift_by_weight(s, k, conv.sign))).collect()
    };
    let (r12, r13, r23) = (plain(&u12)?, plain(&u13)?, plain(&u23)?);
    let (r12h, r13h, r23h) = (shifted(&u12)?, shifted(&u13)?, shifted(&u23)?);
    let mut tail = 0.0f64;
    for m in [&r12, &r13, &r23].into_iter().chain(r12h.iter()).chain(r13h.iter()).chain(r23h.iter()) {
        tail = tail.max(m.rel_tail);
    }
    let fixed = |m: &DynRMatrix, slots| embed(n, slots, &|_| m.clone());
    let moving = |ms: &Vec<DynRMatrix>, slots| embed(n, slots, &|k| ms[k].clone());
    let (lhs, rhs) = if conv.mirrored {
        (
            fixed(&r12, (0, 1)).mul(&moving(&r13h, (0, 2))).mul(&fixed(&r23, (1, 2))),
            moving(&r23h, (1, 2)).mul(&fixed(&r13, (0, 2))).mul(&moving(&r12h, (0, 1))),
        )
    } else {
        (
            moving(&r12h, (0, 1)).mul(&fixed(&r13, (0, 2))).mul(&moving(&r23h, (1, 2))),
            fixed(&r23, (1, 2)).mul(&moving(&r13h, (0, 2))).mul(&fixed(&r12, (0, 1))),
        )
    };
    let scale = lhs.m.iter().map(Scalar::abs_f64).fold(0.0f64, f64::max).max(1e-300);
    let diff = lhs.m.iter().zip(&rhs.m).map(|(a, b)| (a - b).abs_f64()).fold(0.0f64, f64::max);
    Ok((diff / scale, tail * 10.0))
}

/// One random draw of spectral and dynamical parameters.
#[derive(Clone, Debug)]
pub struct Draw {
    pub u: [Scalar; 3],
    pub s: Vec<Scalar>,
}

/// Reproducible draws: draw `i` uses its own ChaCha stream of `seed`.
pub fn random_draws(count: usize, seed: u64, pp: &QParams) -> Vec<Draw> {
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let mut c = |lo: f64, hi: f64, im: f64| {
                Scalar::from_f64_pair(pp.prec, rng.gen_range(lo..hi), rng.gen_range(-im..im))
            };
            let u = [c(-0.8, 0.8, 0.4), c(-0.8, 0.8, 0.4), c(-0.8, 0.8, 0.4)];
            let s = (1..pp.n).map(|_| c(0.3, 2.7, 0.5)).collect();
            Draw { u, s }
        })
        .collect()
}

fn report(pp: &QParams, suite: &str, relation: &str, threshold: f64) -> RelationReport {
    RelationReport::new(suite, relation, pp.record(), 0, threshold)
}

/// Dynamical Yang-Baxter residual over `draws` seeded random parameter sets.
pub fn check_dybe(qs: &QSpecial, draws: usize, seed: u64, conv: DybeConvention) -> RelationReport {
    let pp = &qs.pp;
    let mut rep = report(pp, "rmat.dybe", "R12(s+h3) R13(s) R23(s+h1) = R23(s) R13(s+h2) R12(s)", 1e-12);
    rep.note(format!("shift convention {conv}"));
    let results: Vec<_> = random_draws(draws, seed, pp)
        .par_iter()
        .map(|d| check_dybe_once(qs, [&d.u[0], &d.u[1], &d.u[2]], &d.s, conv))
        .collect();
    let mut singular = 0;
    for r in results {
        match r {
            Ok((res, tail)) => {
                rep.push(res);
                rep.bound(tail);
            }
            Err(_) => singular += 1,
        }
    }
    if singular > 0 {
        rep.note(format!("{singular} draws hit a bracket zero and were skipped"));
    }
    rep.finish()
}

/// The zero pattern of `Rbar` equals the weight-conservation mask, and every
/// allowed entry is nonzero at generic parameters.
pub fn check_weight_conservation(qs: &QSpecial, u: &Scalar, s: &[Scalar]) -> RelationReport {
    let pp = &qs.pp;
    let mut rep = report(pp, "rmat.weights", "Rbar preserves the multiset of tensor indices", 1e-30);
    let m = match build_rbar(qs, u, s) {
        Ok(m) => m,
        Err(e) => return rep.fail(e.to_string()),
    };
    let mask = weight_mask(pp.n);
    let allowed = mask.iter().filter(|b| **b).count();
    let expected = pp.n + 4 * (pp.n * (pp.n - 1) / 2);
    if allowed != expected {
        return rep.fail(format!("mask has {allowed} positions, expected {expected}"));
    }
    let mut bad = 0usize;
    for (e, &ok) in m.entries.iter().zip(&mask) {
        let violation = if ok { e.is_zero() } else { !e.is_zero() };
        rep.push(if violation { 1.0 } else { 0.0 });
        bad += usize::from(violation);
    }
    rep.note(format!("{allowed} allowed positions, {bad} violations"));
    rep.finish()
}

/// `Rbar(0, s)`: `b = bbar = 0`, `c = cbar = 1`, unit diagonal.
pub fn check_initial(qs: &QSpecial, s: &[Scalar]) -> RelationReport {
    let pp = &qs.pp;
    let mut rep = report(pp, "rmat.init", "Rbar(0, s) = P (the flip on C^N (x) C^N)", 1e-25);
    let zero = Scalar::zero(pp.prec);
    let m = match build_rbar(qs, &zero, s) {
        Ok(m) => m,
        Err(e) => return rep.fail(e.to_string()),
    };
    let n = pp.n;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let want = if a == d && b == c { 1.0 } else { 0.0 };
                    let got = m.get(a, b, c, d);
                    rep.push((got - &Scalar::from_f64(pp.prec, want)).abs_f64());
                }
            }
        }
    }
    rep.bound(m.rel_tail);
    rep.finish()
}

/// Fixed generic point for the structural suites.
pub fn generic_point(pp: &QParams) -> (Scalar, Vec<Scalar>) {
    let u = Scalar::from_f64_pair(pp.prec, 0.3, 0.07);
    let s = (0..pp.n - 1).map(|i| Scalar::from_f64_pair(pp.prec, 2.1 + 0.37 * i as f64, 0.11)).collect();
    (u, s)
}

pub fn all_reports(qs: &QSpecial, draws: usize, seed: u64, conv: DybeConvention) -> Vec<RelationReport> {
    let pp = &qs.pp;
    let (u, s) = generic_point(pp);
    vec![check_dybe(qs, draws, seed, conv), check_weight_conservation(qs, &u, &s), check_initial(qs, &s)]
}
