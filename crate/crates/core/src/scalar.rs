//! High-precision complex scalars.
//!
//! `Scalar` wraps an MPFR-backed complex number. Binary operations return a
//! value at the larger of the two operand precisions, so mixing precisions
//! never silently loses bits.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

/// Real numbers at working precision.
pub type Real = Float;

/// Default working precision in bits.
pub const DEFAULT_PREC: u32 = 128;

#[derive(Clone, Debug, PartialEq)]
pub struct Scalar(Complex);

impl Scalar {
    pub fn zero(prec: u32) -> Self {
        Scalar(Complex::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        Scalar(Complex::with_val(prec, 1))
    }

    pub fn from_f64(prec: u32, re: f64) -> Self {
        Scalar(Complex::with_val(prec, re))
    }

    pub fn from_f64_pair(prec: u32, re: f64, im: f64) -> Self {
        Scalar(Complex::with_val(prec, (re, im)))
    }

    pub fn from_real(x: &Real) -> Self {
        Scalar(Complex::with_val(x.prec(), (x, 0)))
    }

    pub fn from_parts(re: &Real, im: &Real) -> Self {
        let prec = re.prec().max(im.prec());
        Scalar(Complex::with_val(prec, (re, im)))
    }

    pub fn from_complex(c: Complex) -> Self {
        Scalar(c)
    }

    /// `i * pi * k` for a rational multiple `k = num/den`.
    pub fn i_pi_times(prec: u32, num: i64, den: i64) -> Self {
        let mut t = Float::with_val(prec, Constant::Pi);
        t *= num;
        t /= den;
        Scalar(Complex::with_val(prec, (0, t)))
    }

    pub fn inner(&self) -> &Complex {
        &self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec().0.max(self.0.prec().1)
    }

    pub fn re(&self) -> Real {
        self.0.real().clone()
    }

    pub fn im(&self) -> Real {
        self.0.imag().clone()
    }

    pub fn abs(&self) -> Real {
        Float::with_val(self.prec(), self.0.abs_ref())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.0.real().to_f64(), self.0.imag().to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.0.real().is_zero() && self.0.imag().is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.real().is_finite() && self.0.imag().is_finite()
    }

    pub fn exp(&self) -> Self {
        Scalar(self.0.clone().exp())
    }

    /// Principal logarithm.
    pub fn ln(&self) -> Self {
        Scalar(self.0.clone().ln())
    }

    pub fn sqr(&self) -> Self {
        Scalar(self.0.clone().square())
    }

    pub fn recip(&self) -> Self {
        Scalar(self.0.clone().recip())
    }

    /// Integer power by repeated squaring (exact sign handling for negative `n`).
    pub fn powi(&self, n: i64) -> Self {
        Scalar(self.0.clone().pow(n as i32))
    }

    /// Real multiple of `self`.
    pub fn scale(&self, k: &Real) -> Self {
        let prec = self.prec().max(k.prec());
        Scalar(Complex::with_val(prec, &self.0 * k))
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        Scalar(Complex::with_val(self.prec(), &self.0 * k))
    }

    pub fn mul_i64(&self, k: i64) -> Self {
        Scalar(Complex::with_val(self.prec(), &self.0 * k))
    }

    pub fn div_i64(&self, k: i64) -> Self {
        Scalar(Complex::with_val(self.prec(), &self.0 / k))
    }

    /// `1 - self`
    pub fn one_minus(&self) -> Self {
        Scalar(Complex::with_val(self.prec(), 1 - &self.0))
    }

    /// Relative distance `|self - other| / max(|other|, floor)`.
    pub fn rel_dist(&self, other: &Scalar, floor: f64) -> f64 {
        let d = (self - other).abs_f64();
        let s = other.abs_f64().max(floor);
        d / s
    }
}

pub fn pi(prec: u32) -> Real {
    Float::with_val(prec, Constant::Pi)
}

pub fn real(prec: u32, x: f64) -> Real {
    Float::with_val(prec, x)
}

/// Parse a decimal literal at the given precision.
pub fn parse_real(prec: u32, s: &str) -> Option<Real> {
    Float::parse(s.trim()).ok().map(|v| Float::with_val(prec, v))
}

/// Parse `a`, `bi`, `a+bi` or `a-bi` (also `j` for the imaginary unit).
pub fn parse_scalar(prec: u32, s: &str) -> Option<Scalar> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return None;
    }
    let Some(body) = t.strip_suffix(['i', 'j']) else {
        return parse_real(prec, &t).map(|x| Scalar::from_real(&x));
    };
    // split before the last sign that is not leading and not an exponent sign
    let bytes = body.as_bytes();
    let cut = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match cut {
        Some(k) => (parse_real(prec, &body[..k])?, &body[k..]),
        None => (Real::new(prec), body),
    };
    let im = match im {
        "" | "+" => Real::with_val(prec, 1),
        "-" => Real::with_val(prec, -1),
        x => parse_real(prec, x)?,
    };
    Some(Scalar::from_parts(&re, &im))
}

/// `x^e` for an integer exponent.
pub fn powi_real(x: &Real, e: i32) -> Real {
    Float::with_val(x.prec(), x.pow(e))
}

/// `base^e` for real base > 0 and real exponent.
pub fn rpow(base: &Real, e: &Real) -> Real {
    let prec = base.prec().max(e.prec());
    Float::with_val(prec, base.pow(e))
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(20);
        let re = self.0.real().to_string_radix(10, Some(digits));
        let im = self.0.imag();
        if im.is_zero() {
            write!(f, "{re}")
        } else {
            let sign = if im.is_sign_negative() { '-' } else { '+' };
            let ai = Float::with_val(im.prec(), im.abs_ref());
            write!(f, "{re} {sign} {}i", ai.to_string_radix(10, Some(digits)))
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $op:tt) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                let prec = self.prec().max(rhs.prec());
                Scalar(Complex::with_val(prec, &self.0 $op &rhs.0))
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                &self $op &rhs
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                &self $op rhs
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self $op &rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);
binop!(Mul, mul, *);
binop!(Div, div, /);

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = &*self + rhs;
    }
}

impl SubAssign<&Scalar> for Scalar {
    fn sub_assign(&mut self, rhs: &Scalar) {
        *self = &*self - rhs;
    }
}

impl MulAssign<&Scalar> for Scalar {
    fn mul_assign(&mut self, rhs: &Scalar) {
        *self = &*self * rhs;
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0.clone())
    }
}
