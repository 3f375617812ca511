//! Dual-mode scalars.
//!
//! Every algebraic routine in the crate is generic over [`Scalar`], which is
//! implemented for exact [`Rational`] numbers and for `f64`. Structure
//! constants and dilatation weights are stored as [`Constant`]s carrying both
//! representations, so the floating variant is always derived from the exact
//! one and never the other way around.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// An exact rational together with its nearest `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct Constant {
    exact: Rational,
    approx: f64,
}

impl Constant {
    pub fn new(exact: Rational) -> Self {
        let approx = Scalar::to_f64(&exact);
        Self { exact, approx }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        Self::new(Rational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_integer(n: i64) -> Self {
        Self::from_ratio(n, 1)
    }

    pub fn exact(&self) -> &Rational {
        &self.exact
    }

    pub fn approx(&self) -> f64 {
        self.approx
    }

    pub fn is_zero(&self) -> bool {
        self.exact.is_zero()
    }

    /// `Some(n)` when the constant is a nonnegative integer that fits in `u32`.
    pub fn as_exponent(&self) -> Option<u32> {
        if self.exact.is_integer() && !self.exact.is_negative() {
            self.exact.to_integer().to_u32()
        } else {
            None
        }
    }
}

impl std::fmt::Display for Constant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.exact)
    }
}

/// Field arithmetic shared by the exact and floating coordinate modes.
pub trait Scalar: Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static {
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_constant(c: &Constant) -> Self;

    /// Converts a finite float. Rationals take the exact binary value.
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    /// `self^w` for a dilatation weight `w`. Exact mode requires `w` to be a
    /// nonnegative integer.
    fn pow_weight(&self, w: &Constant) -> Result<Self>;

    fn from_i64(n: i64) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_constant(c: &Constant) -> Self {
        c.approx
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn pow_weight(&self, w: &Constant) -> Result<Self> {
        Ok(match w.as_exponent() {
            Some(n) => self.powi(n as i32),
            None => self.powf(w.approx),
        })
    }

    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_constant(c: &Constant) -> Self {
        c.exact.clone()
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        // Large numerators and denominators overflow a direct conversion; the
        // shifted quotient keeps full precision.
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() && (v != 0.0 || self.is_zero()) {
                return v;
            }
        }
        let (num, den) = (self.numer(), self.denom());
        let shift = num.bits() as i64 - den.bits() as i64 - 60;
        let scaled = if shift >= 0 {
            num / (den << shift as usize)
        } else {
            (num << (-shift) as usize) / den
        };
        scaled.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
    }

    fn pow_weight(&self, w: &Constant) -> Result<Self> {
        match w.as_exponent() {
            Some(n) => Ok(num_traits::pow::pow(self.clone(), n as usize)),
            None => Err(Error::InexactPower {
                weight: w.to_string(),
            }),
        }
    }

    fn from_i64(n: i64) -> Self {
        Rational::from_integer(BigInt::from(n))
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `p/q`, an integer, or a finite decimal such as `-0.125` or `1e-3`
/// into an exact rational.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("0{int_part}{frac_part}").parse().ok()?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = if scale >= 0 {
        Rational::from_integer(all * num_traits::pow::pow(ten, scale as usize))
    } else {
        Rational::new(all, num_traits::pow::pow(ten, (-scale) as usize))
    };
    if negative {
        value = -value;
    }
    Some(value)
}

/// Renders a rational as a short exact string (`3`, `-1/2`).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.to_integer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}
