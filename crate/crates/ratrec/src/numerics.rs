//! Exact rational scalars and the shared numeric plumbing.
//!
//! Everything the exact pipeline computes lives in [`Rational`], a reduced
//! arbitrary-precision fraction. [`Scalar`] tags a value with its arithmetic
//! mode (exact or `f64`) so the iteration, closed-form, and analysis layers
//! can run in either mode without ever mixing the two silently: cross-mode
//! arithmetic is an error, never a coercion.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Default ceiling on the bit length of exact numerators and denominators.
///
/// Exact trajectories can grow digits linearly in the step count; the guard
/// turns a runaway computation into a reported status instead of an
/// out-of-memory kill. One million bits is far beyond anything the bundled
/// scenarios produce.
pub const DEFAULT_BIT_LIMIT: u64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NumericsError {
    #[error("malformed number `{0}`: expected an integer, a fraction p/q, or a finite decimal")]
    MalformedNumber(String),
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("mode mismatch: exact and float scalars cannot be combined")]
    ModeMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("exact value grew to {bits} bits, past the {limit}-bit guard")]
    ExactBlowup { bits: u64, limit: u64 },
}

/// Arithmetic mode a [`Scalar`] carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Exact => write!(f, "exact"),
            Mode::Float => write!(f, "float"),
        }
    }
}

/// Reduced arbitrary-precision fraction.
///
/// Invariants: denominator positive, gcd(numerator, denominator) = 1. Both
/// are maintained by construction. Renders as `p/q` (the denominator is
/// printed even when it is 1) and parses back from the same syntax, so
/// rendering and parsing round-trip.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(BigRational);

impl Rational {
    pub fn new(numer: BigInt, denom: BigInt) -> Result<Self, NumericsError> {
        if denom.is_zero() {
            return Err(NumericsError::ZeroDenominator);
        }
        Ok(Rational(BigRational::new(numer, denom)))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// Test-friendly constructor; panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Rational(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// The value as an integer, when the denominator is 1.
    pub fn to_bigint(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.0.to_integer())
    }

    pub fn abs(&self) -> Self {
        Rational(self.0.abs())
    }

    pub fn recip(&self) -> Result<Self, NumericsError> {
        if self.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Rational(self.0.recip()))
    }

    pub fn checked_div(&self, rhs: &Rational) -> Result<Self, NumericsError> {
        if rhs.is_zero() {
            return Err(NumericsError::DivisionByZero);
        }
        Ok(Rational(&self.0 / &rhs.0))
    }

    /// Nonnegative integer power by repeated squaring; `x^0 = 1` for every x.
    pub fn pow_u64(&self, exp: u64) -> Self {
        let mut base = self.0.clone();
        let mut acc = BigRational::one();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc *= &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Rational(acc)
    }

    /// Signed integer power; a negative exponent inverts first.
    pub fn pow_i64(&self, exp: i64) -> Result<Self, NumericsError> {
        if exp >= 0 {
            Ok(self.pow_u64(exp as u64))
        } else {
            Ok(self.recip()?.pow_u64(exp.unsigned_abs()))
        }
    }

    /// Bit length of the larger of numerator magnitude and denominator.
    pub fn bits(&self) -> u64 {
        self.0.numer().bits().max(self.0.denom().bits())
    }

    pub fn check_bits(&self, limit: u64) -> Result<(), NumericsError> {
        let bits = self.bits();
        if bits > limit {
            return Err(NumericsError::ExactBlowup { bits, limit });
        }
        Ok(())
    }

    /// Nearest `f64`, saturating to signed infinity when out of range.
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or_else(|| {
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }

    /// The exact value of a finite float (every finite `f64` is rational).
    pub fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Rational)
    }

    pub fn is_negative_integer(&self) -> bool {
        self.is_integer() && self.is_negative()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = NumericsError;

    /// Accepts `[-]digits`, `[-]digits/digits`, and `[-]digits.digits`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || NumericsError::MalformedNumber(s.to_string());
        let (sign, body) = match s.strip_prefix('-') {
            Some(rest) => (-1, rest),
            None => (1, s),
        };
        let all_digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        let parse_digits = |t: &str| BigInt::parse_bytes(t.as_bytes(), 10).ok_or_else(malformed);

        if let Some((num, den)) = body.split_once('/') {
            if !all_digits(num) || !all_digits(den) {
                return Err(malformed());
            }
            let den = parse_digits(den)?;
            if den.is_zero() {
                return Err(NumericsError::ZeroDenominator);
            }
            return Rational::new(sign * parse_digits(num)?, den);
        }
        if let Some((int, frac)) = body.split_once('.') {
            if !all_digits(int) || !all_digits(frac) {
                return Err(malformed());
            }
            let scale = BigInt::from(10u32).pow(frac.len() as u32);
            let numer = parse_digits(int)? * &scale + parse_digits(frac)?;
            return Rational::new(sign * numer, scale);
        }
        if !all_digits(body) {
            return Err(malformed());
        }
        Ok(Rational(BigRational::from_integer(sign * parse_digits(body)?)))
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                Rational(&self.0 $op &rhs.0)
            }
        }
        impl $trait for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                Rational(self.0 $op rhs.0)
            }
        }
    };
}

forward_binop!(Add, add, +);
forward_binop!(Sub, sub, -);
forward_binop!(Mul, mul, *);

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-&self.0)
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Parses `[-]digits`, `[-]digits/digits`, or `[-]digits.digits` into an
/// exact [`Rational`]. Free-function form of the `FromStr` impl.
pub fn rat_from_string(s: &str) -> Result<Rational, NumericsError> {
    s.parse()
}

/// Nonnegative integer power of a scalar in its own mode; `x^0 = 1`.
pub fn int_pow(x: &Scalar, p: u64) -> Scalar {
    x.int_pow(p)
}

/// Rising factorial z(z+1)...(z+k-1), with the empty product equal to 1.
pub fn rising_factorial(z: &Rational, k: u64) -> Rational {
    let mut acc = Rational::one();
    let mut term = z.clone();
    let one = Rational::one();
    for _ in 0..k {
        acc = &acc * &term;
        term = &term + &one;
    }
    acc
}

/// Mode-tagged value: an exact rational or an IEEE `f64`.
///
/// Arithmetic is checked: combining an exact scalar with a float one yields
/// [`NumericsError::ModeMismatch`] instead of a lossy conversion. Crossing
/// modes is always spelled out via [`Scalar::to_float_mode`].
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn exact_int(n: i64) -> Self {
        Scalar::Exact(Rational::from_integer(n))
    }

    /// Test-friendly exact constructor; panics on a zero denominator.
    pub fn exact_ratio(numer: i64, denom: i64) -> Self {
        Scalar::Exact(Rational::ratio(numer, denom))
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Float,
        }
    }

    pub fn zero(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::zero()),
            Mode::Float => Scalar::Float(0.0),
        }
    }

    pub fn one(mode: Mode) -> Self {
        match mode {
            Mode::Exact => Scalar::Exact(Rational::one()),
            Mode::Float => Scalar::Float(1.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(v) => *v == 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            Scalar::Exact(_) => true,
            Scalar::Float(v) => v.is_finite(),
        }
    }

    pub fn as_exact(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(v) => *v,
        }
    }

    /// The same value in float mode (exact values round to nearest).
    pub fn to_float_mode(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    /// The exact value of this scalar, when it has one: exact scalars as-is,
    /// finite floats converted bit-exactly.
    pub fn to_exact(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Float(v) => Rational::from_f64_exact(*v),
        }
    }

    pub fn add(&self, rhs: &Scalar) -> Result<Scalar, NumericsError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(NumericsError::ModeMismatch),
        }
    }

    pub fn sub(&self, rhs: &Scalar) -> Result<Scalar, NumericsError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a - b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a - b)),
            _ => Err(NumericsError::ModeMismatch),
        }
    }

    pub fn mul(&self, rhs: &Scalar) -> Result<Scalar, NumericsError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(NumericsError::ModeMismatch),
        }
    }

    /// Checked division. Exact mode rejects a zero divisor; float mode
    /// rejects only exact zero (overflow saturates like any float divide).
    pub fn div(&self, rhs: &Scalar) -> Result<Scalar, NumericsError> {
        match (self, rhs) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a.checked_div(b)?)),
            (Scalar::Float(a), Scalar::Float(b)) => {
                if *b == 0.0 {
                    return Err(NumericsError::DivisionByZero);
                }
                Ok(Scalar::Float(a / b))
            }
            _ => Err(NumericsError::ModeMismatch),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(v) => Scalar::Float(-v),
        }
    }

    pub fn abs(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.abs()),
            Scalar::Float(v) => Scalar::Float(v.abs()),
        }
    }

    /// Nonnegative integer power in the scalar's own mode; `x^0 = 1`.
    pub fn int_pow(&self, exp: u64) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(r.pow_u64(exp)),
            Scalar::Float(v) => Scalar::Float(v.powi(exp.min(i32::MAX as u64) as i32)),
        }
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Float(v)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => r.serialize(serializer),
            Scalar::Float(v) => serializer.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => Ok(Scalar::Exact(s.parse().map_err(D::Error::custom)?)),
            Repr::Number(v) => Ok(Scalar::Float(v)),
        }
    }
}

/// The common mode of two scalars, or [`NumericsError::ModeMismatch`].
pub fn require_same_mode(a: &Scalar, b: &Scalar) -> Result<Mode, NumericsError> {
    if a.mode() == b.mode() {
        Ok(a.mode())
    } else {
        Err(NumericsError::ModeMismatch)
    }
}
