//! Exact nonnegative rational time.
//!
//! Every timestamp, delay and clock value in the crate is a [`Rat`]. Values are
//! kept normalized, so structural equality is numeric equality and values can
//! be used directly as map keys. Text form is `p/q` or `p`; decimals are never
//! produced or accepted.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TimeError {
    #[error("malformed rational {0:?}")]
    Malformed(String),
    #[error("negative rational {0:?}")]
    Negative(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("subtraction {0} - {1} would be negative")]
    NegativeDifference(Rat, Rat),
}

/// A nonnegative rational in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rat(BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn int(n: u64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    /// `num / den`; panics on a zero denominator, which is a programming error here.
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn from_big(r: BigRational) -> Result<Self, TimeError> {
        if r.is_negative() {
            return Err(TimeError::Negative(r.to_string()));
        }
        Ok(Rat(r))
    }

    pub fn as_big(&self) -> &BigRational {
        &self.0
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

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    /// Largest natural `n ≤ self`.
    pub fn floor(&self) -> BigInt {
        self.0.numer().div_floor(self.0.denom())
    }

    pub fn floor_u64(&self) -> u64 {
        self.floor().to_u64().expect("integer part exceeds u64")
    }

    pub fn frac(&self) -> Frac {
        let f = &self.0 - BigRational::from_integer(self.floor());
        Frac(Rat(f))
    }

    pub fn checked_sub(&self, other: &Rat) -> Result<Rat, TimeError> {
        if other > self {
            return Err(TimeError::NegativeDifference(self.clone(), other.clone()));
        }
        Ok(Rat(&self.0 - &other.0))
    }

    pub fn div_int(&self, d: u64) -> Rat {
        assert!(d != 0, "division by zero");
        Rat(&self.0 / BigRational::from_integer(BigInt::from(d)))
    }

    pub fn mul_int(&self, m: u64) -> Rat {
        Rat(&self.0 * BigRational::from_integer(BigInt::from(m)))
    }

    /// Compares against a natural constant.
    pub fn cmp_int(&self, c: u64) -> Ordering {
        self.0.cmp(&BigRational::from_integer(BigInt::from(c)))
    }

    pub fn max(self, other: Rat) -> Rat {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Add for Rat {
    type Output = Rat;
    fn add(self, rhs: Rat) -> Rat {
        Rat(self.0 + rhs.0)
    }
}

impl<'a> Add<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn add(self, rhs: &Rat) -> Rat {
        Rat(&self.0 + &rhs.0)
    }
}

impl Mul for Rat {
    type Output = Rat;
    fn mul(self, rhs: Rat) -> Rat {
        Rat(self.0 * rhs.0)
    }
}

impl<'a> Mul<&'a Rat> for &'a Rat {
    type Output = Rat;
    fn mul(self, rhs: &Rat) -> Rat {
        Rat(&self.0 * &rhs.0)
    }
}

impl From<u64> for Rat {
    fn from(n: u64) -> Self {
        Rat::int(n)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rat {
    type Err = TimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let text = s.trim();
        let (n, d) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let digits = |p: &str| !p.is_empty() && p.bytes().all(|b| b.is_ascii_digit());
        let strip = |p: &str| p.strip_prefix('-').map(|r| r.to_string());
        if let Some(rest) = strip(n) {
            if digits(&rest) && digits(d) {
                return Err(TimeError::Negative(s.to_string()));
            }
        }
        if strip(d).is_some() {
            return Err(TimeError::Negative(s.to_string()));
        }
        if !digits(n) || !digits(d) {
            return Err(TimeError::Malformed(s.to_string()));
        }
        let num: BigInt = n.parse().map_err(|_| TimeError::Malformed(s.to_string()))?;
        let den: BigInt = d.parse().map_err(|_| TimeError::Malformed(s.to_string()))?;
        if den.is_zero() {
            return Err(TimeError::ZeroDenominator(s.to_string()));
        }
        Ok(Rat(BigRational::new(num, den)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Int(u64),
            Neg(i64),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Int(n) => Ok(Rat::int(n)),
            Repr::Neg(n) => Err(serde::de::Error::custom(TimeError::Negative(n.to_string()))),
        }
    }
}

/// A value in `[0, 1)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Frac(Rat);

impl Frac {
    pub fn zero() -> Self {
        Frac(Rat::zero())
    }

    pub fn new(r: Rat) -> Option<Self> {
        (r.cmp_int(1) == Ordering::Less).then_some(Frac(r))
    }

    pub fn value(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

pub fn frac(t: &Rat) -> Frac {
    t.frac()
}

/// A clock value as far as guards with constants `≤ K` can tell.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ClampedValue {
    Exact(Rat),
    /// Strictly above the clamping constant.
    Top,
}

impl ClampedValue {
    pub fn zero() -> Self {
        ClampedValue::Exact(Rat::zero())
    }

    pub fn elapse(&self, delay: &Rat, k: u64) -> ClampedValue {
        match self {
            ClampedValue::Exact(v) => clamp(&(v + delay), k),
            ClampedValue::Top => ClampedValue::Top,
        }
    }

    /// Comparison with a natural constant `c ≤ K`.
    pub fn cmp_const(&self, c: u64) -> Ordering {
        match self {
            ClampedValue::Exact(v) => v.cmp_int(c),
            ClampedValue::Top => Ordering::Greater,
        }
    }
}

impl fmt::Display for ClampedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClampedValue::Exact(v) => write!(f, "{v}"),
            ClampedValue::Top => write!(f, "top"),
        }
    }
}

pub fn clamp(v: &Rat, k: u64) -> ClampedValue {
    if v.cmp_int(k) == Ordering::Greater {
        ClampedValue::Top
    } else {
        ClampedValue::Exact(v.clone())
    }
}

/// Parses `p/q` or `p`; shorthand used throughout tests and fixtures.
pub fn r(s: &str) -> Rat {
    s.parse().unwrap_or_else(|e| panic!("bad rational literal {s:?}: {e}"))
}
