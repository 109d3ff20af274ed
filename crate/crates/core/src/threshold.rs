//! Exact non-negative rational thresholds.
//!
//! Bundle costs are integers, so `cost <= tau` is equivalent to
//! `cost <= floor(tau)`. Every threshold caches that floor as a `u64`
//! capacity, which keeps the packing loops on plain integer arithmetic
//! while the rational value stays available for the places where the
//! fractional part matters (fit-in space, `tau - mu`, ratio bounds).

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A non-negative exact rational.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Threshold {
    value: BigRational,
    capacity: u64,
}

impl Threshold {
    pub fn new(value: BigRational) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::InvalidRational(format!("{value} is negative")));
        }
        let floor = value.floor().to_integer();
        let capacity = floor.to_u64().unwrap_or(u64::MAX);
        Ok(Threshold { value, capacity })
    }

    pub fn from_integer(value: u64) -> Self {
        Threshold {
            value: BigRational::from_integer(BigInt::from(value)),
            capacity: value,
        }
    }

    pub fn from_fraction(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidRational("zero denominator".into()));
        }
        Self::new(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// `alpha * mu` for an integer `mu`.
    pub fn scaled(alpha: &BigRational, mu: u64) -> Result<Self> {
        Self::new(alpha * BigRational::from_integer(BigInt::from(mu)))
    }

    pub fn value(&self) -> &BigRational {
        &self.value
    }

    /// `floor(tau)`, saturated to `u64::MAX`.
    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    /// Whether an integer cost fits under the threshold.
    #[inline]
    pub fn admits(&self, cost: u64) -> bool {
        cost <= self.capacity
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_integer()
    }

    pub fn numer(&self) -> &BigInt {
        self.value.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.value.denom()
    }

    /// Compare against an integer.
    pub fn cmp_integer(&self, x: u64) -> Ordering {
        self.value.cmp(&int(x))
    }
}

pub(crate) fn int(x: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Parse `"p/q"` or `"p"` into a rational. Negative values are rejected.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::InvalidRational(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::InvalidRational(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::InvalidRational(format!("zero denominator in {s:?}")));
    }
    let r = BigRational::new(num, den);
    if r.is_negative() {
        return Err(Error::InvalidRational(format!("{s:?} is negative")));
    }
    Ok(r)
}

/// Render as `"p/q"`, or `"p"` when the denominator is one.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `ceil(r)` as a `u64`, saturating.
pub fn ceil_u64(r: &BigRational) -> u64 {
    r.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
}

impl FromStr for Threshold {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Threshold::new(parse_rational(s)?)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.value))
    }
}

impl fmt::Debug for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Threshold({self})")
    }
}

impl PartialOrd for Threshold {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Threshold {
    fn cmp(&self, other: &Self) -> Ordering {
        self.value.cmp(&other.value)
    }
}

/// JSON form `{"num": p, "den": q}`; `"p/q"` strings are accepted on input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RationalRepr {
    Parts { num: u64, den: u64 },
    Text(String),
    Integer(u64),
}

impl RationalRepr {
    pub fn to_threshold(&self) -> Result<Threshold> {
        match self {
            RationalRepr::Parts { num, den } => Threshold::from_fraction(*num, *den),
            RationalRepr::Text(s) => s.parse(),
            RationalRepr::Integer(v) => Ok(Threshold::from_integer(*v)),
        }
    }

    /// Written as `"p/q"`, or `"p"` when the value is an integer.
    pub fn from_threshold(t: &Threshold) -> Self {
        RationalRepr::Text(t.to_string())
    }
}
