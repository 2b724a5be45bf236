//! Exact exponent types and function-space descriptors.
//!
//! Lebesgue exponents are stored through their reciprocal `u = 1/p` so that
//! `p = ∞` is the ordinary value `u = 0` and every threshold comparison stays
//! in exact rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::Power;

/// Exact rational used for reciprocal exponents and smoothness indices.
pub type Rational = Ratio<i64>;

/// Largest numerator or denominator accepted from text; keeps every
/// classifier product far away from `i64` overflow.
pub const MAX_PARSED_TERM: i64 = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExponentError {
    #[error("reciprocal exponent must be nonnegative, got {0}")]
    Negative(Rational),
    #[error("exponent p must be positive, got {0}")]
    NonPositive(Rational),
    #[error("cannot parse `{0}` as an exact rational (use forms like 3/4, 2, -1/2 or inf)")]
    Malformed(String),
    #[error("`{0}` has a numerator or denominator larger than {MAX_PARSED_TERM}")]
    TooLarge(String),
    #[error("{family:?} requires p < ∞")]
    InfiniteP { family: Family },
    #[error("dimension must be a positive integer")]
    ZeroDimension,
}

fn parse_rational(text: &str) -> Result<Rational, ExponentError> {
    let t = text.trim();
    let malformed = || ExponentError::Malformed(text.to_string());
    let parse_int = |s: &str| -> Result<i64, ExponentError> {
        let s = s.trim();
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(malformed());
        }
        let v: i64 = s
            .parse()
            .map_err(|_| ExponentError::TooLarge(text.to_string()))?;
        if v.abs() > MAX_PARSED_TERM {
            return Err(ExponentError::TooLarge(text.to_string()));
        }
        Ok(v)
    };
    match t.split_once('/') {
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den == 0 {
                return Err(malformed());
            }
            Ok(Rational::new(num, den))
        }
        None => Ok(Rational::from_integer(parse_int(t)?)),
    }
}

/// `u = 1/p` for a Lebesgue exponent `p ∈ (0, ∞]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct ReciprocalExponent(Rational);

impl ReciprocalExponent {
    pub const INFINITY: ReciprocalExponent = ReciprocalExponent(Ratio::new_raw(0, 1));

    pub fn new(u: Rational) -> Result<Self, ExponentError> {
        if u.is_negative() {
            return Err(ExponentError::Negative(u));
        }
        Ok(Self(u))
    }

    /// From the exponent `p` itself.
    pub fn from_p(p: Rational) -> Result<Self, ExponentError> {
        if !p.is_positive() {
            return Err(ExponentError::NonPositive(p));
        }
        Ok(Self(p.recip()))
    }

    /// Shorthand for integer exponents, e.g. `ReciprocalExponent::p(4)`.
    pub fn p(p: i64) -> Self {
        Self::from_p(Rational::from_integer(p)).expect("positive integer exponent")
    }

    /// Shorthand for `u = num/den`.
    pub fn inv(num: i64, den: i64) -> Self {
        Self::new(Rational::new(num, den)).expect("nonnegative reciprocal")
    }

    pub fn value(self) -> Rational {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_zero()
    }

    /// The exponent `p`, or `None` for `p = ∞`.
    pub fn exponent(self) -> Option<Rational> {
        (!self.is_infinite()).then(|| self.0.recip())
    }

    /// Hölder conjugate `1/p' = 1 - 1/p`, defined for `1/p ≤ 1`.
    pub fn conjugate(self) -> Option<Self> {
        (self.0 <= Rational::one()).then(|| Self(Rational::one() - self.0))
    }

    pub fn to_power(self) -> Power {
        match self.exponent() {
            None => Power::Infinite,
            Some(p) => Power::Finite(*p.numer() as f64 / *p.denom() as f64),
        }
    }
}

impl fmt::Display for ReciprocalExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.exponent() {
            None => write!(f, "inf"),
            Some(p) => write!(f, "{p}"),
        }
    }
}

impl FromStr for ReciprocalExponent {
    type Err = ExponentError;

    /// Parses the exponent `p` ("3/4", "2", "inf").
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "Inf" | "infinity" | "∞" => Ok(Self::INFINITY),
            other => Self::from_p(parse_rational(other)?),
        }
    }
}

/// Smoothness or weight exponent `s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct SmoothnessIndex(pub Rational);

impl SmoothnessIndex {
    pub fn zero() -> Self {
        Self(Rational::zero())
    }

    pub fn new(num: i64, den: i64) -> Self {
        Self(Rational::new(num, den))
    }

    pub fn to_f64(self) -> f64 {
        to_f64(self.0)
    }
}

impl fmt::Display for SmoothnessIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for SmoothnessIndex {
    type Err = ExponentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s).map(Self)
    }
}

impl From<ReciprocalExponent> for String {
    fn from(u: ReciprocalExponent) -> String {
        u.to_string()
    }
}

impl TryFrom<String> for ReciprocalExponent {
    type Error = ExponentError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<SmoothnessIndex> for String {
    fn from(s: SmoothnessIndex) -> String {
        s.to_string()
    }
}

impl TryFrom<String> for SmoothnessIndex {
    type Error = ExponentError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

pub fn to_f64(r: Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    WienerAmalgam,
    Modulation,
    Besov,
    TriebelLizorkin,
    LocalHardy,
    Lebesgue,
    SeqUniform,
    SeqDyadic,
}

impl Family {
    pub fn is_sequence(self) -> bool {
        matches!(self, Family::SeqUniform | Family::SeqDyadic)
    }
}

/// Descriptor of a function or sequence space. Sequence families ignore `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub family: Family,
    pub p: ReciprocalExponent,
    pub q: ReciprocalExponent,
    pub s: SmoothnessIndex,
    pub n: u32,
}

impl SpaceSpec {
    pub fn try_new(
        family: Family,
        p: ReciprocalExponent,
        q: ReciprocalExponent,
        s: SmoothnessIndex,
        n: u32,
    ) -> Result<Self, ExponentError> {
        if n == 0 {
            return Err(ExponentError::ZeroDimension);
        }
        if matches!(family, Family::TriebelLizorkin | Family::LocalHardy) && p.is_infinite() {
            return Err(ExponentError::InfiniteP { family });
        }
        let p = if family.is_sequence() { q } else { p };
        Ok(Self { family, p, q, s, n })
    }

    pub fn sequence(
        family: Family,
        q: ReciprocalExponent,
        s: SmoothnessIndex,
        n: u32,
    ) -> Result<Self, ExponentError> {
        Self::try_new(family, q, q, s, n)
    }
}
