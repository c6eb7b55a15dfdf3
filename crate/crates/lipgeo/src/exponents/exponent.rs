//! Extended exponents: exact rationals together with a greatest element `inf`.
//!
//! Every Hölder exponent, order and tangency order in this crate lives here.
//! Finite values are reduced fractions with positive denominator (guaranteed
//! by `num_rational`); `Infinity` compares strictly greater than every finite
//! value, so `min`/`max` are total.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// A rational number or `+inf`, ordered totally.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum ExtendedExponent {
    Finite(BigRational),
    Infinity,
}

pub use ExtendedExponent::Infinity;

impl ExtendedExponent {
    pub fn finite(r: BigRational) -> Self {
        ExtendedExponent::Finite(r)
    }

    /// Convenience constructor from an integer pair `p/q`.
    pub fn from_pair(p: i64, q: i64) -> Self {
        ExtendedExponent::Finite(BigRational::new(BigInt::from(p), BigInt::from(q)))
    }

    pub fn from_int(p: i64) -> Self {
        ExtendedExponent::Finite(BigRational::from_integer(BigInt::from(p)))
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedExponent::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedExponent::Infinity)
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ExtendedExponent::Finite(r) => Some(r),
            ExtendedExponent::Infinity => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedExponent::Finite(r) => r.to_f64().unwrap_or(f64::NAN),
            ExtendedExponent::Infinity => f64::INFINITY,
        }
    }

    /// `inf + x = inf`; finite values add exactly.
    pub fn add(&self, other: &ExtendedExponent) -> ExtendedExponent {
        match (self, other) {
            (ExtendedExponent::Finite(a), ExtendedExponent::Finite(b)) => {
                ExtendedExponent::Finite(a + b)
            }
            _ => ExtendedExponent::Infinity,
        }
    }

    pub fn min_of(self, other: ExtendedExponent) -> ExtendedExponent {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max_of(self, other: ExtendedExponent) -> ExtendedExponent {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl PartialOrd for ExtendedExponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedExponent {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtendedExponent::*;
        match (self, other) {
            (Infinity, Infinity) => Ordering::Equal,
            (Infinity, Finite(_)) => Ordering::Greater,
            (Finite(_), Infinity) => Ordering::Less,
            (Finite(a), Finite(b)) => a.cmp(b),
        }
    }
}

/// The spec surface for exponent comparison: `(min, max, ordering of a vs b)`.
pub fn min_max_cmp(
    a: &ExtendedExponent,
    b: &ExtendedExponent,
) -> (ExtendedExponent, ExtendedExponent, Ordering) {
    let ord = a.cmp(b);
    match ord {
        Ordering::Less | Ordering::Equal => (a.clone(), b.clone(), ord),
        Ordering::Greater => (b.clone(), a.clone(), ord),
    }
}

impl fmt::Display for ExtendedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedExponent::Finite(r) => write!(f, "{}", format_rational(r)),
            ExtendedExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl fmt::Debug for ExtendedExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for ExtendedExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        if s.trim() == "inf" {
            Ok(ExtendedExponent::Infinity)
        } else {
            Ok(ExtendedExponent::Finite(parse_rational(s)?))
        }
    }
}

/// Canonical text form: `p` when integral, else `p/q` with reduced `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `p`, `p/q` or `-p/q` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, Error> {
    let s = s.trim();
    let bad = || Error::BadRational(s.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        Ok(BigRational::new(n, d))
    } else {
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(BigRational::from_integer(n))
    }
}

pub fn rat(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn rat_int(p: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(p))
}

/// Exact `base^(p/q)` for rational `base`, or `None` when the result is
/// irrational (numerator or denominator is not a perfect `q`-th power).
pub fn rational_pow(base: &BigRational, exp: &BigRational) -> Option<BigRational> {
    if exp.is_zero() {
        return Some(BigRational::one());
    }
    if base.is_zero() {
        return if exp.is_positive() {
            Some(BigRational::zero())
        } else {
            None
        };
    }
    let (p, q) = (exp.numer().clone(), exp.denom().clone());
    let q_u32: u32 = q.to_u32()?;
    let mut b = base.clone();
    if p.is_negative() {
        b = b.recip();
    }
    let p_abs: u32 = p.abs().to_u32()?;
    if q_u32 > 1 {
        if b.is_negative() && q_u32 % 2 == 0 {
            return None;
        }
        let root = |x: &BigInt| -> Option<BigInt> {
            let neg = x.is_negative();
            let mag = x.abs();
            let r = mag.nth_root(q_u32);
            if num_traits::pow(r.clone(), q_u32 as usize) == mag {
                Some(if neg { -r } else { r })
            } else {
                None
            }
        };
        let rn = root(b.numer())?;
        let rd = root(b.denom())?;
        b = BigRational::new(rn, rd);
    }
    Some(num_traits::pow(b, p_abs as usize))
}
