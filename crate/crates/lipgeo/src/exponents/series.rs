//! Truncation-aware Puiseux series.
//!
//! A series is a finite list of `(exponent, coefficient)` terms with strictly
//! increasing rational exponents and no stored zeros. `valid_to: None` means
//! the list is the complete expansion; `valid_to: Some(b)` means every term
//! with exponent `<= b` is present and exact, and nothing is known beyond `b`.
//! All arithmetic propagates the weakest bound, so a surviving leading term is
//! always trustworthy: truncation can only ever remove terms *above* a bound,
//! never change coefficients at or below it.
//!
//! Coefficients are generic so the same engine runs over plain rationals and
//! over one-parameter symbolic coefficients (Laurent polynomials in a fan
//! parameter) during pizza scans.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::exponent::{format_rational, rational_pow, ExtendedExponent};

/// Hard cap on stored terms; beyond it the tail is dropped and the validity
/// bound lowered accordingly.
pub const MAX_TERMS: usize = 4096;
/// Cap on binomial-expansion length for fractional powers.
const MAX_BINOM_TERMS: usize = 512;

/// Coefficient ring abstraction. `inverse` and `pow_rat` are partial: they
/// return `None` when the result is not representable in the ring.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn ring_zero() -> Self;
    fn ring_one() -> Self;
    fn ring_is_zero(&self) -> bool;
    fn ring_add(&self, other: &Self) -> Self;
    fn ring_neg(&self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
    fn from_rat(r: &BigRational) -> Self;
    fn ring_inverse(&self) -> Option<Self>;
    fn pow_rat(&self, e: &BigRational) -> Option<Self>;

    fn ring_sub(&self, other: &Self) -> Self {
        self.ring_add(&other.ring_neg())
    }
}

impl Coeff for BigRational {
    fn ring_zero() -> Self {
        Zero::zero()
    }
    fn ring_one() -> Self {
        One::one()
    }
    fn ring_is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn ring_add(&self, other: &Self) -> Self {
        self + other
    }
    fn ring_neg(&self) -> Self {
        -self
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
    fn from_rat(r: &BigRational) -> Self {
        r.clone()
    }
    fn ring_inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn pow_rat(&self, e: &BigRational) -> Option<Self> {
        rational_pow(self, e)
    }
}

/// How far a series expansion can be trusted.
///
/// The result of an order query on a possibly-truncated series: either the
/// exact order (with `Infinity` meaning "provably the zero series"), or a
/// certified lower bound when the expansion was cut off first.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum OrderBound {
    Exact(ExtendedExponent),
    AtLeast(BigRational),
}

impl OrderBound {
    pub fn as_exact(&self) -> Option<&ExtendedExponent> {
        match self {
            OrderBound::Exact(e) => Some(e),
            OrderBound::AtLeast(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, OrderBound::Exact(_))
    }
}

impl fmt::Display for OrderBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrderBound::Exact(e) => write!(f, "{e}"),
            OrderBound::AtLeast(b) => write!(f, ">={}", format_rational(b)),
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Series<C: Coeff> {
    /// `(exponent, coefficient)`, strictly increasing exponents, no zeros.
    terms: Vec<(BigRational, C)>,
    /// `None` = complete expansion; `Some(b)` = exact only up to exponent `b`.
    valid_to: Option<BigRational>,
}

/// The concrete series carried by arcs and emitted in JSON.
pub type PuiseuxSeries = Series<BigRational>;

fn limit_min(a: Option<BigRational>, b: Option<BigRational>) -> Option<BigRational> {
    match (a, b) {
        (None, x) => x,
        (x, None) => x,
        (Some(a), Some(b)) => Some(a.min(b)),
    }
}

impl<C: Coeff> Series<C> {
    pub fn zero() -> Self {
        Series { terms: Vec::new(), valid_to: None }
    }

    /// Zero as far as can be seen: no terms up to `bound`.
    pub fn zero_up_to(bound: BigRational) -> Self {
        Series { terms: Vec::new(), valid_to: Some(bound) }
    }

    pub fn monomial(exp: BigRational, coeff: C) -> Self {
        if coeff.ring_is_zero() {
            Series::zero()
        } else {
            Series { terms: vec![(exp, coeff)], valid_to: None }
        }
    }

    pub fn constant(coeff: C) -> Self {
        Series::monomial(BigRational::zero(), coeff)
    }

    /// Builds from arbitrary `(exp, coeff)` pairs, merging and dropping zeros.
    pub fn from_terms(mut terms: Vec<(BigRational, C)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(BigRational, C)> = Vec::with_capacity(terms.len());
        for (e, c) in terms {
            if let Some(last) = out.last_mut() {
                if last.0 == e {
                    last.1 = last.1.ring_add(&c);
                    if last.1.ring_is_zero() {
                        out.pop();
                    }
                    continue;
                }
            }
            if !c.ring_is_zero() {
                out.push((e, c));
            }
        }
        Series { terms: out, valid_to: None }
    }

    pub fn terms(&self) -> &[(BigRational, C)] {
        &self.terms
    }

    pub fn valid_to(&self) -> Option<&BigRational> {
        self.valid_to.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.valid_to.is_none()
    }

    /// True when there are no terms *and* the expansion is complete.
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.valid_to.is_none()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(BigRational, C)> {
        self.terms.first()
    }

    fn min_exp(&self) -> Option<&BigRational> {
        self.terms.first().map(|(e, _)| e)
    }

    /// Lowest exponent with a nonzero coefficient, or a certified bound.
    pub fn order(&self) -> OrderBound {
        match self.terms.first() {
            Some((e, _)) => OrderBound::Exact(ExtendedExponent::Finite(e.clone())),
            None => match &self.valid_to {
                None => OrderBound::Exact(ExtendedExponent::Infinity),
                Some(b) => OrderBound::AtLeast(b.clone()),
            },
        }
    }

    /// Drops terms above `bound` and records the loss of knowledge if any.
    pub fn truncate(mut self, bound: &BigRational) -> Self {
        let keep = self.terms.iter().take_while(|(e, _)| e <= bound).count();
        if keep < self.terms.len() {
            self.terms.truncate(keep);
            self.valid_to = limit_min(self.valid_to, Some(bound.clone()));
        }
        self
    }

    fn enforce_caps(mut self) -> Self {
        if self.terms.len() > MAX_TERMS {
            let cutoff = self.terms[MAX_TERMS - 1].0.clone();
            self.terms.truncate(MAX_TERMS);
            self.valid_to = limit_min(self.valid_to, Some(cutoff));
        }
        // Never keep terms the validity bound disowns.
        if let Some(b) = self.valid_to.clone() {
            let keep = self.terms.iter().take_while(|(e, _)| e <= &b).count();
            self.terms.truncate(keep);
        }
        self
    }

    pub fn add(&self, other: &Self) -> Self {
        let valid = limit_min(self.valid_to.clone(), other.valid_to.clone());
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let pick_left = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => {
                    if a.0 == b.0 {
                        let c = a.1.ring_add(&b.1);
                        if !c.ring_is_zero() {
                            terms.push((a.0.clone(), c));
                        }
                        i += 1;
                        j += 1;
                        continue;
                    }
                    a.0 < b.0
                }
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => break,
            };
            if pick_left {
                terms.push(self.terms[i].clone());
                i += 1;
            } else {
                terms.push(other.terms[j].clone());
                j += 1;
            }
        }
        Series { terms, valid_to: valid }.enforce_caps()
    }

    pub fn neg(&self) -> Self {
        Series {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.ring_neg())).collect(),
            valid_to: self.valid_to.clone(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.ring_is_zero() {
            // Exact zero multiple, but unknown tail stays unknown territory.
            return Series { terms: Vec::new(), valid_to: self.valid_to.clone() };
        }
        Series {
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k.ring_mul(c))).collect(),
            valid_to: self.valid_to.clone(),
        }
    }

    /// Multiplies by `t^delta` (`delta >= 0`).
    pub fn shift_exp(&self, delta: &BigRational) -> Self {
        Series {
            terms: self.terms.iter().map(|(e, c)| (e + delta, c.clone())).collect(),
            valid_to: self.valid_to.as_ref().map(|b| b + delta),
        }
    }

    pub fn mul(&self, other: &Self, bound: &BigRational) -> Self {
        // Validity of a product: unknown tail of one factor enters at its own
        // bound plus the other factor's lowest exponent.
        let mut valid: Option<BigRational> = None;
        if let Some(a) = &self.valid_to {
            let shift = other.min_exp().cloned().unwrap_or_else(BigRational::zero);
            valid = limit_min(valid, Some(a + shift));
        }
        if let Some(b) = &other.valid_to {
            let shift = self.min_exp().cloned().unwrap_or_else(BigRational::zero);
            valid = limit_min(valid, Some(b + shift));
        }
        let mut acc: Vec<(BigRational, C)> = Vec::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = ea + eb;
                if e > *bound {
                    continue;
                }
                acc.push((e, ca.ring_mul(cb)));
            }
        }
        let dropped = self
            .terms
            .iter()
            .any(|(ea, _)| other.terms.iter().any(|(eb, _)| ea + eb > *bound));
        if dropped {
            valid = limit_min(valid, Some(bound.clone()));
        }
        let mut s = Series::from_terms(acc);
        s.valid_to = valid;
        s.enforce_caps()
    }

    pub fn pow_int(&self, k: u32, bound: &BigRational) -> Self {
        let mut acc = Series::constant(C::ring_one());
        for _ in 0..k {
            acc = acc.mul(self, bound);
        }
        acc
    }

    /// `self^e` for rational `e >= 0`, by exact root of the leading term and a
    /// binomial expansion of the remainder. `Err` carries a reason when the
    /// leading coefficient has no exact representable root.
    pub fn pow_rational(&self, e: &BigRational, bound: &BigRational) -> Result<Self, PowError> {
        if e.is_zero() {
            return Ok(Series::constant(C::ring_one()));
        }
        if e.denom().is_one() && !e.is_negative() {
            let k = e.numer().to_u32().ok_or(PowError::ExponentTooLarge)?;
            return Ok(self.pow_int(k, bound));
        }
        if e.is_negative() {
            return Err(PowError::NegativeExponent);
        }
        let (m, a) = match self.leading() {
            Some((m, a)) => (m.clone(), a.clone()),
            None => {
                // Zero (to current knowledge) raised to a positive power.
                return Ok(match &self.valid_to {
                    None => Series::zero(),
                    Some(b) => Series::zero_up_to(b * e),
                });
            }
        };
        let lead_pow = a.pow_rat(e).ok_or(PowError::IrrationalLeadingRoot)?;
        let inv_a = a.ring_inverse().ok_or(PowError::IrrationalLeadingRoot)?;
        // self = a t^m (1 + R); R strictly positive order.
        let r = Series {
            terms: self
                .terms
                .iter()
                .skip(1)
                .map(|(exp, c)| (exp - &m, c.ring_mul(&inv_a)))
                .collect(),
            valid_to: self.valid_to.as_ref().map(|b| b - &m),
        };
        let out_shift = &m * e;
        let inner_bound = bound - &out_shift;
        if inner_bound.is_negative() {
            return Ok(Series::zero_up_to(bound.clone()));
        }
        let mut sum = Series::constant(C::ring_one());
        if !r.is_empty() {
            let r0 = r.min_exp().cloned().unwrap_or_else(BigRational::one);
            let mut r_pow = Series::constant(C::ring_one());
            let mut binom = BigRational::one();
            let mut k_rat = BigRational::zero();
            let mut reached_bound = false;
            for k in 1..=MAX_BINOM_TERMS {
                binom = binom * (e - &k_rat) / BigRational::from_integer(k.into());
                k_rat += BigRational::one();
                r_pow = r_pow.mul(&r, &inner_bound);
                let term = r_pow.scale(&C::from_rat(&binom));
                sum = sum.add(&term);
                if &r0 * BigRational::from_integer((k as i64 + 1).into()) > inner_bound {
                    reached_bound = true;
                    break;
                }
            }
            if !reached_bound {
                sum.valid_to = limit_min(sum.valid_to.clone(), Some(inner_bound.clone()));
                sum = sum.enforce_caps();
            }
        } else if let Some(b) = &r.valid_to {
            sum.valid_to = limit_min(sum.valid_to.clone(), Some(b.clone()));
        }
        Ok(sum.scale(&lead_pow).shift_exp(&out_shift).truncate(bound))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PowError {
    /// Leading coefficient has no exact root in the coefficient ring.
    IrrationalLeadingRoot,
    NegativeExponent,
    ExponentTooLarge,
}

impl PuiseuxSeries {
    /// Numerical evaluation at `t > 0`.
    pub fn eval_f64(&self, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * t.powf(e.to_f64().unwrap_or(f64::NAN)))
            .sum()
    }

    /// Coefficient at an exact exponent (zero when absent).
    pub fn coeff_at(&self, exp: &BigRational) -> BigRational {
        self.terms
            .iter()
            .find(|(e, _)| e == exp)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(BigRational::zero)
    }

    /// Keeps only terms with exponent `<= bound` without declaring loss
    /// (used for tangent-vector truncation where the tail is irrelevant).
    pub fn drop_above(&self, bound: &BigRational) -> PuiseuxSeries {
        Series {
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e <= bound)
                .cloned()
                .collect(),
            valid_to: self.valid_to.clone(),
        }
    }
}

/// Order of an exact series: lowest exponent present, `inf` for the zero
/// series. Inputs built from JSON or arc constructors are always exact.
pub fn series_order(s: &PuiseuxSeries) -> ExtendedExponent {
    match s.order() {
        OrderBound::Exact(e) => e,
        OrderBound::AtLeast(b) => ExtendedExponent::Finite(b),
    }
}

impl fmt::Display for PuiseuxSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (i, (e, c)) in self.terms.iter().enumerate() {
                if i > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "{}*t^{}", format_rational(c), format_rational(e))?;
            }
        }
        if let Some(b) = &self.valid_to {
            write!(f, " + O(t^{})", format_rational(b))?;
        }
        Ok(())
    }
}
