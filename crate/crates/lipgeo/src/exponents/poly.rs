//! Univariate exact polynomial kernel.
//!
//! `LaurentPoly` is the coefficient ring used by symbolic fan scans: Laurent
//! polynomials in one parameter `s` over the rationals. `RatPoly` is the
//! plain dense polynomial with a Sturm chain, used to locate every real root
//! of a cancellation polynomial inside an interval: rational roots are
//! recovered exactly (simplest-rational refinement + exact verification),
//! irrational ones are reported as isolating intervals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exponent::rational_pow;
use super::series::Coeff;

/// Laurent polynomial: `coeffs[i]` is the coefficient of `s^(offset + i)`.
/// Invariant: first and last stored coefficients are nonzero (empty = zero).
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentPoly {
    offset: i64,
    coeffs: Vec<BigRational>,
}

impl LaurentPoly {
    pub fn monomial(offset: i64, c: BigRational) -> Self {
        if c.is_zero() {
            LaurentPoly { offset: 0, coeffs: vec![] }
        } else {
            LaurentPoly { offset, coeffs: vec![c] }
        }
    }

    pub fn var() -> Self {
        LaurentPoly::monomial(1, BigRational::one())
    }

    fn normalize(mut self) -> Self {
        while self.coeffs.last().map_or(false, |c| c.is_zero()) {
            self.coeffs.pop();
        }
        let lead_zeros = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.coeffs.drain(..lead_zeros);
            self.offset += lead_zeros as i64;
        }
        if self.coeffs.is_empty() {
            self.offset = 0;
        }
        self
    }

    pub fn as_monomial(&self) -> Option<(i64, &BigRational)> {
        if self.coeffs.len() == 1 {
            Some((self.offset, &self.coeffs[0]))
        } else {
            None
        }
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.is_empty() || (self.coeffs.len() == 1 && self.offset == 0)
    }

    pub fn eval(&self, s: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        // Horner over the positive part, explicit powers for the tail.
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            let e = self.offset + i as i64;
            let p = pow_rational_int(s, e);
            acc += c * p;
        }
        acc
    }

    /// The polynomial factor after clearing the `s^offset`: roots away from
    /// zero are unchanged.
    pub fn poly_part(&self) -> RatPoly {
        RatPoly::new(self.coeffs.clone())
    }
}

fn pow_rational_int(s: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let base = if e < 0 { s.recip() } else { s.clone() };
    num_traits::pow(base, e.unsigned_abs() as usize)
}

impl Coeff for LaurentPoly {
    fn ring_zero() -> Self {
        LaurentPoly { offset: 0, coeffs: vec![] }
    }
    fn ring_one() -> Self {
        LaurentPoly::monomial(0, BigRational::one())
    }
    fn ring_is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
    fn ring_add(&self, other: &Self) -> Self {
        if self.ring_is_zero() {
            return other.clone();
        }
        if other.ring_is_zero() {
            return self.clone();
        }
        let lo = self.offset.min(other.offset);
        let hi = (self.offset + self.coeffs.len() as i64).max(other.offset + other.coeffs.len() as i64);
        let mut coeffs = vec![BigRational::zero(); (hi - lo) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[(self.offset - lo) as usize + i] += c;
        }
        for (i, c) in other.coeffs.iter().enumerate() {
            coeffs[(other.offset - lo) as usize + i] += c;
        }
        LaurentPoly { offset: lo, coeffs }.normalize()
    }
    fn ring_neg(&self) -> Self {
        LaurentPoly {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
    fn ring_mul(&self, other: &Self) -> Self {
        if self.ring_is_zero() || other.ring_is_zero() {
            return Coeff::ring_zero();
        }
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        LaurentPoly { offset: self.offset + other.offset, coeffs }.normalize()
    }
    fn from_rat(r: &BigRational) -> Self {
        LaurentPoly::monomial(0, r.clone())
    }
    fn ring_inverse(&self) -> Option<Self> {
        let (off, c) = self.as_monomial()?;
        Some(LaurentPoly::monomial(-off, c.recip()))
    }
    fn pow_rat(&self, e: &BigRational) -> Option<Self> {
        if self.ring_is_zero() {
            return if e.is_positive() { Some(Coeff::ring_zero()) } else { None };
        }
        let (off, c) = self.as_monomial()?;
        let new_off = BigRational::from_integer(BigInt::from(off)) * e;
        if !new_off.denom().is_one() {
            return None;
        }
        let k: i64 = new_off.numer().try_into().ok()?;
        Some(LaurentPoly::monomial(k, rational_pow(c, e)?))
    }
}

/// Dense polynomial over the rationals; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, PartialEq, Debug)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().map_or(false, |c| c.is_zero()) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero());
        let mut rem = self.coeffs.clone();
        let dn = d.coeffs.len();
        if rem.len() < dn {
            return (RatPoly::new(vec![]), RatPoly::new(rem));
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dn + 1];
        let lead = d.coeffs.last().unwrap().clone();
        for i in (0..quot.len()).rev() {
            let c = &rem[i + dn - 1] / &lead;
            if c.is_zero() {
                continue;
            }
            quot[i] = c.clone();
            for (j, dc) in d.coeffs.iter().enumerate() {
                let v = dc * &c;
                rem[i + j] -= v;
            }
        }
        (RatPoly::new(quot), RatPoly::new(rem))
    }

    fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        // Monic normalization.
        if let Some(lead) = a.coeffs.last().cloned() {
            for c in &mut a.coeffs {
                *c /= &lead;
            }
        }
        a
    }

    /// Square-free part: roots preserved, multiplicities dropped.
    pub fn square_free(&self) -> RatPoly {
        if self.degree() == 0 || self.is_zero() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        if g.degree() == 0 {
            self.clone()
        } else {
            self.div_rem(&g).0
        }
    }

    /// Bound `B` with all real roots in `(-B, B)`.
    fn root_bound(&self) -> BigRational {
        let lead = self.coeffs.last().unwrap();
        let mut m = BigRational::zero();
        for c in &self.coeffs[..self.coeffs.len() - 1] {
            let r = (c / lead).abs();
            if r > m {
                m = r;
            }
        }
        m + BigRational::one() + BigRational::one()
    }
}

/// Everything found about the real roots of a polynomial in an open interval.
#[derive(Clone, Debug, Default)]
pub struct RootReport {
    pub rational: Vec<BigRational>,
    /// Isolating intervals of roots that resisted rational reconstruction.
    pub irrational: Vec<(BigRational, BigRational)>,
}

struct Sturm {
    chain: Vec<RatPoly>,
}

impl Sturm {
    fn new(p: &RatPoly) -> Sturm {
        let mut chain = vec![p.clone(), p.derivative()];
        while !chain.last().unwrap().is_zero() {
            let n = chain.len();
            let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
            let mut neg = r;
            for c in &mut neg.coeffs {
                *c = -c.clone();
            }
            chain.push(neg);
        }
        chain.pop();
        Sturm { chain }
    }

    fn variations(&self, x: &BigRational) -> usize {
        let mut count = 0;
        let mut last: Option<bool> = None;
        for p in &self.chain {
            let v = p.eval(x);
            if v.is_zero() {
                continue;
            }
            let s = v.is_positive();
            if let Some(prev) = last {
                if prev != s {
                    count += 1;
                }
            }
            last = Some(s);
        }
        count
    }

    /// Number of distinct real roots in `(a, b]` (square-free assumed).
    fn count(&self, a: &BigRational, b: &BigRational) -> usize {
        self.variations(a).saturating_sub(self.variations(b))
    }
}

/// Simplest rational strictly inside `(lo, hi)` (Stern-Brocot descent).
pub fn simplest_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    assert!(lo < hi);
    if lo.is_negative() && hi.is_positive() {
        return BigRational::zero();
    }
    if hi.is_positive() && !lo.is_positive() {
        // lo == 0 < hi
        return simplest_pos(&BigRational::zero(), hi);
    }
    if lo.is_negative() {
        return -simplest_pos(&-hi.clone(), &-lo.clone());
    }
    simplest_pos(lo, hi)
}

fn simplest_pos(lo: &BigRational, hi: &BigRational) -> BigRational {
    // 0 <= lo < hi; simplest rational strictly inside the interval.
    let n = lo.floor();
    let next_int = &n + BigRational::one();
    if next_int < *hi {
        // An integer lies strictly inside.
        return next_int;
    }
    let frac_lo = lo - &n;
    let frac_hi = hi - &n; // in (0, 1]
    if frac_lo.is_zero() {
        // (n, hi): pick n + 1/k for the smallest k with 1/k < hi - n.
        let k = frac_hi.recip().floor() + BigRational::one();
        return n + k.recip();
    }
    n + simplest_pos(&frac_hi.recip(), &frac_lo.recip()).recip()
}

const RECONSTRUCT_ITERS: usize = 96;

/// All real roots of `p` in the open interval `(lo, hi)`; `None` bounds mean
/// unbounded. Rational roots are verified exactly.
pub fn real_roots_in(
    p: &RatPoly,
    lo: Option<&BigRational>,
    hi: Option<&BigRational>,
) -> RootReport {
    let mut report = RootReport::default();
    if p.is_zero() || p.degree() == 0 {
        return report;
    }
    let sf = p.square_free();
    let bound = sf.root_bound();
    let mut a = lo.cloned().unwrap_or_else(|| -bound.clone());
    let mut b = hi.cloned().unwrap_or_else(|| bound.clone());
    if a < -bound.clone() {
        a = -bound.clone();
    }
    if b > bound {
        b = bound;
    }
    if a >= b {
        return report;
    }
    // Nudge endpoints off roots; open-interval roots at user endpoints are
    // excluded by definition, and synthetic bound endpoints carry no roots.
    let a = nudge_off_root(&sf, a, &b);
    let b = nudge_off_root(&sf, b, &a);
    if a >= b {
        return report;
    }
    let sturm = Sturm::new(&sf);
    let mut stack = vec![(a.clone(), b.clone())];
    let mut isolated: Vec<(BigRational, BigRational)> = Vec::new();
    while let Some((x, y)) = stack.pop() {
        let n = sturm.count(&x, &y);
        if n == 0 {
            continue;
        }
        if n == 1 {
            isolated.push((x, y));
            continue;
        }
        let mut mid = (&x + &y) / BigRational::from_integer(2.into());
        if sf.eval(&mid).is_zero() {
            report.rational.push(mid.clone());
            mid = nudge_off_root(&sf, mid, &y);
        }
        stack.push((x, mid.clone()));
        stack.push((mid, y));
    }
    for (mut x, mut y) in isolated {
        let mut found = false;
        for _ in 0..RECONSTRUCT_ITERS {
            let cand = simplest_between(&x, &y);
            let v = sf.eval(&cand);
            if v.is_zero() {
                report.rational.push(cand);
                found = true;
                break;
            }
            // Root is on the side where the sign flips relative to x.
            let sx = sf.eval(&x);
            if sx.is_positive() != v.is_positive() {
                y = cand;
            } else {
                x = cand;
            }
        }
        if !found {
            report.irrational.push((x, y));
        }
    }
    report.rational.sort();
    report.rational.dedup();
    report
}

fn nudge_off_root(p: &RatPoly, mut x: BigRational, toward: &BigRational) -> BigRational {
    let mut step = (toward - &x) / BigRational::from_integer(1024.into());
    let mut guard = 0;
    while p.eval(&x).is_zero() && guard < 64 {
        x += &step;
        step /= BigRational::from_integer(2.into());
        guard += 1;
    }
    x
}
