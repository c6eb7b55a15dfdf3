//! Admissible function expressions on a Hölder triangle and their exact
//! substitution.
//!
//! Expressions are trees over two variables `u` (first coordinate, the scale)
//! and `w` (second coordinate) built from monomials with non-negative
//! rational exponents, `+`, `-`, `*`, `abs`, `min`, `max`. Substituting an
//! arc `w = W(u)` yields a Puiseux series; `abs`/`min`/`max` are resolved by
//! the exact sign of the leading coefficient of the relevant difference, with
//! deeper terms consulted on exact ties. The engine is generic over the
//! coefficient ring so scans can run with a symbolic fan parameter; every
//! sign decision goes through a [`SignResolver`], which symbolic callers use
//! to harvest the cancellation polynomials.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::arc::Arc;
use super::series::{Coeff, OrderBound, PowError, Series};
use crate::Error;

#[derive(Clone, PartialEq, Debug)]
pub enum FunctionExpr {
    /// `c * u^pu * w^pw` with `pu, pw >= 0` rational.
    Monomial {
        coeff: BigRational,
        pu: BigRational,
        pw: BigRational,
    },
    Add(Box<FunctionExpr>, Box<FunctionExpr>),
    Sub(Box<FunctionExpr>, Box<FunctionExpr>),
    Mul(Box<FunctionExpr>, Box<FunctionExpr>),
    Abs(Box<FunctionExpr>),
    Min(Box<FunctionExpr>, Box<FunctionExpr>),
    Max(Box<FunctionExpr>, Box<FunctionExpr>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Sign {
    Pos,
    Neg,
}

/// Decides the sign of a nonzero leading coefficient. The symbolic resolver
/// also records each queried coefficient as a cancellation-candidate
/// polynomial.
pub trait SignResolver<C: Coeff> {
    fn sign(&mut self, c: &C) -> Result<Sign, Error>;
}

/// Resolver for plain rational coefficients; total.
pub struct RationalSigns;

impl SignResolver<BigRational> for RationalSigns {
    fn sign(&mut self, c: &BigRational) -> Result<Sign, Error> {
        if c.is_positive() {
            Ok(Sign::Pos)
        } else {
            Ok(Sign::Neg)
        }
    }
}

impl FunctionExpr {
    pub fn mono(coeff: BigRational, pu: BigRational, pw: BigRational) -> FunctionExpr {
        FunctionExpr::Monomial { coeff, pu, pw }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self {
            FunctionExpr::Monomial { pu, pw, .. } => {
                if pu.is_negative() || pw.is_negative() {
                    return Err(Error::NegativeMonomialExponent);
                }
                Ok(())
            }
            FunctionExpr::Abs(a) => a.validate(),
            FunctionExpr::Add(a, b)
            | FunctionExpr::Sub(a, b)
            | FunctionExpr::Mul(a, b)
            | FunctionExpr::Min(a, b)
            | FunctionExpr::Max(a, b) => {
                a.validate()?;
                b.validate()
            }
        }
    }

    /// All monomial leaves (ignoring the branch structure).
    pub fn leaves(&self) -> Vec<(&BigRational, &BigRational, &BigRational)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a BigRational, &'a BigRational, &'a BigRational)>) {
        match self {
            FunctionExpr::Monomial { coeff, pu, pw } => out.push((coeff, pu, pw)),
            FunctionExpr::Abs(a) => a.collect_leaves(out),
            FunctionExpr::Add(a, b)
            | FunctionExpr::Sub(a, b)
            | FunctionExpr::Mul(a, b)
            | FunctionExpr::Min(a, b)
            | FunctionExpr::Max(a, b) => {
                a.collect_leaves(out);
                b.collect_leaves(out);
            }
        }
    }

    /// LCM of the denominators of all `w`-exponents; the symbolic fan
    /// parameter is substituted as `c = sigma * s^N` with this `N` so that
    /// fractional powers of `c` stay polynomial in `s`.
    pub fn w_denominator_lcm(&self) -> i64 {
        use num_integer::Integer;
        let mut n: i64 = 1;
        for (_, _, pw) in self.leaves() {
            let d: i64 = pw.denom().try_into().unwrap_or(1);
            n = n.lcm(&d);
        }
        n
    }

    pub fn scaled(&self, c: &BigRational) -> FunctionExpr {
        FunctionExpr::Mul(
            Box::new(FunctionExpr::mono(c.clone(), BigRational::zero(), BigRational::zero())),
            Box::new(self.clone()),
        )
    }

    /// Pre-composition with the boundary swap `(u, w) -> (u, u^beta - w)`.
    /// Requires every `w`-exponent to be a non-negative integer.
    pub fn boundary_swap(&self, beta: &BigRational) -> Result<FunctionExpr, Error> {
        Ok(match self {
            FunctionExpr::Monomial { coeff, pu, pw } => {
                if !pw.denom().is_one() {
                    return Err(Error::SwapNeedsIntegerPowers);
                }
                let k: i64 = pw.numer().try_into().map_err(|_| Error::SwapNeedsIntegerPowers)?;
                // c u^pu (u^beta - w)^k expanded binomially.
                let mut sum: Option<FunctionExpr> = None;
                let mut binom = BigRational::from_integer(1.into());
                for j in 0..=k {
                    if j > 0 {
                        binom = binom * BigRational::from_integer((k - j + 1).into())
                            / BigRational::from_integer(j.into());
                    }
                    let sign = if (k - j) % 2 == 0 {
                        BigRational::from_integer(1.into())
                    } else {
                        BigRational::from_integer((-1).into())
                    };
                    let term = FunctionExpr::mono(
                        coeff * &binom * sign,
                        pu + beta * BigRational::from_integer(j.into()),
                        BigRational::from_integer((k - j).into()),
                    );
                    sum = Some(match sum {
                        None => term,
                        Some(acc) => FunctionExpr::Add(Box::new(acc), Box::new(term)),
                    });
                }
                sum.expect("k >= 0 produces at least one term")
            }
            FunctionExpr::Abs(a) => FunctionExpr::Abs(Box::new(a.boundary_swap(beta)?)),
            FunctionExpr::Add(a, b) => FunctionExpr::Add(
                Box::new(a.boundary_swap(beta)?),
                Box::new(b.boundary_swap(beta)?),
            ),
            FunctionExpr::Sub(a, b) => FunctionExpr::Sub(
                Box::new(a.boundary_swap(beta)?),
                Box::new(b.boundary_swap(beta)?),
            ),
            FunctionExpr::Mul(a, b) => FunctionExpr::Mul(
                Box::new(a.boundary_swap(beta)?),
                Box::new(b.boundary_swap(beta)?),
            ),
            FunctionExpr::Min(a, b) => FunctionExpr::Min(
                Box::new(a.boundary_swap(beta)?),
                Box::new(b.boundary_swap(beta)?),
            ),
            FunctionExpr::Max(a, b) => FunctionExpr::Max(
                Box::new(a.boundary_swap(beta)?),
                Box::new(b.boundary_swap(beta)?),
            ),
        })
    }

    pub fn eval_f64(&self, u: f64, w: f64) -> f64 {
        match self {
            FunctionExpr::Monomial { coeff, pu, pw } => {
                let c = rational_f64(coeff);
                c * u.powf(rational_f64(pu)) * w.powf(rational_f64(pw))
            }
            FunctionExpr::Add(a, b) => a.eval_f64(u, w) + b.eval_f64(u, w),
            FunctionExpr::Sub(a, b) => a.eval_f64(u, w) - b.eval_f64(u, w),
            FunctionExpr::Mul(a, b) => a.eval_f64(u, w) * b.eval_f64(u, w),
            FunctionExpr::Abs(a) => a.eval_f64(u, w).abs(),
            FunctionExpr::Min(a, b) => a.eval_f64(u, w).min(b.eval_f64(u, w)),
            FunctionExpr::Max(a, b) => a.eval_f64(u, w).max(b.eval_f64(u, w)),
        }
    }
}

fn rational_f64(r: &BigRational) -> f64 {
    num_traits::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Substitutes `u = U(t)`, `w = W(t)` into the expression with exact series
/// arithmetic, truncating at exponent `bound`.
pub fn substitute<C: Coeff, R: SignResolver<C>>(
    f: &FunctionExpr,
    u: &Series<C>,
    w: &Series<C>,
    bound: &BigRational,
    resolver: &mut R,
) -> Result<Series<C>, Error> {
    match f {
        FunctionExpr::Monomial { coeff, pu, pw } => {
            let up = u.pow_rational(pu, bound).map_err(map_pow_err)?;
            let wp = w.pow_rational(pw, bound).map_err(map_pow_err)?;
            Ok(up.mul(&wp, bound).scale(&C::from_rat(coeff)))
        }
        FunctionExpr::Add(a, b) => {
            let sa = substitute(a, u, w, bound, resolver)?;
            let sb = substitute(b, u, w, bound, resolver)?;
            Ok(sa.add(&sb))
        }
        FunctionExpr::Sub(a, b) => {
            let sa = substitute(a, u, w, bound, resolver)?;
            let sb = substitute(b, u, w, bound, resolver)?;
            Ok(sa.sub(&sb))
        }
        FunctionExpr::Mul(a, b) => {
            let sa = substitute(a, u, w, bound, resolver)?;
            let sb = substitute(b, u, w, bound, resolver)?;
            Ok(sa.mul(&sb, bound))
        }
        FunctionExpr::Abs(a) => {
            let s = substitute(a, u, w, bound, resolver)?;
            abs_series(s, resolver)
        }
        FunctionExpr::Min(a, b) => {
            let sa = substitute(a, u, w, bound, resolver)?;
            let sb = substitute(b, u, w, bound, resolver)?;
            pick_branch(sa, sb, true, resolver)
        }
        FunctionExpr::Max(a, b) => {
            let sa = substitute(a, u, w, bound, resolver)?;
            let sb = substitute(b, u, w, bound, resolver)?;
            pick_branch(sa, sb, false, resolver)
        }
    }
}

fn map_pow_err(e: PowError) -> Error {
    match e {
        PowError::IrrationalLeadingRoot => Error::FractionalPowerIrrational,
        PowError::NegativeExponent => Error::NegativeMonomialExponent,
        PowError::ExponentTooLarge => Error::ExponentTooLarge,
    }
}

/// `|s|` as a germ at `0+`: the sign of the leading coefficient decides.
/// A series with no visible terms keeps its validity bound: both signs agree
/// up to what is known.
fn abs_series<C: Coeff, R: SignResolver<C>>(s: Series<C>, resolver: &mut R) -> Result<Series<C>, Error> {
    match s.leading() {
        None => Ok(s),
        Some((_, c)) => match resolver.sign(c)? {
            Sign::Pos => Ok(s),
            Sign::Neg => Ok(s.neg()),
        },
    }
}

/// `min`/`max` of two germs by the sign of their difference. On an exact tie
/// the operands are equal and either is returned; on a tie up to the
/// resolution bound the common prefix is returned with that bound.
fn pick_branch<C: Coeff, R: SignResolver<C>>(
    a: Series<C>,
    b: Series<C>,
    want_min: bool,
    resolver: &mut R,
) -> Result<Series<C>, Error> {
    let d = a.sub(&b);
    match d.leading() {
        None => match d.valid_to() {
            // Exact tie: the branches are identical.
            None => Ok(a),
            // Tie to resolution: branches agree on everything we can see.
            Some(bd) => {
                let bd = bd.clone();
                Ok(a.truncate(&bd))
            }
        },
        Some((_, c)) => {
            let a_smaller = resolver.sign(c)? == Sign::Neg;
            if a_smaller == want_min {
                Ok(a)
            } else {
                Ok(b)
            }
        }
    }
}

/// The order of an admissible expression along a 2-d coordinate-parameterized
/// arc `(t, w(t))`, with exact arithmetic up to `bound`.
pub fn ord_on_arc(f: &FunctionExpr, arc: &Arc, bound: &BigRational) -> Result<OrderBound, Error> {
    if arc.dim() != 2 {
        return Err(Error::ArcDimension(arc.dim()));
    }
    if arc.scale_coord() != Some(0) {
        return Err(Error::TriangleArcExpected);
    }
    let u = arc.coords()[0].clone();
    let w = arc.coords()[1].clone();
    let s = substitute(f, &u, &w, bound, &mut RationalSigns)?;
    Ok(s.order())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::exponent::{rat, rat_int, ExtendedExponent};
    use crate::exponents::series::series_order;

    fn w() -> FunctionExpr {
        FunctionExpr::mono(rat_int(1), rat_int(0), rat_int(1))
    }

    fn u_pow(p: BigRational) -> FunctionExpr {
        FunctionExpr::mono(rat_int(1), p, rat_int(0))
    }

    fn w_minus_u2() -> FunctionExpr {
        FunctionExpr::Sub(Box::new(w()), Box::new(u_pow(rat_int(2))))
    }

    fn arc_w(series: Series<BigRational>) -> Arc {
        Arc::triangle_arc(series)
    }

    fn bound() -> BigRational {
        rat_int(64)
    }

    #[test]
    fn identically_zero_on_matching_arc() {
        // f = w - u^2 on w = u^2 vanishes identically.
        let arc = arc_w(Series::monomial(rat_int(2), rat_int(1)));
        let o = ord_on_arc(&w_minus_u2(), &arc, &bound()).unwrap();
        assert_eq!(o, OrderBound::Exact(ExtendedExponent::Infinity));
    }

    #[test]
    fn order_of_w_on_power_arc() {
        // f = w on w = c u^alpha has order alpha.
        let arc = arc_w(Series::monomial(rat(7, 2), rat(3, 5)));
        let o = ord_on_arc(&w(), &arc, &bound()).unwrap();
        assert_eq!(o, OrderBound::Exact(ExtendedExponent::from_pair(7, 2)));
    }

    #[test]
    fn abs_difference_reveals_deep_term() {
        // f = |w - u^2| on w = u^2 + 5u^3 gives |5u^3| -> order 3.
        let f = FunctionExpr::Abs(Box::new(w_minus_u2()));
        let arc = arc_w(Series::from_terms(vec![
            (rat_int(2), rat_int(1)),
            (rat_int(3), rat_int(5)),
        ]));
        let o = ord_on_arc(&f, &arc, &bound()).unwrap();
        assert_eq!(o, OrderBound::Exact(ExtendedExponent::from_int(3)));
        // And the sign was flipped where needed: w = u^2 - 5u^3.
        let arc2 = arc_w(Series::from_terms(vec![
            (rat_int(2), rat_int(1)),
            (rat_int(3), rat_int(-5)),
        ]));
        let s = substitute(
            &f,
            &arc2.coords()[0],
            &arc2.coords()[1],
            &bound(),
            &mut RationalSigns,
        )
        .unwrap();
        assert_eq!(series_order(&s), ExtendedExponent::from_int(3));
        assert!(s.leading().unwrap().1.is_positive());
    }

    #[test]
    fn min_max_leading_comparison_with_tie() {
        // min(w, u^2) on w = u^2 + u^5: tie at order 2, deeper term decides.
        let f = FunctionExpr::Min(Box::new(w()), Box::new(u_pow(rat_int(2))));
        let arc = arc_w(Series::from_terms(vec![
            (rat_int(2), rat_int(1)),
            (rat_int(5), rat_int(1)),
        ]));
        let s = substitute(
            &f,
            &arc.coords()[0],
            &arc.coords()[1],
            &bound(),
            &mut RationalSigns,
        )
        .unwrap();
        // min picks u^2 (smaller beyond the tie): exactly one term.
        assert_eq!(s.terms().len(), 1);
        assert_eq!(series_order(&s), ExtendedExponent::from_int(2));

        let g = FunctionExpr::Max(Box::new(w()), Box::new(u_pow(rat_int(2))));
        let s = substitute(
            &g,
            &arc.coords()[0],
            &arc.coords()[1],
            &bound(),
            &mut RationalSigns,
        )
        .unwrap();
        assert_eq!(s.terms().len(), 2);
    }

    #[test]
    fn resolution_bound_reported_not_guessed() {
        // f = w - u^2 against an arc matching far beyond any small bound.
        let arc = arc_w(Series::from_terms(vec![
            (rat_int(2), rat_int(1)),
            (rat_int(80), rat_int(1)),
        ]));
        let small = rat_int(10);
        let f = w_minus_u2();
        let s = substitute(&f, &arc.coords()[0], &arc.coords()[1], &small, &mut RationalSigns);
        // Substitution itself is fine: w's own terms are exact...
        let s = s.unwrap();
        // ...and the difference has its order visible exactly (80 > bound is
        // dropped from the product path but the arc series is exact, so the
        // subtraction sees the term or knows its absence).
        match s.order() {
            OrderBound::Exact(e) => assert_eq!(e, ExtendedExponent::from_int(80)),
            OrderBound::AtLeast(b) => assert!(b >= small),
        }
    }

    #[test]
    fn fractional_powers() {
        // f = u^{1/2} w^{1/2} on w = 4u^3: sqrt(4) exact -> 2 u^2.
        let f = FunctionExpr::mono(rat_int(1), rat(1, 2), rat(1, 2));
        let arc = arc_w(Series::monomial(rat_int(3), rat_int(4)));
        let o = ord_on_arc(&f, &arc, &bound()).unwrap();
        assert_eq!(o, OrderBound::Exact(ExtendedExponent::from_int(2)));
        // w = 2u^3: sqrt(2) is irrational -> explicit failure.
        let arc2 = arc_w(Series::monomial(rat_int(3), rat_int(2)));
        assert!(matches!(
            ord_on_arc(&f, &arc2, &bound()),
            Err(Error::FractionalPowerIrrational)
        ));
    }

    #[test]
    fn boundary_swap_expansion() {
        // w^2 under (u,w) -> (u, u^beta - w), beta = 1:
        // (u - w)^2 = u^2 - 2uw + w^2.
        let f = FunctionExpr::mono(rat_int(1), rat_int(0), rat_int(2));
        let g = f.boundary_swap(&rat_int(1)).unwrap();
        for (uu, ww) in [(0.5, 0.25), (0.3, 0.1), (0.9, 0.2)] {
            let direct = (uu - ww) * (uu - ww);
            assert!((g.eval_f64(uu, ww) - direct).abs() < 1e-12);
        }
        let frac = FunctionExpr::mono(rat_int(1), rat_int(0), rat(1, 2));
        assert!(matches!(
            frac.boundary_swap(&rat_int(1)),
            Err(Error::SwapNeedsIntegerPowers)
        ));
    }
}
