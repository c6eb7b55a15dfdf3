//! Abstract pizzas: the complete invariant of contact Lipschitz equivalence
//! of semialgebraic Lipschitz functions on a Hölder triangle.
//!
//! A pizza is an ordered chain of slices. Each slice records the orders of
//! the function at its two boundary arcs (`q_in`, `q_out`), the exponent of
//! the slice triangle (`beta`), and the affine width law `mu(q) = a q + b`
//! on the order interval. Point slices (`q_in == q_out`) record the single
//! width value `beta`; the width there is the slice exponent, which may
//! exceed `q`, so the `mu(q) <= q` inequality is enforced on non-degenerate
//! intervals only.

pub mod extract;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::exponents::exponent::format_rational;
use crate::exponents::{Arc, ArcFamily, ExtendedExponent};
use crate::Error;

pub use extract::{extract_pizza, width_at_arc, ExtractOptions, PizzaExtraction};

/// Affine width law `mu(q) = a q + b`. At an infinite endpoint the value is
/// `inf` when `a > 0` and `b` when `a == 0`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WidthFunction {
    pub a: BigRational,
    pub b: BigRational,
}

impl WidthFunction {
    pub fn constant(b: BigRational) -> WidthFunction {
        WidthFunction { a: BigRational::zero(), b }
    }

    pub fn is_constant(&self) -> bool {
        self.a.is_zero()
    }

    /// `None` when the value is unbounded below (`a < 0` at `inf`).
    pub fn eval(&self, q: &ExtendedExponent) -> Option<ExtendedExponent> {
        match q {
            ExtendedExponent::Finite(q) => {
                Some(ExtendedExponent::Finite(&self.a * q + &self.b))
            }
            ExtendedExponent::Infinity => {
                if self.a.is_positive() {
                    Some(ExtendedExponent::Infinity)
                } else if self.a.is_zero() {
                    Some(ExtendedExponent::Finite(self.b.clone()))
                } else {
                    None
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SliceEnd {
    In,
    Out,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PizzaSlice {
    pub q_in: ExtendedExponent,
    pub q_out: ExtendedExponent,
    pub beta: ExtendedExponent,
    pub mu: WidthFunction,
}

impl PizzaSlice {
    pub fn point(q: ExtendedExponent, beta: BigRational) -> PizzaSlice {
        PizzaSlice {
            q_in: q.clone(),
            q_out: q,
            beta: ExtendedExponent::Finite(beta.clone()),
            mu: WidthFunction::constant(beta),
        }
    }

    pub fn is_point(&self) -> bool {
        self.q_in == self.q_out
    }

    /// Boundary end where the width attains its maximum; `None` for points.
    pub fn supporting_end(&self) -> Option<SliceEnd> {
        if self.is_point() {
            return None;
        }
        let vin = self.mu.eval(&self.q_in)?;
        let vout = self.mu.eval(&self.q_out)?;
        Some(if vin >= vout { SliceEnd::In } else { SliceEnd::Out })
    }

    fn reversed(&self) -> PizzaSlice {
        PizzaSlice {
            q_in: self.q_out.clone(),
            q_out: self.q_in.clone(),
            beta: self.beta.clone(),
            mu: self.mu.clone(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AbstractPizza {
    pub triangle_beta: BigRational,
    pub slices: Vec<PizzaSlice>,
}

impl AbstractPizza {
    /// Checks every slice and chaining invariant; each violation names the
    /// slice index and the failed clause.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let one = ExtendedExponent::Finite(BigRational::one());
        if self.triangle_beta < BigRational::one() {
            out.push("triangle exponent must be >= 1".into());
        }
        if self.slices.is_empty() {
            out.push("pizza needs at least one slice".into());
            return out;
        }
        for (i, s) in self.slices.iter().enumerate() {
            for (name, q) in [("q_in", &s.q_in), ("q_out", &s.q_out)] {
                if *q < one {
                    out.push(format!("slice {i}: {name} below 1"));
                }
            }
            if s.beta < one {
                out.push(format!("slice {i}: beta below 1"));
            }
            if s.is_point() {
                if !s.mu.is_constant() {
                    out.push(format!("slice {i}: point slice must carry a constant width"));
                } else if ExtendedExponent::Finite(s.mu.b.clone()) != s.beta {
                    out.push(format!("slice {i}: point width must equal beta"));
                }
                continue;
            }
            if s.mu.is_constant() {
                out.push(format!("slice {i}: width must be non-constant when the interval is not a point"));
            }
            let (lo, hi) = min_max(&s.q_in, &s.q_out);
            let vals = (s.mu.eval(&lo), s.mu.eval(&hi));
            match vals {
                (Some(vlo), Some(vhi)) => {
                    // mu(q) <= q on the interval: affine versus identity is
                    // decided at the endpoints.
                    if vlo > lo || vhi > hi {
                        out.push(format!("slice {i}: mu(q) <= q fails on the interval"));
                    }
                    let min_val = vlo.clone().min_of(vhi.clone());
                    if min_val != s.beta {
                        out.push(format!(
                            "slice {i}: min of mu over the interval is {min_val}, beta is {}",
                            s.beta
                        ));
                    }
                }
                _ => out.push(format!("slice {i}: width unbounded below on the interval")),
            }
            if let (Some(vin), Some(vout)) = (s.mu.eval(&s.q_in), s.mu.eval(&s.q_out)) {
                if vin == vout && !s.is_point() {
                    out.push(format!("slice {i}: width law degenerate across the interval"));
                }
            }
        }
        for i in 1..self.slices.len() {
            if self.slices[i - 1].q_out != self.slices[i].q_in {
                out.push(format!("slice {i}: q_in does not chain to the previous q_out"));
            }
        }
        // The triangle exponent is the min of the slice exponents (chained
        // Hölder triangles compose by the min rule).
        let min_beta = self.slices.iter().map(|s| s.beta.clone()).min();
        if let Some(mb) = min_beta {
            if mb != ExtendedExponent::Finite(self.triangle_beta.clone()) {
                out.push(format!(
                    "triangle exponent {} does not equal the minimum slice exponent {mb}",
                    format_rational(&self.triangle_beta)
                ));
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Repeatedly merges adjacent slices whose union is again a slice:
    /// `q` weakly monotone across the union, one affine width law, and the
    /// shared-arc value consistent. Idempotent.
    pub fn minimalize(&self) -> Result<AbstractPizza, Error> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(Error::InvalidPizza(violations.join("; ")));
        }
        let mut slices = self.slices.clone();
        loop {
            let mut merged = false;
            let mut i = 0;
            while i + 1 < slices.len() {
                if let Some(m) = merge_slices(&slices[i], &slices[i + 1]) {
                    slices[i] = m;
                    slices.remove(i + 1);
                    merged = true;
                } else {
                    i += 1;
                }
            }
            if !merged {
                break;
            }
        }
        Ok(AbstractPizza { triangle_beta: self.triangle_beta.clone(), slices })
    }

    pub fn reversed(&self) -> AbstractPizza {
        AbstractPizza {
            triangle_beta: self.triangle_beta.clone(),
            slices: self.slices.iter().rev().map(|s| s.reversed()).collect(),
        }
    }

    /// Decides combinatorial equivalence (equality of minimal pizzas);
    /// in unoriented mode the reversed orientation is also accepted.
    pub fn equivalent(&self, other: &AbstractPizza, oriented: bool) -> Result<bool, Error> {
        let a = self.minimalize()?;
        let b = other.minimalize()?;
        if a == b {
            return Ok(true);
        }
        if !oriented {
            return Ok(a == b.reversed());
        }
        Ok(false)
    }
}

fn min_max(a: &ExtendedExponent, b: &ExtendedExponent) -> (ExtendedExponent, ExtendedExponent) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

fn weakly_monotone(a: &ExtendedExponent, b: &ExtendedExponent, c: &ExtendedExponent) -> bool {
    (a <= b && b <= c) || (a >= b && b >= c)
}

/// The combinatorial merge criterion. Returns the union slice when the two
/// adjacent slices fuse into one.
fn merge_slices(s1: &PizzaSlice, s2: &PizzaSlice) -> Option<PizzaSlice> {
    debug_assert_eq!(s1.q_out, s2.q_in);
    let q = &s1.q_out;
    match (s1.is_point(), s2.is_point()) {
        (true, true) => {
            // Same order on both sides: the union has constant order and the
            // union triangle exponent is the min.
            let beta = s1.beta.clone().min_of(s2.beta.clone());
            let beta_rat = beta.as_rational()?.clone();
            Some(PizzaSlice::point(q.clone(), beta_rat))
        }
        (true, false) => {
            // The interval law must take the point's width at the shared arc.
            let v = s2.mu.eval(q)?;
            if v != s1.beta {
                return None;
            }
            Some(PizzaSlice {
                q_in: s1.q_in.clone(),
                q_out: s2.q_out.clone(),
                beta: s1.beta.clone().min_of(s2.beta.clone()),
                mu: s2.mu.clone(),
            })
        }
        (false, true) => {
            let v = s1.mu.eval(q)?;
            if v != s2.beta {
                return None;
            }
            Some(PizzaSlice {
                q_in: s1.q_in.clone(),
                q_out: s2.q_out.clone(),
                beta: s1.beta.clone().min_of(s2.beta.clone()),
                mu: s1.mu.clone(),
            })
        }
        (false, false) => {
            if s1.mu != s2.mu {
                return None;
            }
            if !weakly_monotone(&s1.q_in, q, &s2.q_out) {
                return None;
            }
            Some(PizzaSlice {
                q_in: s1.q_in.clone(),
                q_out: s2.q_out.clone(),
                beta: s1.beta.clone().min_of(s2.beta.clone()),
                mu: s1.mu.clone(),
            })
        }
    }
}

/// Finite samples standing in for a Hölder triangle: the two boundary arcs
/// plus optional interior arcs.
#[derive(Clone, Debug)]
pub struct TriangleSample {
    pub gamma1: Arc,
    pub gamma2: Arc,
    pub interior: Vec<Arc>,
}

impl TriangleSample {
    fn family(&self) -> Result<ArcFamily, Error> {
        let mut arcs = vec![self.gamma1.clone(), self.gamma2.clone()];
        arcs.extend(self.interior.iter().cloned());
        ArcFamily::new(arcs)
    }
}

#[derive(Clone, Debug)]
pub struct TwoTriangleReport {
    pub holds: bool,
    pub failures: Vec<String>,
}

/// Checks the matched-boundary contact condition on samples:
/// `tord(g1, T') = tord(g1, g1') = tord(g1', T)` and the same chain for the
/// second boundary pair.
pub fn check_two_triangle_condition(
    t: &TriangleSample,
    t_prime: &TriangleSample,
) -> Result<TwoTriangleReport, Error> {
    let fam_t = t.family()?;
    let fam_tp = t_prime.family()?;
    let mut failures = Vec::new();
    for (label, g, g_mate) in [
        ("boundary 1", &t.gamma1, &t_prime.gamma1),
        ("boundary 2", &t.gamma2, &t_prime.gamma2),
    ] {
        let to_tp = fam_tp.tord_to(g)?;
        let direct = g.tord(g_mate)?;
        let back = fam_t.tord_to(g_mate)?;
        if to_tp != direct {
            failures.push(format!(
                "{label}: tord(gamma, T') = {to_tp} but tord(gamma, gamma') = {direct}"
            ));
        }
        if back != direct {
            failures.push(format!(
                "{label}: tord(gamma', T) = {back} but tord(gamma, gamma') = {direct}"
            ));
        }
    }
    Ok(TwoTriangleReport { holds: failures.is_empty(), failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::arc::t_series;
    use crate::exponents::exponent::{rat, rat_int};
    use crate::exponents::series::Series;
    use crate::exponents::Parameterization;

    fn fin(p: i64, q: i64) -> ExtendedExponent {
        ExtendedExponent::from_pair(p, q)
    }

    fn inf() -> ExtendedExponent {
        ExtendedExponent::Infinity
    }

    fn slice(q_in: ExtendedExponent, q_out: ExtendedExponent, beta: (i64, i64), a: (i64, i64), b: (i64, i64)) -> PizzaSlice {
        PizzaSlice {
            q_in,
            q_out,
            beta: fin(beta.0, beta.1),
            mu: WidthFunction { a: rat(a.0, a.1), b: rat(b.0, b.1) },
        }
    }

    /// The minimal pizza of |w - u^2| on the standard 1-triangle.
    fn abs_diff_pizza() -> AbstractPizza {
        AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![
                slice(fin(2, 1), inf(), (2, 1), (1, 1), (0, 1)),
                slice(inf(), fin(1, 1), (1, 1), (1, 1), (0, 1)),
            ],
        }
    }

    #[test]
    fn validator_accepts_the_known_pizzas() {
        // one slice, Q = [1, inf], mu(q) = q, beta = 1
        let p = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![slice(inf(), fin(1, 1), (1, 1), (1, 1), (0, 1))],
        };
        assert!(p.is_valid(), "{:?}", p.validate());
        assert!(abs_diff_pizza().is_valid(), "{:?}", abs_diff_pizza().validate());
        // point pizza of f = u on the 2-triangle: Q = {1}, beta = 2
        let point = AbstractPizza {
            triangle_beta: rat_int(2),
            slices: vec![PizzaSlice::point(fin(1, 1), rat_int(2))],
        };
        assert!(point.is_valid(), "{:?}", point.validate());
    }

    #[test]
    fn validator_names_violations() {
        // mu(q) = q + 1 violates mu <= q
        let p = AbstractPizza {
            triangle_beta: rat_int(2),
            slices: vec![slice(fin(1, 1), fin(3, 1), (2, 1), (1, 1), (1, 1))],
        };
        assert!(p.validate().iter().any(|v| v.contains("mu(q) <= q")));
        // constant width on a non-degenerate interval
        let p = AbstractPizza {
            triangle_beta: rat_int(2),
            slices: vec![PizzaSlice {
                q_in: fin(2, 1),
                q_out: fin(3, 1),
                beta: fin(2, 1),
                mu: WidthFunction::constant(rat_int(2)),
            }],
        };
        assert!(p.validate().iter().any(|v| v.contains("non-constant")));
        // chaining breach
        let p = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![
                slice(fin(1, 1), fin(2, 1), (1, 1), (1, 1), (0, 1)),
                slice(fin(3, 1), fin(4, 1), (3, 1), (1, 1), (0, 1)),
            ],
        };
        assert!(p.validate().iter().any(|v| v.contains("chain")));
    }

    #[test]
    fn minimalize_merges_shared_law() {
        // ([2,3], mu=q) + ([3,inf], mu=q) with q increasing -> one slice.
        let p = AbstractPizza {
            triangle_beta: rat_int(2),
            slices: vec![
                slice(fin(2, 1), fin(3, 1), (2, 1), (1, 1), (0, 1)),
                slice(fin(3, 1), inf(), (3, 1), (1, 1), (0, 1)),
            ],
        };
        let m = p.minimalize().unwrap();
        assert_eq!(m.slices.len(), 1);
        assert_eq!(m.slices[0].q_in, fin(2, 1));
        assert_eq!(m.slices[0].q_out, inf());
        assert_eq!(m.slices[0].beta, fin(2, 1));
        // idempotent
        assert_eq!(m.minimalize().unwrap(), m);
    }

    #[test]
    fn minimalize_respects_non_monotone_q() {
        // |w - u^2|: q runs 2 -> inf -> 1; same law but not monotone.
        let p = abs_diff_pizza();
        let m = p.minimalize().unwrap();
        assert_eq!(m.slices.len(), 2);
        assert_eq!(m, p);
    }

    #[test]
    fn point_slices_merge_into_laws() {
        // point (q=2, width 2) followed by ([2,1], mu=q): law matches at the
        // shared arc, so the union is one slice.
        let p = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![
                PizzaSlice::point(fin(2, 1), rat_int(2)),
                slice(fin(2, 1), fin(1, 1), (1, 1), (1, 1), (0, 1)),
            ],
        };
        let m = p.minimalize().unwrap();
        assert_eq!(m.slices.len(), 1);
        assert_eq!(m.slices[0].q_in, fin(2, 1));
        assert_eq!(m.slices[0].q_out, fin(1, 1));
        // mismatched point value does not merge
        let p = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![
                PizzaSlice::point(fin(2, 1), rat_int(3)),
                slice(fin(2, 1), fin(1, 1), (1, 1), (1, 1), (0, 1)),
            ],
        };
        // beta=3 at a q=2 point is fine as data (slice exponent 3), but the
        // law value at the shared arc is 2 != 3.
        let m = p.minimalize();
        // invalid: triangle beta mismatch (min slice beta is 1, fine), point
        // width 3 > q: allowed for points; the merge must simply not fire.
        let m = m.unwrap();
        assert_eq!(m.slices.len(), 2);
    }

    #[test]
    fn equivalence_modes() {
        let p = abs_diff_pizza();
        assert!(p.equivalent(&p, true).unwrap());
        let r = p.reversed();
        assert!(!p.equivalent(&r, true).unwrap());
        assert!(p.equivalent(&r, false).unwrap());
        // different interval endpoints are different pizzas
        let a = AbstractPizza {
            triangle_beta: rat_int(1),
            slices: vec![slice(fin(1, 1), inf(), (1, 1), (1, 1), (0, 1))],
        };
        let b = AbstractPizza {
            triangle_beta: rat_int(2),
            slices: vec![slice(fin(2, 1), inf(), (2, 1), (1, 1), (0, 1))],
        };
        assert!(!a.equivalent(&b, false).unwrap());
    }

    fn coord_arc3(w1: crate::exponents::PuiseuxSeries, w2: crate::exponents::PuiseuxSeries) -> Arc {
        Arc::new(Parameterization::Coordinate, vec![t_series(), w1, w2]).unwrap()
    }

    #[test]
    fn two_triangle_condition_cases() {
        let zero = crate::exponents::PuiseuxSeries::zero;
        let mono = |e: BigRational, c: BigRational| Series::monomial(e, c);
        // T with boundaries (t, 0, 0) and (t, t, 0); T' = graph-like shift in
        // the third coordinate by t^3.
        let g1 = coord_arc3(zero(), zero());
        let g2 = coord_arc3(t_series(), zero());
        let g1p = coord_arc3(zero(), mono(rat_int(3), rat_int(1)));
        let g2p = coord_arc3(t_series(), mono(rat_int(3), rat_int(1)));
        let t = TriangleSample { gamma1: g1.clone(), gamma2: g2.clone(), interior: vec![] };
        let tp = TriangleSample { gamma1: g1p, gamma2: g2p, interior: vec![] };
        let rep = check_two_triangle_condition(&t, &tp).unwrap();
        assert!(rep.holds, "{:?}", rep.failures);

        // T = T': all tangency orders infinite.
        let rep = check_two_triangle_condition(&t, &t).unwrap();
        assert!(rep.holds);

        // gamma1' tangent to gamma2 instead of gamma1: the chain breaks.
        let g1p_bad = coord_arc3(
            Series::from_terms(vec![(rat_int(1), rat_int(1)), (rat_int(2), rat_int(1))]),
            zero(),
        );
        let tp_bad = TriangleSample {
            gamma1: g1p_bad,
            gamma2: coord_arc3(t_series(), mono(rat_int(3), rat_int(1))),
            interior: vec![],
        };
        let rep = check_two_triangle_condition(&t, &tp_bad).unwrap();
        assert!(!rep.holds);
        assert!(!rep.failures.is_empty());
    }
}
