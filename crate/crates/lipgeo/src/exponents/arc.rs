//! Arcs: finite Puiseux expansions of curve germs, and their tangency orders.
//!
//! Tangency order is the valuation underlying the non-archimedean metric on
//! the space of arcs of a germ; everything here is exact.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::exponent::ExtendedExponent;
use super::series::{series_order, PuiseuxSeries, Series};
use crate::Error;

/// Which normalization an arc's parameter carries.
///
/// `Distance` arcs satisfy `|gamma(t)| = t` at leading order: the exponent-1
/// coefficient vector has squared norm exactly 1. `Coordinate` arcs have one
/// coordinate identically equal to `t`; tangency orders agree with the
/// distance normalization on this class because the reparameterization is
/// bi-Lipschitz with derivative `1 + o(1)`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Parameterization {
    Distance,
    Coordinate,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Arc {
    param: Parameterization,
    coords: Vec<PuiseuxSeries>,
    /// Index of the coordinate that is exactly `t` (coordinate mode).
    scale_coord: Option<usize>,
}

impl Arc {
    pub fn new(param: Parameterization, coords: Vec<PuiseuxSeries>) -> Result<Arc, Error> {
        if coords.len() < 2 {
            return Err(Error::ArcDimension(coords.len()));
        }
        let one = BigRational::one();
        for s in &coords {
            if let Some((e, _)) = s.terms().first() {
                if *e < one {
                    return Err(Error::ArcExponentBelowOne);
                }
            }
            if !s.is_exact() {
                return Err(Error::ArcInexactSeries);
            }
        }
        let scale_coord = match param {
            Parameterization::Coordinate => {
                let idx = coords.iter().position(is_exactly_t);
                match idx {
                    Some(i) => Some(i),
                    None => return Err(Error::ArcMissingScaleCoordinate),
                }
            }
            Parameterization::Distance => {
                let mut norm_sq = BigRational::zero();
                let mut saw_linear = false;
                for s in &coords {
                    let c = s.coeff_at(&one);
                    if !c.is_zero() {
                        saw_linear = true;
                    }
                    norm_sq += &c * &c;
                }
                if !saw_linear || !norm_sq.is_one() {
                    return Err(Error::ArcNotUnitSpeed);
                }
                None
            }
        };
        Ok(Arc { param, coords, scale_coord })
    }

    /// 2-d coordinate-parameterized arc `(t, w(t))` inside a Hölder triangle.
    pub fn triangle_arc(w: PuiseuxSeries) -> Arc {
        Arc {
            param: Parameterization::Coordinate,
            coords: vec![t_series(), w],
            scale_coord: Some(0),
        }
    }

    pub fn param(&self) -> Parameterization {
        self.param
    }

    pub fn coords(&self) -> &[PuiseuxSeries] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn scale_coord(&self) -> Option<usize> {
        self.scale_coord
    }

    pub fn point_at(&self, t: f64) -> Vec<f64> {
        self.coords.iter().map(|s| s.eval_f64(t)).collect()
    }

    /// Tangency order `tord`: the order of the coordinate-wise difference.
    /// Identical arcs give `inf`.
    pub fn tord(&self, other: &Arc) -> Result<ExtendedExponent, Error> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        if self.param != other.param {
            return Err(Error::MixedParameterization);
        }
        let mut best = ExtendedExponent::Infinity;
        for (a, b) in self.coords.iter().zip(&other.coords) {
            let d = a.sub(b);
            let o = series_order(&d);
            if o < best {
                best = o;
            }
        }
        Ok(best)
    }

    /// Exponent-1 coefficient vector with its exact squared norm. The vector
    /// is the tangent direction; callers normalize numerically when the norm
    /// is irrational.
    pub fn tangent_vector(&self) -> Result<TangentVector, Error> {
        let one = BigRational::one();
        let comps: Vec<BigRational> = self.coords.iter().map(|s| s.coeff_at(&one)).collect();
        let norm_sq: BigRational = comps.iter().map(|c| c * c).sum();
        if norm_sq.is_zero() {
            return Err(Error::DegenerateTangent);
        }
        Ok(TangentVector { components: comps, norm_sq })
    }
}

fn is_exactly_t(s: &PuiseuxSeries) -> bool {
    s.terms().len() == 1 && s.terms()[0].0.is_one() && s.terms()[0].1.is_one()
}

pub fn t_series() -> PuiseuxSeries {
    Series::monomial(BigRational::one(), BigRational::one())
}

/// Exact tangent data: rational components, rational squared norm.
#[derive(Clone, PartialEq, Debug)]
pub struct TangentVector {
    pub components: Vec<BigRational>,
    pub norm_sq: BigRational,
}

impl TangentVector {
    pub fn is_unit(&self) -> bool {
        self.norm_sq.is_one()
    }

    /// Numeric unit vector.
    pub fn unit_f64(&self) -> Vec<f64> {
        let n = self.norm_sq.to_f64().unwrap_or(f64::NAN).sqrt();
        self.components
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN) / n)
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct ArcFamily {
    arcs: Vec<Arc>,
}

impl ArcFamily {
    pub fn new(arcs: Vec<Arc>) -> Result<ArcFamily, Error> {
        let mut it = arcs.iter();
        let first = it.next().ok_or(Error::EmptyArcFamily)?;
        for a in it {
            if a.dim() != first.dim() {
                return Err(Error::DimensionMismatch(first.dim(), a.dim()));
            }
        }
        Ok(ArcFamily { arcs })
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn dim(&self) -> usize {
        self.arcs[0].dim()
    }

    /// `tord(Z, Z') = sup over pairs`; finite families make the sup a max.
    pub fn set_tord(&self, other: &ArcFamily) -> Result<ExtendedExponent, Error> {
        let mut best: Option<ExtendedExponent> = None;
        for a in &self.arcs {
            for b in &other.arcs {
                let t = a.tord(b)?;
                best = Some(match best {
                    None => t,
                    Some(cur) => cur.max_of(t),
                });
            }
        }
        Ok(best.expect("families are nonempty"))
    }

    /// `tord(gamma, Z)` for a single arc against this family.
    pub fn tord_to(&self, arc: &Arc) -> Result<ExtendedExponent, Error> {
        let mut best: Option<ExtendedExponent> = None;
        for b in &self.arcs {
            let t = arc.tord(b)?;
            best = Some(match best {
                None => t,
                Some(cur) => cur.max_of(t),
            });
        }
        Ok(best.expect("family is nonempty"))
    }
}
