//! Piecewise-parametric germ models.
//!
//! A patch maps `(t, s) in (0, t_max] x [0, 1]` into ambient space; each
//! coordinate is a finite sum of terms `a(s) * t^q` with rational `q >= 1`
//! and `a` piecewise linear in `s` with rational breakpoints. Boundary arcs
//! are `s = 0` and `s = 1`; gluings identify boundary arcs pointwise at equal
//! scale, which is checked exactly at construction.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::exponents::arc::{Arc, Parameterization};
use crate::exponents::series::{PuiseuxSeries, Series};
use crate::Error;

/// Piecewise-linear function of `s in [0, 1]` with rational breakpoints.
#[derive(Clone, PartialEq, Debug)]
pub struct PiecewiseLinear {
    /// `(s, value)` with strictly increasing `s`, first at 0, last at 1.
    points: Vec<(BigRational, BigRational)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(BigRational, BigRational)>) -> Result<PiecewiseLinear, Error> {
        if points.is_empty() {
            return Err(Error::BadModel("empty piecewise-linear table".into()));
        }
        if points.len() == 1 {
            let v = points[0].1.clone();
            return Ok(PiecewiseLinear::constant(v));
        }
        if !points[0].0.is_zero() || !points[points.len() - 1].0.is_one() {
            return Err(Error::BadModel("piecewise-linear table must span s in [0, 1]".into()));
        }
        for w in points.windows(2) {
            if w[0].0 >= w[1].0 {
                return Err(Error::BadModel("piecewise-linear breakpoints must increase".into()));
            }
        }
        Ok(PiecewiseLinear { points })
    }

    pub fn constant(v: BigRational) -> PiecewiseLinear {
        PiecewiseLinear {
            points: vec![(BigRational::zero(), v.clone()), (BigRational::one(), v)],
        }
    }

    pub fn linear(v0: BigRational, v1: BigRational) -> PiecewiseLinear {
        PiecewiseLinear {
            points: vec![(BigRational::zero(), v0), (BigRational::one(), v1)],
        }
    }

    /// Tent profile: 0 at both ends, `peak` in the middle.
    pub fn tent(peak: BigRational) -> PiecewiseLinear {
        PiecewiseLinear {
            points: vec![
                (BigRational::zero(), BigRational::zero()),
                (BigRational::new(1.into(), 2.into()), peak),
                (BigRational::one(), BigRational::zero()),
            ],
        }
    }

    pub fn points(&self) -> &[(BigRational, BigRational)] {
        &self.points
    }

    pub fn is_constant(&self) -> bool {
        self.points.iter().all(|(_, v)| v == &self.points[0].1)
    }

    pub fn eval_exact(&self, s: &BigRational) -> BigRational {
        if s <= &self.points[0].0 {
            return self.points[0].1.clone();
        }
        for w in self.points.windows(2) {
            if s <= &w[1].0 {
                let span = &w[1].0 - &w[0].0;
                let frac = (s - &w[0].0) / span;
                return &w[0].1 + (&w[1].1 - &w[0].1) * frac;
            }
        }
        self.points[self.points.len() - 1].1.clone()
    }

    pub fn eval_f64(&self, s: f64) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .points
            .iter()
            .map(|(a, b)| (a.to_f64().unwrap_or(0.0), b.to_f64().unwrap_or(0.0)))
            .collect();
        if s <= pts[0].0 {
            return pts[0].1;
        }
        for w in pts.windows(2) {
            if s <= w[1].0 {
                let frac = (s - w[0].0) / (w[1].0 - w[0].0);
                return w[0].1 + (w[1].1 - w[0].1) * frac;
            }
        }
        pts[pts.len() - 1].1
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct PatchTerm {
    pub exp: BigRational,
    pub coeff: PiecewiseLinear,
}

#[derive(Clone, PartialEq, Debug)]
pub struct Patch {
    /// One term list per ambient coordinate.
    pub coords: Vec<Vec<PatchTerm>>,
}

impl Patch {
    pub fn eval_f64(&self, t: f64, s: f64) -> Vec<f64> {
        self.coords
            .iter()
            .map(|terms| {
                terms
                    .iter()
                    .map(|term| {
                        term.coeff.eval_f64(s) * t.powf(term.exp.to_f64().unwrap_or(f64::NAN))
                    })
                    .sum()
            })
            .collect()
    }

    /// Exact coordinate series of the arc at fixed `s`.
    pub fn coord_series_at(&self, s: &BigRational) -> Vec<PuiseuxSeries> {
        self.coords
            .iter()
            .map(|terms| {
                Series::from_terms(
                    terms
                        .iter()
                        .map(|term| (term.exp.clone(), term.coeff.eval_exact(s)))
                        .collect(),
                )
            })
            .collect()
    }

    /// The arc at fixed `s` as a coordinate-parameterized [`Arc`]; requires
    /// one coordinate to be exactly `t`.
    pub fn arc_at(&self, s: &BigRational) -> Result<Arc, Error> {
        Arc::new(Parameterization::Coordinate, self.coord_series_at(s))
    }

    /// Constant in `s`: the patch degenerates to a single curve branch.
    pub fn is_degenerate(&self) -> bool {
        self.coords
            .iter()
            .all(|terms| terms.iter().all(|term| term.coeff.is_constant()))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    S0,
    S1,
}

impl Side {
    pub fn s_value(self) -> BigRational {
        match self {
            Side::S0 => BigRational::zero(),
            Side::S1 => BigRational::one(),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Side::S0 => 0,
            Side::S1 => 1,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Gluing {
    pub a: (usize, Side),
    pub b: (usize, Side),
}

#[derive(Clone, PartialEq, Debug)]
pub struct GermModel {
    pub dim: usize,
    pub patches: Vec<Patch>,
    pub gluings: Vec<Gluing>,
}

impl GermModel {
    pub fn new(dim: usize, patches: Vec<Patch>, gluings: Vec<Gluing>) -> Result<GermModel, Error> {
        if dim < 2 {
            return Err(Error::BadModel("ambient dimension must be at least 2".into()));
        }
        if patches.is_empty() {
            return Err(Error::BadModel("model needs at least one patch".into()));
        }
        let one = BigRational::one();
        for (pi, p) in patches.iter().enumerate() {
            if p.coords.len() != dim {
                return Err(Error::BadModel(format!(
                    "patch {pi} has {} coordinates, expected {dim}",
                    p.coords.len()
                )));
            }
            for terms in &p.coords {
                for term in terms {
                    if term.exp < one {
                        return Err(Error::BadModel(format!(
                            "patch {pi} has a term with exponent below 1"
                        )));
                    }
                }
            }
        }
        for g in &gluings {
            for (pi, _) in [g.a, g.b] {
                if pi >= patches.len() {
                    return Err(Error::BadModel(format!("gluing references patch {pi}")));
                }
            }
            // Glued boundary arcs must coincide pointwise at every scale.
            let sa = patches[g.a.0].coord_series_at(&g.a.1.s_value());
            let sb = patches[g.b.0].coord_series_at(&g.b.1.s_value());
            if sa != sb {
                return Err(Error::BadModel(format!(
                    "gluing ({}, s={}) <-> ({}, s={}) identifies different arcs",
                    g.a.0,
                    g.a.1.index(),
                    g.b.0,
                    g.b.1.index()
                )));
            }
        }
        Ok(GermModel { dim, patches, gluings })
    }

    /// Boundary and mid arcs of every patch, deduplicated by gluing; these
    /// sample the model's space of arcs.
    pub fn boundary_arcs(&self) -> Vec<Arc> {
        let mut arcs: Vec<Arc> = Vec::new();
        for p in &self.patches {
            for s in [BigRational::zero(), BigRational::one()] {
                if let Ok(a) = p.arc_at(&s) {
                    if !arcs.contains(&a) {
                        arcs.push(a);
                    }
                }
            }
        }
        arcs
    }
}

/// Partition of a model's patches into pancakes with claimed exponents.
#[derive(Clone, PartialEq, Debug)]
pub struct PancakeGroup {
    pub patches: Vec<usize>,
    pub beta: BigRational,
}

#[derive(Clone, PartialEq, Debug)]
pub struct PancakeDecomposition {
    pub groups: Vec<PancakeGroup>,
}

impl PancakeDecomposition {
    /// Every patch in exactly one group.
    pub fn check_partition(&self, model: &GermModel) -> Result<(), Error> {
        let mut seen = vec![false; model.patches.len()];
        for g in &self.groups {
            for &p in &g.patches {
                if p >= seen.len() || seen[p] {
                    return Err(Error::NotAPartition);
                }
                seen[p] = true;
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::NotAPartition)
        }
    }

    /// Group index per patch.
    pub fn patch_groups(&self, model: &GermModel) -> Result<Vec<usize>, Error> {
        self.check_partition(model)?;
        let mut out = vec![usize::MAX; model.patches.len()];
        for (gi, g) in self.groups.iter().enumerate() {
            for &p in &g.patches {
                out[p] = gi;
            }
        }
        Ok(out)
    }

    /// Pairs of groups sharing a glued boundary arc, with the number of
    /// distinct shared arcs.
    pub fn adjacency(&self, model: &GermModel) -> Result<Vec<((usize, usize), usize)>, Error> {
        let of = self.patch_groups(model)?;
        let mut counts: std::collections::BTreeMap<(usize, usize), usize> =
            std::collections::BTreeMap::new();
        for g in &model.gluings {
            let (ga, gb) = (of[g.a.0], of[g.b.0]);
            if ga == gb {
                continue;
            }
            let key = (ga.min(gb), ga.max(gb));
            *counts.entry(key).or_insert(0) += 1;
        }
        Ok(counts.into_iter().collect())
    }
}

/// Split a horn model's sectors into two halves; the union of the halves is
/// the whole (normally embedded) horn, so this decomposition is valid but
/// not minimal.
pub fn split_horn_decomposition(beta: &BigRational, sectors: usize) -> PancakeDecomposition {
    let half = sectors / 2;
    PancakeDecomposition {
        groups: vec![
            PancakeGroup { patches: (0..half).collect(), beta: beta.clone() },
            PancakeGroup { patches: (half..sectors).collect(), beta: beta.clone() },
        ],
    }
}

/// Each cusp branch as its own (degenerate) pancake.
pub fn cusp_branch_decomposition() -> PancakeDecomposition {
    PancakeDecomposition {
        groups: vec![
            PancakeGroup { patches: vec![0], beta: BigRational::one() },
            PancakeGroup { patches: vec![1], beta: BigRational::one() },
        ],
    }
}

/// Deterministic scale ladder plus link resolution and seed.
#[derive(Clone, PartialEq, Debug)]
pub struct ScaleSamplePlan {
    pub t_max: f64,
    pub t_min: f64,
    pub levels: usize,
    pub resolution: usize,
    pub seed: u64,
}

impl Default for ScaleSamplePlan {
    fn default() -> Self {
        ScaleSamplePlan {
            t_max: 2f64.powi(-6),
            t_min: 2f64.powi(-18),
            levels: 13,
            resolution: 17,
            seed: 42,
        }
    }
}

impl ScaleSamplePlan {
    pub fn validate(&self) -> Result<(), Error> {
        if self.levels < 4 {
            return Err(Error::TooFewSamples(4));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max <= 1.0) {
            return Err(Error::BadModel("scale plan needs 0 < t_min < t_max <= 1".into()));
        }
        if self.resolution < 2 {
            return Err(Error::BadModel("link resolution must be at least 2".into()));
        }
        Ok(())
    }

    /// Geometric ladder from `t_max` down to `t_min`.
    pub fn t_levels(&self) -> Vec<f64> {
        let n = self.levels;
        let ratio = (self.t_min / self.t_max).powf(1.0 / (n as f64 - 1.0));
        (0..n).map(|k| self.t_max * ratio.powi(k as i32)).collect()
    }

    /// Link parameter grid per patch.
    pub fn s_grid(&self) -> Vec<f64> {
        (0..self.resolution)
            .map(|i| i as f64 / (self.resolution - 1) as f64)
            .collect()
    }
}

/// Continued-fraction rational approximation with bounded denominator.
pub(crate) fn approx_rational(x: f64, max_den: i64) -> BigRational {
    let mut a = x.floor() as i64;
    let (mut p0, mut q0, mut p1, mut q1) = (1i64, 0i64, a, 1i64);
    let mut frac = x - a as f64;
    for _ in 0..40 {
        if frac.abs() < 1e-12 {
            break;
        }
        let inv = 1.0 / frac;
        a = inv.floor() as i64;
        frac = inv - a as f64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den || q2 <= 0 {
            break;
        }
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
    }
    BigRational::new(p1.into(), q1.into())
}

/// `K` exact-rational points on the unit circle spread roughly uniformly,
/// via the tangent half-angle parameterization.
pub fn rational_circle_points(k: usize) -> Vec<(BigRational, BigRational)> {
    let mut pts = Vec::with_capacity(k);
    for i in 0..k {
        let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (i as f64 + 0.5) / k as f64;
        let m = approx_rational((theta / 2.0).tan(), 64);
        let m2 = &m * &m;
        let den = &m2 + BigRational::one();
        let x = (BigRational::one() - &m2) / den.clone();
        let y = BigRational::from_integer(2.into()) * &m / den;
        pts.push((x, y));
    }
    pts
}

/// Standard beta-horn model: the cone over an inscribed `sectors`-gon at
/// cross-section radius `t^beta`, axis along the last coordinate.
pub fn horn_model(beta: &BigRational, sectors: usize) -> GermModel {
    assert!(sectors >= 3, "horn model needs at least 3 sectors");
    let pts = rational_circle_points(sectors);
    let mut patches = Vec::with_capacity(sectors);
    let mut gluings = Vec::with_capacity(sectors);
    for i in 0..sectors {
        let p = &pts[i];
        let q = &pts[(i + 1) % sectors];
        let coords = vec![
            vec![PatchTerm {
                exp: beta.clone(),
                coeff: PiecewiseLinear::linear(p.0.clone(), q.0.clone()),
            }],
            vec![PatchTerm {
                exp: beta.clone(),
                coeff: PiecewiseLinear::linear(p.1.clone(), q.1.clone()),
            }],
            vec![PatchTerm { exp: BigRational::one(), coeff: PiecewiseLinear::constant(BigRational::one()) }],
        ];
        patches.push(Patch { coords });
        gluings.push(Gluing {
            a: (i, Side::S1),
            b: ((i + 1) % sectors, Side::S0),
        });
    }
    GermModel::new(3, patches, gluings).expect("horn model is well formed")
}

/// The two branches of the cusp `x^3 = y^2` as a curve model: `(t, ±t^{3/2})`.
/// Not normally embedded: the branches meet only at the origin.
pub fn cusp_pair_model() -> GermModel {
    let three_half = BigRational::new(3.into(), 2.into());
    let branch = |sign: i64| Patch {
        coords: vec![
            vec![PatchTerm { exp: BigRational::one(), coeff: PiecewiseLinear::constant(BigRational::one()) }],
            vec![PatchTerm {
                exp: three_half.clone(),
                coeff: PiecewiseLinear::constant(BigRational::from_integer(sign.into())),
            }],
        ],
    };
    GermModel::new(2, vec![branch(1), branch(-1)], vec![]).expect("cusp model is well formed")
}

/// The standard beta-Hölder triangle `{x >= 0, 0 <= y <= x^beta}` as a
/// one-patch model (open link).
pub fn triangle_model(beta: &BigRational) -> GermModel {
    let patch = Patch {
        coords: vec![
            vec![PatchTerm { exp: BigRational::one(), coeff: PiecewiseLinear::constant(BigRational::one()) }],
            vec![PatchTerm {
                exp: beta.clone(),
                coeff: PiecewiseLinear::linear(BigRational::zero(), BigRational::one()),
            }],
        ],
    };
    GermModel::new(2, vec![patch], vec![]).expect("triangle model is well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::exponent::{rat, rat_int};

    #[test]
    fn piecewise_linear_eval() {
        let tent = PiecewiseLinear::tent(rat_int(1));
        assert_eq!(tent.eval_exact(&rat(1, 4)), rat(1, 2));
        assert_eq!(tent.eval_exact(&rat(1, 2)), rat_int(1));
        assert!((tent.eval_f64(0.75) - 0.5).abs() < 1e-12);
        assert!(PiecewiseLinear::constant(rat_int(3)).is_constant());
    }

    #[test]
    fn circle_points_are_exactly_unit() {
        for (x, y) in rational_circle_points(12) {
            assert_eq!(&x * &x + &y * &y, rat_int(1));
        }
        // All distinct.
        let pts = rational_circle_points(16);
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                assert_ne!(pts[i], pts[j]);
            }
        }
    }

    #[test]
    fn horn_model_shape() {
        let m = horn_model(&rat_int(2), 8);
        assert_eq!(m.dim, 3);
        assert_eq!(m.patches.len(), 8);
        // the 2-horn at t = 0.1: points lie at radius t^2 in the z = t plane
        let p = m.patches[0].eval_f64(0.1, 0.5);
        let r = (p[0] * p[0] + p[1] * p[1]).sqrt();
        assert!(r <= 0.01 + 1e-12 && r > 0.009);
        assert!((p[2] - 0.1).abs() < 1e-15);
        // boundary arcs: one coordinate exactly t
        let arc = m.patches[0].arc_at(&rat_int(0)).unwrap();
        assert_eq!(arc.scale_coord(), Some(2));
    }

    #[test]
    fn bad_gluing_rejected() {
        let mut m = horn_model(&rat_int(2), 6);
        // Point a gluing at the wrong side: arcs no longer coincide.
        m.gluings[0].b = (1, Side::S1);
        let res = GermModel::new(m.dim, m.patches.clone(), m.gluings.clone());
        assert!(matches!(res, Err(Error::BadModel(_))));
    }

    #[test]
    fn cusp_model_is_degenerate_curve() {
        let m = cusp_pair_model();
        assert!(m.patches.iter().all(|p| p.is_degenerate()));
        let up = m.patches[0].eval_f64(0.04, 0.3);
        assert!((up[1] - 0.04f64.powf(1.5)).abs() < 1e-15);
    }

    #[test]
    fn plan_ladder() {
        let plan = ScaleSamplePlan::default();
        plan.validate().unwrap();
        let ts = plan.t_levels();
        assert_eq!(ts.len(), 13);
        assert!((ts[0] - 2f64.powi(-6)).abs() < 1e-15);
        assert!((ts[12] - 2f64.powi(-18)).abs() < 1e-18);
        // geometric with factor 2
        for w in ts.windows(2) {
            assert!((w[0] / w[1] - 2.0).abs() < 1e-9);
        }
    }
}
