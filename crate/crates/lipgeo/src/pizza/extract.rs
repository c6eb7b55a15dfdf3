//! Exact extraction of the minimal pizza of an admissible function on the
//! standard triangle `{u >= 0, 0 <= w <= u^beta}`.
//!
//! The scan walks the link of the triangle from the bottom boundary `w = 0`
//! to the top boundary `w = u^beta` through fans of arcs
//! `w = prefix + d * u^alpha`. Orders along a fan are piecewise affine in
//! `alpha`; special arcs (where the order jumps) are found exactly by
//! substituting a symbolic fan parameter — the coefficient ring becomes
//! Laurent polynomials in `s` with `d = sigma * s^N` — and isolating the real
//! roots of every leading-coefficient polynomial the substitution compares
//! against zero. Rational roots become center arcs and are scanned
//! recursively; irrational roots that change the order structure abort the
//! extraction (the pizza is then not representable over the rationals, and a
//! wrong answer is worse than no answer).
//!
//! The link decomposes into fine slices between consecutive scanned arcs;
//! interior probes pin the affine width law of each fine slice, and the
//! combinatorial merge of `AbstractPizza::minimalize` reassembles the
//! minimal pizza.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{AbstractPizza, PizzaSlice, SliceEnd, WidthFunction};
use crate::exponents::exponent::format_rational;
use crate::exponents::expr::{substitute, FunctionExpr, RationalSigns, Sign, SignResolver};
use crate::exponents::poly::{real_roots_in, LaurentPoly};
use crate::exponents::series::{Coeff, OrderBound, PuiseuxSeries, Series};
use crate::exponents::ExtendedExponent;
use crate::Error;

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    /// Resolution bound for series substitution.
    pub bound: BigRational,
    /// Center-arc recursion depth.
    pub depth: usize,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { bound: crate::exponents::default_bound(), depth: 3 }
    }
}

/// A minimal slice together with the concrete boundary arcs realizing it.
#[derive(Clone, Debug)]
pub struct RichSlice {
    pub data: PizzaSlice,
    /// `w`-series of the boundary arc at the `q_in` end.
    pub lower_w: PuiseuxSeries,
    pub upper_w: PuiseuxSeries,
}

impl RichSlice {
    pub fn supporting_w(&self) -> Option<&PuiseuxSeries> {
        match self.data.supporting_end()? {
            SliceEnd::In => Some(&self.lower_w),
            SliceEnd::Out => Some(&self.upper_w),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PizzaExtraction {
    pub pizza: AbstractPizza,
    pub rich: Vec<RichSlice>,
    /// Every scanned arc with its exact order (for oracle cross-checks).
    pub probes: Vec<(PuiseuxSeries, ExtendedExponent)>,
}

/// A scanned arc: its `w`-series and the exact order of `f` along it.
#[derive(Clone, Debug)]
struct Elem {
    w: PuiseuxSeries,
    q: ExtendedExponent,
}

/// Linearized link: elements in bottom-to-top order, with the probe arcs
/// strictly between consecutive elements attached to the cell.
#[derive(Debug, Default)]
struct Stream {
    elems: Vec<Elem>,
    cells: Vec<Vec<Elem>>,
    pending: Vec<Elem>,
}

impl Stream {
    fn push_elem(&mut self, e: Elem) {
        if !self.elems.is_empty() {
            self.cells.push(std::mem::take(&mut self.pending));
        } else {
            debug_assert!(self.pending.is_empty());
        }
        self.elems.push(e);
    }

    fn push_interior(&mut self, e: Elem) {
        self.pending.push(e);
    }
}

const MAX_REFINE: usize = 64;
const MAX_ROOT_PASSES: usize = 8;

struct Engine<'a> {
    f: &'a FunctionExpr,
    beta: BigRational,
    bound: BigRational,
    /// `d = sigma * s^N` keeps fractional powers of the fan coefficient
    /// polynomial in `s`.
    n_lcm: i64,
    probes: Vec<(PuiseuxSeries, ExtendedExponent)>,
}

/// Records every leading coefficient whose sign the substitution needed
/// (comparison structure), for root harvesting.
struct CollectingResolver<'a> {
    sample: &'a BigRational,
    collected: Vec<LaurentPoly>,
    collision: bool,
}

impl SignResolver<LaurentPoly> for CollectingResolver<'_> {
    fn sign(&mut self, c: &LaurentPoly) -> Result<Sign, Error> {
        if !c.is_constant() {
            self.collected.push(c.clone());
        }
        let v = c.eval(self.sample);
        if v.is_zero() {
            self.collision = true;
            return Err(Error::SymbolicSampleCollision);
        }
        Ok(if v.is_positive() { Sign::Pos } else { Sign::Neg })
    }
}

pub fn extract_pizza(
    f: &FunctionExpr,
    triangle_beta: &BigRational,
    opts: &ExtractOptions,
) -> Result<PizzaExtraction, Error> {
    f.validate()?;
    if triangle_beta < &BigRational::one() {
        return Err(Error::BetaBelowOne);
    }
    let mut engine = Engine {
        f,
        beta: triangle_beta.clone(),
        bound: opts.bound.clone(),
        n_lcm: f.w_denominator_lcm(),
        probes: Vec::new(),
    };
    let stream = engine.scan_triangle(opts.depth)?;
    engine.assemble(stream, triangle_beta)
}

impl Engine<'_> {
    /// Exact order of `f` along `w(u)`, recorded as a probe. A result beyond
    /// the resolution bound aborts: orders are never silently guessed.
    fn ord(&mut self, w: &PuiseuxSeries) -> Result<ExtendedExponent, Error> {
        let u = crate::exponents::arc::t_series();
        let s = substitute(self.f, &u, w, &self.bound, &mut RationalSigns)?;
        match s.order() {
            OrderBound::Exact(q) => {
                self.probes.push((w.clone(), q.clone()));
                Ok(q)
            }
            OrderBound::AtLeast(b) => Err(Error::ResolutionExceeded(format_rational(&b))),
        }
    }

    fn elem(&mut self, w: PuiseuxSeries) -> Result<Elem, Error> {
        let q = self.ord(&w)?;
        Ok(Elem { w, q })
    }

    fn scan_triangle(&mut self, depth: usize) -> Result<Stream, Error> {
        let mut stream = Stream::default();
        let bottom = self.elem(PuiseuxSeries::zero())?;
        let bottom_q = bottom.q.clone();
        stream.push_elem(bottom);
        let zero = PuiseuxSeries::zero();
        // The base fan is the upward fan of the bottom arc; the top boundary
        // caps the layer alpha = beta at d = 1.
        self.scan_fan(
            &mut stream,
            &zero,
            &bottom_q,
            1,
            &self.beta.clone(),
            true,
            Some(BigRational::one()),
            depth,
        )?;
        // Top boundary arc, with its downward fan when it is special.
        let top_w = Series::monomial(self.beta.clone(), BigRational::one());
        let top = self.elem(top_w.clone())?;
        let last_q = stream
            .elems
            .last()
            .map(|e| e.q.clone())
            .expect("base fan produced elements");
        if top.q != last_q {
            self.scan_fan(&mut stream, &top_w, &top.q, -1, &self.beta.clone(), false, None, depth)?;
        }
        stream.push_elem(top);
        Ok(stream)
    }

    /// Scans the fan `w = prefix + d u^alpha` (`sign(d) = sigma`) for
    /// `alpha` above `alpha_min`, pushing elements in link order. For
    /// `sigma = +1` the fan sits above the prefix and is emitted from the
    /// prefix upward... more precisely: for an upward fan the layers appear
    /// in decreasing `alpha` (deep tail first, nearest the prefix), for a
    /// downward fan in increasing `alpha` (ending at the prefix).
    #[allow(clippy::too_many_arguments)]
    fn scan_fan(
        &mut self,
        stream: &mut Stream,
        prefix: &PuiseuxSeries,
        anchor_q: &ExtendedExponent,
        sigma: i64,
        alpha_min: &BigRational,
        alpha_min_inclusive: bool,
        d_hi: Option<BigRational>,
        depth: usize,
    ) -> Result<(), Error> {
        let mut grid: BTreeSet<BigRational> = self.static_candidates(prefix, alpha_min);
        if alpha_min_inclusive {
            grid.insert(alpha_min.clone());
        }
        grid.retain(|a| a > alpha_min || (alpha_min_inclusive && a == alpha_min));
        if grid.is_empty() {
            grid.insert(alpha_min + BigRational::one());
        }
        // Refinement: cell-interior probes must follow one affine law per
        // cell and connect continuously to the layer orders and the anchor.
        let mut cell_probes: Vec<Vec<(BigRational, ExtendedExponent)>> = Vec::new();
        for pass in 0..=MAX_REFINE {
            if pass == MAX_REFINE {
                return Err(Error::Extraction(
                    "fan refinement did not stabilize; the order profile resists the grid".into(),
                ));
            }
            let alphas: Vec<BigRational> = grid.iter().cloned().collect();
            let mut new_points: Vec<BigRational> = Vec::new();
            cell_probes.clear();
            // cells: (alpha_min, a_0) if exclusive head, (a_i, a_{i+1}), and
            // the tail (a_last, infinity).
            let mut bounds: Vec<(Option<BigRational>, Option<BigRational>)> = Vec::new();
            if !alpha_min_inclusive {
                bounds.push((Some(alpha_min.clone()), Some(alphas[0].clone())));
            }
            for w in alphas.windows(2) {
                bounds.push((Some(w[0].clone()), Some(w[1].clone())));
            }
            bounds.push((Some(alphas[alphas.len() - 1].clone()), None));
            for (lo, hi) in &bounds {
                let probes = self.cell_interiors(prefix, sigma, lo.as_ref().unwrap(), hi.as_ref())?;
                // Exact affine check on (alpha, q).
                match affine_check(&probes) {
                    AffineCheck::Affine(a, b) => {
                        // Tail consistency with the anchor order.
                        if hi.is_none() {
                            if a.is_positive() {
                                if anchor_q != &ExtendedExponent::Infinity {
                                    // law reaches the anchor order at a finite
                                    // alpha: that's a missing breakpoint
                                    if let ExtendedExponent::Finite(qa) = anchor_q {
                                        let cross = (qa - &b) / &a;
                                        if cross > *lo.as_ref().unwrap() && !grid.contains(&cross) {
                                            new_points.push(cross);
                                        } else {
                                            return Err(Error::Extraction(
                                                "order profile does not stabilize at the center order".into(),
                                            ));
                                        }
                                    }
                                }
                            } else if a.is_negative() {
                                return Err(Error::Extraction(
                                    "order profile decreases toward the center".into(),
                                ));
                            } else {
                                // constant tail must equal the anchor order
                                let plateau = ExtendedExponent::Finite(b.clone());
                                if &plateau != anchor_q {
                                    return Err(Error::Extraction(format!(
                                        "tail order {plateau} does not match the center order {anchor_q}"
                                    )));
                                }
                            }
                        }
                    }
                    AffineCheck::AllInfinite => {}
                    AffineCheck::Breakpoint(alpha) => {
                        if !grid.contains(&alpha) {
                            new_points.push(alpha);
                        } else {
                            return Err(Error::Extraction(
                                "order profile is not piecewise affine at the scan resolution".into(),
                            ));
                        }
                    }
                    AffineCheck::Mixed => {
                        // finite and infinite orders in one cell: split at
                        // thirds and retry
                        let l = lo.as_ref().unwrap();
                        let h = hi.clone().unwrap_or_else(|| l + BigRational::from_integer(8.into()));
                        let third = (&h - l) / BigRational::from_integer(3.into());
                        for k in 1..=2 {
                            let p = l + &third * BigRational::from_integer(k.into());
                            if !grid.contains(&p) {
                                new_points.push(p);
                            }
                        }
                    }
                }
                cell_probes.push(probes);
            }
            if new_points.is_empty() {
                break;
            }
            grid.extend(new_points);
        }
        // Stable grid: emit the stream. Upward fans run alpha descending.
        let alphas: Vec<BigRational> = if sigma > 0 {
            grid.iter().rev().cloned().collect()
        } else {
            grid.iter().cloned().collect()
        };
        // cell_probes was built in ascending-cell order:
        // [head?] [grid cells...] [tail]; recover per-orientation order.
        let mut cells_asc: Vec<Vec<(BigRational, ExtendedExponent)>> = cell_probes;
        let head_cell = if !alpha_min_inclusive { Some(cells_asc.remove(0)) } else { None };
        let tail_cell = cells_asc.pop().expect("tail cell exists");

        let emit_cell = |this: &mut Engine, stream: &mut Stream, probes: &[(BigRational, ExtendedExponent)], sigma: i64, prefix: &PuiseuxSeries, rev: bool| -> Result<(), Error> {
            let mut items: Vec<&(BigRational, ExtendedExponent)> = probes.iter().collect();
            if rev {
                items.reverse();
            }
            for (alpha, q) in items.into_iter() {
                let w = this.fan_arc(prefix, sigma, alpha, &this.default_sample(None));
                stream.push_interior(Elem { w, q: q.clone() });
            }
            Ok(())
        };

        if sigma > 0 {
            // tail first (deepest alpha, nearest the prefix below)
            emit_cell(self, stream, &tail_cell, sigma, prefix, true)?;
        } else if let Some(h) = &head_cell {
            emit_cell(self, stream, h, sigma, prefix, false)?;
        }
        for (i, alpha) in alphas.iter().enumerate() {
            // the coefficient cap (top boundary) applies only at alpha = beta
            let cap = if alpha == alpha_min { d_hi.as_ref() } else { None };
            self.emit_layer(stream, prefix, sigma, alpha, cap, depth)?;
            // cell probes between this layer and the next in stream order
            let next_cell: Option<&Vec<(BigRational, ExtendedExponent)>> = if sigma > 0 {
                // descending alphas: the cell below alpha_i in alpha-space is
                // cells_asc[index of alpha_{i+1} in ascending order]
                let idx_desc = alphas.len() - 1 - i;
                if idx_desc > 0 { cells_asc.get(idx_desc - 1) } else { head_cell.as_ref() }
            } else {
                cells_asc.get(i)
            };
            if let Some(cell) = next_cell {
                emit_cell(self, stream, cell, sigma, prefix, sigma > 0)?;
            } else if sigma < 0 && i == alphas.len() - 1 {
                emit_cell(self, stream, &tail_cell, sigma, prefix, false)?;
            }
        }
        Ok(())
    }

    /// Interior probes of the cell `(lo, hi)` (hi = None: the tail toward
    /// the prefix): three alphas, each checked at two generic samples.
    fn cell_interiors(
        &mut self,
        prefix: &PuiseuxSeries,
        sigma: i64,
        lo: &BigRational,
        hi: Option<&BigRational>,
    ) -> Result<Vec<(BigRational, ExtendedExponent)>, Error> {
        let alphas: Vec<BigRational> = match hi {
            Some(h) => {
                let span = h - lo;
                (1..=3)
                    .map(|k| lo + &span * BigRational::new(k.into(), 4.into()))
                    .collect()
            }
            None => (1..=3)
                .map(|k| lo + BigRational::from_integer(k.into()))
                .collect(),
        };
        let s_a = self.default_sample(None);
        let s_b = self.default_sample(Some(&s_a));
        let mut out = Vec::with_capacity(alphas.len());
        for alpha in alphas {
            let wa = self.fan_arc(prefix, sigma, &alpha, &s_a);
            let qa = self.ord(&wa)?;
            let wb = self.fan_arc(prefix, sigma, &alpha, &s_b);
            let qb = self.ord(&wb)?;
            if qa != qb {
                // hidden structure at this layer: let the refinement insert
                // it as a grid point via the breakpoint path
                return Ok(vec![
                    (alpha.clone(), qa),
                    (alpha.clone(), qb),
                    (alpha, ExtendedExponent::Infinity),
                ]);
            }
            out.push((alpha, qa));
        }
        Ok(out)
    }

    /// Concrete fan arc `prefix + sigma * s^N * u^alpha`.
    fn fan_arc(&self, prefix: &PuiseuxSeries, sigma: i64, alpha: &BigRational, s: &BigRational) -> PuiseuxSeries {
        let c = num_traits::pow(s.clone(), self.n_lcm as usize)
            * BigRational::from_integer(sigma.into());
        prefix.add(&Series::monomial(alpha.clone(), c))
    }

    /// Generic sample in `(0, 1)`, distinct from `avoid`.
    fn default_sample(&self, avoid: Option<&BigRational>) -> BigRational {
        for cand in [
            BigRational::new(7.into(), 9.into()),
            BigRational::new(5.into(), 8.into()),
            BigRational::new(11.into(), 13.into()),
        ] {
            if Some(&cand) != avoid {
                return cand;
            }
        }
        unreachable!()
    }

    /// Emits a grid layer: segment samples and roots, with special roots
    /// expanded recursively. Units appear in ascending-`d` (link) order.
    fn emit_layer(
        &mut self,
        stream: &mut Stream,
        prefix: &PuiseuxSeries,
        sigma: i64,
        alpha: &BigRational,
        d_hi: Option<&BigRational>,
        depth: usize,
    ) -> Result<(), Error> {
        let s_hi: Option<BigRational> = match d_hi {
            // d = s^N < d_hi with d_hi = 1: s < 1
            Some(h) => {
                debug_assert!(h.is_one(), "only the top boundary caps a layer");
                Some(BigRational::one())
            }
            None => None,
        };
        let roots_s = self.layer_roots(prefix, sigma, alpha, s_hi.as_ref())?;
        // segment boundaries in s-space
        let mut cuts: Vec<BigRational> = roots_s.clone();
        cuts.sort();
        let mut segments: Vec<(Option<BigRational>, Option<BigRational>)> = Vec::new();
        let mut last: Option<BigRational> = None;
        for r in &cuts {
            segments.push((last.clone(), Some(r.clone())));
            last = Some(r.clone());
        }
        segments.push((last, s_hi.clone()));
        // For sigma > 0 ascending d means ascending s; for sigma < 0 the
        // most negative d (largest s) comes first.
        let mut units: Vec<LayerUnit> = Vec::new();
        for (i, (lo, hi)) in segments.iter().enumerate() {
            let s = self.segment_sample(lo.as_ref(), hi.as_ref());
            let w = self.fan_arc(prefix, sigma, alpha, &s);
            let e = self.elem(w)?;
            units.push(LayerUnit::Sample(e));
            if i < cuts.len() {
                units.push(LayerUnit::Root(cuts[i].clone()));
            }
        }
        if sigma < 0 {
            units.reverse();
        }
        // Decide specialness of each root against its neighbors and emit.
        let qs: Vec<Option<ExtendedExponent>> = units
            .iter()
            .map(|u| match u {
                LayerUnit::Sample(e) => Some(e.q.clone()),
                LayerUnit::Root(_) => None,
            })
            .collect();
        for (i, unit) in units.iter().enumerate() {
            match unit {
                LayerUnit::Sample(e) => stream.push_elem(e.clone()),
                LayerUnit::Root(s_root) => {
                    let w = self.fan_arc(prefix, sigma, alpha, s_root);
                    let e = self.elem(w.clone())?;
                    let left = qs[i - 1].clone().expect("sample precedes root");
                    let right = qs[i + 1].clone().expect("sample follows root");
                    let special = !(e.q == left && e.q == right);
                    if !special {
                        stream.push_elem(e);
                        continue;
                    }
                    if depth == 0 {
                        return Err(Error::Extraction(format!(
                            "center arc {} needs deeper recursion; raise the depth",
                            w
                        )));
                    }
                    self.scan_fan(stream, &w, &e.q, -1, alpha, false, None, depth - 1)?;
                    stream.push_elem(e.clone());
                    self.scan_fan(stream, &w, &e.q, 1, alpha, false, None, depth - 1)?;
                }
            }
        }
        Ok(())
    }

    /// Sample inside an s-space segment; perfect `N`-th powers come for free
    /// because `d = sigma * s^N` with rational `s`.
    fn segment_sample(&self, lo: Option<&BigRational>, hi: Option<&BigRational>) -> BigRational {
        match (lo, hi) {
            (None, None) => self.default_sample(None),
            (None, Some(h)) => crate::exponents::poly::simplest_between(&(h / BigRational::from_integer(64.into())), h),
            (Some(l), None) => l + BigRational::one(),
            (Some(l), Some(h)) => crate::exponents::poly::simplest_between(l, h),
        }
    }

    /// All rational special values of `s` at one layer, by fixpoint
    /// segmentation over the harvested cancellation polynomials.
    fn layer_roots(
        &mut self,
        prefix: &PuiseuxSeries,
        sigma: i64,
        alpha: &BigRational,
        s_hi: Option<&BigRational>,
    ) -> Result<Vec<BigRational>, Error> {
        let zero = BigRational::zero();
        let mut cuts: BTreeSet<BigRational> = BTreeSet::new();
        for pass in 0..MAX_ROOT_PASSES {
            let mut segments: Vec<(BigRational, Option<BigRational>)> = Vec::new();
            let mut last = zero.clone();
            for c in &cuts {
                segments.push((last.clone(), Some(c.clone())));
                last = c.clone();
            }
            segments.push((last, s_hi.cloned()));
            let mut new_roots: Vec<BigRational> = Vec::new();
            for (lo, hi) in &segments {
                let sample = self.generic_in(lo, hi.as_ref(), &cuts)?;
                let (polys, result_lead) = match self.symbolic_pass(prefix, sigma, alpha, &sample) {
                    Ok(x) => x,
                    // The sample itself sits on a cancellation locus: it is a
                    // cut point (and rational by construction).
                    Err(Error::SymbolicSampleCollision) => {
                        new_roots.push(sample);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let mut handle = |poly: &LaurentPoly, is_result: bool| -> Result<(), Error> {
                    let report = real_roots_in(&poly.poly_part(), Some(lo), hi.as_ref());
                    for r in report.rational {
                        if !cuts.contains(&r) {
                            new_roots.push(r);
                        }
                    }
                    for (a, b) in report.irrational {
                        if is_result {
                            return Err(Error::Extraction(format!(
                                "irrational cancellation locus between s = {} and {}",
                                format_rational(&a),
                                format_rational(&b)
                            )));
                        }
                        // A branch flip at an irrational value is harmless
                        // only if the order is the same on both sides.
                        let qa = {
                            let s = pick_between(lo, &a);
                            let w = self.fan_arc(prefix, sigma, alpha, &s);
                            self.ord(&w)?
                        };
                        let qb = {
                            let s = match hi {
                                Some(h) => pick_between(&b, h),
                                None => &b + BigRational::one(),
                            };
                            let w = self.fan_arc(prefix, sigma, alpha, &s);
                            self.ord(&w)?
                        };
                        if qa != qb {
                            return Err(Error::Extraction(format!(
                                "irrational order transition between s = {} and {}",
                                format_rational(&a),
                                format_rational(&b)
                            )));
                        }
                    }
                    Ok(())
                };
                for p in &polys {
                    handle(p, false)?;
                }
                if let Some(p) = &result_lead {
                    handle(p, true)?;
                }
            }
            if new_roots.is_empty() {
                return Ok(cuts.into_iter().collect());
            }
            cuts.extend(new_roots);
            if pass + 1 == MAX_ROOT_PASSES {
                return Err(Error::Extraction(
                    "layer segmentation did not stabilize".into(),
                ));
            }
        }
        Ok(cuts.into_iter().collect())
    }

    /// One symbolic substitution at a sample, returning the harvested
    /// comparison polynomials and the leading coefficient of the result.
    fn symbolic_pass(
        &self,
        prefix: &PuiseuxSeries,
        sigma: i64,
        alpha: &BigRational,
        sample: &BigRational,
    ) -> Result<(Vec<LaurentPoly>, Option<LaurentPoly>), Error> {
        let u: Series<LaurentPoly> = Series::monomial(BigRational::one(), Coeff::ring_one());
        let mut w: Series<LaurentPoly> = Series::from_terms(
            prefix
                .terms()
                .iter()
                .map(|(e, c)| (e.clone(), LaurentPoly::from_rat(c)))
                .collect(),
        );
        let d = LaurentPoly::monomial(self.n_lcm, BigRational::from_integer(sigma.into()));
        w = w.add(&Series::monomial(alpha.clone(), d));
        let mut resolver = CollectingResolver { sample, collected: Vec::new(), collision: false };
        let result = substitute(self.f, &u, &w, &self.bound, &mut resolver);
        match result {
            Ok(series) => {
                let lead = series
                    .leading()
                    .map(|(_, c)| c.clone())
                    .filter(|c| !c.is_constant());
                Ok((resolver.collected, lead))
            }
            Err(Error::SymbolicSampleCollision) => Err(Error::SymbolicSampleCollision),
            Err(e) => Err(e),
        }
    }

    /// Sample strictly inside `(lo, hi)`; collisions with special values are
    /// handled by the caller (they become cut points).
    fn generic_in(
        &self,
        lo: &BigRational,
        hi: Option<&BigRational>,
        _known: &BTreeSet<BigRational>,
    ) -> Result<BigRational, Error> {
        let hi_val = match hi {
            Some(h) => h.clone(),
            None => lo + BigRational::from_integer(2.into()),
        };
        Ok(crate::exponents::poly::simplest_between(lo, &hi_val))
    }

    /// Turns the stream into fine slices, validates, and minimalizes.
    fn assemble(&mut self, stream: Stream, triangle_beta: &BigRational) -> Result<PizzaExtraction, Error> {
        let Stream { elems, mut cells, pending } = stream;
        debug_assert!(pending.is_empty());
        if elems.len() < 2 {
            return Err(Error::Extraction("scan produced no link structure".into()));
        }
        while cells.len() < elems.len() - 1 {
            cells.push(Vec::new());
        }
        // Positional sanity: consecutive element arcs strictly ascending.
        for w in elems.windows(2) {
            let diff = w[1].w.sub(&w[0].w);
            let ok = diff
                .leading()
                .map(|(_, c)| c.is_positive())
                .unwrap_or(false);
            if !ok {
                return Err(Error::Extraction(format!(
                    "scan ordering broke between {} and {}",
                    w[0].w, w[1].w
                )));
            }
        }
        let mut rich: Vec<RichSlice> = Vec::new();
        for i in 0..elems.len() - 1 {
            let lo = &elems[i];
            let hi = &elems[i + 1];
            let slice = self.fine_slice(lo, hi, &cells[i])?;
            rich.push(slice);
        }
        // Merge into the minimal pizza, keeping boundary arcs in sync.
        let mut merged: Vec<RichSlice> = Vec::new();
        for r in rich {
            merged.push(r);
            while merged.len() >= 2 {
                let b = merged.pop().unwrap();
                let a = merged.pop().unwrap();
                match super::merge_slices(&a.data, &b.data) {
                    Some(m) => merged.push(RichSlice {
                        data: m,
                        lower_w: a.lower_w,
                        upper_w: b.upper_w,
                    }),
                    None => {
                        merged.push(a);
                        merged.push(b);
                        break;
                    }
                }
            }
        }
        let pizza = AbstractPizza {
            triangle_beta: triangle_beta.clone(),
            slices: merged.iter().map(|r| r.data.clone()).collect(),
        };
        let violations = pizza.validate();
        if !violations.is_empty() {
            return Err(Error::Extraction(format!(
                "extracted pizza fails validation ({}); is the function Lipschitz on the triangle?",
                violations.join("; ")
            )));
        }
        Ok(PizzaExtraction { pizza, rich: merged, probes: std::mem::take(&mut self.probes) })
    }

    /// Builds one fine slice between consecutive scanned arcs.
    fn fine_slice(&mut self, lo: &Elem, hi: &Elem, interior: &[Elem]) -> Result<RichSlice, Error> {
        let plateau = lo.q == hi.q && interior.iter().all(|e| e.q == lo.q);
        if plateau {
            let exp = series_tord(&lo.w, &hi.w)?;
            return Ok(RichSlice {
                data: PizzaSlice::point(lo.q.clone(), exp),
                lower_w: lo.w.clone(),
                upper_w: hi.w.clone(),
            });
        }
        // Ramp: the supporting end is the higher-order end.
        let sup_is_hi = hi.q >= lo.q;
        let (sup, other) = if sup_is_hi { (hi, lo) } else { (lo, hi) };
        let mut points: Vec<(BigRational, BigRational)> = Vec::new();
        for e in interior.iter().chain([other]) {
            let q = match &e.q {
                ExtendedExponent::Finite(q) => q.clone(),
                ExtendedExponent::Infinity => {
                    return Err(Error::Extraction(
                        "infinite order inside a non-degenerate slice".into(),
                    ))
                }
            };
            let mu = series_tord(&e.w, &sup.w)?;
            if mu > q {
                return Err(Error::Extraction(format!(
                    "width {} exceeds order {} on a scanned arc; is the function Lipschitz?",
                    format_rational(&mu),
                    format_rational(&q)
                )));
            }
            points.push((q, mu));
        }
        points.sort();
        points.dedup();
        let mut distinct = points.clone();
        distinct.dedup_by(|a, b| a.0 == b.0);
        if distinct.len() < 2 {
            return Err(Error::Extraction(
                "cannot pin the width law of a slice (all probes at one order)".into(),
            ));
        }
        let (q1, m1) = &distinct[0];
        let (q2, m2) = &distinct[distinct.len() - 1];
        let a = (m2 - m1) / (q2 - q1);
        let b = m1 - &a * q1;
        for (q, m) in &points {
            if &(&a * q + &b) != m {
                return Err(Error::Extraction(
                    "width probes do not follow one affine law inside a slice".into(),
                ));
            }
        }
        let mu = WidthFunction { a, b };
        let (q_in, q_out) = (lo.q.clone(), hi.q.clone());
        let v_in = mu.eval(&q_in).ok_or_else(|| Error::Extraction("width law unbounded".into()))?;
        let v_out = mu.eval(&q_out).ok_or_else(|| Error::Extraction("width law unbounded".into()))?;
        let beta = v_in.min_of(v_out);
        Ok(RichSlice {
            data: PizzaSlice { q_in, q_out, beta, mu },
            lower_w: lo.w.clone(),
            upper_w: hi.w.clone(),
        })
    }

    /// Static breakpoint seed: the triangle exponent, prefix exponents, and
    /// the pairwise leading-term collisions of the monomial leaves.
    fn static_candidates(&self, prefix: &PuiseuxSeries, alpha_min: &BigRational) -> BTreeSet<BigRational> {
        let leaves = self.f.leaves();
        let mut set = BTreeSet::new();
        let cap = alpha_min + &self.bound;
        let mut push = |v: BigRational| {
            if v > *alpha_min && v <= cap {
                set.insert(v);
            }
        };
        push(self.beta.clone());
        for (e, _) in prefix.terms() {
            push(e.clone());
            push(e + BigRational::one());
        }
        let prefix_exps: Vec<BigRational> = prefix.terms().iter().map(|(e, _)| e.clone()).collect();
        let shifts: Vec<BigRational> = std::iter::once(BigRational::zero())
            .chain(prefix_exps.iter().cloned())
            .collect();
        for (i, (_, pu_i, pw_i)) in leaves.iter().enumerate() {
            for (_, pu_j, pw_j) in leaves.iter().skip(i + 1) {
                if pw_i == pw_j {
                    continue;
                }
                // pu_i + pw_i * alpha = pu_j + pw_j * alpha, with the leaf
                // exponents optionally shifted by prefix exponents (the
                // shifted expansion redistributes w-powers onto them).
                for sa in &shifts {
                    for sb in &shifts {
                        let num = (*pu_j + *pw_j * sb) - (*pu_i + *pw_i * sa);
                        let den = *pw_i - *pw_j;
                        push(num / den);
                    }
                }
            }
        }
        set
    }
}

enum LayerUnit {
    Sample(Elem),
    Root(BigRational),
}

/// Tangency order of two triangle arcs `(u, w1)`, `(u, w2)`: the order of
/// `w1 - w2`, which is finite for distinct scanned arcs.
fn series_tord(w1: &PuiseuxSeries, w2: &PuiseuxSeries) -> Result<BigRational, Error> {
    let d = w1.sub(w2);
    match d.order() {
        OrderBound::Exact(ExtendedExponent::Finite(e)) => Ok(e),
        OrderBound::Exact(ExtendedExponent::Infinity) => Err(Error::Extraction(
            "two scanned arcs coincide".into(),
        )),
        OrderBound::AtLeast(b) => Err(Error::ResolutionExceeded(format_rational(&b))),
    }
}

fn pick_between<'v>(lo: &'v BigRational, hi: &'v BigRational) -> BigRational {
    crate::exponents::poly::simplest_between(lo, hi)
}

enum AffineCheck {
    Affine(BigRational, BigRational),
    AllInfinite,
    Breakpoint(BigRational),
    Mixed,
}

/// Exact affine test on probe points `(alpha, q)`.
fn affine_check(probes: &[(BigRational, ExtendedExponent)]) -> AffineCheck {
    let finite: Vec<(BigRational, BigRational)> = probes
        .iter()
        .filter_map(|(a, q)| q.as_rational().map(|r| (a.clone(), r.clone())))
        .collect();
    if finite.is_empty() {
        return AffineCheck::AllInfinite;
    }
    if finite.len() != probes.len() {
        return AffineCheck::Mixed;
    }
    if finite.len() == 1 {
        return AffineCheck::Affine(BigRational::zero(), finite[0].1.clone());
    }
    let (a1, q1) = &finite[0];
    let (a2, q2) = &finite[finite.len() - 1];
    if a1 == a2 {
        // double-probe disagreement marker: force a breakpoint at alpha
        return AffineCheck::Breakpoint(a1.clone());
    }
    let a = (q2 - q1) / (a2 - a1);
    let b = q1 - &a * a1;
    for (x, y) in &finite[1..finite.len() - 1] {
        let fit = &a * x + &b;
        if &fit != y {
            // intersection of the two local laws as the breakpoint guess
            let (xm, ym) = (x, y);
            let a_left = (ym - q1) / (xm - a1);
            let b_left = q1 - &a_left * a1;
            let a_right = (q2 - ym) / (a2 - xm);
            let b_right = ym - &a_right * xm;
            if a_left == a_right {
                return AffineCheck::Breakpoint(xm.clone());
            }
            let cross = (&b_right - &b_left) / (&a_left - &a_right);
            return AffineCheck::Breakpoint(cross);
        }
    }
    AffineCheck::Affine(a, b)
}

/// Width of an arc `w(u)` in the triangle with respect to the extracted
/// pizza: the tangency order to the supporting arc of the slice containing
/// it (capped at the supporting arc's own width), or the slice exponent for
/// point slices.
pub fn width_at_arc(extraction: &PizzaExtraction, w: &PuiseuxSeries) -> Result<ExtendedExponent, Error> {
    // Locate the slice: boundaries are in ascending link order.
    let first = &extraction.rich[0];
    if series_cmp(w, &first.lower_w) == std::cmp::Ordering::Less {
        return Err(Error::ArcOutsideTriangle);
    }
    for r in &extraction.rich {
        let above_upper = series_cmp(w, &r.upper_w) == std::cmp::Ordering::Greater;
        if above_upper {
            continue;
        }
        if r.data.is_point() {
            return Ok(r.data.beta.clone());
        }
        let sup = r.supporting_w().expect("non-point slice has a supporting end");
        let d = w.sub(sup);
        let tord = match d.order() {
            OrderBound::Exact(e) => e,
            OrderBound::AtLeast(b) => return Err(Error::ResolutionExceeded(format_rational(&b))),
        };
        // Cap at the maximal width of the slice.
        let sup_q = match r.data.supporting_end().expect("non-point") {
            SliceEnd::In => &r.data.q_in,
            SliceEnd::Out => &r.data.q_out,
        };
        let max_mu = r
            .data
            .mu
            .eval(sup_q)
            .ok_or_else(|| Error::Extraction("width law unbounded".into()))?;
        return Ok(tord.min_of(max_mu));
    }
    Err(Error::ArcOutsideTriangle)
}

fn series_cmp(a: &PuiseuxSeries, b: &PuiseuxSeries) -> std::cmp::Ordering {
    let d = a.sub(b);
    match d.leading() {
        None => std::cmp::Ordering::Equal,
        Some((_, c)) => {
            if c.is_positive() {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            }
        }
    }
}
