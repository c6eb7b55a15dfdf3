//! The numerical experiments: link sampling, tangency estimates, LNE and
//! pancake reports, generic projections, tangent cones, horn exponents.
//!
//! Everything is deterministic given the plan (fixed iteration order, seeded
//! randomness); reports serialize to stable JSON.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::estimate::{estimate_order, estimate_order_or_floor, NumericOrder, OrderEstimate};
use super::mesh::LinkMesh;
use super::model::{GermModel, Gluing, PancakeDecomposition, Patch, ScaleSamplePlan};
use crate::exponents::Arc;
use crate::Error;

/// Polyline chains (one per patch) of the link at scale `t`.
pub fn sample_link(model: &GermModel, t: f64, plan: &ScaleSamplePlan) -> Result<Vec<Vec<Vec<f64>>>, Error> {
    plan.validate()?;
    if !(t > 0.0 && t <= plan.t_max * (1.0 + 1e-12)) {
        return Err(Error::TOutOfRange(t));
    }
    let grid = plan.s_grid();
    Ok(model
        .patches
        .iter()
        .map(|p| grid.iter().map(|&s| p.eval_f64(t, s)).collect())
        .collect())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum TangencyMode {
    Outer,
    Inner,
}

/// Locates an arc's nearest mesh node per level, verifying the arc actually
/// lies on the model to sampling tolerance.
fn locate_arc(mesh: &LinkMesh, model: &GermModel, arc: &Arc, level: usize, t: f64) -> Result<usize, Error> {
    if arc.dim() != model.dim {
        return Err(Error::DimensionMismatch(model.dim, arc.dim()));
    }
    let pt = arc.point_at(t);
    let nodes = mesh.level_nodes(level, None);
    let mut best = nodes[0];
    let mut best_d = f64::INFINITY;
    let mut max_spacing = 0.0f64;
    for &n in &nodes {
        let c = mesh.coords_of(n);
        let d = c.iter().zip(&pt).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if d < best_d {
            best_d = d;
            best = n;
        }
    }
    // Sampling tolerance: twice the largest link-chain spacing at this level.
    for pi in 0..model.patches.len() {
        for si in 0..mesh.resolution() - 1 {
            let a = mesh.coords_of(mesh.node(level, pi, si));
            let b = mesh.coords_of(mesh.node(level, pi, si + 1));
            let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            max_spacing = max_spacing.max(d);
        }
    }
    if best_d > 2.0 * max_spacing + 1e-9 {
        return Err(Error::ArcOffModel(best_d, t));
    }
    Ok(best)
}

/// Numerical tangency order of two arcs on a model, in the chosen metric.
pub fn tangency_numeric(
    model: &GermModel,
    g1: &Arc,
    g2: &Arc,
    mode: TangencyMode,
    plan: &ScaleSamplePlan,
) -> Result<NumericOrder, Error> {
    plan.validate()?;
    let mesh = LinkMesh::build(model, plan);
    let levels = mesh.levels().to_vec();
    let mut samples = Vec::with_capacity(levels.len());
    for (li, &t) in levels.iter().enumerate() {
        let v = match mode {
            TangencyMode::Outer => {
                // verify both arcs are on-model even in outer mode
                locate_arc(&mesh, model, g1, li, t)?;
                locate_arc(&mesh, model, g2, li, t)?;
                let a = g1.point_at(t);
                let b = g2.point_at(t);
                a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
            }
            TangencyMode::Inner => {
                let a = locate_arc(&mesh, model, g1, li, t)?;
                let b = locate_arc(&mesh, model, g2, li, t)?;
                mesh.inner_distance(a, b, li)?
            }
        };
        samples.push((t, v));
    }
    estimate_order_or_floor(&samples)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum LneMode {
    Full,
    Weak,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairEstimate {
    pub arc_a: usize,
    pub arc_b: usize,
    pub outer: NumericOrder,
    pub inner: NumericOrder,
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LneReport {
    pub mode: LneMode,
    pub beta: Option<f64>,
    pub tolerance: f64,
    pub pairs: Vec<PairEstimate>,
    pub violations: usize,
}

impl LneReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Pairwise outer/inner tangency estimates over an arc family; full mode
/// flags pairs whose outer order exceeds the inner order (an LNE violation
/// witness), weak mode additionally requires the inner order to sit away
/// from the claimed triangle exponent.
pub fn lne_report(
    model: &GermModel,
    arcs: &[Arc],
    mode: LneMode,
    beta: Option<f64>,
    plan: &ScaleSamplePlan,
    tol: f64,
) -> Result<LneReport, Error> {
    plan.validate()?;
    if arcs.len() < 2 {
        return Err(Error::InsufficientArcs(2));
    }
    if mode == LneMode::Weak && beta.is_none() {
        return Err(Error::BadModel("weak mode requires a triangle exponent".into()));
    }
    let mesh = LinkMesh::build(model, plan);
    let levels = mesh.levels().to_vec();
    // Locate every arc once per level.
    let mut nodes = vec![vec![0usize; levels.len()]; arcs.len()];
    for (ai, arc) in arcs.iter().enumerate() {
        for (li, &t) in levels.iter().enumerate() {
            nodes[ai][li] = locate_arc(&mesh, model, arc, li, t)?;
        }
    }
    // Inner distances: one multi-target search per (arc, level).
    let mut inner = vec![vec![vec![0.0f64; arcs.len()]; levels.len()]; arcs.len()];
    for ai in 0..arcs.len() {
        for li in 0..levels.len() {
            let targets: Vec<usize> = (0..arcs.len()).map(|bi| nodes[bi][li]).collect();
            let d = mesh.inner_distances_from(nodes[ai][li], li, &targets)?;
            inner[ai][li].copy_from_slice(&d);
        }
    }
    let mut pairs = Vec::new();
    let mut violations = 0usize;
    for ai in 0..arcs.len() {
        for bi in ai + 1..arcs.len() {
            let outer_samples: Vec<(f64, f64)> = levels
                .iter()
                .map(|&t| {
                    let a = arcs[ai].point_at(t);
                    let b = arcs[bi].point_at(t);
                    (t, a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt())
                })
                .collect();
            let inner_samples: Vec<(f64, f64)> = levels
                .iter()
                .enumerate()
                .map(|(li, &t)| (t, inner[ai][li][bi]))
                .collect();
            let outer = estimate_order_or_floor(&outer_samples)?;
            let inner_est = estimate_order_or_floor(&inner_samples)?;
            let violation = match (&outer, &inner_est) {
                (NumericOrder::Estimate(o), NumericOrder::Estimate(i)) => {
                    let gap = o.exponent - i.exponent > tol;
                    match mode {
                        LneMode::Full => gap,
                        LneMode::Weak => {
                            gap && (i.exponent - beta.unwrap()).abs() > tol
                        }
                    }
                }
                // Zero distances in both metrics (identical arcs): no witness.
                _ => false,
            };
            if violation {
                violations += 1;
            }
            pairs.push(PairEstimate { arc_a: ai, arc_b: bi, outer, inner: inner_est, violation });
        }
    }
    Ok(LneReport { mode, beta, tolerance: tol, pairs, violations })
}

/// Restriction of a model to a patch subset, keeping internal gluings.
/// Returns the submodel and the original indices of its patches.
pub fn submodel(model: &GermModel, patches: &[usize]) -> Result<(GermModel, Vec<usize>), Error> {
    let mut keep: Vec<usize> = patches.to_vec();
    keep.sort_unstable();
    keep.dedup();
    let reindex: std::collections::BTreeMap<usize, usize> =
        keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
    let sub_patches: Vec<Patch> = keep
        .iter()
        .map(|&i| {
            model
                .patches
                .get(i)
                .cloned()
                .ok_or_else(|| Error::BadModel(format!("patch {i} out of range")))
        })
        .collect::<Result<_, _>>()?;
    let sub_gluings: Vec<Gluing> = model
        .gluings
        .iter()
        .filter_map(|g| {
            let a = reindex.get(&g.a.0)?;
            let b = reindex.get(&g.b.0)?;
            Some(Gluing { a: (*a, g.a.1), b: (*b, g.b.1) })
        })
        .collect();
    Ok((GermModel::new(model.dim, sub_patches, sub_gluings)?, keep))
}

/// Sample arcs of a model: boundary and mid arcs of every patch, deduplicated.
pub fn sample_arcs(model: &GermModel) -> Vec<Arc> {
    let half = BigRational::new(1.into(), 2.into());
    let mut arcs: Vec<Arc> = Vec::new();
    for p in &model.patches {
        for s in [BigRational::from_integer(0.into()), half.clone(), BigRational::from_integer(1.into())] {
            if let Ok(a) = p.arc_at(&s) {
                if !arcs.contains(&a) {
                    arcs.push(a);
                }
            }
        }
    }
    arcs
}

#[derive(Clone, Debug, Serialize)]
pub struct PancakeGroupReport {
    pub group: usize,
    pub degenerate: bool,
    pub lne_violations: usize,
    pub claimed_beta: f64,
    pub diameter_exponent: Option<OrderEstimate>,
    pub beta_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnionReport {
    pub groups: (usize, usize),
    pub union_lne: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct PancakeReport {
    pub valid: bool,
    pub minimal: bool,
    pub issues: Vec<String>,
    pub groups: Vec<PancakeGroupReport>,
    pub unions: Vec<UnionReport>,
}

/// Validates a pancake decomposition numerically: each pancake LNE with the
/// claimed exponent, and minimality (the union of adjacent pancakes must
/// fail LNE; a passing union means the decomposition is not minimal).
pub fn pancake_check(
    model: &GermModel,
    decomposition: &PancakeDecomposition,
    plan: &ScaleSamplePlan,
    tol: f64,
) -> Result<PancakeReport, Error> {
    plan.validate()?;
    decomposition.check_partition(model)?;
    let mut issues = Vec::new();
    let adjacency = decomposition.adjacency(model)?;
    for &((a, b), count) in &adjacency {
        if count > 1 {
            issues.push(format!(
                "groups {a} and {b} share {count} boundary arcs (intersection condition relaxed)"
            ));
        }
    }
    let mut groups = Vec::new();
    let mut valid = true;
    for (gi, g) in decomposition.groups.iter().enumerate() {
        let (sub, _) = submodel(model, &g.patches)?;
        let arcs = sample_arcs(&sub);
        let degenerate = arcs.len() < 2;
        let claimed = g.beta.to_f64().unwrap_or(f64::NAN);
        if degenerate {
            groups.push(PancakeGroupReport {
                group: gi,
                degenerate: true,
                lne_violations: 0,
                claimed_beta: claimed,
                diameter_exponent: None,
                beta_ok: true,
            });
            continue;
        }
        let rep = lne_report(&sub, &arcs, LneMode::Full, None, plan, tol)?;
        if !rep.passed() {
            valid = false;
        }
        // Claimed exponent against the inner link-diameter exponent.
        let mesh = LinkMesh::build(&sub, plan);
        let mut samples = Vec::new();
        for (li, &t) in mesh.levels().to_vec().iter().enumerate() {
            samples.push((t, mesh.level_diameter(li, None)?));
        }
        let diam = estimate_order(&samples)?;
        let beta_ok = (diam.exponent - claimed).abs() <= tol;
        if !beta_ok {
            valid = false;
        }
        groups.push(PancakeGroupReport {
            group: gi,
            degenerate: false,
            lne_violations: rep.violations,
            claimed_beta: claimed,
            diameter_exponent: Some(diam),
            beta_ok,
        });
    }
    // Minimality: adjacent unions must fail LNE.
    let mut unions = Vec::new();
    let mut minimal = true;
    for &((a, b), _) in &adjacency {
        let mut patches = decomposition.groups[a].patches.clone();
        patches.extend_from_slice(&decomposition.groups[b].patches);
        let (sub, _) = submodel(model, &patches)?;
        let arcs = sample_arcs(&sub);
        let union_lne = if arcs.len() < 2 {
            true
        } else {
            lne_report(&sub, &arcs, LneMode::Full, None, plan, tol)?.passed()
        };
        if union_lne {
            minimal = false;
        }
        unions.push(UnionReport { groups: (a, b), union_lne });
    }
    Ok(PancakeReport { valid, minimal, issues, groups, unions })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectionReport {
    pub seed: u64,
    pub planes: usize,
    pub estimates: Vec<f64>,
    pub expected: f64,
    pub tolerance: f64,
    pub fraction_within: f64,
    pub axis_plane_estimate: f64,
}

/// Projects the model's boundary arcs to random 2-planes and estimates the
/// minimum pairwise tangency order of the projected arcs, reparameterized by
/// distance to the origin. Also reports the (non-generic) plane spanned by
/// the first two coordinates.
pub fn projection_experiment(
    model: &GermModel,
    num_planes: usize,
    seed: u64,
    plan: &ScaleSamplePlan,
    expected: f64,
    tol: f64,
) -> Result<ProjectionReport, Error> {
    plan.validate()?;
    if model.dim < 3 {
        return Err(Error::DimensionTooLow(3));
    }
    let arcs: Vec<Arc> = model
        .patches
        .iter()
        .filter_map(|p| p.arc_at(&BigRational::from_integer(0.into())).ok())
        .collect();
    if arcs.len() < 2 {
        return Err(Error::InsufficientArcs(2));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut estimates = Vec::with_capacity(num_planes);
    for _ in 0..num_planes {
        let (u, v) = random_orthonormal_pair(&mut rng, model.dim);
        if let Some(e) = plane_min_tord(&arcs, &u, &v, plan) {
            estimates.push(e);
        } else {
            estimates.push(f64::NAN);
        }
    }
    let within = estimates
        .iter()
        .filter(|e| e.is_finite() && (*e - expected).abs() <= tol)
        .count();
    let fraction_within = within as f64 / num_planes.max(1) as f64;
    // The plane orthogonal to the model's axis (last coordinate).
    let mut e0 = vec![0.0; model.dim];
    e0[0] = 1.0;
    let mut e1 = vec![0.0; model.dim];
    e1[1] = 1.0;
    let axis_plane_estimate = plane_min_tord(&arcs, &e0, &e1, plan).unwrap_or(f64::NAN);
    Ok(ProjectionReport {
        seed,
        planes: num_planes,
        estimates,
        expected,
        tolerance: tol,
        fraction_within,
        axis_plane_estimate,
    })
}

/// Gaussian pair, Gram-Schmidt orthonormalized: uniform on the Grassmannian.
fn random_orthonormal_pair<R: Rng>(rng: &mut R, dim: usize) -> (Vec<f64>, Vec<f64>) {
    let gauss = |rng: &mut R| -> f64 {
        // Box-Muller
        let u1: f64 = rng.gen_range(1e-12..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    loop {
        let a: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
        let b: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na < 1e-9 {
            continue;
        }
        let u: Vec<f64> = a.iter().map(|x| x / na).collect();
        let dot: f64 = u.iter().zip(&b).map(|(x, y)| x * y).sum();
        let mut w: Vec<f64> = b.iter().zip(&u).map(|(y, x)| y - dot * x).collect();
        let nw = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nw < 1e-9 {
            continue;
        }
        for x in &mut w {
            *x /= nw;
        }
        return (u, w);
    }
}

/// Minimum over arc pairs of the tangency order of the projected arcs,
/// after reparameterizing each projected arc by its distance to the origin.
fn plane_min_tord(arcs: &[Arc], u: &[f64], v: &[f64], plan: &ScaleSamplePlan) -> Option<f64> {
    let levels = plan.t_levels();
    let project = |arc: &Arc, t: f64| -> (f64, f64) {
        let p = arc.point_at(t);
        (
            p.iter().zip(u).map(|(a, b)| a * b).sum::<f64>(),
            p.iter().zip(v).map(|(a, b)| a * b).sum::<f64>(),
        )
    };
    let norm = |p: (f64, f64)| (p.0 * p.0 + p.1 * p.1).sqrt();
    // Common radial levels every projected arc can reach.
    let s_levels: Vec<f64> = levels
        .iter()
        .map(|&t| {
            arcs.iter()
                .map(|a| norm(project(a, t)))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    if s_levels.iter().any(|&s| !(s > 1e-300)) {
        return None;
    }
    // Solve |proj(arc)(t)| = s by bisection in ln t (monotone for small t).
    let solve = |arc: &Arc, s: f64| -> Option<(f64, f64)> {
        let mut lo = (plan.t_min * 1e-8).ln();
        let mut hi = (plan.t_max * 1.0).ln();
        let f = |lt: f64| norm(project(arc, lt.exp())) - s;
        if f(lo) > 0.0 || f(hi) < 0.0 {
            return None;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(project(arc, (0.5 * (lo + hi)).exp()))
    };
    let mut min_est = f64::INFINITY;
    for i in 0..arcs.len() {
        for j in i + 1..arcs.len() {
            let mut samples = Vec::with_capacity(s_levels.len());
            for &s in &s_levels {
                let (Some(pi), Some(pj)) = (solve(&arcs[i], s), solve(&arcs[j], s)) else {
                    continue;
                };
                let d = ((pi.0 - pj.0).powi(2) + (pi.1 - pj.1).powi(2)).sqrt();
                samples.push((s, d));
            }
            if samples.len() < 4 {
                continue;
            }
            // Fit on the finest levels only: near-cancelling pairs have a
            // small leading coefficient and need deep scales for the leading
            // term to dominate.
            let keep = samples.len().min(8);
            let samples = samples[samples.len() - keep..].to_vec();
            match estimate_order_or_floor(&samples).ok()? {
                NumericOrder::Estimate(e) => {
                    if e.exponent < min_est {
                        min_est = e.exponent;
                    }
                }
                NumericOrder::AtLeast(_) => {}
            }
        }
    }
    min_est.is_finite().then_some(min_est)
}

#[derive(Clone, Debug, Serialize)]
pub struct TangentConeReport {
    /// `(t, Hausdorff distance between unit-rescaled link and candidates)`.
    pub hausdorff_per_level: Vec<(f64, f64)>,
    pub decay: NumericOrder,
    pub final_hausdorff: f64,
    /// Largest spacing between consecutive rescaled link samples at the
    /// finest level; the sampling resolution of the comparison.
    pub mesh_tolerance: f64,
    pub candidate_count: usize,
}

/// Compares unit-rescaled links against the exact tangent directions of the
/// model's grid arcs (the tangent-cone candidate). The Hausdorff distance
/// should decay like `t^{beta-1}` for a beta-horn and vanish to sampling
/// resolution for a cone.
pub fn tangent_cone_sample(model: &GermModel, plan: &ScaleSamplePlan) -> Result<TangentConeReport, Error> {
    plan.validate()?;
    // Exact tangent directions of all grid arcs.
    let res = plan.resolution;
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for p in &model.patches {
        for i in 0..res {
            let s = BigRational::new((i as i64).into(), ((res - 1) as i64).into());
            let arc = p.arc_at(&s)?;
            let tv = arc.tangent_vector()?.unit_f64();
            if !candidates.iter().any(|c| dist(c, &tv) < 1e-12) {
                candidates.push(tv);
            }
        }
    }
    let mesh = LinkMesh::build(model, plan);
    let levels = mesh.levels().to_vec();
    let mut hausdorff_per_level = Vec::with_capacity(levels.len());
    let mut mesh_tolerance = 0.0f64;
    for (li, &t) in levels.iter().enumerate() {
        let nodes = mesh.level_nodes(li, None);
        let pts: Vec<Vec<f64>> = nodes
            .iter()
            .map(|&n| {
                let c = mesh.coords_of(n);
                let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
                c.iter().map(|x| x / norm).collect()
            })
            .collect();
        let d_link_to_cand = pts
            .iter()
            .map(|p| candidates.iter().map(|c| dist(p, c)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max);
        let d_cand_to_link = candidates
            .iter()
            .map(|c| pts.iter().map(|p| dist(p, c)).fold(f64::INFINITY, f64::min))
            .fold(0.0f64, f64::max);
        hausdorff_per_level.push((t, d_link_to_cand.max(d_cand_to_link)));
        if li == levels.len() - 1 {
            // consecutive spacing within each patch chain
            for pi in 0..model.patches.len() {
                for si in 0..res - 1 {
                    let a = &pts[pi * res + si];
                    let b = &pts[pi * res + si + 1];
                    mesh_tolerance = mesh_tolerance.max(dist(a, b));
                }
            }
        }
    }
    let decay = estimate_order_or_floor(&hausdorff_per_level)?;
    let final_hausdorff = hausdorff_per_level.last().map(|&(_, h)| h).unwrap_or(f64::NAN);
    Ok(TangentConeReport {
        hausdorff_per_level,
        decay,
        final_hausdorff,
        mesh_tolerance,
        candidate_count: candidates.len(),
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Exponent of the inner diameter of the link versus scale; requires the
/// link to be a single closed chain at every level.
pub fn horn_exponent_numeric(model: &GermModel, plan: &ScaleSamplePlan) -> Result<OrderEstimate, Error> {
    plan.validate()?;
    let mesh = LinkMesh::build(model, plan);
    let levels = mesh.levels().to_vec();
    let mut samples = Vec::with_capacity(levels.len());
    for (li, &t) in levels.iter().enumerate() {
        if !mesh.level_is_closed_chain(li) {
            return Err(Error::LinkNotClosed);
        }
        samples.push((t, mesh.level_diameter(li, None)?));
    }
    estimate_order(&samples)
}

/// Exponent of the inner link diameter for arbitrary (possibly open) links.
pub fn link_diameter_exponent(model: &GermModel, plan: &ScaleSamplePlan) -> Result<OrderEstimate, Error> {
    plan.validate()?;
    let mesh = LinkMesh::build(model, plan);
    let levels = mesh.levels().to_vec();
    let mut samples = Vec::with_capacity(levels.len());
    for (li, &t) in levels.iter().enumerate() {
        samples.push((t, mesh.level_diameter(li, None)?));
    }
    estimate_order(&samples)
}
