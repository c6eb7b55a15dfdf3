//! Realization of a Hölder complex as a concrete germ model.
//!
//! One patch per edge. The vertex arc of `v_i` runs along the scale axis and
//! bends into its own coordinate direction at the common contact exponent
//! `M = max beta`; an edge patch joins its two vertex arcs through a tent
//! bulge of size `t^beta` in a shared 2-plane, at an angle unique to the
//! edge. Each patch is then a `beta`-Hölder triangle (its link segment has
//! length of order `t^beta`) and patches meet exactly along vertex arcs, so
//! the inner geometry of the model is the one the complex prescribes.
//!
//! Note the vertex arcs cannot have pairwise-distinct *tangent* directions:
//! boundary arcs of a `beta`-triangle with `beta > 1` are tangent to each
//! other, so the arcs are spread in distinct *sub-leading* coordinate
//! directions instead. Ambient dimension is `|V| + 3 <= 2|V| + 1`.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::One;

use super::HolderComplex;
use crate::metriclab::{
    rational_circle_points, GermModel, Gluing, Patch, PatchTerm, PiecewiseLinear, Side,
};

pub struct Realization {
    pub model: GermModel,
    /// Ambient coordinate index carrying each vertex arc.
    pub vertex_coord: BTreeMap<String, usize>,
    /// Edge id realized by each patch, in patch order.
    pub patch_edges: Vec<String>,
    /// The common vertex-arc contact exponent `M`.
    pub contact_exp: BigRational,
}

/// Builds a germ model realizing the complex (a geometric representative of
/// its inner Lipschitz class).
pub fn realize_model(c: &HolderComplex) -> Realization {
    let vertices = c.vertices();
    let edges = c.edges();
    let dim = vertices.len() + 3;
    let contact_exp = edges
        .iter()
        .map(|e| e.beta.clone())
        .max()
        .unwrap_or_else(BigRational::one);
    let vertex_coord: BTreeMap<String, usize> = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.clone(), 3 + i))
        .collect();
    let directions = rational_circle_points(edges.len().max(3));

    let mut patches = Vec::with_capacity(edges.len());
    let mut patch_edges = Vec::with_capacity(edges.len());
    // (vertex, patch, side) ends for gluing assembly
    let mut ends_at: BTreeMap<&str, Vec<(usize, Side)>> = BTreeMap::new();
    for (k, e) in edges.iter().enumerate() {
        let (wx, wy) = directions[k].clone();
        let ci = vertex_coord[&e.ends.0];
        let cj = vertex_coord[&e.ends.1];
        let mut coords: Vec<Vec<PatchTerm>> = vec![Vec::new(); dim];
        coords[0] = vec![PatchTerm {
            exp: BigRational::one(),
            coeff: PiecewiseLinear::constant(BigRational::one()),
        }];
        coords[1] = vec![PatchTerm { exp: e.beta.clone(), coeff: PiecewiseLinear::tent(wx) }];
        coords[2] = vec![PatchTerm { exp: e.beta.clone(), coeff: PiecewiseLinear::tent(wy) }];
        coords[ci].push(PatchTerm {
            exp: contact_exp.clone(),
            coeff: PiecewiseLinear::linear(BigRational::one(), BigRational::from_integer(0.into())),
        });
        coords[cj].push(PatchTerm {
            exp: contact_exp.clone(),
            coeff: PiecewiseLinear::linear(BigRational::from_integer(0.into()), BigRational::one()),
        });
        patches.push(Patch { coords });
        patch_edges.push(e.id.clone());
        ends_at.entry(e.ends.0.as_str()).or_default().push((k, Side::S0));
        ends_at.entry(e.ends.1.as_str()).or_default().push((k, Side::S1));
    }
    let mut gluings = Vec::new();
    for ends in ends_at.values() {
        for w in ends.windows(2) {
            gluings.push(Gluing { a: w[0], b: w[1] });
        }
    }
    let model = GermModel::new(dim, patches, gluings).expect("realization is well formed");
    Realization { model, vertex_coord, patch_edges, contact_exp }
}
