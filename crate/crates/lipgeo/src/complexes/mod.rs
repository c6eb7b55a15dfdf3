//! Hölder complexes: labeled multigraphs whose canonical form is a complete
//! invariant of inner Lipschitz equivalence of surface germs.
//!
//! Edges carry finite rational exponents `beta >= 1`; parallel edges are
//! allowed, self-loops are not (a loop vertex is a vertex with two parallel
//! edges to the same neighbor, so a pure cycle terminates as a two-vertex
//! bigon and never as a self-loop).

mod iso;
pub mod realize;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_rational::BigRational;
use num_traits::One;
use rand::Rng;

use crate::exponents::exponent::format_rational;
use crate::exponents::ExtendedExponent;
use crate::Error;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EdgeRec {
    pub id: String,
    pub ends: (String, String),
    pub beta: BigRational,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HolderComplex {
    vertices: Vec<String>,
    edges: Vec<EdgeRec>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexClass {
    NonCritical,
    Loop,
    Critical,
}

impl HolderComplex {
    pub fn new(
        vertices: Vec<String>,
        edges: Vec<(String, String, String, BigRational)>,
    ) -> Result<HolderComplex, Error> {
        let mut vset = BTreeSet::new();
        for v in &vertices {
            if !vset.insert(v.clone()) {
                return Err(Error::DuplicateId(v.clone()));
            }
        }
        let mut eids = BTreeSet::new();
        let one = BigRational::one();
        let mut recs = Vec::with_capacity(edges.len());
        for (id, a, b, beta) in edges {
            if !eids.insert(id.clone()) {
                return Err(Error::DuplicateId(id));
            }
            if !vset.contains(&a) {
                return Err(Error::UnknownVertex(a));
            }
            if !vset.contains(&b) {
                return Err(Error::UnknownVertex(b));
            }
            if a == b {
                return Err(Error::SelfLoopEdge(id));
            }
            if beta < one {
                return Err(Error::BetaBelowOne);
            }
            recs.push(EdgeRec { id, ends: (a, b), beta });
        }
        for v in &vset {
            if !recs.iter().any(|e| &e.ends.0 == v || &e.ends.1 == v) {
                return Err(Error::IsolatedVertex(v.clone()));
            }
        }
        let mut c = HolderComplex { vertices: vset.into_iter().collect(), edges: recs };
        c.sort_edges();
        Ok(c)
    }

    fn sort_edges(&mut self) {
        self.edges.sort_by(|a, b| {
            let ka = ordered_ends(&a.ends);
            let kb = ordered_ends(&b.ends);
            ka.cmp(&kb).then(a.beta.cmp(&b.beta)).then(a.id.cmp(&b.id))
        });
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[EdgeRec] {
        &self.edges
    }

    fn incident(&self, v: &str) -> Vec<usize> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.ends.0 == v || e.ends.1 == v)
            .map(|(i, _)| i)
            .collect()
    }

    /// Vertex classification: exactly two incident edges to two distinct
    /// neighbors is non-critical, to the same neighbor is a loop vertex,
    /// anything else (degree 1, degree >= 3) is critical.
    pub fn classify_vertex(&self, v: &str) -> Result<VertexClass, Error> {
        if !self.vertices.iter().any(|x| x == v) {
            return Err(Error::UnknownVertex(v.to_string()));
        }
        let inc = self.incident(v);
        if inc.len() != 2 {
            return Ok(VertexClass::Critical);
        }
        let o1 = other_end(&self.edges[inc[0]], v);
        let o2 = other_end(&self.edges[inc[1]], v);
        Ok(if o1 == o2 { VertexClass::Loop } else { VertexClass::NonCritical })
    }

    /// Canonical form: eliminate non-critical vertices (merging their two
    /// edges into one labeled with the min), then equalize loop-vertex pairs
    /// to their min. Deterministic pivot order.
    pub fn canonicalize(&self) -> HolderComplex {
        self.canonicalize_impl(None::<&mut rand::rngs::ThreadRng>)
    }

    /// Same procedure with randomized pivot choice; the result must be
    /// isomorphic regardless of the order (confluence).
    pub fn canonicalize_with_rng<R: Rng>(&self, rng: &mut R) -> HolderComplex {
        self.canonicalize_impl(Some(rng))
    }

    fn canonicalize_impl<R: Rng>(&self, mut rng: Option<&mut R>) -> HolderComplex {
        let mut c = self.clone();
        let mut merge_counter = 0usize;
        let existing: BTreeSet<String> = c.edges.iter().map(|e| e.id.clone()).collect();
        loop {
            let non_critical: Vec<String> = c
                .vertices
                .iter()
                .filter(|v| matches!(c.classify_vertex(v), Ok(VertexClass::NonCritical)))
                .cloned()
                .collect();
            if non_critical.is_empty() {
                break;
            }
            let pick = match rng.as_deref_mut() {
                Some(r) => non_critical[r.gen_range(0..non_critical.len())].clone(),
                None => non_critical[0].clone(),
            };
            let inc = c.incident(&pick);
            debug_assert_eq!(inc.len(), 2);
            let (i, j) = (inc[0], inc[1]);
            let v1 = other_end(&c.edges[i], &pick).to_string();
            let v2 = other_end(&c.edges[j], &pick).to_string();
            let beta = c.edges[i].beta.clone().min(c.edges[j].beta.clone());
            let id = loop {
                let cand = format!("m{merge_counter}");
                merge_counter += 1;
                if !existing.contains(&cand) && !c.edges.iter().any(|e| e.id == cand) {
                    break cand;
                }
            };
            let mut keep: Vec<EdgeRec> = Vec::with_capacity(c.edges.len() - 1);
            for (k, e) in c.edges.iter().enumerate() {
                if k != i && k != j {
                    keep.push(e.clone());
                }
            }
            keep.push(EdgeRec { id, ends: (v1, v2), beta });
            c.edges = keep;
            c.vertices.retain(|v| v != &pick);
            c.sort_edges();
        }
        // Loop relabeling: both edges at a loop vertex get the min label.
        let loops: Vec<String> = c
            .vertices
            .iter()
            .filter(|v| matches!(c.classify_vertex(v), Ok(VertexClass::Loop)))
            .cloned()
            .collect();
        for v in loops {
            let inc = c.incident(&v);
            let m = c.edges[inc[0]].beta.clone().min(c.edges[inc[1]].beta.clone());
            c.edges[inc[0]].beta = m.clone();
            c.edges[inc[1]].beta = m;
        }
        c.sort_edges();
        c
    }

    /// Checks the canonical-form conditions, naming each violation.
    pub fn is_canonical(&self) -> (bool, Vec<String>) {
        let mut violations = Vec::new();
        for v in &self.vertices {
            match self.classify_vertex(v).expect("own vertex") {
                VertexClass::NonCritical => {
                    violations.push(format!("vertex {v:?} is non-critical"));
                }
                VertexClass::Loop => {
                    let inc = self.incident(v);
                    let b1 = &self.edges[inc[0]].beta;
                    let b2 = &self.edges[inc[1]].beta;
                    if b1 != b2 {
                        violations.push(format!(
                            "loop vertex {v:?} has unequal labels {} and {}",
                            format_rational(b1),
                            format_rational(b2)
                        ));
                    }
                }
                VertexClass::Critical => {}
            }
        }
        (violations.is_empty(), violations)
    }

    /// Decides inner Lipschitz equivalence: canonicalizes both complexes and
    /// searches for a label-exact graph isomorphism. Returns the witness
    /// vertex map between the canonical forms when equivalent.
    pub fn equivalent(&self, other: &HolderComplex) -> Option<BTreeMap<String, String>> {
        let a = self.canonicalize();
        let b = other.canonicalize();
        iso::isomorphism(&a, &b)
    }

    /// The exponent of the horn a single-cycle complex is inner equivalent
    /// to: the minimum edge label. Errors unless the graph is one cycle.
    pub fn horn_exponent(&self) -> Result<ExtendedExponent, Error> {
        if self.edges.len() != self.vertices.len() || self.vertices.len() < 2 {
            return Err(Error::NotACycle);
        }
        for v in &self.vertices {
            if self.incident(v).len() != 2 {
                return Err(Error::NotACycle);
            }
        }
        if self.component_count() != 1 {
            return Err(Error::NotACycle);
        }
        let min = self
            .edges
            .iter()
            .map(|e| e.beta.clone())
            .min()
            .expect("cycle has edges");
        Ok(ExtendedExponent::Finite(min))
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// (label per vertex index, number of components)
    pub(crate) fn component_labels(&self) -> (Vec<usize>, usize) {
        let idx: BTreeMap<&str, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut next = 0;
        for start in 0..self.vertices.len() {
            if label[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            label[start] = next;
            while let Some(v) = stack.pop() {
                let vname = &self.vertices[v];
                for e in &self.edges {
                    let n = if &e.ends.0 == vname {
                        Some(&e.ends.1)
                    } else if &e.ends.1 == vname {
                        Some(&e.ends.0)
                    } else {
                        None
                    };
                    if let Some(n) = n {
                        let ni = idx[n.as_str()];
                        if label[ni] == usize::MAX {
                            label[ni] = next;
                            stack.push(ni);
                        }
                    }
                }
            }
            next += 1;
        }
        (label, next)
    }

    /// First Betti number `E - V + C` (preserved by canonicalization).
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    /// Graph surgery used by invariance tests: replace edge `id` by a path
    /// of two edges labeled `(beta, beta2)` through a fresh vertex.
    pub fn with_edge_subdivided(&self, id: &str, beta2: BigRational) -> Result<HolderComplex, Error> {
        let e = self
            .edges
            .iter()
            .find(|e| e.id == id)
            .ok_or_else(|| Error::UnknownVertex(id.to_string()))?
            .clone();
        let mut n = 0usize;
        let vname = loop {
            let cand = format!("sub{n}");
            if !self.vertices.contains(&cand) {
                break cand;
            }
            n += 1;
        };
        let mut vertices = self.vertices.clone();
        vertices.push(vname.clone());
        let mut edges: Vec<(String, String, String, BigRational)> = self
            .edges
            .iter()
            .filter(|x| x.id != id)
            .map(|x| (x.id.clone(), x.ends.0.clone(), x.ends.1.clone(), x.beta.clone()))
            .collect();
        edges.push((format!("{id}a"), e.ends.0.clone(), vname.clone(), e.beta.clone()));
        edges.push((format!("{id}b"), vname, e.ends.1.clone(), beta2));
        HolderComplex::new(vertices, edges)
    }

    /// Graphviz output; edge labels are the Hölder exponents.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph holder {\n");
        for v in &self.vertices {
            let _ = writeln!(s, "  \"{v}\";");
        }
        for e in &self.edges {
            let _ = writeln!(
                s,
                "  \"{}\" -- \"{}\" [label=\"{}\"];",
                e.ends.0,
                e.ends.1,
                format_rational(&e.beta)
            );
        }
        s.push_str("}\n");
        s
    }
}

fn other_end<'a>(e: &'a EdgeRec, v: &str) -> &'a str {
    if e.ends.0 == v {
        &e.ends.1
    } else {
        &e.ends.0
    }
}

fn ordered_ends(ends: &(String, String)) -> (&String, &String) {
    if ends.0 <= ends.1 {
        (&ends.0, &ends.1)
    } else {
        (&ends.1, &ends.0)
    }
}
