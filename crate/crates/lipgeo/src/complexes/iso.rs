//! Label-exact multigraph isomorphism by backtracking with invariant pruning.
//!
//! Complexes are small (hundreds of edges at most), so a deterministic
//! exhaustive search with degree / label-multiset pruning is the right tool:
//! exactness over asymptotics. Disconnected inputs are matched component by
//! component; isomorphism is an equivalence, so greedy component pairing is
//! sound.

use std::collections::BTreeMap;

use num_rational::BigRational;

use super::HolderComplex;

/// Per-vertex invariant: degree plus the sorted multiset of incident labels.
type Signature = (usize, Vec<BigRational>);

struct View {
    names: Vec<String>,
    /// Sorted label multiset per ordered vertex pair (u <= v by index).
    edges: BTreeMap<(usize, usize), Vec<BigRational>>,
    sig: Vec<Signature>,
}

impl View {
    fn build(c: &HolderComplex, members: &[usize]) -> View {
        let lookup: BTreeMap<&str, usize> = members
            .iter()
            .enumerate()
            .map(|(i, &g)| (c.vertices()[g].as_str(), i))
            .collect();
        let names: Vec<String> = members.iter().map(|&g| c.vertices()[g].clone()).collect();
        let mut edges: BTreeMap<(usize, usize), Vec<BigRational>> = BTreeMap::new();
        let mut sig: Vec<Signature> = vec![(0, Vec::new()); names.len()];
        for e in c.edges() {
            let (Some(&a), Some(&b)) = (lookup.get(e.ends.0.as_str()), lookup.get(e.ends.1.as_str()))
            else {
                continue;
            };
            let key = if a <= b { (a, b) } else { (b, a) };
            edges.entry(key).or_default().push(e.beta.clone());
            sig[a].0 += 1;
            sig[a].1.push(e.beta.clone());
            sig[b].0 += 1;
            sig[b].1.push(e.beta.clone());
        }
        for multiset in edges.values_mut() {
            multiset.sort();
        }
        for s in &mut sig {
            s.1.sort();
        }
        View { names, edges, sig }
    }

    fn labels_between(&self, a: usize, b: usize) -> Option<&Vec<BigRational>> {
        let key = if a <= b { (a, b) } else { (b, a) };
        self.edges.get(&key)
    }
}

/// Isomorphism of whole complexes (labels matched exactly); the witness maps
/// vertex names of `a` to vertex names of `b`.
pub fn isomorphism(a: &HolderComplex, b: &HolderComplex) -> Option<BTreeMap<String, String>> {
    if a.vertices().len() != b.vertices().len() || a.edges().len() != b.edges().len() {
        return None;
    }
    let comps_a = components_of(a);
    let comps_b = components_of(b);
    if comps_a.len() != comps_b.len() {
        return None;
    }
    let views_a: Vec<View> = comps_a.iter().map(|m| View::build(a, m)).collect();
    let views_b: Vec<View> = comps_b.iter().map(|m| View::build(b, m)).collect();
    let mut used = vec![false; views_b.len()];
    let mut witness = BTreeMap::new();
    for va in &views_a {
        let mut matched = false;
        for (j, vb) in views_b.iter().enumerate() {
            if used[j] {
                continue;
            }
            if let Some(map) = component_isomorphism(va, vb) {
                used[j] = true;
                for (i, &m) in map.iter().enumerate() {
                    witness.insert(va.names[i].clone(), vb.names[m].clone());
                }
                matched = true;
                break;
            }
        }
        if !matched {
            return None;
        }
    }
    Some(witness)
}

fn components_of(c: &HolderComplex) -> Vec<Vec<usize>> {
    let (labels, count) = c.component_labels();
    let mut comps = vec![Vec::new(); count];
    for (i, &l) in labels.iter().enumerate() {
        comps[l].push(i);
    }
    // Deterministic ordering: larger components first, then by lead vertex.
    comps.sort_by(|x, y| y.len().cmp(&x.len()).then(x[0].cmp(&y[0])));
    comps
}

fn component_isomorphism(a: &View, b: &View) -> Option<Vec<usize>> {
    let n = a.names.len();
    if n != b.names.len() || a.edges.len() != b.edges.len() {
        return None;
    }
    let mut sig_a = a.sig.clone();
    let mut sig_b = b.sig.clone();
    sig_a.sort();
    sig_b.sort();
    if sig_a != sig_b {
        return None;
    }
    // Assign most-constrained first: vertices sorted by signature rarity.
    let mut rarity: BTreeMap<&Signature, usize> = BTreeMap::new();
    for s in &a.sig {
        *rarity.entry(s).or_insert(0) += 1;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| {
        rarity[&a.sig[x]]
            .cmp(&rarity[&a.sig[y]])
            .then(a.sig[y].0.cmp(&a.sig[x].0))
            .then(x.cmp(&y))
    });
    let mut map = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    if assign(a, b, &order, 0, &mut map, &mut taken) {
        Some(map)
    } else {
        None
    }
}

fn assign(
    a: &View,
    b: &View,
    order: &[usize],
    pos: usize,
    map: &mut Vec<usize>,
    taken: &mut Vec<bool>,
) -> bool {
    if pos == order.len() {
        return true;
    }
    let v = order[pos];
    for cand in 0..b.names.len() {
        if taken[cand] || a.sig[v] != b.sig[cand] {
            continue;
        }
        // Every edge bundle to an already-mapped vertex must match exactly.
        let ok = order[..pos].iter().all(|&u| {
            match (a.labels_between(v, u), b.labels_between(cand, map[u])) {
                (None, None) => true,
                (Some(x), Some(y)) => x == y,
                _ => false,
            }
        });
        if !ok {
            continue;
        }
        map[v] = cand;
        taken[cand] = true;
        if assign(a, b, order, pos + 1, map, taken) {
            return true;
        }
        taken[cand] = false;
        map[v] = usize::MAX;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponents::exponent::{rat, rat_int};

    fn complex(vs: &[&str], es: &[(&str, &str, &str, BigRational)]) -> HolderComplex {
        HolderComplex::new(
            vs.iter().map(|s| s.to_string()).collect(),
            es.iter()
                .map(|(i, a, b, q)| (i.to_string(), a.to_string(), b.to_string(), q.clone()))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn parallel_edge_multisets_matter() {
        let two = complex(
            &["a", "b"],
            &[("e1", "a", "b", rat_int(2)), ("e2", "a", "b", rat_int(3))],
        );
        let two_same = complex(
            &["x", "y"],
            &[("f1", "x", "y", rat_int(2)), ("f2", "y", "x", rat_int(3))],
        );
        let two_diff = complex(
            &["x", "y"],
            &[("f1", "x", "y", rat_int(2)), ("f2", "x", "y", rat_int(2))],
        );
        assert!(isomorphism(&two, &two_same).is_some());
        assert!(isomorphism(&two, &two_diff).is_none());
    }

    #[test]
    fn witness_is_a_real_isomorphism() {
        let star = complex(
            &["c", "l1", "l2", "l3"],
            &[
                ("e1", "c", "l1", rat_int(1)),
                ("e2", "c", "l2", rat(3, 2)),
                ("e3", "c", "l3", rat_int(2)),
            ],
        );
        let star2 = complex(
            &["mid", "p", "q", "r"],
            &[
                ("a", "mid", "q", rat(3, 2)),
                ("b", "mid", "p", rat_int(1)),
                ("c", "mid", "r", rat_int(2)),
            ],
        );
        let w = isomorphism(&star, &star2).unwrap();
        assert_eq!(w["c"], "mid");
        assert_eq!(w["l1"], "p");
        assert_eq!(w["l2"], "q");
        assert_eq!(w["l3"], "r");
    }

    #[test]
    fn disconnected_component_multiset() {
        let a = complex(
            &["a", "b", "c", "d"],
            &[("e1", "a", "b", rat_int(2)), ("e2", "c", "d", rat_int(3))],
        );
        let b = complex(
            &["w", "x", "y", "z"],
            &[("f1", "w", "x", rat_int(3)), ("f2", "y", "z", rat_int(2))],
        );
        assert!(isomorphism(&a, &b).is_some());
        let c = complex(
            &["w", "x", "y", "z"],
            &[("f1", "w", "x", rat_int(3)), ("f2", "y", "z", rat_int(3))],
        );
        assert!(isomorphism(&a, &c).is_none());
    }
}
