//! Sampled link mesh of a germ model and shortest-path distances on it.
//!
//! Nodes are link samples `(level, patch, s-index)` plus one origin node tied
//! to the deepest level. Inner distances between points at scale `t` run on
//! the annulus of levels in `[t/4, 4t]`; when that subgraph disconnects the
//! endpoints (branches meeting only at the origin), the mesh is extended
//! down to the origin, which is where such geodesics actually pass.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::model::{GermModel, PancakeDecomposition, ScaleSamplePlan, Side};
use crate::Error;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct NodeId(pub usize);

pub struct LinkMesh {
    coords: Vec<Vec<f64>>,
    adj: Vec<Vec<(usize, f64)>>,
    /// `(level, patch, s_idx) -> node index`; origin is the last node.
    levels: Vec<f64>,
    patches: usize,
    res: usize,
    origin: usize,
    node_level: Vec<usize>,
}

fn dist_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}
impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance.
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl LinkMesh {
    pub fn build(model: &GermModel, plan: &ScaleSamplePlan) -> LinkMesh {
        let levels = plan.t_levels();
        let res = plan.resolution;
        let s_grid = plan.s_grid();
        let np = model.patches.len();
        let n_nodes = levels.len() * np * res + 1;
        let mut coords = Vec::with_capacity(n_nodes);
        let mut node_level = Vec::with_capacity(n_nodes);
        for (li, &t) in levels.iter().enumerate() {
            for patch in &model.patches {
                for &s in &s_grid {
                    coords.push(patch.eval_f64(t, s));
                    node_level.push(li);
                }
            }
        }
        let origin = coords.len();
        coords.push(vec![0.0; model.dim]);
        node_level.push(usize::MAX);

        let node = |li: usize, pi: usize, si: usize| li * np * res + pi * res + si;
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); coords.len()];
        let connect = |a: usize, b: usize, adj: &mut Vec<Vec<(usize, f64)>>, coords: &Vec<Vec<f64>>| {
            let w = dist_f64(&coords[a], &coords[b]);
            adj[a].push((b, w));
            adj[b].push((a, w));
        };
        for li in 0..levels.len() {
            for pi in 0..np {
                // chain edges along the link
                for si in 0..res - 1 {
                    connect(node(li, pi, si), node(li, pi, si + 1), &mut adj, &coords);
                }
                // radial edges toward the next (smaller) level
                if li + 1 < levels.len() {
                    for si in 0..res {
                        connect(node(li, pi, si), node(li + 1, pi, si), &mut adj, &coords);
                    }
                }
            }
            // gluing edges (zero length; arcs coincide exactly)
            for g in &model.gluings {
                let sa = if g.a.1 == Side::S0 { 0 } else { res - 1 };
                let sb = if g.b.1 == Side::S0 { 0 } else { res - 1 };
                connect(node(li, g.a.0, sa), node(li, g.b.0, sb), &mut adj, &coords);
            }
        }
        // the deepest level reaches the origin
        let last = levels.len() - 1;
        for pi in 0..np {
            for si in 0..res {
                connect(node(last, pi, si), origin, &mut adj, &coords);
            }
        }
        LinkMesh { coords, adj, levels, patches: np, res, origin, node_level }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn resolution(&self) -> usize {
        self.res
    }

    pub fn node(&self, level: usize, patch: usize, s_idx: usize) -> usize {
        level * self.patches * self.res + patch * self.res + s_idx
    }

    pub fn coords_of(&self, n: usize) -> &[f64] {
        &self.coords[n]
    }

    /// Nearest grid node on a patch at a level for a link parameter `s`.
    pub fn snap(&self, level: usize, patch: usize, s: f64) -> usize {
        let si = (s * (self.res - 1) as f64).round().clamp(0.0, (self.res - 1) as f64) as usize;
        self.node(level, patch, si)
    }

    /// Level index with scale closest to `t` (geometric ladder).
    pub fn level_of(&self, t: f64) -> Result<usize, Error> {
        if !(t > 0.0) {
            return Err(Error::TOutOfRange(t));
        }
        let mut best = 0usize;
        let mut gap = f64::INFINITY;
        for (i, &lv) in self.levels.iter().enumerate() {
            let g = (lv.ln() - t.ln()).abs();
            if g < gap {
                gap = g;
                best = i;
            }
        }
        Ok(best)
    }

    fn dijkstra(&self, src: usize, level_lo: usize, level_hi: usize, allow_origin: bool) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.coords.len()];
        let allowed = |n: usize| -> bool {
            if n == self.origin {
                return allow_origin;
            }
            let l = self.node_level[n];
            l >= level_lo && l <= level_hi
        };
        if !allowed(src) {
            return dist;
        }
        dist[src] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapItem(0.0, src));
        while let Some(HeapItem(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, w) in &self.adj[u] {
                if !allowed(v) {
                    continue;
                }
                let nd = d + w;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapItem(nd, v));
                }
            }
        }
        dist
    }

    /// Annulus of level indices for a query at level `li`: scales within a
    /// factor of 4, i.e. [t/4, 4t] intersected with the ladder.
    fn annulus(&self, li: usize) -> (usize, usize) {
        let t = self.levels[li];
        let lo_t = t / 4.0;
        let hi_t = t * 4.0;
        let mut lo = li;
        let mut hi = li;
        for (i, &lv) in self.levels.iter().enumerate() {
            if lv <= hi_t * (1.0 + 1e-12) && lv >= lo_t * (1.0 - 1e-12) {
                lo = lo.min(i);
                hi = hi.max(i);
            }
        }
        (lo, hi)
    }

    /// Shortest mesh path between two nodes at comparable scale. Starts on
    /// the `[t/4, 4t]` annulus and widens toward the origin only when the
    /// annulus disconnects the endpoints.
    pub fn inner_distance(&self, a: usize, b: usize, query_level: usize) -> Result<f64, Error> {
        let (lo, hi) = self.annulus(query_level);
        let d = self.dijkstra(a, lo, hi, false);
        if d[b].is_finite() {
            return Ok(d[b]);
        }
        let d = self.dijkstra(a, lo, self.levels.len() - 1, true);
        if d[b].is_finite() {
            return Ok(d[b]);
        }
        let d = self.dijkstra(a, 0, self.levels.len() - 1, true);
        if d[b].is_finite() {
            Ok(d[b])
        } else {
            Err(Error::DisconnectedMesh)
        }
    }

    /// Inner distances from one node to many, same widening rule.
    pub fn inner_distances_from(&self, a: usize, query_level: usize, targets: &[usize]) -> Result<Vec<f64>, Error> {
        let (lo, hi) = self.annulus(query_level);
        let d = self.dijkstra(a, lo, hi, false);
        if targets.iter().all(|&t| d[t].is_finite()) {
            return Ok(targets.iter().map(|&t| d[t]).collect());
        }
        let d = self.dijkstra(a, lo, self.levels.len() - 1, true);
        if targets.iter().all(|&t| d[t].is_finite()) {
            return Ok(targets.iter().map(|&t| d[t]).collect());
        }
        let d = self.dijkstra(a, 0, self.levels.len() - 1, true);
        if targets.iter().all(|&t| d[t].is_finite()) {
            Ok(targets.iter().map(|&t| d[t]).collect())
        } else {
            Err(Error::DisconnectedMesh)
        }
    }

    pub fn outer_distance(&self, a: usize, b: usize) -> f64 {
        dist_f64(&self.coords[a], &self.coords[b])
    }

    /// Per-level link subgraph: nodes of the level with chain+gluing edges.
    /// Returns adjacency restricted to the level (indices are mesh nodes).
    pub fn level_nodes(&self, level: usize, patch_filter: Option<&[usize]>) -> Vec<usize> {
        let mut out = Vec::new();
        for pi in 0..self.patches {
            if let Some(f) = patch_filter {
                if !f.contains(&pi) {
                    continue;
                }
            }
            for si in 0..self.res {
                out.push(self.node(level, pi, si));
            }
        }
        out
    }

    /// The level sublink as a geometric graph: nodes clustered by
    /// zero-distance gluing identifications, edges with positive lengths.
    fn level_graph(&self, level: usize, patch_filter: Option<&[usize]>) -> LevelGraph {
        let nodes = self.level_nodes(level, patch_filter);
        let index: std::collections::BTreeMap<usize, usize> =
            nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        // Union-find over zero-length edges: glued duplicates are one point.
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let r = find(parent, parent[x]);
                parent[x] = r;
            }
            parent[x]
        }
        for (i, &n) in nodes.iter().enumerate() {
            for &(v, w) in &self.adj[n] {
                if w == 0.0 {
                    if let Some(&j) = index.get(&v) {
                        let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                        if ri != rj {
                            parent[ri] = rj;
                        }
                    }
                }
            }
        }
        let mut cluster_of = vec![usize::MAX; nodes.len()];
        let mut clusters = 0usize;
        for i in 0..nodes.len() {
            let r = find(&mut parent, i);
            if cluster_of[r] == usize::MAX {
                cluster_of[r] = clusters;
                clusters += 1;
            }
            cluster_of[i] = cluster_of[r];
        }
        let mut edges: Vec<(usize, usize, f64)> = Vec::new();
        for (i, &n) in nodes.iter().enumerate() {
            for &(v, w) in &self.adj[n] {
                if w <= 0.0 {
                    continue;
                }
                if let Some(&j) = index.get(&v) {
                    if i < j {
                        edges.push((cluster_of[i], cluster_of[j], w));
                    }
                }
            }
        }
        LevelGraph { clusters, edges }
    }

    /// Diameter of the level sublink in its own path metric, optionally
    /// restricted to a patch subset. Fast paths for chains and cycles.
    pub fn level_diameter(&self, level: usize, patch_filter: Option<&[usize]>) -> Result<f64, Error> {
        self.level_graph(level, patch_filter).diameter()
    }

    /// True when the level sublink is a single closed chain.
    pub fn level_is_closed_chain(&self, level: usize) -> bool {
        self.level_graph(level, None).is_single_cycle()
    }
}

/// Small weighted graph for one level of the link.
struct LevelGraph {
    clusters: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl LevelGraph {
    fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0usize; self.clusters];
        for &(a, b, _) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    fn adjacency(&self) -> Vec<Vec<(usize, f64)>> {
        let mut adj = vec![Vec::new(); self.clusters];
        for &(a, b, w) in &self.edges {
            adj[a].push((b, w));
            adj[b].push((a, w));
        }
        adj
    }

    fn connected(&self) -> bool {
        if self.clusters == 0 {
            return false;
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.clusters];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.clusters
    }

    fn is_single_cycle(&self) -> bool {
        self.clusters >= 3
            && self.edges.len() == self.clusters
            && self.degrees().iter().all(|&d| d == 2)
            && self.connected()
    }

    /// Metric diameter. Cycle: prefix sums; path: total length; otherwise
    /// all-pairs Dijkstra (small graphs only).
    fn diameter(&self) -> Result<f64, Error> {
        if self.clusters == 0 {
            return Ok(0.0);
        }
        if !self.connected() {
            return Err(Error::DisconnectedMesh);
        }
        let degrees = self.degrees();
        let adj = self.adjacency();
        if self.is_single_cycle() {
            // Walk the cycle, collect segment weights, then max over pairs
            // of min(clockwise, counterclockwise).
            let mut weights = Vec::with_capacity(self.clusters);
            let mut prev = usize::MAX;
            let mut cur = 0usize;
            loop {
                let &(next, w) = adj[cur]
                    .iter()
                    .find(|&&(v, _)| v != prev)
                    .expect("cycle node has two distinct neighbors");
                weights.push(w);
                prev = cur;
                cur = next;
                if cur == 0 {
                    break;
                }
            }
            let total: f64 = weights.iter().sum();
            let mut prefix = vec![0.0f64];
            for w in &weights {
                prefix.push(prefix.last().unwrap() + w);
            }
            let n = weights.len();
            let mut diam = 0.0f64;
            for i in 0..n {
                for j in i + 1..n {
                    let d = (prefix[j] - prefix[i]).min(total - (prefix[j] - prefix[i]));
                    diam = diam.max(d);
                }
            }
            return Ok(diam);
        }
        if degrees.iter().all(|&d| d <= 2) {
            // A single path: diameter is the total length.
            return Ok(self.edges.iter().map(|&(_, _, w)| w).sum());
        }
        // General small graph: all-pairs shortest paths.
        let mut diam = 0.0f64;
        for src in 0..self.clusters {
            let mut dist = vec![f64::INFINITY; self.clusters];
            dist[src] = 0.0;
            let mut heap = BinaryHeap::new();
            heap.push(HeapItem(0.0, src));
            while let Some(HeapItem(d, u)) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for &(v, w) in &adj[u] {
                    let nd = d + w;
                    if nd < dist[v] {
                        dist[v] = nd;
                        heap.push(HeapItem(nd, v));
                    }
                }
            }
            for &d in &dist {
                if d.is_finite() {
                    diam = diam.max(d);
                }
            }
        }
        Ok(diam)
    }
}

/// Point on a model: patch plus `(t, s)` parameters.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct ModelPoint {
    pub patch: usize,
    pub t: f64,
    pub s: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DistanceMode {
    Outer,
    Inner,
    Pancake,
}

/// Distance between two model points in the chosen metric.
pub fn distance(
    model: &GermModel,
    p: ModelPoint,
    q: ModelPoint,
    mode: DistanceMode,
    plan: &ScaleSamplePlan,
    decomposition: Option<&PancakeDecomposition>,
) -> Result<f64, Error> {
    plan.validate()?;
    for pt in [p, q] {
        if pt.patch >= model.patches.len() {
            return Err(Error::BadModel(format!("point references patch {}", pt.patch)));
        }
        if !(pt.t > 0.0 && pt.t <= plan.t_max * (1.0 + 1e-12)) {
            return Err(Error::TOutOfRange(pt.t));
        }
    }
    match mode {
        DistanceMode::Outer => {
            let a = model.patches[p.patch].eval_f64(p.t, p.s);
            let b = model.patches[q.patch].eval_f64(q.t, q.s);
            Ok(dist_f64(&a, &b))
        }
        DistanceMode::Inner => {
            let mesh = LinkMesh::build(model, plan);
            let la = mesh.level_of(p.t)?;
            let lb = mesh.level_of(q.t)?;
            let a = mesh.snap(la, p.patch, p.s);
            let b = mesh.snap(lb, q.patch, q.s);
            mesh.inner_distance(a, b, la.min(lb))
        }
        DistanceMode::Pancake => {
            let d = decomposition.ok_or(Error::MissingDecomposition)?;
            pancake_distance(model, p, q, d, plan)
        }
    }
}

/// Kurdyka-Orro pancake metric on samples: chains of straight legs, each leg
/// inside one pancake, switching pancakes at shared boundary arcs or at the
/// origin (which belongs to every pancake).
fn pancake_distance(
    model: &GermModel,
    p: ModelPoint,
    q: ModelPoint,
    d: &PancakeDecomposition,
    plan: &ScaleSamplePlan,
) -> Result<f64, Error> {
    d.check_partition(model)?;
    let group_of_patch = d.patch_groups(model)?;
    let levels = plan.t_levels();
    // Transit nodes: (coords, set of groups containing the point).
    let mut nodes: Vec<(Vec<f64>, Vec<usize>)> = Vec::new();
    nodes.push((model.patches[p.patch].eval_f64(p.t, p.s), vec![group_of_patch[p.patch]]));
    nodes.push((model.patches[q.patch].eval_f64(q.t, q.s), vec![group_of_patch[q.patch]]));
    // Origin belongs to every pancake.
    nodes.push((vec![0.0; model.dim], (0..d.groups.len()).collect()));
    for g in &model.gluings {
        let (pa, sa) = g.a;
        let (pb, _) = g.b;
        let ga = group_of_patch[pa];
        let gb = group_of_patch[pb];
        if ga == gb {
            continue;
        }
        for &t in &levels {
            let pt = model.patches[pa].eval_f64(t, if sa == Side::S0 { 0.0 } else { 1.0 });
            nodes.push((pt, vec![ga, gb]));
        }
    }
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem(0.0, 0));
    while let Some(HeapItem(dd, u)) = heap.pop() {
        if dd > dist[u] {
            continue;
        }
        for v in 0..n {
            if v == u {
                continue;
            }
            // A leg is allowed inside a common pancake.
            if !nodes[u].1.iter().any(|g| nodes[v].1.contains(g)) {
                continue;
            }
            let w = dist_f64(&nodes[u].0, &nodes[v].0);
            let nd = dd + w;
            if nd < dist[v] {
                dist[v] = nd;
                heap.push(HeapItem(nd, v));
            }
        }
    }
    if dist[1].is_finite() {
        Ok(dist[1])
    } else {
        Err(Error::DisconnectedMesh)
    }
}
