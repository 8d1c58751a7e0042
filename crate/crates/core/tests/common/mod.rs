//! Slow, direct re-implementations used to check the library. Nothing here
//! calls into the algorithms under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use atc_core::graph::{AttrId, Graph, VertexId};
use atc_core::Rational;
use proptest::prelude::*;
use rand::Rng;

pub type Edge = (VertexId, VertexId);

pub fn norm(u: VertexId, v: VertexId) -> Edge {
    (u.min(v), u.max(v))
}

/// Plain adjacency-set view over an edge set.
#[derive(Debug, Clone)]
pub struct Plain {
    pub n: usize,
    pub edges: BTreeSet<Edge>,
}

impl Plain {
    pub fn of(g: &Graph) -> Self {
        Plain {
            n: g.num_vertices(),
            edges: g.edges().iter().copied().collect(),
        }
    }

    pub fn has(&self, u: VertexId, v: VertexId) -> bool {
        u != v && self.edges.contains(&norm(u, v))
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.edges.iter().flat_map(|&(u, v)| [u, v]).collect()
    }

    /// Triangles through `e` by scanning every third vertex.
    pub fn support(&self, (u, v): Edge) -> usize {
        (0..self.n as VertexId)
            .filter(|&w| self.has(u, w) && self.has(v, w))
            .count()
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }
}

/// All-pairs hop distances by Floyd–Warshall over `alive` vertices; `None`
/// for unreachable pairs.
pub fn floyd_warshall(n: usize, edges: &BTreeSet<Edge>, alive: &[bool]) -> Vec<Vec<Option<u32>>> {
    let mut d = vec![vec![None; n]; n];
    for v in 0..n {
        if alive[v] {
            d[v][v] = Some(0);
        }
    }
    for &(u, v) in edges {
        if alive[u as usize] && alive[v as usize] {
            d[u as usize][v as usize] = Some(1);
            d[v as usize][u as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

/// Largest `k` whose k-truss (obtained by repeatedly deleting edges with
/// support below `k − 2`) contains each edge.
pub fn trussness_by_pruning(p: &Plain) -> Vec<(Edge, u32)> {
    let mut out: Vec<(Edge, u32)> = p.edges.iter().map(|&e| (e, 2)).collect();
    let mut k = 3;
    loop {
        let mut cur = p.clone();
        loop {
            let weak: Vec<Edge> = cur
                .edges
                .iter()
                .copied()
                .filter(|&e| cur.support(e) + 2 < k as usize)
                .collect();
            if weak.is_empty() {
                break;
            }
            for e in weak {
                cur.edges.remove(&e);
            }
        }
        if cur.edges.is_empty() {
            return out;
        }
        for (e, t) in out.iter_mut() {
            if cur.edges.contains(e) {
                *t = k;
            }
        }
        k += 1;
    }
}

/// Maximal connected k-truss around `query` with query distance at most `d`,
/// found by recomputing everything from scratch after every single deletion,
/// deleting in the order `pick` chooses. `None` when a query node is lost.
pub fn naive_kd_truss(
    p: &Plain,
    query: &[VertexId],
    k: u32,
    d: u32,
    mut pick: impl FnMut(usize) -> usize,
) -> Option<(BTreeSet<VertexId>, BTreeSet<Edge>)> {
    let n = p.n;
    let mut alive = vec![true; n];
    let mut edges = p.edges.clone();
    loop {
        let cur = Plain {
            n,
            edges: edges.clone(),
        };
        let weak: Vec<Edge> = edges
            .iter()
            .copied()
            .filter(|&e| cur.support(e) + 2 < k as usize)
            .collect();
        if !weak.is_empty() {
            let e = weak[pick(weak.len())];
            edges.remove(&e);
            continue;
        }
        let dist = floyd_warshall(n, &edges, &alive);
        let mut changed = false;
        for v in 0..n {
            if !alive[v] {
                continue;
            }
            let far = query
                .iter()
                .any(|&q| dist[q as usize][v].is_none_or(|x| x > d));
            if far || cur.degree(v as VertexId) == 0 {
                alive[v] = false;
                edges.retain(|&(a, b)| a as usize != v && b as usize != v);
                changed = true;
            }
        }
        if query.iter().any(|&q| !alive[q as usize]) {
            return None;
        }
        if !changed {
            let vs = (0..n as VertexId).filter(|&v| alive[v as usize]).collect();
            return Some((vs, edges));
        }
    }
}

/// Independent check of every (k,d)-truss condition plus the diameter bound
/// `diam ≤ min((2|V|−2)/k, 2d)`. Returns a description of the first
/// violation.
pub fn check_kd_truss(
    n: usize,
    vertices: &[VertexId],
    edges: &[Edge],
    query: &[VertexId],
    k: u32,
    d: u32,
) -> Result<(), String> {
    let vs: BTreeSet<VertexId> = vertices.iter().copied().collect();
    let es: BTreeSet<Edge> = edges.iter().map(|&(u, v)| norm(u, v)).collect();
    for &(u, v) in &es {
        if !vs.contains(&u) || !vs.contains(&v) {
            return Err(format!("edge ({u},{v}) leaves the vertex set"));
        }
    }
    for q in query {
        if !vs.contains(q) {
            return Err(format!("query node {q} missing"));
        }
    }
    let h = Plain { n, edges: es };
    for &e in &h.edges {
        if h.support(e) + 2 < k as usize {
            return Err(format!("edge {e:?} has support {} < k-2", h.support(e)));
        }
    }
    let mut alive = vec![false; n];
    for &v in &vs {
        alive[v as usize] = true;
    }
    let dist = floyd_warshall(n, &h.edges, &alive);
    let mut diam = 0;
    for &u in &vs {
        for &v in &vs {
            match dist[u as usize][v as usize] {
                None => return Err(format!("{u} and {v} disconnected")),
                Some(x) => diam = diam.max(x),
            }
        }
    }
    for &q in query {
        for &v in &vs {
            if dist[q as usize][v as usize].unwrap() > d {
                return Err(format!("vertex {v} farther than {d} from {q}"));
            }
        }
    }
    let size = vs.len() as u64;
    if (diam as u64) * (k as u64) > 2 * size - 2 || diam > 2 * d {
        return Err(format!(
            "diameter {diam} breaks the upper bound (|V|={size}, k={k}, d={d})"
        ));
    }
    Ok(())
}

/// `Σ_w |V_w ∩ S|² / |S|`, counted directly.
pub fn score_of(g: &Graph, set: &[VertexId], attrs: &[AttrId]) -> Rational {
    if set.is_empty() {
        return Rational::from_integer(0);
    }
    let attrs: HashSet<AttrId> = attrs.iter().copied().collect();
    let mut total = 0i128;
    for &w in &attrs {
        let c = set.iter().filter(|&&v| g.attrs(v).contains(&w)).count() as i128;
        total += c * c;
    }
    Rational::new(total, set.len() as i128)
}

/// Connected components of `vertices` under `edges`.
pub fn components(
    vertices: &BTreeSet<VertexId>,
    edges: &BTreeSet<Edge>,
) -> Vec<BTreeSet<VertexId>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for &s in vertices {
        if !seen.insert(s) {
            continue;
        }
        let mut comp = BTreeSet::from([s]);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &(a, b) in edges {
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if vertices.contains(&other) && seen.insert(other) {
                    comp.insert(other);
                    queue.push_back(other);
                }
            }
        }
        out.push(comp);
    }
    out
}

/// Minimum spanning forest weight of `G[set]` by Prim from every vertex,
/// or `None` when `G[set]` is disconnected.
pub fn mst_weight(
    set: &[VertexId],
    weight: impl Fn(VertexId, VertexId) -> Option<Rational>,
) -> Option<Rational> {
    if set.is_empty() {
        return None;
    }
    let mut inside = vec![set[0]];
    let mut total = Rational::from_integer(0);
    while inside.len() < set.len() {
        let mut best: Option<(Rational, VertexId)> = None;
        for &u in &inside {
            for &v in set {
                if inside.contains(&v) {
                    continue;
                }
                if let Some(w) = weight(u, v) {
                    if best.as_ref().is_none_or(|(b, _)| w < *b) {
                        best = Some((w, v));
                    }
                }
            }
        }
        let (w, v) = best?;
        total += w;
        inside.push(v);
    }
    Some(total)
}

/// Builds a graph on `n` vertices from a pair mask and attribute bitmasks
/// over labels `a`, `b`, `c`, `d`.
pub fn build(n: usize, mask: &[bool], attr_bits: &[u8]) -> Graph {
    let mut edges = Vec::new();
    let mut i = 0;
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            if mask[i] {
                edges.push((u, v));
            }
            i += 1;
        }
    }
    let labels = ["a", "b", "c", "d"];
    let assignments = attr_bits.iter().enumerate().flat_map(|(v, bits)| {
        (0..4)
            .filter(move |b| bits >> b & 1 == 1)
            .map(move |b| (v as VertexId, labels[b]))
    });
    Graph::from_edges(n, &edges).with_attributes(assignments)
}

/// Random attributed graph with `lo..=hi` vertices and edge density `p`.
pub fn arb_graph(lo: usize, hi: usize, p: f64) -> impl Strategy<Value = Graph> {
    (lo..=hi).prop_flat_map(move |n| {
        (
            Just(n),
            proptest::collection::vec(proptest::bool::weighted(p), n * (n - 1) / 2),
            proptest::collection::vec(0u8..16, n),
        )
            .prop_map(|(n, mask, attrs)| build(n, &mask, &attrs))
    })
}

/// Same shape as [`arb_graph`], drawn from `rng`.
pub fn random_graph(rng: &mut impl Rng, lo: usize, hi: usize, p: f64) -> Graph {
    let n = rng.gen_range(lo..=hi);
    let mask: Vec<bool> = (0..n * (n - 1) / 2).map(|_| rng.gen_bool(p)).collect();
    let attrs: Vec<u8> = (0..n).map(|_| rng.gen_range(0..16)).collect();
    build(n, &mask, &attrs)
}

/// Graph with a dense block `0..block` whose members mostly carry `a`, and
/// sparser, mostly unlabelled vertices around it.
pub fn planted_small(rng: &mut impl Rng, n: usize, block: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            let p = if (v as usize) < block {
                0.9
            } else if (u as usize) < block {
                0.35
            } else {
                0.5
            };
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut assignments = Vec::new();
    for v in 0..n as VertexId {
        let p_a = if (v as usize) < block { 0.9 } else { 0.15 };
        if rng.gen_bool(p_a) {
            assignments.push((v, "a"));
        }
        if rng.gen_bool(0.3) {
            assignments.push((v, "b"));
        }
    }
    Graph::from_edges(n, &edges).with_attributes(assignments)
}
