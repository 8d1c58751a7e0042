//! Index-backed local search: seed with an attributed Steiner tree around the
//! query nodes, grow it into a small candidate graph, then peel that graph with
//! the bulk algorithm.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::time::Instant;

use num_traits::Zero;

use crate::error::{Error, Infeasible, Result};
use crate::graph::{query_distance, AttrId, EdgeId, Graph, Subgraph, VertexId};
use crate::greedy::{bulk_search, Algorithm, SearchResult};
use crate::index::AtIndex;
use crate::query::QuerySpec;
use crate::score::{covered, majority_with, normalize_attrs, Rational, ScoreBreakdown};
use crate::truss::{max_trussness_connecting, maximal_kd_truss};

/// `1 + γ Σ_{g ∈ {G} ∪ {G_w : w ∈ W_q}} (τ̄(∅) − τ_g(e))`. An edge outside
/// `G_w` counts with trussness 2.
pub fn attribute_truss_distance(
    idx: &AtIndex,
    e: EdgeId,
    attrs: &[AttrId],
    gamma: &Rational,
) -> Rational {
    let top = idx.tau_max() as i128;
    let mut shortfall = top - idx.edge_trussness(e) as i128;
    for &w in attrs {
        let t = idx.attr_edge_trussness(w, e).unwrap_or(2);
        shortfall += top - t as i128;
    }
    Rational::from_integer(1) + *gamma * Rational::from_integer(shortfall)
}

/// Attribute truss distance of every edge of `g`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeWeighting {
    pub weights: Vec<Rational>,
}

impl EdgeWeighting {
    pub fn new(g: &Graph, idx: &AtIndex, attrs: &[AttrId], gamma: &Rational) -> Self {
        let weights = (0..g.num_edges() as EdgeId)
            .map(|e| attribute_truss_distance(idx, e, attrs, gamma))
            .collect();
        EdgeWeighting { weights }
    }

    pub fn get(&self, e: EdgeId) -> &Rational {
        &self.weights[e as usize]
    }
}

/// Shortest-path tree from one source. Paths are compared by
/// `(weight, hops)`, equal paths resolved towards the smaller predecessor id.
struct PathTree {
    dist: Vec<Option<(Rational, u32)>>,
    pred: Vec<Option<(VertexId, EdgeId)>>,
}

fn dijkstra(g: &Graph, w: &EdgeWeighting, src: VertexId) -> PathTree {
    let n = g.num_vertices();
    let mut dist: Vec<Option<(Rational, u32)>> = vec![None; n];
    let mut pred = vec![None; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src as usize] = Some((Rational::zero(), 0));
    heap.push(Reverse((Rational::zero(), 0u32, src)));
    while let Some(Reverse((d, h, v))) = heap.pop() {
        if done[v as usize] {
            continue;
        }
        done[v as usize] = true;
        for (u, e) in g.incident(v) {
            if done[u as usize] {
                continue;
            }
            let cand = (d + w.get(e), h + 1);
            let better = match &dist[u as usize] {
                None => true,
                Some(cur) => {
                    cand < *cur || (cand == *cur && pred[u as usize].is_some_and(|(p, _)| v < p))
                }
            };
            if better {
                dist[u as usize] = Some(cand);
                pred[u as usize] = Some((v, e));
                heap.push(Reverse((cand.0, cand.1, u)));
            }
        }
    }
    PathTree { dist, pred }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteinerSeed {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub weight: Rational,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Steiner tree over `terminals` with edge weights `w`, within a factor 2 of
/// optimal: MST of the terminals' metric closure, expanded into graph paths,
/// re-spanned, with non-terminal leaves pruned.
pub fn steiner_tree(g: &Graph, w: &EdgeWeighting, terminals: &[VertexId]) -> Result<SteinerSeed> {
    let mut terminals = terminals.to_vec();
    terminals.sort_unstable();
    terminals.dedup();
    if terminals.is_empty() {
        return Err(Error::InvalidQuery("no query nodes".into()));
    }
    if terminals.len() == 1 {
        return Ok(SteinerSeed {
            vertices: terminals,
            edges: Vec::new(),
            weight: Rational::zero(),
        });
    }
    let trees: Vec<PathTree> = terminals.iter().map(|&t| dijkstra(g, w, t)).collect();
    let mut closure = Vec::new();
    for (i, tree) in trees.iter().enumerate() {
        for (j, &t) in terminals.iter().enumerate().skip(i + 1) {
            let Some(d) = tree.dist[t as usize] else {
                return Err(Error::NoCommunity(Infeasible::QueryNodesDisconnected));
            };
            closure.push((d, i, j));
        }
    }
    closure.sort();
    let mut uf = UnionFind::new(terminals.len());
    let mut path_edges = Vec::new();
    for (_, i, j) in closure {
        if !uf.union(i, j) {
            continue;
        }
        let mut v = terminals[j];
        while v != terminals[i] {
            let (p, e) = trees[i].pred[v as usize].expect("reachable");
            path_edges.push(e);
            v = p;
        }
    }
    path_edges.sort_unstable();
    path_edges.dedup();

    // re-span the union of paths
    path_edges.sort_by(|&a, &b| w.get(a).cmp(w.get(b)).then(a.cmp(&b)));
    let mut uf = UnionFind::new(g.num_vertices());
    let mut tree: Vec<EdgeId> = path_edges
        .into_iter()
        .filter(|&e| {
            let (u, v) = g.edge(e);
            uf.union(u as usize, v as usize)
        })
        .collect();

    // prune non-terminal leaves
    loop {
        let mut degree = std::collections::HashMap::<VertexId, usize>::new();
        for &e in &tree {
            let (u, v) = g.edge(e);
            *degree.entry(u).or_default() += 1;
            *degree.entry(v).or_default() += 1;
        }
        let before = tree.len();
        tree.retain(|&e| {
            let (u, v) = g.edge(e);
            let leaf = |x: VertexId| degree[&x] == 1 && terminals.binary_search(&x).is_err();
            !(leaf(u) || leaf(v))
        });
        if tree.len() == before {
            break;
        }
    }
    tree.sort_unstable();
    let mut vertices: Vec<VertexId> = tree
        .iter()
        .flat_map(|&e| {
            let (u, v) = g.edge(e);
            [u, v]
        })
        .chain(terminals.iter().copied())
        .collect();
    vertices.sort_unstable();
    vertices.dedup();
    let weight = tree.iter().map(|&e| *w.get(e)).sum();
    Ok(SteinerSeed {
        vertices,
        edges: tree,
        weight,
    })
}

/// Attributed Steiner tree connecting the query nodes.
pub fn steiner_seed(g: &Graph, idx: &AtIndex, q: &QuerySpec) -> Result<SteinerSeed> {
    let w = EdgeWeighting::new(g, idx, &q.attrs, &q.gamma);
    steiner_tree(g, &w, &q.nodes)
}

/// Grows the seed breadth-first into at most `q.eta` vertices. Within a BFS
/// layer, vertices are inserted one at a time, best first by: carries majority
/// attributes of the current candidate, number of query attributes covered,
/// structural trussness, smaller id. Returns the induced subgraph.
pub fn expand_candidate<'g>(
    g: &'g Graph,
    idx: &AtIndex,
    seed: &SteinerSeed,
    q: &QuerySpec,
) -> Subgraph<'g> {
    let attrs = &q.attrs;
    let mut member = vec![false; g.num_vertices()];
    let mut size = 0;
    for &v in &seed.vertices {
        member[v as usize] = true;
        size += 1;
    }
    let mut b = ScoreBreakdown::from_vertices(g, seed.vertices.iter().copied(), attrs);
    let mut layer = seed.vertices.clone();
    while size < q.eta {
        let mut frontier: Vec<VertexId> = layer
            .iter()
            .flat_map(|&v| g.neighbors(v).iter().copied())
            .filter(|&u| !member[u as usize])
            .collect();
        frontier.sort_unstable();
        frontier.dedup();
        if frontier.is_empty() {
            break;
        }
        let cover: Vec<Vec<usize>> = frontier
            .iter()
            .map(|&v| covered(g, v, attrs).collect())
            .collect();
        let mut pending: Vec<usize> = (0..frontier.len()).collect();
        let mut added = Vec::new();
        while size < q.eta && !pending.is_empty() {
            let (slot, _) = pending
                .iter()
                .enumerate()
                .map(|(slot, &i)| {
                    let v = frontier[i];
                    let major = !cover[i].is_empty() && majority_with(&b, cover[i].iter().copied());
                    let key = (major, cover[i].len(), idx.vertex_trussness(v), Reverse(v));
                    (slot, key)
                })
                .max_by(|a, b| a.1.cmp(&b.1))
                .expect("pending is non-empty");
            let i = pending.swap_remove(slot);
            let v = frontier[i];
            if cfg!(debug_assertions)
                && !cover[i].is_empty()
                && majority_with(&b, cover[i].iter().copied())
            {
                let before = b.score();
                let mut after = b.clone();
                after.add(g, v, attrs);
                debug_assert!(
                    after.score() > before,
                    "majority insertion must raise the score"
                );
            }
            b.add(g, v, attrs);
            member[v as usize] = true;
            size += 1;
            added.push(v);
        }
        layer = added;
    }
    let mask_vertices: Vec<VertexId> = (0..g.num_vertices() as VertexId)
        .filter(|&v| member[v as usize])
        .collect();
    Subgraph::induced(g, &mask_vertices).expect("ids in range")
}

/// `k` = largest trussness of a connected truss holding every query node;
/// `d` = query distance of `h`.
pub fn auto_params(h: &Subgraph<'_>, nodes: &[VertexId]) -> Result<(u32, u32)> {
    let (k, _) = max_trussness_connecting(h, nodes)?;
    let d = query_distance(h, nodes).max;
    if d == crate::graph::INF {
        return Err(Error::NoCommunity(Infeasible::QueryNodesDisconnected));
    }
    Ok((k, d))
}

/// `W_q := ⋃_{v ∈ V_q} attr(v)`.
pub fn autocomplete_attrs(g: &Graph, nodes: &[VertexId]) -> Vec<AttrId> {
    let all: Vec<AttrId> = nodes
        .iter()
        .flat_map(|&v| g.attrs(v).iter().copied())
        .collect();
    normalize_attrs(&all)
}

fn lift(result: SearchResult, local: &Graph, map: &[VertexId], g: &Graph) -> SearchResult {
    let vertices = result.vertices.iter().map(|&v| map[v as usize]).collect();
    let mut edges: Vec<EdgeId> = result
        .edges
        .iter()
        .map(|&e| {
            let (u, v) = local.edge(e);
            g.edge_id(map[u as usize], map[v as usize])
                .expect("edge of parent")
        })
        .collect();
    edges.sort_unstable();
    SearchResult {
        vertices,
        edges,
        ..result
    }
}

fn local_query(q: &QuerySpec, map: &[VertexId], k: u32, d: u32) -> QuerySpec {
    let nodes: Vec<VertexId> = q
        .nodes
        .iter()
        .map(|v| map.binary_search(v).expect("query node kept") as VertexId)
        .collect();
    let mut lq = q.clone();
    lq.nodes = nodes;
    lq.k = k;
    lq.d = d;
    lq
}

/// Local search over the AT-index. Fills `W_q` from the query nodes when it is
/// empty; derives `k` and `d` from the candidate graph when `q.auto_kd`.
pub fn locatc_search(g: &Graph, idx: &AtIndex, q: &QuerySpec) -> Result<SearchResult> {
    q.validate(g)?;
    let start = Instant::now();
    let mut q = q.clone();
    if q.attrs.is_empty() {
        q.attrs = autocomplete_attrs(g, &q.nodes);
    }
    let seed = steiner_seed(g, idx, &q)?;
    let candidate = expand_candidate(g, idx, &seed, &q);

    let mut result = if q.auto_kd {
        let (k_max, truss) = max_trussness_connecting(&candidate, &q.nodes)?;
        let mut attempt = None;
        let mut k = k_max;
        for retry in 0..2 {
            if retry == 1 {
                if k_max < 4 {
                    break;
                }
                k = k_max - 1;
            }
            let restricted = if retry == 0 {
                truss.clone()
            } else {
                k_truss_component(&candidate, &q.nodes, k)
            };
            let (local, map) = restricted.to_graph();
            let lq_nodes = local_query(&q, &map, k, 0).nodes;
            let (_, d) = auto_params(&Subgraph::full(&local), &lq_nodes)?;
            let lq = local_query(&q, &map, k, d);
            match bulk_search(&local, &lq) {
                Ok((res, _)) => {
                    attempt = Some(lift(res, &local, &map, g));
                    break;
                }
                Err(Error::NoCommunity(_)) => continue,
                Err(e) => return Err(e),
            }
        }
        attempt.ok_or(Error::NoCommunity(Infeasible::QueryNodePruned))?
    } else {
        let (local, map) = candidate.to_graph();
        let lq = local_query(&q, &map, q.k, q.d);
        let (res, _) = bulk_search(&local, &lq)?;
        lift(res, &local, &map, g)
    };
    result.algo = Algorithm::Local;
    result.elapsed = start.elapsed();
    Ok(result)
}

/// Connected `k`-truss of `h` containing the first query node.
fn k_truss_component<'g>(h: &Subgraph<'g>, nodes: &[VertexId], k: u32) -> Subgraph<'g> {
    let truss = crate::truss::truss_decompose(h);
    let edges: Vec<EdgeId> = h.edges().filter(|&e| truss.edge[e as usize] >= k).collect();
    let layer = Subgraph::from_parts(h.graph(), &h.vertex_list(), &edges);
    let component = layer.component_of(nodes[0]);
    Subgraph::from_parts(h.graph(), &component, &edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BadReason {
    /// No (k,d)-truss contains every query node.
    Infeasible(Infeasible),
    /// The (k,d)-truss exists but no member carries a query attribute.
    ZeroScore,
}

impl std::fmt::Display for BadReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BadReason::Infeasible(Infeasible::QueryNodesDisconnected) => {
                f.write_str("disconnected")
            }
            BadReason::Infeasible(Infeasible::QueryNodePruned) => f.write_str("no_truss"),
            BadReason::ZeroScore => f.write_str("zero_score"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QueryClass {
    Good,
    Bad {
        reason: BadReason,
        suggestions: Vec<QuerySpec>,
    },
}

/// Detects queries with no (k,d)-truss or no attribute support, and splits
/// their query nodes into smaller queries that each have a community.
pub fn classify_query(g: &Graph, q: &QuerySpec) -> Result<QueryClass> {
    q.validate(g)?;
    let attrs = if q.attrs.is_empty() {
        autocomplete_attrs(g, &q.nodes)
    } else {
        q.attrs.clone()
    };
    let reason = match maximal_kd_truss(g, &q.nodes, q.k, q.d) {
        Err(why) => Some(BadReason::Infeasible(why)),
        Ok(t) => {
            let b = ScoreBreakdown::from_vertices(g, t.subgraph().vertices(), &attrs);
            if b.counts.iter().all(|&c| c == 0) {
                Some(BadReason::ZeroScore)
            } else {
                None
            }
        }
    };
    let Some(reason) = reason else {
        return Ok(QueryClass::Good);
    };

    let mut remaining = q.nodes.clone();
    let mut suggestions = Vec::new();
    for _ in 0..q.nodes.len() {
        let Some(&first) = remaining.first() else {
            break;
        };
        match maximal_kd_truss(g, &[first], q.k, q.d) {
            Ok(t) => {
                let h = t.subgraph();
                let nodes: Vec<VertexId> = remaining
                    .iter()
                    .copied()
                    .filter(|&v| h.contains(v))
                    .collect();
                let b = ScoreBreakdown::from_vertices(g, h.vertices(), &attrs);
                let present: Vec<AttrId> = attrs
                    .iter()
                    .zip(&b.counts)
                    .filter(|(_, &c)| c > 0)
                    .map(|(&w, _)| w)
                    .collect();
                let mut s = QuerySpec::new(&nodes, &present);
                s.k = q.k;
                s.d = q.d;
                s.epsilon = q.epsilon;
                s.gamma = q.gamma;
                s.eta = q.eta;
                s.auto_kd = q.auto_kd;
                suggestions.push(s);
                remaining.retain(|v| !nodes.contains(v));
            }
            Err(_) => {
                remaining.remove(0);
            }
        }
    }
    Ok(QueryClass::Bad {
        reason,
        suggestions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_index;

    fn two_cliques() -> Graph {
        // K5 {0..5} and K5 {5..10} joined by the path 4-10-5
        let mut edges = Vec::new();
        for block in [[0u32, 1, 2, 3, 4], [5, 6, 7, 8, 9]] {
            for i in 0..5 {
                for j in i + 1..5 {
                    edges.push((block[i], block[j]));
                }
            }
        }
        edges.extend([(4, 10), (10, 5)]);
        let labels = (0..5).map(|v| (v, "a")).chain((5..10).map(|v| (v, "b")));
        Graph::from_edges(11, &edges).with_attributes(labels)
    }

    #[test]
    fn zero_gamma_is_hop_metric() {
        let g = two_cliques();
        let idx = build_index(&g);
        for e in 0..g.num_edges() as EdgeId {
            assert_eq!(
                attribute_truss_distance(&idx, e, &[0, 1], &Rational::zero()),
                Rational::from_integer(1)
            );
        }
    }

    #[test]
    fn max_trussness_edge_in_every_projection_has_unit_weight() {
        let g = two_cliques();
        let idx = build_index(&g);
        let a = g.attr_id("a").unwrap();
        let e = g.edge_id(0, 1).unwrap();
        assert_eq!(
            attribute_truss_distance(&idx, e, &[a], &Rational::new(1, 5)),
            Rational::from_integer(1)
        );
        // bridge edge: shortfall 5-2 in G and 5-2 for the missing projection
        let bridge = g.edge_id(4, 10).unwrap();
        assert_eq!(
            attribute_truss_distance(&idx, bridge, &[a], &Rational::new(1, 5)),
            Rational::new(11, 5)
        );
    }

    #[test]
    fn single_terminal_seed() {
        let g = two_cliques();
        let idx = build_index(&g);
        let seed = steiner_seed(&g, &idx, &QuerySpec::new(&[3], &[])).unwrap();
        assert_eq!(seed.vertices, vec![3]);
        assert!(seed.weight.is_zero());
    }

    #[test]
    fn two_terminal_seed_is_shortest_path() {
        let g = two_cliques();
        let idx = build_index(&g);
        let seed = steiner_seed(&g, &idx, &QuerySpec::new(&[0, 9], &[])).unwrap();
        assert_eq!(seed.vertices, vec![0, 4, 5, 9, 10]);
        assert_eq!(seed.edges.len(), 4);
    }

    #[test]
    fn disconnected_terminals() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        let idx = build_index(&g);
        assert!(matches!(
            steiner_seed(&g, &idx, &QuerySpec::new(&[0, 3], &[])),
            Err(Error::NoCommunity(Infeasible::QueryNodesDisconnected))
        ));
    }

    #[test]
    fn expansion_limits() {
        let g = two_cliques();
        let idx = build_index(&g);
        let mut q = QuerySpec::new(&[0], &[0]);
        let seed = steiner_seed(&g, &idx, &q).unwrap();
        q.eta = 100;
        assert_eq!(expand_candidate(&g, &idx, &seed, &q).num_vertices(), 11);
        q.eta = 1;
        assert_eq!(expand_candidate(&g, &idx, &seed, &q).vertex_list(), vec![0]);
        q.eta = 5;
        assert_eq!(
            expand_candidate(&g, &idx, &seed, &q).vertex_list(),
            vec![0, 1, 2, 3, 4]
        );
    }

    #[test]
    fn auto_params_on_clique() {
        let g = two_cliques();
        let h = Subgraph::induced(&g, &[0, 1, 2, 3, 4]).unwrap();
        assert_eq!(auto_params(&h, &[0]).unwrap(), (5, 1));
        let tri = Graph::from_edges(3, &[(0, 1), (1, 2), (0, 2)]);
        assert_eq!(auto_params(&Subgraph::full(&tri), &[0]).unwrap(), (3, 1));
    }

    #[test]
    fn autocomplete_union() {
        let g = two_cliques();
        let mut w = autocomplete_attrs(&g, &[0, 9]);
        w.sort_unstable();
        assert_eq!(w, vec![0, 1]);
        assert_eq!(autocomplete_attrs(&g, &[10]), Vec::<AttrId>::new());
    }

    #[test]
    fn local_search_auto() {
        let g = two_cliques();
        let idx = build_index(&g);
        let mut q = QuerySpec::new(&[1], &[]);
        q.auto_kd = true;
        let res = locatc_search(&g, &idx, &q).unwrap();
        assert_eq!(res.vertices, vec![0, 1, 2, 3, 4]);
        assert_eq!((res.k, res.d), (5, 1));
        assert_eq!(res.algo, Algorithm::Local);
    }

    #[test]
    fn bad_queries() {
        let g = two_cliques();
        let q = QuerySpec::new(&[0, 9], &[]).with_kd(4, 4);
        match classify_query(&g, &q).unwrap() {
            QueryClass::Bad {
                reason,
                suggestions,
            } => {
                assert!(matches!(reason, BadReason::Infeasible(_)));
                let nodes: Vec<_> = suggestions.iter().map(|s| s.nodes.clone()).collect();
                assert_eq!(nodes, vec![vec![0], vec![9]]);
                assert_eq!(suggestions[0].attrs, vec![g.attr_id("a").unwrap()]);
            }
            QueryClass::Good => panic!("expected bad query"),
        }
        let b = g.attr_id("b").unwrap();
        let zero = QuerySpec::new(&[0], &[b]).with_kd(4, 1);
        assert!(matches!(
            classify_query(&g, &zero).unwrap(),
            QueryClass::Bad {
                reason: BadReason::ZeroScore,
                ..
            }
        ));
        let good = QuerySpec::new(&[0, 1], &[]).with_kd(4, 1);
        assert_eq!(classify_query(&g, &good).unwrap(), QueryClass::Good);
    }
}
