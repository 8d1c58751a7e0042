//! Edge supports, truss decomposition and (k,d)-truss maintenance.

use std::collections::BTreeSet;

use crate::error::{Error, Infeasible, Result};
use crate::graph::{query_distance, EdgeId, Graph, Subgraph, VertexId, INF};

/// Triangle count per edge, indexed by parent-graph edge id. Entries for edges
/// outside the subgraph are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportMap {
    pub support: Vec<u32>,
}

impl SupportMap {
    pub fn get(&self, e: EdgeId) -> u32 {
        self.support[e as usize]
    }
}

/// Calls `f(w, e_uw, e_vw)` for every live common neighbour `w` of the live
/// edge `(u, v)`.
pub(crate) fn for_each_triangle(
    h: &Subgraph<'_>,
    u: VertexId,
    v: VertexId,
    mut f: impl FnMut(VertexId, EdgeId, EdgeId),
) {
    let g = h.graph();
    let (a, b) = if h.degree(u) <= h.degree(v) {
        (u, v)
    } else {
        (v, u)
    };
    for (w, e_aw) in h.neighbors(a) {
        if w == b {
            continue;
        }
        if let Some(e_bw) = g.edge_id(b, w) {
            if h.has_edge(e_bw) {
                if a == u {
                    f(w, e_aw, e_bw)
                } else {
                    f(w, e_bw, e_aw)
                }
            }
        }
    }
}

pub fn compute_supports(h: &Subgraph<'_>) -> SupportMap {
    let g = h.graph();
    let mut support = vec![0u32; g.num_edges()];
    for e in h.edges() {
        let (u, v) = g.edge(e);
        let mut count = 0;
        for_each_triangle(h, u, v, |_, _, _| count += 1);
        support[e as usize] = count;
    }
    SupportMap { support }
}

/// Edge and vertex trussness, indexed by parent-graph ids. Edges outside the
/// decomposed subgraph have trussness 0, as do vertices without live edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrussnessMap {
    pub edge: Vec<u32>,
    pub vertex: Vec<u32>,
}

impl TrussnessMap {
    /// `τ̄(∅)`: the largest edge trussness.
    pub fn max(&self) -> u32 {
        self.edge.iter().copied().max().unwrap_or(0)
    }
}

/// Min-support bucket queue; equal supports pop in ascending edge id.
struct BucketQueue {
    buckets: Vec<BTreeSet<EdgeId>>,
    cursor: usize,
}

impl BucketQueue {
    fn new(max_key: usize) -> Self {
        BucketQueue {
            buckets: vec![BTreeSet::new(); max_key + 1],
            cursor: 0,
        }
    }

    fn insert(&mut self, key: u32, e: EdgeId) {
        self.buckets[key as usize].insert(e);
        self.cursor = self.cursor.min(key as usize);
    }

    fn remove(&mut self, key: u32, e: EdgeId) {
        self.buckets[key as usize].remove(&e);
    }

    fn pop_min(&mut self) -> Option<(u32, EdgeId)> {
        while self.cursor < self.buckets.len() {
            if let Some(e) = self.buckets[self.cursor].pop_first() {
                return Some((self.cursor as u32, e));
            }
            self.cursor += 1;
        }
        None
    }
}

/// Truss decomposition by repeated removal of a minimum-support edge.
pub fn truss_decompose(h: &Subgraph<'_>) -> TrussnessMap {
    let g = h.graph();
    let mut work = h.clone();
    let mut sup = compute_supports(h).support;
    let max_sup = sup.iter().copied().max().unwrap_or(0) as usize;
    let mut queue = BucketQueue::new(max_sup);
    for e in h.edges() {
        queue.insert(sup[e as usize], e);
    }
    let mut edge = vec![0u32; g.num_edges()];
    let mut level = 0u32;
    let mut touched = Vec::new();
    while let Some((s, e)) = queue.pop_min() {
        level = level.max(s);
        edge[e as usize] = level + 2;
        let (u, v) = g.edge(e);
        touched.clear();
        for_each_triangle(&work, u, v, |_, e1, e2| {
            touched.push(e1);
            touched.push(e2);
        });
        for &f in &touched {
            let sf = sup[f as usize];
            if sf > level {
                queue.remove(sf, f);
                sup[f as usize] = sf - 1;
                queue.insert(sf - 1, f);
            }
        }
        work.remove_edge(e);
    }
    let mut vertex = vec![0u32; g.num_vertices()];
    for e in h.edges() {
        let (u, v) = g.edge(e);
        let t = edge[e as usize];
        vertex[u as usize] = vertex[u as usize].max(t);
        vertex[v as usize] = vertex[v as usize].max(t);
    }
    TrussnessMap { edge, vertex }
}

/// Vertices and edges removed since the journal was last taken.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Journal {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

/// A subgraph kept as a (k,d)-truss around a fixed query set while vertices are
/// deleted from it. Supports are updated incrementally on every edge removal.
#[derive(Debug, Clone)]
pub struct KdTruss<'g> {
    sub: Subgraph<'g>,
    support: Vec<u32>,
    query: Vec<VertexId>,
    k: u32,
    d: u32,
    journal: Journal,
    valid: bool,
}

impl<'g> KdTruss<'g> {
    /// Wraps `sub` without pruning; call [`KdTruss::maintain`] to reach the
    /// fixpoint.
    pub fn new(sub: Subgraph<'g>, query: &[VertexId], k: u32, d: u32) -> Self {
        let support = compute_supports(&sub).support;
        let mut query = query.to_vec();
        query.sort_unstable();
        query.dedup();
        KdTruss {
            sub,
            support,
            query,
            k,
            d,
            journal: Journal::default(),
            valid: false,
        }
    }

    pub fn subgraph(&self) -> &Subgraph<'g> {
        &self.sub
    }

    pub fn into_subgraph(self) -> Subgraph<'g> {
        self.sub
    }

    pub fn query(&self) -> &[VertexId] {
        &self.query
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn support(&self, e: EdgeId) -> u32 {
        self.support[e as usize]
    }

    pub fn take_journal(&mut self) -> Journal {
        std::mem::take(&mut self.journal)
    }

    fn threshold(&self) -> u32 {
        self.k.saturating_sub(2)
    }

    fn drop_edge(&mut self, e: EdgeId, below: &mut Vec<EdgeId>) {
        if !self.sub.has_edge(e) {
            return;
        }
        let (u, v) = self.sub.graph().edge(e);
        let threshold = self.threshold();
        let mut touched = Vec::new();
        for_each_triangle(&self.sub, u, v, |_, e1, e2| {
            touched.push(e1);
            touched.push(e2);
        });
        for f in touched {
            let s = &mut self.support[f as usize];
            *s -= 1;
            if *s + 1 == threshold {
                below.push(f);
            }
        }
        self.sub.remove_edge(e);
        self.support[e as usize] = 0;
        self.journal.edges.push(e);
    }

    fn drop_vertex(&mut self, v: VertexId, below: &mut Vec<EdgeId>) {
        if !self.sub.contains(v) {
            return;
        }
        let incident: Vec<EdgeId> = self.sub.neighbors(v).map(|(_, e)| e).collect();
        for e in incident {
            self.drop_edge(e, below);
        }
        let mut none = Vec::new();
        self.sub.remove_vertex(v, &mut none);
        self.journal.vertices.push(v);
    }

    /// Deletes vertices (and incident edges) without restoring the invariants.
    pub fn delete_vertices(&mut self, vertices: &[VertexId]) {
        let mut below = Vec::new();
        for &v in vertices {
            self.drop_vertex(v, &mut below);
        }
        self.valid = false;
    }

    /// Prunes to the maximal (k,d)-truss around the query nodes: edges with
    /// support below `k-2`, vertices left without edges, vertices outside the
    /// query component and vertices farther than `d` from some query node are
    /// removed until nothing changes.
    pub fn maintain(&mut self) -> std::result::Result<(), Infeasible> {
        self.valid = false;
        if self.query.is_empty() {
            return Err(Infeasible::QueryNodePruned);
        }
        let threshold = self.threshold();
        let mut below: Vec<EdgeId> = self
            .sub
            .edges()
            .filter(|&e| self.support[e as usize] < threshold)
            .collect();
        loop {
            while let Some(e) = below.pop() {
                self.drop_edge(e, &mut below);
            }
            let isolated: Vec<VertexId> = self
                .sub
                .vertices()
                .filter(|&v| self.sub.degree(v) == 0)
                .collect();
            for v in isolated {
                self.drop_vertex(v, &mut below);
            }
            if self.query.iter().any(|&q| !self.sub.contains(q)) {
                return Err(Infeasible::QueryNodePruned);
            }

            let component = self.sub.component_of(self.query[0]);
            let mut in_component = vec![false; self.sub.graph().num_vertices()];
            for &v in &component {
                in_component[v as usize] = true;
            }
            if self.query.iter().any(|&q| !in_component[q as usize]) {
                return Err(Infeasible::QueryNodesDisconnected);
            }
            let mut removed = false;
            if component.len() < self.sub.num_vertices() {
                let outside: Vec<VertexId> = self
                    .sub
                    .vertices()
                    .filter(|&v| !in_component[v as usize])
                    .collect();
                for v in outside {
                    self.drop_vertex(v, &mut below);
                }
                removed = true;
            }

            let dist = query_distance(&self.sub, &self.query);
            if dist.max > self.d {
                if self
                    .query
                    .iter()
                    .any(|&q| dist.per_vertex[q as usize] > self.d)
                {
                    return Err(Infeasible::QueryNodePruned);
                }
                let far: Vec<VertexId> = self
                    .sub
                    .vertices()
                    .filter(|&v| dist.per_vertex[v as usize] > self.d)
                    .collect();
                for v in far {
                    self.drop_vertex(v, &mut below);
                }
                removed = true;
            }
            if !removed && below.is_empty() {
                break;
            }
        }
        self.valid = true;
        Ok(())
    }

    /// Achieved graph query distance of the current subgraph.
    pub fn query_distance(&self) -> u32 {
        query_distance(&self.sub, &self.query).max
    }
}

/// Maximal subgraph of `h` that is a (k,d)-truss containing `query`.
pub fn maintain_kd_truss<'g>(
    h: Subgraph<'g>,
    query: &[VertexId],
    k: u32,
    d: u32,
) -> std::result::Result<KdTruss<'g>, Infeasible> {
    if query.iter().any(|&q| !h.contains(q)) {
        return Err(Infeasible::QueryNodePruned);
    }
    let mut t = KdTruss::new(h, query, k, d);
    t.maintain()?;
    Ok(t)
}

/// `S_0 = {u : dist_G(u, V_q) ≤ d}`, the vertices within `d` hops of every
/// query node.
pub fn query_ball(g: &Graph, query: &[VertexId], d: u32) -> Vec<VertexId> {
    let full = Subgraph::full(g);
    let qd = query_distance(&full, query);
    (0..g.num_vertices() as VertexId)
        .filter(|&v| qd.per_vertex[v as usize] <= d)
        .collect()
}

/// The maximal (k,d)-truss of `g` containing `query`.
pub fn maximal_kd_truss<'g>(
    g: &'g Graph,
    query: &[VertexId],
    k: u32,
    d: u32,
) -> std::result::Result<KdTruss<'g>, Infeasible> {
    let ball = query_ball(g, query, d);
    let mut mask = vec![false; g.num_vertices()];
    for &v in &ball {
        mask[v as usize] = true;
    }
    if query.iter().any(|&q| !mask[q as usize]) {
        // some query node is farther than d from another, or unreachable
        let full = Subgraph::full(g);
        let comp = full.component_of(query[0]);
        return Err(if query.iter().all(|q| comp.contains(q)) {
            Infeasible::QueryNodePruned
        } else {
            Infeasible::QueryNodesDisconnected
        });
    }
    maintain_kd_truss(Subgraph::from_mask(g, mask), query, k, d)
}

/// Largest `k` such that one connected k-truss of `h` contains every query
/// node, together with that k-truss.
pub fn max_trussness_connecting<'g>(
    h: &Subgraph<'g>,
    query: &[VertexId],
) -> Result<(u32, Subgraph<'g>)> {
    let g = h.graph();
    if query.is_empty() || query.iter().any(|&q| !h.contains(q)) {
        return Err(Error::InvalidQuery("query node not in graph".into()));
    }
    let truss = truss_decompose(h);
    let mut order: Vec<EdgeId> = h.edges().collect();
    order.sort_by_key(|&e| (std::cmp::Reverse(truss.edge[e as usize]), e));

    let mut parent: Vec<VertexId> = (0..g.num_vertices() as VertexId).collect();
    fn find(parent: &mut [VertexId], mut x: VertexId) -> VertexId {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut touched = vec![false; g.num_vertices()];
    let mut i = 0;
    while i < order.len() {
        let level = truss.edge[order[i] as usize];
        while i < order.len() && truss.edge[order[i] as usize] == level {
            let (u, v) = g.edge(order[i]);
            touched[u as usize] = true;
            touched[v as usize] = true;
            let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
            if ru != rv {
                parent[ru.max(rv) as usize] = ru.min(rv);
            }
            i += 1;
        }
        let root = find(&mut parent, query[0]);
        let joined = query
            .iter()
            .all(|&q| touched[q as usize] && find(&mut parent, q) == root);
        if joined {
            let edges: Vec<EdgeId> = order[..i].to_vec();
            let layer = Subgraph::from_parts(g, &h.vertex_list(), &edges);
            let component = layer.component_of(query[0]);
            let kept: Vec<EdgeId> = edges
                .into_iter()
                .filter(|&e| {
                    let (u, _) = g.edge(e);
                    component.binary_search(&u).is_ok()
                })
                .collect();
            return Ok((level, Subgraph::from_parts(g, &component, &kept)));
        }
    }
    let comp = h.component_of(query[0]);
    let reason = if query.iter().all(|q| comp.contains(q)) {
        Infeasible::QueryNodePruned
    } else {
        Infeasible::QueryNodesDisconnected
    };
    Err(Error::NoCommunity(reason))
}

/// Exact hop diameter; `INF` when disconnected, 0 for an empty subgraph.
pub fn diameter(h: &Subgraph<'_>) -> u32 {
    let mut best = 0;
    let mut dist = Vec::new();
    let n = h.num_vertices();
    for v in h.vertices() {
        h.bfs(v, &mut dist);
        let mut reached = 0;
        for (u, &d) in dist.iter().enumerate() {
            if d != INF && h.contains(u as VertexId) {
                reached += 1;
                best = best.max(d);
            }
        }
        if reached < n {
            return INF;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn clique(n: u32) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n as usize, &edges)
    }

    #[test]
    fn triangle_supports() {
        let g = clique(3);
        let s = compute_supports(&Subgraph::full(&g));
        assert!(s.support.iter().all(|&x| x == 1));
    }

    #[test]
    fn clique_trussness() {
        for n in 3..7 {
            let g = clique(n);
            let t = truss_decompose(&Subgraph::full(&g));
            assert!(t.edge.iter().all(|&x| x == n), "K{n}");
            assert_eq!(t.max(), n);
        }
    }

    #[test]
    fn tree_edges_have_trussness_two() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]);
        let t = truss_decompose(&Subgraph::full(&g));
        assert_eq!(t.edge, vec![2, 2, 2]);
        assert_eq!(t.vertex, vec![2, 2, 2, 2]);
    }

    #[test]
    fn fixpoint_is_unchanged() {
        let g = clique(5);
        let t = maintain_kd_truss(Subgraph::full(&g), &[0], 4, 1).unwrap();
        assert_eq!(t.subgraph().num_edges(), 10);
        assert_eq!(t.subgraph().num_vertices(), 5);
    }

    #[test]
    fn tree_is_infeasible_for_k3() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (1, 3)]);
        assert_eq!(
            maintain_kd_truss(Subgraph::full(&g), &[1], 3, 3).unwrap_err(),
            Infeasible::QueryNodePruned
        );
    }

    #[test]
    fn disconnected_and_pruned_are_distinct() {
        // two triangles joined by a bridge 2-3
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (3, 5)]);
        let err = maintain_kd_truss(Subgraph::full(&g), &[0, 5], 3, 5).unwrap_err();
        assert_eq!(err, Infeasible::QueryNodesDisconnected);
        let ok = maintain_kd_truss(Subgraph::full(&g), &[0], 3, 5).unwrap();
        assert_eq!(ok.subgraph().vertex_list(), vec![0, 1, 2]);
        let far = maximal_kd_truss(&g, &[0, 5], 2, 2).unwrap_err();
        assert_eq!(far, Infeasible::QueryNodePruned);
    }

    #[test]
    fn k2_with_large_d_is_component() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 3), (4, 5)]);
        let t = maximal_kd_truss(&g, &[1], 2, 10).unwrap();
        assert_eq!(t.subgraph().vertex_list(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn max_trussness_in_clique_component() {
        // K5 on 0..5 attached to a path 4-5-6
        let mut edges: Vec<(u32, u32)> = Vec::new();
        for u in 0..5 {
            for v in u + 1..5 {
                edges.push((u, v));
            }
        }
        edges.extend([(4, 5), (5, 6)]);
        let g = Graph::from_edges(7, &edges);
        let (k, sub) = max_trussness_connecting(&Subgraph::full(&g), &[0, 3]).unwrap();
        assert_eq!(k, 5);
        assert_eq!(sub.vertex_list(), vec![0, 1, 2, 3, 4]);
        let (k, sub) = max_trussness_connecting(&Subgraph::full(&g), &[0, 6]).unwrap();
        assert_eq!(k, 2);
        assert_eq!(sub.num_vertices(), 7);
    }

    #[test]
    fn max_trussness_disconnected() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert!(matches!(
            max_trussness_connecting(&Subgraph::full(&g), &[0, 3]),
            Err(Error::NoCommunity(Infeasible::QueryNodesDisconnected))
        ));
    }

    #[test]
    fn diameters() {
        let path = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(diameter(&Subgraph::full(&path)), 3);
        assert_eq!(diameter(&Subgraph::full(&clique(5))), 1);
        let split = Graph::from_edges(4, &[(0, 1), (2, 3)]);
        assert_eq!(diameter(&Subgraph::full(&split)), INF);
    }

    #[test]
    fn journal_records_deletions() {
        let g = clique(4);
        let mut t = maintain_kd_truss(Subgraph::full(&g), &[0], 4, 1).unwrap();
        t.take_journal();
        t.delete_vertices(&[3]);
        let r = t.maintain();
        assert_eq!(r, Err(Infeasible::QueryNodePruned));
        let j = t.take_journal();
        assert!(j.vertices.contains(&3));
        assert_eq!(j.edges.len(), 6);
    }
}
