//! Undirected attributed graphs, subgraph views and hop distances.
//!
//! A [`Graph`] is immutable once built. External vertex ids (as they appear in
//! input files) are remapped to dense internal ids in ascending external order;
//! attribute labels are interned to dense ids in order of first appearance.
//! Edges are stored once with `u < v` and numbered in lexicographic order, so an
//! [`EdgeId`] is stable for a given vertex numbering.
//!
//! A [`Subgraph`] is a mutable view over a parent graph that only ever loses
//! vertices and edges. All peeling code works on subgraphs.

use std::collections::{HashMap, VecDeque};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub type VertexId = u32;
pub type EdgeId = u32;
pub type AttrId = u32;

/// Distance sentinel for "unreachable"; larger than any hop count.
pub const INF: u32 = u32::MAX;

/// Bijective mapping between attribute labels and dense ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interner {
    labels: Vec<String>,
    ids: HashMap<String, AttrId>,
}

impl Interner {
    pub fn intern(&mut self, label: &str) -> AttrId {
        if let Some(&id) = self.ids.get(label) {
            return id;
        }
        let id = self.labels.len() as AttrId;
        self.labels.push(label.to_owned());
        self.ids.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<AttrId> {
        self.ids.get(label).copied()
    }

    pub fn label(&self, id: AttrId) -> &str {
        &self.labels[id as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Counts of input lines dropped while building a simple graph.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub self_loops: usize,
    pub duplicates: usize,
}

impl LoadStats {
    pub fn dropped(&self) -> usize {
        self.self_loops + self.duplicates
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    ext_ids: Vec<u64>,
    ext_to_int: HashMap<u64, VertexId>,
    offsets: Vec<usize>,
    nbrs: Vec<VertexId>,
    nbr_eids: Vec<EdgeId>,
    edges: Vec<(VertexId, VertexId)>,
    attrs: Vec<Vec<AttrId>>,
    postings: Vec<Vec<VertexId>>,
    labels: Interner,
}

impl Graph {
    /// Builds a graph on vertices `0..n` (external id = internal id).
    /// Self-loops and parallel edges are dropped.
    pub fn from_edges(n: usize, pairs: &[(VertexId, VertexId)]) -> Graph {
        let ext_ids: Vec<u64> = (0..n as u64).collect();
        let (g, _) = Self::build(ext_ids, pairs.iter().copied());
        g
    }

    /// Builds a graph from edges over arbitrary external ids. Internal ids are
    /// assigned in ascending external-id order.
    pub fn from_external_edges(pairs: &[(u64, u64)]) -> (Graph, LoadStats) {
        let mut ext_ids: Vec<u64> = pairs.iter().flat_map(|&(u, v)| [u, v]).collect();
        ext_ids.sort_unstable();
        ext_ids.dedup();
        let index: HashMap<u64, VertexId> = ext_ids
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as VertexId))
            .collect();
        let internal = pairs.iter().map(|(u, v)| (index[u], index[v]));
        Self::build(ext_ids, internal)
    }

    fn build(
        ext_ids: Vec<u64>,
        pairs: impl Iterator<Item = (VertexId, VertexId)>,
    ) -> (Graph, LoadStats) {
        let n = ext_ids.len();
        let mut stats = LoadStats::default();
        let mut edges = Vec::new();
        for (u, v) in pairs {
            if u == v {
                stats.self_loops += 1;
                continue;
            }
            edges.push((u.min(v), u.max(v)));
        }
        let before = edges.len();
        edges.sort_unstable();
        edges.dedup();
        stats.duplicates = before - edges.len();

        let mut degree = vec![0usize; n];
        for &(u, v) in &edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &degree {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut nbrs = vec![0; 2 * edges.len()];
        let mut nbr_eids = vec![0; 2 * edges.len()];
        for (eid, &(u, v)) in edges.iter().enumerate() {
            nbrs[fill[u as usize]] = v;
            nbr_eids[fill[u as usize]] = eid as EdgeId;
            fill[u as usize] += 1;
            nbrs[fill[v as usize]] = u;
            nbr_eids[fill[v as usize]] = eid as EdgeId;
            fill[v as usize] += 1;
        }
        // adjacency lists sorted by neighbour id
        for v in 0..n {
            let (lo, hi) = (offsets[v], offsets[v + 1]);
            let mut pairs: Vec<(VertexId, EdgeId)> = nbrs[lo..hi]
                .iter()
                .copied()
                .zip(nbr_eids[lo..hi].iter().copied())
                .collect();
            pairs.sort_unstable();
            for (i, (w, e)) in pairs.into_iter().enumerate() {
                nbrs[lo + i] = w;
                nbr_eids[lo + i] = e;
            }
        }
        let ext_to_int = ext_ids
            .iter()
            .enumerate()
            .map(|(i, &e)| (e, i as VertexId))
            .collect();
        let g = Graph {
            attrs: vec![Vec::new(); n],
            ext_ids,
            ext_to_int,
            offsets,
            nbrs,
            nbr_eids,
            edges,
            postings: Vec::new(),
            labels: Interner::default(),
        };
        (g, stats)
    }

    /// Attaches attribute labels. Repeated assignments are merged.
    pub fn with_attributes<S: AsRef<str>>(
        mut self,
        assignments: impl IntoIterator<Item = (VertexId, S)>,
    ) -> Graph {
        for (v, label) in assignments {
            let id = self.labels.intern(label.as_ref());
            self.attrs[v as usize].push(id);
        }
        self.finish_attributes();
        self
    }

    fn finish_attributes(&mut self) {
        self.postings = vec![Vec::new(); self.labels.len()];
        for (v, set) in self.attrs.iter_mut().enumerate() {
            set.sort_unstable();
            set.dedup();
            for &w in set.iter() {
                self.postings[w as usize].push(v as VertexId);
            }
        }
    }

    /// Graph induced by `vertices` as a standalone graph without attributes.
    /// External ids are preserved. Returns the new graph and the map from its
    /// internal ids back to ids of `self`.
    pub fn induced_structure(&self, vertices: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let mut keep: Vec<VertexId> = vertices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        let mut local = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            local.insert(v, i as VertexId);
        }
        let mut pairs = Vec::new();
        for (i, &v) in keep.iter().enumerate() {
            for &u in self.neighbors(v) {
                if v < u {
                    if let Some(&lu) = local.get(&u) {
                        pairs.push((i as VertexId, lu));
                    }
                }
            }
        }
        let ext = keep.iter().map(|&v| self.ext_ids[v as usize]).collect();
        let (g, _) = Self::build(ext, pairs.into_iter());
        (g, keep)
    }

    /// Like [`Graph::induced_structure`], also carrying attributes in the same
    /// attribute id space.
    pub fn induced_graph(&self, vertices: &[VertexId]) -> (Graph, Vec<VertexId>) {
        let (mut g, keep) = self.induced_structure(vertices);
        g.labels = self.labels.clone();
        for (i, &v) in keep.iter().enumerate() {
            g.attrs[i] = self.attrs[v as usize].clone();
        }
        g.finish_attributes();
        (g, keep)
    }

    /// Rebuilds a graph from its stored parts: external ids in internal order
    /// and internal edge pairs.
    pub(crate) fn from_stored(ext_ids: Vec<u64>, edges: &[(VertexId, VertexId)]) -> Graph {
        Self::build(ext_ids, edges.iter().copied()).0
    }

    pub fn num_vertices(&self) -> usize {
        self.ext_ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: VertexId) -> &[VertexId] {
        let v = v as usize;
        &self.nbrs[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Neighbours of `v` paired with the connecting edge id, sorted by neighbour.
    pub fn incident(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        let v = v as usize;
        let r = self.offsets[v]..self.offsets[v + 1];
        self.nbrs[r.clone()]
            .iter()
            .copied()
            .zip(self.nbr_eids[r].iter().copied())
    }

    pub fn degree(&self, v: VertexId) -> usize {
        let v = v as usize;
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn edge(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e as usize]
    }

    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    pub fn edge_id(&self, u: VertexId, v: VertexId) -> Option<EdgeId> {
        if u as usize >= self.num_vertices() || v as usize >= self.num_vertices() {
            return None;
        }
        let (a, b) = if self.degree(u) <= self.degree(v) {
            (u, v)
        } else {
            (v, u)
        };
        let lo = self.offsets[a as usize];
        self.neighbors(a)
            .binary_search(&b)
            .ok()
            .map(|i| self.nbr_eids[lo + i])
    }

    pub fn ext_id(&self, v: VertexId) -> u64 {
        self.ext_ids[v as usize]
    }

    pub fn vertex_of(&self, ext: u64) -> Option<VertexId> {
        self.ext_to_int.get(&ext).copied()
    }

    pub fn attrs(&self, v: VertexId) -> &[AttrId] {
        &self.attrs[v as usize]
    }

    pub fn has_attr(&self, v: VertexId, w: AttrId) -> bool {
        self.attrs[v as usize].binary_search(&w).is_ok()
    }

    /// `V_w`: vertices carrying attribute `w`, ascending.
    pub fn posting(&self, w: AttrId) -> &[VertexId] {
        self.postings.get(w as usize).map_or(&[], |p| p.as_slice())
    }

    pub fn num_attrs(&self) -> usize {
        self.labels.len()
    }

    pub fn attr_id(&self, label: &str) -> Option<AttrId> {
        self.labels.get(label)
    }

    pub fn attr_label(&self, w: AttrId) -> &str {
        self.labels.label(w)
    }

    pub fn interner(&self) -> &Interner {
        &self.labels
    }

    /// `|attr(V)|`, the total number of vertex-attribute assignments.
    pub fn attr_assignments(&self) -> usize {
        self.attrs.iter().map(Vec::len).sum()
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.num_vertices() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange(v))
        }
    }
}

/// Reads a whitespace-separated edge list. Lines starting with `#` and blank
/// lines are skipped.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<(Graph, LoadStats)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, path)
}

pub(crate) fn parse_edge_list(text: &str, path: &Path) -> Result<(Graph, LoadStats)> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: &str| Error::Parse {
            path: path.to_owned(),
            line: i + 1,
            msg: msg.to_owned(),
        };
        let mut tokens = line.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(bad("expected two vertex ids"));
        };
        let u = a
            .parse::<u64>()
            .map_err(|_| bad("vertex id is not a non-negative integer"))?;
        let v = b
            .parse::<u64>()
            .map_err(|_| bad("vertex id is not a non-negative integer"))?;
        pairs.push((u, v));
    }
    let (g, stats) = Graph::from_external_edges(&pairs);
    if g.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok((g, stats))
}

/// Reads a TAB-separated attribute file (`vertex<TAB>label<TAB>label…`) and
/// attaches the labels to `g`.
pub fn load_attributes(path: impl AsRef<Path>, g: Graph) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_attributes(&text, path, g)
}

pub(crate) fn parse_attributes(text: &str, path: &Path, g: Graph) -> Result<Graph> {
    let mut assignments = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse {
            path: path.to_owned(),
            line: i + 1,
            msg,
        };
        let mut tokens = line.split('\t');
        let head = tokens.next().unwrap_or_default().trim();
        let ext: u64 = head
            .parse()
            .map_err(|_| bad(format!("bad vertex id {head:?}")))?;
        let v = g.vertex_of(ext).ok_or(Error::UnknownVertex(ext))?;
        for label in tokens {
            let label = label.trim_end_matches('\r');
            if label.is_empty() {
                return Err(bad("empty attribute label".into()));
            }
            assignments.push((v, label.to_owned()));
        }
    }
    Ok(g.with_attributes(assignments))
}

/// A shrinking view over a parent graph.
#[derive(Debug, Clone)]
pub struct Subgraph<'g> {
    graph: &'g Graph,
    vertex_alive: Vec<bool>,
    edge_alive: Vec<bool>,
    degree: Vec<u32>,
    n_alive: usize,
    m_alive: usize,
}

impl<'g> Subgraph<'g> {
    pub fn full(graph: &'g Graph) -> Self {
        Subgraph {
            graph,
            vertex_alive: vec![true; graph.num_vertices()],
            edge_alive: vec![true; graph.num_edges()],
            degree: (0..graph.num_vertices() as VertexId)
                .map(|v| graph.degree(v) as u32)
                .collect(),
            n_alive: graph.num_vertices(),
            m_alive: graph.num_edges(),
        }
    }

    /// `G_S`: the subgraph induced by `vertices`.
    pub fn induced(graph: &'g Graph, vertices: &[VertexId]) -> Result<Self> {
        let mut vertex_alive = vec![false; graph.num_vertices()];
        for &v in vertices {
            graph.check_vertex(v)?;
            vertex_alive[v as usize] = true;
        }
        Ok(Self::from_mask(graph, vertex_alive))
    }

    pub(crate) fn from_mask(graph: &'g Graph, vertex_alive: Vec<bool>) -> Self {
        let mut edge_alive = vec![false; graph.num_edges()];
        let mut degree = vec![0u32; graph.num_vertices()];
        let mut m_alive = 0;
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            if vertex_alive[u as usize] && vertex_alive[v as usize] {
                edge_alive[e] = true;
                degree[u as usize] += 1;
                degree[v as usize] += 1;
                m_alive += 1;
            }
        }
        let n_alive = vertex_alive.iter().filter(|&&a| a).count();
        Subgraph {
            graph,
            vertex_alive,
            edge_alive,
            degree,
            n_alive,
            m_alive,
        }
    }

    /// A subgraph with an explicit vertex and edge set. Edges whose endpoints
    /// are not both in `vertices` are ignored.
    pub fn from_parts(graph: &'g Graph, vertices: &[VertexId], edges: &[EdgeId]) -> Self {
        let mut s = Subgraph {
            graph,
            vertex_alive: vec![false; graph.num_vertices()],
            edge_alive: vec![false; graph.num_edges()],
            degree: vec![0; graph.num_vertices()],
            n_alive: 0,
            m_alive: 0,
        };
        for &v in vertices {
            if !s.vertex_alive[v as usize] {
                s.vertex_alive[v as usize] = true;
                s.n_alive += 1;
            }
        }
        for &e in edges {
            let (u, v) = graph.edge(e);
            if s.vertex_alive[u as usize] && s.vertex_alive[v as usize] && !s.edge_alive[e as usize]
            {
                s.edge_alive[e as usize] = true;
                s.degree[u as usize] += 1;
                s.degree[v as usize] += 1;
                s.m_alive += 1;
            }
        }
        s
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertex_alive.get(v as usize).copied().unwrap_or(false)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.edge_alive[e as usize]
    }

    pub fn num_vertices(&self) -> usize {
        self.n_alive
    }

    pub fn num_edges(&self) -> usize {
        self.m_alive
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.degree[v as usize] as usize
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertex_alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(v, _)| v as VertexId)
    }

    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edge_alive
            .iter()
            .enumerate()
            .filter(|(_, &a)| a)
            .map(|(e, _)| e as EdgeId)
    }

    pub fn vertex_list(&self) -> Vec<VertexId> {
        self.vertices().collect()
    }

    pub fn edge_list(&self) -> Vec<EdgeId> {
        self.edges().collect()
    }

    /// Live neighbours of `v` with their edge ids.
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, EdgeId)> + '_ {
        self.graph
            .incident(v)
            .filter(move |&(_, e)| self.edge_alive[e as usize])
    }

    /// Removes a live edge. Returns false if it was already gone.
    pub fn remove_edge(&mut self, e: EdgeId) -> bool {
        if !self.edge_alive[e as usize] {
            return false;
        }
        let (u, v) = self.graph.edge(e);
        self.edge_alive[e as usize] = false;
        self.degree[u as usize] -= 1;
        self.degree[v as usize] -= 1;
        self.m_alive -= 1;
        true
    }

    /// Removes `v` and its incident edges, appending removed edge ids to `removed`.
    pub fn remove_vertex(&mut self, v: VertexId, removed: &mut Vec<EdgeId>) -> bool {
        if !self.contains(v) {
            return false;
        }
        for (_, e) in self.graph.incident(v) {
            if self.remove_edge(e) {
                removed.push(e);
            }
        }
        self.vertex_alive[v as usize] = false;
        self.n_alive -= 1;
        true
    }

    /// Materializes the live vertices and edges as a standalone graph that keeps
    /// external ids and attributes. Returns the graph and the map from its
    /// internal ids back to parent ids.
    pub fn to_graph(&self) -> (Graph, Vec<VertexId>) {
        let keep = self.vertex_list();
        let mut local = HashMap::with_capacity(keep.len());
        for (i, &v) in keep.iter().enumerate() {
            local.insert(v, i as VertexId);
        }
        let pairs: Vec<(VertexId, VertexId)> = self
            .edges()
            .map(|e| {
                let (u, v) = self.graph.edge(e);
                (local[&u], local[&v])
            })
            .collect();
        let ext = keep.iter().map(|&v| self.graph.ext_id(v)).collect();
        let (mut g, _) = Graph::build(ext, pairs.into_iter());
        g.labels = self.graph.labels.clone();
        for (i, &v) in keep.iter().enumerate() {
            g.attrs[i] = self.graph.attrs[v as usize].clone();
        }
        g.finish_attributes();
        (g, keep)
    }

    /// Hop distances from `src` over live edges; `INF` for unreachable or
    /// removed vertices.
    pub fn bfs(&self, src: VertexId, dist: &mut Vec<u32>) {
        dist.clear();
        dist.resize(self.graph.num_vertices(), INF);
        if !self.contains(src) {
            return;
        }
        let mut queue = VecDeque::new();
        dist[src as usize] = 0;
        queue.push_back(src);
        while let Some(v) = queue.pop_front() {
            let next = dist[v as usize] + 1;
            for (u, _) in self.neighbors(v) {
                if dist[u as usize] == INF {
                    dist[u as usize] = next;
                    queue.push_back(u);
                }
            }
        }
    }

    /// Vertices reachable from `src` over live edges.
    pub fn component_of(&self, src: VertexId) -> Vec<VertexId> {
        let mut dist = Vec::new();
        self.bfs(src, &mut dist);
        dist.iter()
            .enumerate()
            .filter(|(_, &d)| d != INF)
            .map(|(v, _)| v as VertexId)
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices().next() {
            None => true,
            Some(v) => self.component_of(v).len() == self.n_alive,
        }
    }
}

/// Per-vertex query distances `dist(v, V_q)` and the graph query distance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryDistance {
    /// Indexed by vertex of the parent graph; `INF` outside the subgraph or when
    /// some query node is unreachable.
    pub per_vertex: Vec<u32>,
    /// `max_{v ∈ V(h)} dist(v, V_q)`, `INF` if any member is unreachable.
    pub max: u32,
}

/// `dist(v, V_q) = max_{q ∈ V_q} dist_h(v, q)` for every member of `h`.
pub fn query_distance(h: &Subgraph<'_>, query: &[VertexId]) -> QueryDistance {
    let n = h.graph().num_vertices();
    let mut per_vertex = vec![0u32; n];
    let mut dist = Vec::with_capacity(n);
    for &q in query {
        h.bfs(q, &mut dist);
        for (acc, &d) in per_vertex.iter_mut().zip(&dist) {
            *acc = (*acc).max(d);
        }
    }
    let mut max = 0;
    for (v, acc) in per_vertex.iter_mut().enumerate() {
        if !h.contains(v as VertexId) {
            *acc = INF;
        } else {
            max = max.max(*acc);
        }
    }
    QueryDistance { per_vertex, max }
}

/// `G_w`: the subgraph induced by the vertices carrying `w`.
pub fn project_on_attribute(g: &Graph, w: AttrId) -> Result<Subgraph<'_>> {
    if w as usize >= g.num_attrs() {
        return Err(Error::UnknownAttribute(w.to_string()));
    }
    Subgraph::induced(g, g.posting(w))
}
