//! Top-down greedy peeling from the maximal (k,d)-truss.
//!
//! Both algorithms keep one live [`KdTruss`] and a deletion log. Every
//! intermediate (k,d)-truss is a candidate; the best-scoring one is rebuilt
//! from the log at the end, so no candidate is ever copied.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{AttrId, EdgeId, Graph, Subgraph, VertexId};
use crate::query::QuerySpec;
use crate::score::{contribution, gain_with, Rational, ScoreBreakdown};
use crate::truss::{diameter, maximal_kd_truss, KdTruss};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Basic,
    Bulk,
    Local,
    Baseline,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Basic => "basic",
            Algorithm::Bulk => "bulk",
            Algorithm::Local => "local",
            Algorithm::Baseline => "baseline",
        }
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "basic" => Ok(Algorithm::Basic),
            "bulk" => Ok(Algorithm::Bulk),
            "local" => Ok(Algorithm::Local),
            "baseline" => Ok(Algorithm::Baseline),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub removed_vertices: Vec<VertexId>,
    pub removed_edges: Vec<EdgeId>,
    pub score: Rational,
}

/// Candidates `G_0, G_1, …` of one peeling run, stored as `G_0` plus the
/// vertices and edges removed by each iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateTrace {
    initial_vertices: Vec<VertexId>,
    initial_edges: Vec<EdgeId>,
    steps: Vec<TraceStep>,
    best: usize,
}

impl CandidateTrace {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn best(&self) -> usize {
        self.best
    }

    pub fn score(&self, i: usize) -> &Rational {
        &self.steps[i].score
    }

    pub fn steps(&self) -> &[TraceStep] {
        &self.steps
    }

    /// Rebuilds candidate `G_i` from `G_0` and the deletion log.
    pub fn replay<'g>(&self, g: &'g Graph, i: usize) -> Result<Subgraph<'g>> {
        if i >= self.steps.len() {
            return Err(Error::TraceIndex {
                index: i,
                len: self.steps.len(),
            });
        }
        let mut sub = Subgraph::from_parts(g, &self.initial_vertices, &self.initial_edges);
        let mut scratch = Vec::new();
        for step in &self.steps[1..=i] {
            for &e in &step.removed_edges {
                sub.remove_edge(e);
            }
            for &v in &step.removed_vertices {
                sub.remove_vertex(v, &mut scratch);
            }
        }
        Ok(sub)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
    pub score: Rational,
    pub k: u32,
    pub d: u32,
    pub query_distance: u32,
    pub diameter: u32,
    pub algo: Algorithm,
    pub iterations: usize,
    pub elapsed: Duration,
}

impl SearchResult {
    pub fn subgraph<'g>(&self, g: &'g Graph) -> Subgraph<'g> {
        Subgraph::from_parts(g, &self.vertices, &self.edges)
    }

    pub(crate) fn from_subgraph(
        h: &Subgraph<'_>,
        query: &QuerySpec,
        score: Rational,
        algo: Algorithm,
        iterations: usize,
        elapsed: Duration,
    ) -> Self {
        SearchResult {
            vertices: h.vertex_list(),
            edges: h.edge_list(),
            score,
            k: query.k,
            d: query.d,
            query_distance: crate::graph::query_distance(h, &query.nodes).max,
            diameter: diameter(h),
            algo,
            iterations,
            elapsed,
        }
    }
}

/// Vertex selection for one peeling iteration.
trait Peeler {
    fn select(&self, t: &KdTruss<'_>, b: &ScoreBreakdown, attrs: &[AttrId]) -> Vec<VertexId>;

    fn stop(&self, _t: &KdTruss<'_>) -> bool {
        false
    }
}

/// Removes the single non-query vertex of smallest score contribution.
struct SmallestContribution;

impl Peeler for SmallestContribution {
    fn select(&self, t: &KdTruss<'_>, b: &ScoreBreakdown, attrs: &[AttrId]) -> Vec<VertexId> {
        let h = t.subgraph();
        let g = h.graph();
        h.vertices()
            .filter(|v| t.query().binary_search(v).is_err())
            .map(|v| (contribution(g, b, v, attrs), v))
            .min()
            .map(|(_, v)| vec![v])
            .unwrap_or_default()
    }
}

/// Removes the `⌈ε/(1+ε)·|V(G_l)|⌉` non-query vertices of smallest local
/// marginal gain, ranked once against the current graph.
struct SmallestGain {
    epsilon: Rational,
    k: u32,
}

impl SmallestGain {
    fn batch_size(&self, n: usize) -> usize {
        let one = Rational::from_integer(1);
        let s = self.epsilon / (one + self.epsilon) * Rational::from_integer(n as i128);
        (s.ceil().to_integer() as usize).max(1)
    }
}

impl Peeler for SmallestGain {
    fn select(&self, t: &KdTruss<'_>, b: &ScoreBreakdown, attrs: &[AttrId]) -> Vec<VertexId> {
        let h = t.subgraph();
        let mut ranked: Vec<(Rational, VertexId)> = h
            .vertices()
            .filter(|v| t.query().binary_search(v).is_err())
            .map(|v| (gain_with(h, b, v, attrs, self.k), v))
            .collect();
        ranked.sort();
        ranked
            .into_iter()
            .take(self.batch_size(h.num_vertices()))
            .map(|(_, v)| v)
            .collect()
    }

    fn stop(&self, t: &KdTruss<'_>) -> bool {
        t.subgraph().num_vertices() < self.k as usize
    }
}

fn peel(
    g: &Graph,
    query: &QuerySpec,
    peeler: &dyn Peeler,
    algo: Algorithm,
) -> Result<(SearchResult, CandidateTrace)> {
    query.validate(g)?;
    let start = Instant::now();
    let attrs = &query.attrs;
    let mut t = maximal_kd_truss(g, &query.nodes, query.k, query.d).map_err(Error::NoCommunity)?;
    t.take_journal();
    let mut b = ScoreBreakdown::from_vertices(g, t.subgraph().vertices(), attrs);
    let mut trace = CandidateTrace {
        initial_vertices: t.subgraph().vertex_list(),
        initial_edges: t.subgraph().edge_list(),
        steps: vec![TraceStep {
            removed_vertices: Vec::new(),
            removed_edges: Vec::new(),
            score: b.score(),
        }],
        best: 0,
    };
    let mut iterations = 0;
    while !peeler.stop(&t) {
        let batch = peeler.select(&t, &b, attrs);
        if batch.is_empty() {
            break;
        }
        iterations += 1;
        t.delete_vertices(&batch);
        if t.maintain().is_err() {
            break;
        }
        let journal = t.take_journal();
        for &v in &journal.vertices {
            b.remove(g, v, attrs);
        }
        let score = b.score();
        if score >= trace.steps[trace.best].score {
            trace.best = trace.steps.len();
        }
        trace.steps.push(TraceStep {
            removed_vertices: journal.vertices,
            removed_edges: journal.edges,
            score,
        });
    }
    let best = trace.replay(g, trace.best)?;
    let score = trace.steps[trace.best].score;
    let result =
        SearchResult::from_subgraph(&best, query, score, algo, iterations, start.elapsed());
    Ok((result, trace))
}

/// Repeatedly removes the non-query vertex with the smallest score
/// contribution and restores the (k,d)-truss, returning the best candidate.
pub fn basic_search(g: &Graph, query: &QuerySpec) -> Result<(SearchResult, CandidateTrace)> {
    peel(g, query, &SmallestContribution, Algorithm::Basic)
}

/// Bulk variant: removes a fraction `ε/(1+ε)` of the vertices per iteration,
/// ranked by local marginal gain.
pub fn bulk_search(g: &Graph, query: &QuerySpec) -> Result<(SearchResult, CandidateTrace)> {
    let peeler = SmallestGain {
        epsilon: query.epsilon,
        k: query.k,
    };
    peel(g, query, &peeler, Algorithm::Bulk)
}

/// Upper bound `⌈log_{1+ε}(n/k)⌉` on bulk iterations (before the `O(1)` slack).
pub fn bulk_iteration_bound(n: usize, k: u32, epsilon: &Rational) -> usize {
    let eps = *epsilon.numer() as f64 / *epsilon.denom() as f64;
    let ratio = n as f64 / k as f64;
    if ratio <= 1.0 {
        return 0;
    }
    (ratio.ln() / (1.0 + eps).ln()).ceil() as usize
}
