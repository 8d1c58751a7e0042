//! Synthetic planted-community data, query generation, F1 scoring, an
//! attribute-blind baseline and an exhaustive oracle.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Duration;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{AttrId, Graph, Subgraph, VertexId};
use crate::greedy::{basic_search, bulk_search, Algorithm, CandidateTrace, SearchResult};
use crate::index::AtIndex;
use crate::local::locatc_search;
use crate::query::QuerySpec;
use crate::score::{format_score, Rational, ScoreBreakdown};
use crate::truss::{diameter, maintain_kd_truss, maximal_kd_truss};

/// Largest graph `brute_force_atc` accepts.
pub const ORACLE_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Community {
    /// Sorted internal ids.
    pub members: Vec<VertexId>,
    /// Planted attributes; empty when read from a file.
    pub attrs: Vec<AttrId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    pub communities: Vec<Community>,
}

/// Generator parameters: disjoint communities of `min_size..=max_size`
/// vertices with intra-community edge probability `p_in`, over an
/// Erdős–Rényi background of mean degree `background_degree`. Vertices left
/// isolated get one random edge.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n: usize,
    pub communities: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub p_in: f64,
    pub background_degree: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            n: 1000,
            communities: 20,
            min_size: 10,
            max_size: 30,
            p_in: 0.8,
            background_degree: 3.0,
            seed: 1,
        }
    }
}

pub fn generate_graph(cfg: &GenConfig) -> Result<(Graph, GroundTruth)> {
    if cfg.min_size == 0 || cfg.min_size > cfg.max_size {
        return Err(Error::Config("community size range is empty".into()));
    }
    if cfg.communities * cfg.max_size > cfg.n {
        return Err(Error::Config(format!(
            "{} communities of up to {} vertices do not fit in {} vertices",
            cfg.communities, cfg.max_size, cfg.n
        )));
    }
    if cfg.n < 2 {
        return Err(Error::Config("need at least two vertices".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut order: Vec<VertexId> = (0..cfg.n as VertexId).collect();
    order.shuffle(&mut rng);

    let mut gt = GroundTruth::default();
    let mut edges = Vec::new();
    let mut next = 0;
    for _ in 0..cfg.communities {
        let size = rng.gen_range(cfg.min_size..=cfg.max_size);
        let mut members = order[next..next + size].to_vec();
        next += size;
        members.sort_unstable();
        for i in 0..members.len() {
            for j in i + 1..members.len() {
                if rng.gen_bool(cfg.p_in) {
                    edges.push((members[i], members[j]));
                }
            }
        }
        gt.communities.push(Community {
            members,
            attrs: Vec::new(),
        });
    }

    let p = (cfg.background_degree / (cfg.n - 1) as f64).clamp(0.0, 1.0);
    for u in 0..cfg.n as VertexId {
        for v in u + 1..cfg.n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let mut degree = vec![0usize; cfg.n];
    for &(u, v) in &edges {
        degree[u as usize] += 1;
        degree[v as usize] += 1;
    }
    for u in 0..cfg.n as VertexId {
        if degree[u as usize] == 0 {
            let mut v = rng.gen_range(0..cfg.n as VertexId - 1);
            if v >= u {
                v += 1;
            }
            edges.push((u, v));
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
    }
    Ok((Graph::from_edges(cfg.n, &edges), gt))
}

/// Attribute planting parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlantConfig {
    /// Percentage of each community's members that receive its attributes.
    pub coverage: u32,
    pub attrs_per_community: usize,
    /// Inclusive range of noise labels per vertex.
    pub noise: (usize, usize),
    /// Pool size is `max(attrs_per_community, ⌊pool_ratio·n⌋)`.
    pub pool_ratio: Rational,
    pub seed: u64,
}

impl Default for PlantConfig {
    fn default() -> Self {
        PlantConfig {
            coverage: 80,
            attrs_per_community: 3,
            noise: (1, 5),
            pool_ratio: Rational::new(5, 1000),
            seed: 1,
        }
    }
}

pub fn pool_size(n: usize, cfg: &PlantConfig) -> usize {
    let scaled = (cfg.pool_ratio * Rational::from_integer(n as i128))
        .floor()
        .to_integer();
    cfg.attrs_per_community.max(scaled as usize)
}

pub fn pool_label(i: usize) -> String {
    format!("A{i}")
}

/// Plants `attrs_per_community` pool labels on `coverage`% of each
/// community's members and a uniform number of distinct noise labels on
/// every vertex. The noise range is clipped to the pool size. Fills in
/// `gt`'s attribute ids.
pub fn plant_attributes(g: Graph, gt: &mut GroundTruth, cfg: &PlantConfig) -> Result<Graph> {
    let n = g.num_vertices();
    let pool = pool_size(n, cfg);
    if cfg.noise.0 > cfg.noise.1 {
        return Err(Error::Config("noise range is empty".into()));
    }
    if cfg.coverage > 100 {
        return Err(Error::Config("coverage is a percentage".into()));
    }
    for c in &gt.communities {
        for &v in &c.members {
            g.check_vertex(v)?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let labels: Vec<usize> = (0..pool).collect();
    let mut sets: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut planted = Vec::new();
    for c in &gt.communities {
        let chosen: Vec<usize> = labels
            .choose_multiple(&mut rng, cfg.attrs_per_community)
            .copied()
            .collect();
        let take = (c.members.len() * cfg.coverage as usize).div_ceil(100);
        let carriers: Vec<VertexId> = c.members.choose_multiple(&mut rng, take).copied().collect();
        for v in carriers {
            sets[v as usize].extend(&chosen);
        }
        planted.push(chosen);
    }
    for set in sets.iter_mut() {
        let count = rng.gen_range(cfg.noise.0.min(pool)..=cfg.noise.1.min(pool));
        set.extend(labels.choose_multiple(&mut rng, count));
    }
    // labels are interned in first-seen order; list each once up front so
    // that attribute ids follow pool order
    let mut assignments = Vec::new();
    for i in 0..pool {
        if let Some(v) = sets.iter().position(|s| s.contains(&i)) {
            assignments.push((v as VertexId, pool_label(i)));
        }
    }
    for (v, set) in sets.iter().enumerate() {
        for &i in set {
            assignments.push((v as VertexId, pool_label(i)));
        }
    }
    let g = g.with_attributes(assignments);
    for (c, chosen) in gt.communities.iter_mut().zip(planted) {
        let mut ids: Vec<AttrId> = chosen
            .iter()
            .filter_map(|&i| g.attr_id(&pool_label(i)))
            .collect();
        ids.sort_unstable();
        c.attrs = ids;
    }
    Ok(g)
}

/// One generated query with the index of the community it was drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledQuery {
    pub query: QuerySpec,
    pub community: usize,
}

/// Attributes of `c` ranked by how representative they are: in-community
/// frequency over out-of-community frequency (add-one smoothed), then
/// in-community count, then label.
pub fn representative_attrs(g: &Graph, c: &Community) -> Vec<AttrId> {
    let inside = c.members.len() as i128;
    let outside = (g.num_vertices() - c.members.len()) as i128;
    let mut ranked: Vec<(Rational, i128, &str, AttrId)> = Vec::new();
    for w in 0..g.num_attrs() as AttrId {
        let posting = g.posting(w);
        let count_in = posting
            .iter()
            .filter(|v| c.members.binary_search(v).is_ok())
            .count() as i128;
        if count_in == 0 {
            continue;
        }
        let count_out = posting.len() as i128 - count_in;
        let ratio = Rational::new(count_in, inside) / Rational::new(count_out + 1, outside + 1);
        ranked.push((ratio, count_in, g.attr_label(w), w));
    }
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(b.2)));
    ranked.into_iter().map(|(_, _, _, w)| w).collect()
}

/// Draws `count` queries: a random non-empty community, `|V_q|` uniform in
/// `nodes_range` (capped by the community size) sampled without replacement,
/// and the community's `attrs_per_query` most representative attributes.
pub fn gen_queries(
    g: &Graph,
    gt: &GroundTruth,
    count: usize,
    nodes_range: (usize, usize),
    attrs_per_query: usize,
    seed: u64,
) -> Result<Vec<LabeledQuery>> {
    let eligible: Vec<usize> = (0..gt.communities.len())
        .filter(|&i| !gt.communities[i].members.is_empty())
        .collect();
    if eligible.is_empty() {
        return Err(Error::Config("no non-empty community to query".into()));
    }
    if nodes_range.0 == 0 || nodes_range.0 > nodes_range.1 {
        return Err(Error::Config("query size range is empty".into()));
    }
    let ranked: Vec<Vec<AttrId>> = gt
        .communities
        .iter()
        .map(|c| representative_attrs(g, c))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let ci = *eligible.choose(&mut rng).expect("non-empty");
        let c = &gt.communities[ci];
        let hi = nodes_range.1.min(c.members.len());
        let lo = nodes_range.0.min(hi);
        let size = rng.gen_range(lo..=hi);
        let nodes: Vec<VertexId> = c.members.choose_multiple(&mut rng, size).copied().collect();
        let attrs: Vec<AttrId> = ranked[ci].iter().take(attrs_per_query).copied().collect();
        out.push(LabeledQuery {
            query: QuerySpec::new(&nodes, &attrs),
            community: ci,
        });
    }
    Ok(out)
}

/// Precision, recall and F1 of `found` against `truth`.
pub fn f1(found: &[VertexId], truth: &[VertexId]) -> (Rational, Rational, Rational) {
    let zero = Rational::from_integer(0);
    if found.is_empty() || truth.is_empty() {
        return (zero, zero, zero);
    }
    let truth_set: HashSet<VertexId> = truth.iter().copied().collect();
    let found_set: HashSet<VertexId> = found.iter().copied().collect();
    let hit = found_set.intersection(&truth_set).count() as i128;
    let p = Rational::new(hit, found_set.len() as i128);
    let r = Rational::new(hit, truth_set.len() as i128);
    let f = if hit == 0 {
        zero
    } else {
        Rational::from_integer(2) * p * r / (p + r)
    };
    (p, r, f)
}

/// Bulk search with `W_q = ∅`: only structure drives the peeling, so every
/// candidate scores 0 and the last feasible candidate is returned.
pub fn structure_baseline(g: &Graph, q: &QuerySpec) -> Result<(SearchResult, CandidateTrace)> {
    let mut blind = q.clone();
    blind.attrs.clear();
    let (mut res, trace) = bulk_search(g, &blind)?;
    res.algo = Algorithm::Baseline;
    Ok((res, trace))
}

/// Runs `algo` on `q`. Local search needs the index.
pub fn run_algorithm(
    g: &Graph,
    idx: Option<&AtIndex>,
    algo: Algorithm,
    q: &QuerySpec,
) -> Result<SearchResult> {
    match algo {
        Algorithm::Basic => basic_search(g, q).map(|r| r.0),
        Algorithm::Bulk => bulk_search(g, q).map(|r| r.0),
        Algorithm::Baseline => structure_baseline(g, q).map(|r| r.0),
        Algorithm::Local => {
            let idx = idx.ok_or_else(|| Error::Config("local search needs an index".into()))?;
            locatc_search(g, idx, q)
        }
    }
}

/// Optimal (k,d)-truss community by exhaustive enumeration. A vertex set `S`
/// is feasible when the maximal (k,d)-truss of `G[S]` keeps all of `S`. Ties
/// go to the smaller set, then the lexicographically smaller one.
pub fn brute_force_atc(g: &Graph, q: &QuerySpec) -> Result<SearchResult> {
    if g.num_vertices() > ORACLE_CAP {
        return Err(Error::OracleCap {
            cap: ORACLE_CAP,
            n: g.num_vertices(),
        });
    }
    q.validate(g)?;
    // every feasible set lies inside the maximal (k,d)-truss
    let top = maximal_kd_truss(g, &q.nodes, q.k, q.d).map_err(Error::NoCommunity)?;
    let pool: Vec<VertexId> = top
        .subgraph()
        .vertices()
        .filter(|v| q.nodes.binary_search(v).is_err())
        .collect();
    let mut best: Option<(Rational, Vec<VertexId>, Subgraph<'_>)> = None;
    for mask in 0u32..(1 << pool.len()) {
        let mut set = q.nodes.clone();
        set.extend(
            (0..pool.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| pool[i]),
        );
        set.sort_unstable();
        let Some(h) = feasible(g, &set, q) else {
            continue;
        };
        let score = ScoreBreakdown::from_vertices(g, set.iter().copied(), &q.attrs).score();
        let better = match &best {
            None => true,
            Some((s, v, _)) => score > *s || (score == *s && (set.len(), &set) < (v.len(), v)),
        };
        if better {
            best = Some((score, set, h));
        }
    }
    let (score, _, h) = best.expect("the maximal truss itself is feasible");
    let mut res = SearchResult {
        vertices: h.vertex_list(),
        edges: h.edge_list(),
        score,
        k: q.k,
        d: q.d,
        query_distance: crate::graph::query_distance(&h, &q.nodes).max,
        diameter: diameter(&h),
        algo: Algorithm::Basic,
        iterations: 0,
        elapsed: Duration::ZERO,
    };
    res.vertices.sort_unstable();
    Ok(res)
}

fn feasible<'g>(g: &'g Graph, set: &[VertexId], q: &QuerySpec) -> Option<Subgraph<'g>> {
    let h = Subgraph::induced(g, set).ok()?;
    let t = maintain_kd_truss(h, &q.nodes, q.k, q.d).ok()?;
    (t.subgraph().num_vertices() == set.len()).then(|| t.into_subgraph())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalRow {
    pub query: usize,
    pub community: usize,
    pub status: &'static str,
    pub size: usize,
    pub precision: Rational,
    pub recall: Rational,
    pub f1: Rational,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalReport {
    pub algo: Algorithm,
    pub rows: Vec<EvalRow>,
}

impl EvalReport {
    pub fn mean_f1(&self) -> Rational {
        mean(self.rows.iter().map(|r| r.f1))
    }

    pub fn mean_precision(&self) -> Rational {
        mean(self.rows.iter().map(|r| r.precision))
    }

    pub fn mean_recall(&self) -> Rational {
        mean(self.rows.iter().map(|r| r.recall))
    }

    pub fn mean_elapsed(&self) -> Duration {
        if self.rows.is_empty() {
            return Duration::ZERO;
        }
        self.rows.iter().map(|r| r.elapsed).sum::<Duration>() / self.rows.len() as u32
    }

    /// TAB-separated rows plus a final `mean` row. Runtimes are included only
    /// with `timing`, since they differ between runs.
    pub fn to_tsv(&self, timing: bool) -> String {
        let mut out = String::from("query\tcommunity\talgo\tstatus\tsize\tprecision\trecall\tf1");
        if timing {
            out.push_str("\tseconds");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                r.query,
                r.community,
                self.algo.name(),
                r.status,
                r.size,
                format_score(&r.precision),
                format_score(&r.recall),
                format_score(&r.f1)
            );
            if timing {
                let _ = write!(out, "\t{:.6}", r.elapsed.as_secs_f64());
            }
            out.push('\n');
        }
        let ok = self.rows.iter().filter(|r| r.status == "ok").count();
        let _ = write!(
            out,
            "mean\t-\t{}\t{ok}/{}\t-\t{}\t{}\t{}",
            self.algo.name(),
            self.rows.len(),
            format_score(&self.mean_precision()),
            format_score(&self.mean_recall()),
            format_score(&self.mean_f1())
        );
        if timing {
            let _ = write!(out, "\t{:.6}", self.mean_elapsed().as_secs_f64());
        }
        out.push('\n');
        out
    }
}

fn mean(values: impl Iterator<Item = Rational>) -> Rational {
    let mut sum = Rational::from_integer(0);
    let mut n = 0;
    for v in values {
        sum += v;
        n += 1;
    }
    if n == 0 {
        sum
    } else {
        sum / Rational::from_integer(n)
    }
}

/// Scores `algo` on every query against its community. Queries run in
/// parallel; failed searches count as empty answers.
pub fn evaluate(
    g: &Graph,
    idx: Option<&AtIndex>,
    gt: &GroundTruth,
    queries: &[LabeledQuery],
    algo: Algorithm,
) -> Result<EvalReport> {
    if algo == Algorithm::Local && idx.is_none() {
        return Err(Error::Config("local search needs an index".into()));
    }
    for lq in queries {
        if lq.community >= gt.communities.len() {
            return Err(Error::Config(format!(
                "query refers to community {} of {}",
                lq.community,
                gt.communities.len()
            )));
        }
    }
    let rows = queries
        .par_iter()
        .enumerate()
        .map(|(i, lq)| {
            let start = std::time::Instant::now();
            let outcome = run_algorithm(g, idx, algo, &lq.query);
            let elapsed = start.elapsed();
            let truth = &gt.communities[lq.community].members;
            let (status, found) = match outcome {
                Ok(res) => ("ok", res.vertices),
                Err(Error::NoCommunity(_)) => ("infeasible", Vec::new()),
                Err(Error::InvalidQuery(_)) => ("bad_query", Vec::new()),
                Err(e) => return Err(e),
            };
            let (precision, recall, f1) = f1(&found, truth);
            Ok(EvalRow {
                query: i,
                community: lq.community,
                status,
                size: found.len(),
                precision,
                recall,
                f1,
                elapsed,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport { algo, rows })
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_owned(),
        line,
        msg: msg.into(),
    }
}

fn parse_ext(g: &Graph, token: &str, path: &Path, line: usize) -> Result<VertexId> {
    let ext: u64 = token
        .trim()
        .parse()
        .map_err(|_| parse_err(path, line, format!("bad vertex id {token:?}")))?;
    g.vertex_of(ext).ok_or(Error::UnknownVertex(ext))
}

pub fn edges_to_text(g: &Graph) -> String {
    let mut out = String::new();
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{}\t{}", g.ext_id(u), g.ext_id(v));
    }
    out
}

/// One line per vertex carrying labels: `vertex<TAB>label<TAB>label…`.
pub fn attrs_to_text(g: &Graph) -> String {
    let mut out = String::new();
    for v in 0..g.num_vertices() as VertexId {
        let attrs = g.attrs(v);
        if attrs.is_empty() {
            continue;
        }
        let mut labels: Vec<&str> = attrs.iter().map(|&w| g.attr_label(w)).collect();
        labels.sort_unstable();
        let _ = writeln!(out, "{}\t{}", g.ext_id(v), labels.join("\t"));
    }
    out
}

/// One community per line, TAB-separated external ids.
pub fn truth_to_text(g: &Graph, gt: &GroundTruth) -> String {
    let mut out = String::new();
    for c in &gt.communities {
        let ids: Vec<String> = c.members.iter().map(|&v| g.ext_id(v).to_string()).collect();
        let _ = writeln!(out, "{}", ids.join("\t"));
    }
    out
}

pub fn parse_truth(text: &str, path: &Path, g: &Graph) -> Result<GroundTruth> {
    let mut gt = GroundTruth::default();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let mut members = line
            .split_whitespace()
            .map(|t| parse_ext(g, t, path, i + 1))
            .collect::<Result<Vec<_>>>()?;
        members.sort_unstable();
        members.dedup();
        gt.communities.push(Community {
            members,
            attrs: Vec::new(),
        });
    }
    Ok(gt)
}

pub fn load_truth(path: impl AsRef<Path>, g: &Graph) -> Result<GroundTruth> {
    let path = path.as_ref();
    parse_truth(&read(path)?, path, g)
}

/// `nodes<TAB>attrs<TAB>community`, with comma-separated external ids and
/// labels.
pub fn queries_to_text(g: &Graph, queries: &[LabeledQuery]) -> String {
    let mut out = String::new();
    for lq in queries {
        let nodes: Vec<String> = lq
            .query
            .nodes
            .iter()
            .map(|&v| g.ext_id(v).to_string())
            .collect();
        let attrs: Vec<&str> = lq.query.attrs.iter().map(|&w| g.attr_label(w)).collect();
        let _ = writeln!(
            out,
            "{}\t{}\t{}",
            nodes.join(","),
            attrs.join(","),
            lq.community
        );
    }
    out
}

pub fn parse_queries(text: &str, path: &Path, g: &Graph) -> Result<Vec<LabeledQuery>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        let [nodes, attrs, community] = fields[..] else {
            return Err(parse_err(
                path,
                i + 1,
                "expected three TAB-separated fields",
            ));
        };
        let nodes = nodes
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| parse_ext(g, t, path, i + 1))
            .collect::<Result<Vec<_>>>()?;
        let attrs = attrs
            .split(',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                g.attr_id(t)
                    .ok_or_else(|| Error::UnknownAttribute(t.to_owned()))
            })
            .collect::<Result<Vec<_>>>()?;
        let community = community
            .trim()
            .parse()
            .map_err(|_| parse_err(path, i + 1, "bad community index"))?;
        out.push(LabeledQuery {
            query: QuerySpec::new(&nodes, &attrs),
            community,
        });
    }
    Ok(out)
}

pub fn load_queries(path: impl AsRef<Path>, g: &Graph) -> Result<Vec<LabeledQuery>> {
    let path = path.as_ref();
    parse_queries(&read(path)?, path, g)
}

/// Writes `<prefix>.edges`, `.attrs`, `.truth` and `.queries`.
pub fn write_dataset(
    prefix: &str,
    g: &Graph,
    gt: &GroundTruth,
    queries: &[LabeledQuery],
) -> Result<()> {
    write(Path::new(&format!("{prefix}.edges")), &edges_to_text(g))?;
    write(Path::new(&format!("{prefix}.attrs")), &attrs_to_text(g))?;
    write(Path::new(&format!("{prefix}.truth")), &truth_to_text(g, gt))?;
    write(
        Path::new(&format!("{prefix}.queries")),
        &queries_to_text(g, queries),
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i128, d: i128) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn f1_cases() {
        assert_eq!(f1(&[1, 2, 3], &[3, 2, 1]), (r(1, 1), r(1, 1), r(1, 1)));
        assert_eq!(f1(&[1, 2], &[3, 4]), (r(0, 1), r(0, 1), r(0, 1)));
        assert_eq!(f1(&[1, 2, 3, 4], &[1, 2]), (r(1, 2), r(1, 1), r(2, 3)));
        assert_eq!(f1(&[], &[1]), (r(0, 1), r(0, 1), r(0, 1)));
    }

    #[test]
    fn full_coverage_no_noise() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let mut gt = GroundTruth {
            communities: vec![Community {
                members: vec![0, 1, 2],
                attrs: Vec::new(),
            }],
        };
        let cfg = PlantConfig {
            coverage: 100,
            noise: (0, 0),
            ..PlantConfig::default()
        };
        let g = plant_attributes(g, &mut gt, &cfg).unwrap();
        assert_eq!(gt.communities[0].attrs.len(), 3);
        for v in 0..3 {
            assert_eq!(g.attrs(v), gt.communities[0].attrs.as_slice());
        }
        for v in 3..6 {
            assert!(g.attrs(v).is_empty());
        }
    }

    #[test]
    fn default_pool_and_noise() {
        let (g, mut gt) = generate_graph(&GenConfig::default()).unwrap();
        let cfg = PlantConfig::default();
        assert_eq!(pool_size(1000, &cfg), 5);
        let g = plant_attributes(g, &mut gt, &cfg).unwrap();
        assert_eq!(g.num_attrs(), 5);
        for v in 0..g.num_vertices() as VertexId {
            let n = g.attrs(v).len();
            assert!((1..=5).contains(&n));
        }
        let clipped = PlantConfig {
            noise: (6, 9),
            ..cfg
        };
        let (g, mut gt) = generate_graph(&GenConfig::default()).unwrap();
        let g = plant_attributes(g, &mut gt, &clipped).unwrap();
        assert!((0..g.num_vertices() as VertexId).all(|v| g.attrs(v).len() == 5));
    }

    #[test]
    fn generator_is_deterministic() {
        let run = || {
            let (g, mut gt) = generate_graph(&GenConfig::default()).unwrap();
            let g = plant_attributes(g, &mut gt, &PlantConfig::default()).unwrap();
            let q = gen_queries(&g, &gt, 20, (1, 16), 2, 7).unwrap();
            (
                edges_to_text(&g),
                attrs_to_text(&g),
                truth_to_text(&g, &gt),
                queries_to_text(&g, &q),
            )
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn singleton_community_query() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).with_attributes([(0, "x")]);
        let gt = GroundTruth {
            communities: vec![Community {
                members: vec![0],
                attrs: Vec::new(),
            }],
        };
        let q = gen_queries(&g, &gt, 3, (1, 16), 2, 1).unwrap();
        for lq in q {
            assert_eq!(lq.query.nodes, vec![0]);
            assert_eq!(lq.query.attrs, vec![0]);
        }
    }

    #[test]
    fn text_round_trip() {
        let (g, mut gt) = generate_graph(&GenConfig {
            n: 60,
            communities: 3,
            max_size: 15,
            ..GenConfig::default()
        })
        .unwrap();
        let g = plant_attributes(
            g,
            &mut gt,
            &PlantConfig {
                noise: (1, 3),
                ..PlantConfig::default()
            },
        )
        .unwrap();
        let q = gen_queries(&g, &gt, 5, (1, 4), 2, 3).unwrap();
        let p = Path::new("mem");
        let (g2, _) = crate::graph::parse_edge_list(&edges_to_text(&g), p).unwrap();
        let g2 = crate::graph::parse_attributes(&attrs_to_text(&g), p, g2).unwrap();
        let gt2 = parse_truth(&truth_to_text(&g, &gt), p, &g2).unwrap();
        assert_eq!(
            gt2.communities
                .iter()
                .map(|c| &c.members)
                .collect::<Vec<_>>(),
            gt.communities
                .iter()
                .map(|c| &c.members)
                .collect::<Vec<_>>()
        );
        let q2 = parse_queries(&queries_to_text(&g, &q), p, &g2).unwrap();
        assert_eq!(queries_to_text(&g2, &q2), queries_to_text(&g, &q));
    }

    #[test]
    fn oracle_on_triangle() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]);
        let q = QuerySpec::new(&[0], &[]).with_kd(3, 1);
        assert_eq!(brute_force_atc(&g, &q).unwrap().vertices, vec![0, 1, 2]);
        let path = Graph::from_edges(3, &[(0, 1), (1, 2)]);
        assert!(matches!(
            brute_force_atc(&path, &q),
            Err(Error::NoCommunity(_))
        ));
        let big = Graph::from_edges(15, &[(0, 1)]);
        assert!(matches!(
            brute_force_atc(&big, &q),
            Err(Error::OracleCap { .. })
        ));
    }

    #[test]
    fn baseline_scores_zero() {
        let mut edges = Vec::new();
        for i in 0..6u32 {
            for j in i + 1..6 {
                edges.push((i, j));
            }
        }
        let g = Graph::from_edges(6, &edges).with_attributes([(0, "a"), (1, "a")]);
        let q = QuerySpec::new(&[0], &[0]).with_kd(4, 2);
        let (res, trace) = structure_baseline(&g, &q).unwrap();
        assert_eq!(res.score, r(0, 1));
        assert_eq!(trace.best(), trace.len() - 1);
        assert_eq!(res.algo, Algorithm::Baseline);
    }
}
