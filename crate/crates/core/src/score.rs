//! The attribute score `f(H, W_q) = Σ_w |V_w ∩ V(H)|² / |V(H)|` and the
//! quantities the greedy searches derive from it. Everything is exact.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::graph::{AttrId, Graph, Subgraph, VertexId};

pub type Rational = Ratio<i128>;

/// Per-query-attribute cover counts of a vertex set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoreBreakdown {
    /// `c_w = |V_w ∩ V(H)|`, aligned with the (sorted) query attributes.
    pub counts: Vec<u64>,
    /// `|V(H)|`
    pub size: u64,
}

/// A community score computed from cover counts. Only [`AttributeScore`] ships.
pub trait ScoreFunction {
    fn score(&self, b: &ScoreBreakdown) -> Rational;
}

/// `f(H, W_q) = Σ_w θ(H, w) · c_w` with `θ(H, w) = c_w / |V(H)|`.
#[derive(Debug, Clone, Copy, Default)]
pub struct AttributeScore;

impl ScoreFunction for AttributeScore {
    fn score(&self, b: &ScoreBreakdown) -> Rational {
        b.score()
    }
}

/// Positions in `query` (sorted) of the query attributes `v` carries.
pub(crate) fn covered<'a>(
    g: &'a Graph,
    v: VertexId,
    query: &'a [AttrId],
) -> impl Iterator<Item = usize> + 'a {
    let attrs = g.attrs(v);
    query
        .iter()
        .enumerate()
        .filter(move |(_, w)| attrs.binary_search(w).is_ok())
        .map(|(i, _)| i)
}

impl ScoreBreakdown {
    pub fn empty(query: &[AttrId]) -> Self {
        ScoreBreakdown {
            counts: vec![0; query.len()],
            size: 0,
        }
    }

    pub fn from_vertices(
        g: &Graph,
        vertices: impl IntoIterator<Item = VertexId>,
        query: &[AttrId],
    ) -> Self {
        let mut b = Self::empty(query);
        for v in vertices {
            b.add(g, v, query);
        }
        b
    }

    pub fn add(&mut self, g: &Graph, v: VertexId, query: &[AttrId]) {
        for i in covered(g, v, query) {
            self.counts[i] += 1;
        }
        self.size += 1;
    }

    pub fn remove(&mut self, g: &Graph, v: VertexId, query: &[AttrId]) {
        for i in covered(g, v, query) {
            self.counts[i] -= 1;
        }
        self.size -= 1;
    }

    pub fn sum_squares(&self) -> i128 {
        self.counts.iter().map(|&c| (c as i128) * (c as i128)).sum()
    }

    /// `f`; zero for the empty vertex set.
    pub fn score(&self) -> Rational {
        if self.size == 0 {
            return Rational::zero();
        }
        Rational::new(self.sum_squares(), self.size as i128)
    }

    /// `θ(H, w)` for the query attribute at position `i`.
    pub fn theta(&self, i: usize) -> Rational {
        Rational::new(self.counts[i] as i128, self.size.max(1) as i128)
    }
}

/// Sorted, deduplicated attribute ids.
pub fn normalize_attrs(attrs: &[AttrId]) -> Vec<AttrId> {
    let mut v = attrs.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

pub fn attribute_score(h: &Subgraph<'_>, query: &[AttrId]) -> Result<ScoreBreakdown> {
    if h.num_vertices() == 0 {
        return Err(Error::EmptyVertexSet);
    }
    let query = normalize_attrs(query);
    Ok(ScoreBreakdown::from_vertices(
        h.graph(),
        h.vertices(),
        &query,
    ))
}

/// `f_H(v, W_q) = Σ_{w ∈ W_q ∩ attr(v)} (2 c_w − 1)`.
pub fn contribution(g: &Graph, b: &ScoreBreakdown, v: VertexId, query: &[AttrId]) -> i128 {
    covered(g, v, query)
        .map(|i| 2 * b.counts[i] as i128 - 1)
        .sum()
}

pub fn score_contribution(h: &Subgraph<'_>, v: VertexId, query: &[AttrId]) -> Result<i128> {
    if !h.contains(v) {
        return Err(Error::VertexOutOfRange(v));
    }
    let query = normalize_attrs(query);
    let b = ScoreBreakdown::from_vertices(h.graph(), h.vertices(), &query);
    Ok(contribution(h.graph(), &b, v, &query))
}

/// `P_H(v) = {v} ∪ {u ∈ N_H(v) : deg_H(u) = k − 1}`.
pub fn peel_set(h: &Subgraph<'_>, v: VertexId, k: u32) -> Vec<VertexId> {
    let mut p = vec![v];
    let target = k.saturating_sub(1) as usize;
    p.extend(
        h.neighbors(v)
            .map(|(u, _)| u)
            .filter(|&u| h.degree(u) == target),
    );
    p
}

/// `f(H) − f(H − P_H(v))` computed from the breakdown of `H`; `f(∅) = 0`.
pub(crate) fn gain_with(
    h: &Subgraph<'_>,
    b: &ScoreBreakdown,
    v: VertexId,
    query: &[AttrId],
    k: u32,
) -> Rational {
    let g = h.graph();
    let mut after = b.clone();
    for u in peel_set(h, v, k) {
        after.remove(g, u, query);
    }
    b.score() - after.score()
}

pub fn local_marginal_gain(
    h: &Subgraph<'_>,
    v: VertexId,
    query: &[AttrId],
    k: u32,
) -> Result<Rational> {
    if !h.contains(v) {
        return Err(Error::VertexOutOfRange(v));
    }
    if peel_set(h, v, k).len() >= h.num_vertices() {
        return Err(Error::EmptyVertexSet);
    }
    let query = normalize_attrs(query);
    let b = ScoreBreakdown::from_vertices(h.graph(), h.vertices(), &query);
    Ok(gain_with(h, &b, v, &query, k))
}

/// Integer form of the majority test: `2 |V(H)| Σ_{w ∈ W_q ∩ X} c_w ≥ Σ_w c_w²`.
pub(crate) fn majority_with(b: &ScoreBreakdown, positions: impl Iterator<Item = usize>) -> bool {
    let covered: i128 = positions.map(|i| b.counts[i] as i128).sum();
    2 * b.size as i128 * covered >= b.sum_squares()
}

/// Whether `θ(H, W_q ∩ X) ≥ f(H, W_q) / (2 |V(H)|)`.
pub fn is_majority(h: &Subgraph<'_>, x: &[AttrId], query: &[AttrId]) -> bool {
    let query = normalize_attrs(query);
    let b = ScoreBreakdown::from_vertices(h.graph(), h.vertices(), &query);
    let positions = query
        .iter()
        .enumerate()
        .filter(|(_, w)| x.contains(w))
        .map(|(i, _)| i);
    majority_with(&b, positions)
}

/// Decimal rendering with six fractional digits, rounding half away from zero.
pub fn format_score(r: &Rational) -> String {
    let scale: i128 = 1_000_000;
    let neg = r.is_negative();
    let r = r.abs();
    let scaled = r * Rational::from_integer(scale);
    let mut units = scaled.to_integer();
    if (scaled - Rational::from_integer(units)) * Rational::from_integer(2)
        >= Rational::from_integer(1)
    {
        units += 1;
    }
    format!(
        "{}{}.{:06}",
        if neg && units != 0 { "-" } else { "" },
        units / scale,
        units % scale
    )
}

/// Parses a non-negative decimal literal such as `0.03` exactly.
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (int, frac) = match s.split_once('.') {
        Some((a, b)) => (a, b),
        None => (s, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    if frac.len() > 18 {
        return None;
    }
    let int: i128 = if int.is_empty() { 0 } else { int.parse().ok()? };
    let den = 10i128.pow(frac.len() as u32);
    let num: i128 = if frac.is_empty() {
        0
    } else {
        frac.parse().ok()?
    };
    Some(Rational::from_integer(int) + Rational::new(num, den))
}
