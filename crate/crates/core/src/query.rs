//! Query parameters shared by every search algorithm.

use crate::error::{Error, Result};
use crate::graph::{AttrId, Graph, VertexId};
use crate::score::{normalize_attrs, Rational};

pub const DEFAULT_K: u32 = 4;
pub const DEFAULT_D: u32 = 4;
pub const DEFAULT_ETA: usize = 1000;

/// `ε = 0.03`
pub fn default_epsilon() -> Rational {
    Rational::new(3, 100)
}

/// `γ = 0.2`
pub fn default_gamma() -> Rational {
    Rational::new(1, 5)
}

/// `Q = (V_q, W_q)` plus the structural and algorithm parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySpec {
    pub nodes: Vec<VertexId>,
    /// May be empty; local search auto-completes it from the query nodes.
    pub attrs: Vec<AttrId>,
    pub k: u32,
    pub d: u32,
    pub epsilon: Rational,
    pub gamma: Rational,
    pub eta: usize,
    /// Derive `k` and `d` from the candidate graph instead of using the fields.
    pub auto_kd: bool,
}

impl QuerySpec {
    pub fn new(nodes: &[VertexId], attrs: &[AttrId]) -> Self {
        let mut nodes = nodes.to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        QuerySpec {
            nodes,
            attrs: normalize_attrs(attrs),
            k: DEFAULT_K,
            d: DEFAULT_D,
            epsilon: default_epsilon(),
            gamma: default_gamma(),
            eta: DEFAULT_ETA,
            auto_kd: false,
        }
    }

    pub fn with_kd(mut self, k: u32, d: u32) -> Self {
        self.k = k;
        self.d = d;
        self
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidQuery("no query nodes".into()));
        }
        for &v in &self.nodes {
            g.check_vertex(v)?;
        }
        if let Some(&w) = self.attrs.iter().find(|&&w| w as usize >= g.num_attrs()) {
            return Err(Error::UnknownAttribute(w.to_string()));
        }
        if self.k < 2 {
            return Err(Error::InvalidQuery(format!(
                "k must be at least 2, got {}",
                self.k
            )));
        }
        if self.epsilon <= Rational::from_integer(0) {
            return Err(Error::InvalidQuery("epsilon must be positive".into()));
        }
        if self.gamma < Rational::from_integer(0) {
            return Err(Error::InvalidQuery("gamma must be non-negative".into()));
        }
        if self.eta == 0 {
            return Err(Error::InvalidQuery("eta must be at least 1".into()));
        }
        Ok(())
    }
}
