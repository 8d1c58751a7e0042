//! Attributed truss community search.
//!
//! Given an attributed graph and a query of vertices plus attributes, find a
//! connected k-truss around the query vertices, within `d` hops of each of
//! them, whose members share the query attributes as much as possible.
//!
//! * [`greedy`]: global top-down peeling (`basic_search`, `bulk_search`).
//! * [`index`] and [`local`]: offline AT-index and index-backed local search.
//! * [`eval`]: synthetic data, F1 scoring and exhaustive oracles.

pub mod cli;
pub mod error;
pub mod eval;
pub mod graph;
pub mod greedy;
pub mod index;
pub mod local;
pub mod query;
pub mod score;
pub mod truss;

pub use error::{Error, Infeasible, Result};
pub use graph::{AttrId, EdgeId, Graph, Subgraph, VertexId, INF};
pub use greedy::{basic_search, bulk_search, Algorithm, CandidateTrace, SearchResult};
pub use index::{build_index, AtIndex};
pub use local::locatc_search;
pub use query::QuerySpec;
pub use score::Rational;
