use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Why a (k,d)-truss could not be formed around the query nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Infeasible {
    /// A query node lost all of its edges or exceeded the distance bound.
    QueryNodePruned,
    /// The query nodes survive but lie in different components.
    QueryNodesDisconnected,
}

impl std::fmt::Display for Infeasible {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Infeasible::QueryNodePruned => f.write_str("query node pruned"),
            Infeasible::QueryNodesDisconnected => f.write_str("query nodes disconnected"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("unknown vertex id {0}")]
    UnknownVertex(u64),
    #[error("vertex index {0} out of range")]
    VertexOutOfRange(u32),
    #[error("unknown attribute {0:?}")]
    UnknownAttribute(String),
    #[error("edge ({0}, {1}) not in graph")]
    UnknownEdge(u32, u32),
    #[error("empty vertex set")]
    EmptyVertexSet,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("no feasible community: {0}")]
    NoCommunity(Infeasible),
    #[error("index file corrupt: {0}")]
    CorruptIndex(String),
    #[error("index format version {found} not supported (expected {expected})")]
    IndexVersion { found: u32, expected: u32 },
    #[error("checksum mismatch in section {0}")]
    IndexChecksum(String),
    #[error("candidate index {index} out of range (trace has {len})")]
    TraceIndex { index: usize, len: usize },
    #[error("brute force limited to {cap} vertices, got {n}")]
    OracleCap { cap: usize, n: usize },
    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
