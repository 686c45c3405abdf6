use crate::graph::NodeId;

/// Errors produced by graph construction, simulation, and model fitting.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range for network of {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),
    #[error("temporal network must contain at least one snapshot")]
    EmptyNetwork,
    #[error("snapshot node counts differ: {0} vs {1}")]
    NodeCountMismatch(usize, usize),
    #[error("event log is empty")]
    EmptyEventLog,
    #[error("aggregation needs at least 2 bins, got {0}")]
    TooFewBins(usize),
    #[error("{requested} bins exceed {distinct} distinct timestamps")]
    TooManyBins { requested: usize, distinct: usize },
    #[error("density is undefined for fewer than 2 nodes")]
    TooFewNodes,
    #[error("snapshot index {index} out of range for {len} snapshots")]
    SnapshotOutOfRange { index: usize, len: usize },
    #[error("seed set is empty")]
    EmptySeedSet,
    #[error("duplicate seed node {0}")]
    DuplicateSeed(NodeId),
    #[error("cannot select {k} seeds from {n} nodes")]
    SeedCountExceedsNodes { k: usize, n: usize },
    #[error("instance too large for exact enumeration: {0}")]
    InstanceTooLarge(String),
    #[error("invalid snapshot range [{start}, {end}]")]
    InvalidRange { start: usize, end: usize },
    #[error("alpha grid is empty")]
    EmptyAlphaGrid,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
