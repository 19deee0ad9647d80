use thiserror::Error;

/// Errors raised by graph, model, and oracle operations.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edge {0}-{1} must be listed with the smaller endpoint first")]
    UnorderedEdge(usize, usize),
    #[error("cluster cap must be at least 1")]
    ZeroClusterCap,
    #[error("vertex set is not {c}-clustered: component of size {size}")]
    NotClustered { c: usize, size: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("model and graph disagree: {0}")]
    ModelMismatch(String),
    #[error("invalid 2-tree: {0}")]
    InvalidTwoTree(String),
    #[error("graph has treewidth greater than 2 (stalled on {} vertices)", .0.len())]
    NotTreewidthTwo(Vec<usize>),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("size cap exceeded: {0}")]
    CapExceeded(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
