use crate::graph::NodeId;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("graph has no edges")]
    NoEdges,

    #[error("node id {0} is out of range")]
    InvalidNode(NodeId),

    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("edge ({0}, {1}) already exists")]
    EdgeExists(NodeId, NodeId),

    #[error("edge ({0}, {1}) does not exist")]
    EdgeMissing(NodeId, NodeId),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("unknown method `{0}`")]
    UnknownMethod(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
