use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("segment graph contains a cycle through node {0}")]
    Cycle(usize),
    #[error("node {0} does not lie on any start-to-end path")]
    Unreachable(usize),
    #[error("segment graph has no start or no end node")]
    NoBoundary,
    #[error("node {node} out of range (instance has {n} nodes)")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("label {label} out of range (instance has {l} labels)")]
    LabelOutOfRange { label: usize, l: usize },
    #[error("unknown pair ({0},{1}): the nodes share no segment")]
    UnknownPair(usize, usize),
    #[error("label {label} was never in the domain of node {node}")]
    UnknownLabel { node: usize, label: usize },
    #[error("{line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("grammar: {0}")]
    Grammar(String),
    #[error("not mergeable: node {name}: {reason}")]
    Merge { name: String, reason: String },
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
}

impl Error {
    pub fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            col,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
