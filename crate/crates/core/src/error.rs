use alloc::string::String;

/// Errors raised by the detection library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {node_count} nodes")]
    NodeOutOfRange { node: usize, node_count: usize },
    #[error("edge ({u}, {v}) has invalid weight {weight}; weights must be finite and > 0")]
    InvalidWeight { u: usize, v: usize, weight: f64 },
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    /// A scale or threshold outside the criterion's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),
    /// Invalid argument list (empty or mis-ordered scales, bad ratios).
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("optimiser exceeded {cap} phase passes; quality deltas are inconsistent")]
    PassCapExceeded { cap: usize },
    #[error("benchmark specification is infeasible: {0}")]
    Infeasible(String),
}

pub type Result<T> = core::result::Result<T, Error>;
