use thiserror::Error;

/// A graph transformation could not be applied.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("`{0}` is not deterministic")]
    NotDeterministic(String),
    #[error("`{0}` has no successors")]
    Barren(String),
    #[error("`{node}` still has successors: {}", .successors.join(", "))]
    HasSuccessors { node: String, successors: Vec<String> },
    #[error("no edge {parent} -> {child}")]
    MissingEdge { parent: String, child: String },
    #[error("reversing {c} -> {d} would create a cycle through {}", .path.join(" -> "))]
    AlternatePath { c: String, d: String, path: Vec<String> },
}

impl TransformError {
    /// One-line remediation hint for command-line users.
    pub fn hint(&self) -> &'static str {
        match self {
            TransformError::UnknownNode(_) => "check the node name against the network file",
            TransformError::NotDeterministic(_) => {
                "deterministic node propagation needs a `det` node; use reduce instead"
            }
            TransformError::Barren(_) => "the node has nothing to propagate; use barren removal",
            TransformError::HasSuccessors { .. } => "reduce the node instead of removing it",
            TransformError::MissingEdge { .. } => "only existing edges can be reversed",
            TransformError::AlternatePath { .. } => "reverse the arcs along the other path first",
        }
    }
}

/// A query was malformed or could not be answered.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("malformed query: {0}")]
    Malformed(String),
    #[error("network has a directed cycle")]
    Cyclic,
    #[error("`{from}` has no directed path to `{to}`")]
    NoPath { from: String, to: String },
    #[error("transformation failed: {0}")]
    Transform(#[from] TransformError),
    #[error("planner made no progress after {0} steps")]
    Stalled(usize),
}

impl QueryError {
    pub fn hint(&self) -> &'static str {
        match self {
            QueryError::UnknownNode(_) => "check the node name against the network file",
            QueryError::Malformed(_) => "query nodes must be distinct and not part of the given set",
            QueryError::Cyclic => "validate the network first",
            QueryError::NoPath { .. } => "synergy queries need both pair members to be ancestors of the child",
            QueryError::Transform(e) => e.hint(),
            QueryError::Stalled(_) => "please report this network; planning should always terminate",
        }
    }
}
