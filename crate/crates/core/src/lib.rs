//! Qualitative probabilistic networks with deterministic nodes: sign
//! algebra, graph transformations, influence and synergy queries, and a
//! brute-force numeric oracle for checking answers.

pub mod error;
pub mod network;
pub mod oracle;
pub mod query;
pub mod separation;
pub mod sign;
pub mod synergy;
pub mod transforms;

pub use error::{QueryError, TransformError};
pub use network::{load_network, serialize, to_dot, validate, Edge, NodeKind, Qpn, QpnBuilder};
pub use query::{explain, plan, qualitative_influence, InfluenceQuery, QueryResult};
pub use separation::{d_separated, functional_closure, D_separated, SeparationQuery};
pub use sign::Sign;
pub use synergy::{
    explain_synergy, qualitative_synergy, reduce_with_synergy, synergy_query, SynergyQuery, SynergyResult,
};
pub use transforms::{
    propagate_deterministic, reduce_node, remove_barren, reverse_arc, Case, Trace, TraceStep, TransformOp,
};
