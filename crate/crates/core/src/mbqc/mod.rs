//! Graph-state machinery: exact Pauli projections on graph states, the
//! brickwork reduction of decorated lattices, the two-qubit gate set realized
//! by unit cells, and the embedding of circuits into Problem-2 instances.

pub mod brickwork;
pub mod clifford;
pub mod embed;
pub mod gate_set;
pub mod graph;
pub mod patterns;

use thiserror::Error;

pub use brickwork::{build_brickwork, decorated_graph, BrickworkReduction, DecoratedLayout};
pub use clifford::{Clifford, ExactScalar, PauliBra};
pub use embed::{embed_circuit, EmbedReport, TargetCircuit, TargetGate};
pub use gate_set::{gate_set, verify_identities, IdentityReport};
pub use graph::{certify_projections, GraphError, GraphState, ProjectionCertificate};
pub use patterns::{search_patterns, CellPattern, CellTarget, PatternError, PatternTable};

#[derive(Debug, Error)]
pub enum MbqcError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("incompatible dimensions: {0}")]
    Dimensions(String),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error(transparent)]
    Compile(#[from] crate::compile_unitary::CompileError),
    #[error(transparent)]
    Oracle(#[from] crate::oracle::OracleError),
    #[error(transparent)]
    Sim(#[from] crate::simulator::SimError),
}
