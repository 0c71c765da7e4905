//! Instance generators for the two hardness constructions: grid-embedded
//! SAT to unit disks in the plane, and 3-colouring to unit balls in
//! dimension five.

pub mod coloring;
mod interval;
pub mod r5;
pub mod sat;

use thiserror::Error;

use crate::model::ModelError;

pub use coloring::{find_coloring, is_k_colorable};
pub use interval::{round_decimal, Interval};
pub use r5::{
    build_enhanced_graph, build_r5_instance, build_r5_instance_capped, certify_at, certify_embedding,
    choose_embedding_params, embed_r5, special_distance, Certificate, CertifyFailure, EmbeddingParams, EnhancedGraph,
    MarginSummary, R5Instance, UnshiftedReport,
};
pub use sat::{
    build_sat_instance, fixtures, is_satisfiable, normalize_formula, Cnf, GridEmbedding, NormalizedFormula,
    SatInstance, Wire,
};

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("invalid formula: {0}")]
    InvalidFormula(String),
    #[error("variable {variable} occurs {positive} times positively and {negative} times negatively; expected 2 and 1 up to sign")]
    IrreduciblePattern { variable: usize, positive: usize, negative: usize },
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("unsupported gadget orientation: {0}")]
    UnsupportedPattern(String),
    #[error("generated disk graph differs from the intended one: {0}")]
    AuditFailed(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
