//! Grid partition into clique classes, the contraction graph over those
//! classes, and (nice) tree decompositions of it with small weighted width.

mod contraction;
mod nice;
mod partition;
mod tree;

use thiserror::Error;

pub use contraction::{contraction_graph, ContractionGraph};
pub use nice::{to_nice, validate_nice, NiceNode, NiceTreeDecomposition, NodeKind};
pub use partition::{build_kappa_partition, cell_side, KappaPartition};
pub use tree::{
    min_fill_decomposition, separator_decomposition, tree_decomposition, validate, weighted_width, TreeDecomposition,
    ValidationReport, WeightFunction,
};

#[derive(Debug, Error)]
pub enum DecompositionError {
    #[error("grid partition needs a planar instance, got dimension {0}")]
    NotPlanar(usize),
    #[error("invalid tree decomposition: {0}")]
    Invalid(String),
}
