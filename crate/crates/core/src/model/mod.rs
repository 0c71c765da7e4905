//! Instances, graphs, covers and their file formats.

mod cover;
mod graph;
mod instance;
mod random;
mod rational;

pub use cover::{verify_cover, CliqueCover, CoverReport};
pub use graph::{build_graph, Graph, UnitBallGraph};
pub use instance::{Instance, InstanceFile};
pub use random::{box_side_for_degree, gen_random};
pub use rational::{format_rational, parse_rational};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("malformed document: {0}")]
    Malformed(String),
    #[error("point {index} has dimension {found}, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("not a rational number: {0:?}")]
    NonNumeric(String),
    #[error("diameter must be positive")]
    InvalidDiameter,
    #[error("dimension must be at least 1")]
    InvalidDimension,
    #[error("vertex index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
