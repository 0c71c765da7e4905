//! Exact minimum clique cover (k-diameter clustering) on unit disk and unit
//! ball graphs.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: exact rational predicates (distances, orientation, hulls).
//! * [`model`]: instances, threshold graphs, covers, file formats.
//! * [`cliques`]: relevant-clique enumeration and the separation check.
//! * [`decomposition`]: grid partition, contraction graph, tree decompositions.
//! * [`solver`]: the configuration dynamic program and exact oracles.
//! * [`reductions`]: certified generators for the two hardness constructions.

pub mod cliques;
pub mod decomposition;
pub mod geometry;
pub mod model;
pub mod reductions;
pub mod solver;
