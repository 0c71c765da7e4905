//! The configuration dynamic program over a nice tree decomposition of the
//! grid contraction graph, with exact oracles used to cross-check it.

mod auxiliary;
mod config;
mod dp;
mod lengths;
mod oracles;

use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::cliques::CliqueError;
use crate::decomposition::{
    build_kappa_partition, contraction_graph, to_nice, tree_decomposition, ContractionGraph, DecompositionError,
    KappaPartition, NiceTreeDecomposition, TreeDecomposition, WeightFunction,
};
use crate::model::{build_graph, CliqueCover, Graph, Instance, ModelError};

pub use auxiliary::{admissible_cover_sizes, forget_feasible, partition_cover_sizes, AuxiliaryGraph, InnerDp};
pub use config::{enumerate_configurations, enumerate_tilings, Configuration};
pub use dp::{dp_solve, DpOutcome, DpParams};
pub use lengths::LengthSet;
pub use oracles::{
    branch_and_bound_graph, branch_and_bound_min_cover, brute_force_graph, brute_force_min_cover,
    enumerate_optimal_covers, greedy_graph, greedy_upper_bound, BRUTE_FORCE_CAP, ENUMERATION_CAP,
};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("class {class} has no tiling with lambda = {lambda}, h = {halfplanes}")]
    NoConfigurations { class: usize, lambda: usize, halfplanes: usize },
    #[error("escalation cap reached at lambda = {lambda}, h = {halfplanes} without a solution")]
    EscalationCap { lambda: usize, halfplanes: usize },
    #[error("instance has {n} points, above the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("a table grew beyond {0} entries")]
    TableLimit(usize),
    #[error("auxiliary graph with {0} vertices is too large")]
    AuxiliaryTooLarge(usize),
    #[error(transparent)]
    Clique(#[from] CliqueError),
    #[error(transparent)]
    Decomposition(#[from] DecompositionError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub lambda: usize,
    pub halfplanes: usize,
    pub epsilon: f64,
    pub lambda_cap: usize,
    pub halfplane_cap: usize,
    /// Re-solve one escalation round further and stop once the answer
    /// repeats.
    pub stabilize: bool,
    pub max_table_entries: usize,
    pub record_aux: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            lambda: 12,
            halfplanes: 2,
            epsilon: 0.2,
            lambda_cap: 64,
            halfplane_cap: 5,
            stabilize: true,
            max_table_entries: 2_000_000,
            record_aux: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Round {
    pub lambda: usize,
    pub halfplanes: usize,
    /// `None` when some class had no configuration.
    pub k: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveStats {
    pub classes: usize,
    pub nice_nodes: usize,
    pub max_bag: usize,
    pub weighted_width: f64,
    pub max_configurations_per_class: usize,
    pub max_table_entries: usize,
    pub escalations: usize,
    pub stabilized: bool,
    pub rounds: Vec<Round>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveResult {
    pub k: usize,
    pub cover: CliqueCover,
    pub lambda: usize,
    pub halfplanes: usize,
    pub stats: SolveStats,
    #[serde(skip)]
    pub aux_graphs: Vec<AuxiliaryGraph>,
}

/// Graph, partition, contraction graph and decompositions of an instance.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub graph: Graph,
    pub partition: KappaPartition,
    pub contraction: ContractionGraph,
    pub tree: TreeDecomposition,
    pub nice: NiceTreeDecomposition,
    pub gamma: WeightFunction,
}

pub fn prepare(inst: &Instance, epsilon: f64) -> Result<Prepared, SolverError> {
    let graph = build_graph(inst);
    let partition = build_kappa_partition(inst)?;
    let contraction = contraction_graph(&partition, &graph);
    let gamma = WeightFunction::new(epsilon);
    let tree = tree_decomposition(&contraction, &gamma, &partition.cells);
    let nice = to_nice(&tree, &contraction)?;
    Ok(Prepared { graph, partition, contraction, tree, nice, gamma })
}

/// Solves with the dynamic program, escalating `lambda` by 4 and `h` by 1
/// per round until the answer repeats across one round.
pub fn solve(inst: &Instance, opts: &SolveOptions) -> Result<SolveResult, SolverError> {
    let start = Instant::now();
    let prep = prepare(inst, opts.epsilon)?;
    let (mut lambda, mut h) = (opts.lambda, opts.halfplanes);
    let mut rounds = Vec::new();
    let mut best: Option<(DpOutcome, usize, usize)> = None;
    let mut stabilized = false;
    loop {
        let params =
            DpParams { lambda, halfplanes: h, max_table_entries: opts.max_table_entries, record_aux: opts.record_aux };
        match dp_solve(inst, &prep.graph, &prep.partition, &prep.nice, &params) {
            Ok(out) => {
                rounds.push(Round { lambda, halfplanes: h, k: Some(out.k) });
                let repeat = best.as_ref().is_some_and(|(b, _, _)| b.k == out.k);
                best = Some((out, lambda, h));
                if repeat || !opts.stabilize {
                    stabilized = repeat;
                    break;
                }
            }
            Err(SolverError::NoConfigurations { class, .. }) => {
                log::info!("class {class} has no configuration at lambda {lambda}, h {h}; escalating");
                rounds.push(Round { lambda, halfplanes: h, k: None });
            }
            Err(e) => return Err(e),
        }
        if lambda + 4 > opts.lambda_cap || h + 1 > opts.halfplane_cap {
            if best.is_none() {
                return Err(SolverError::EscalationCap { lambda, halfplanes: h });
            }
            break;
        }
        lambda += 4;
        h += 1;
    }
    let (out, lambda, h) = best.expect("loop exits with a result");
    let stats = SolveStats {
        classes: prep.partition.len(),
        nice_nodes: prep.nice.len(),
        max_bag: prep.tree.bags.iter().map(Vec::len).max().unwrap_or(0),
        weighted_width: prep.nice.weighted_width(&prep.contraction.class_sizes, &prep.gamma),
        max_configurations_per_class: out.max_configurations,
        max_table_entries: out.max_table_entries,
        escalations: rounds.len() - 1,
        stabilized,
        rounds,
        wall_ms: Some(start.elapsed().as_secs_f64() * 1000.0),
    };
    Ok(SolveResult { k: out.k, cover: out.cover, lambda, halfplanes: h, stats, aux_graphs: out.aux_graphs })
}
