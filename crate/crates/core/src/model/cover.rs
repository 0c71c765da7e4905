use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::geometry::cmp_dist;

use super::{Instance, ModelError};

/// Ordered list of disjoint cliques.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CliqueCover {
    pub cliques: Vec<Vec<usize>>,
}

impl CliqueCover {
    pub fn new(cliques: Vec<Vec<usize>>) -> Self {
        Self { cliques }
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cliques.is_empty()
    }

    /// Sorts every clique and the clique list; two covers equal up to
    /// ordering become identical.
    pub fn canonical(mut self) -> Self {
        for c in &mut self.cliques {
            c.sort_unstable();
        }
        self.cliques.sort();
        self
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n  \"cliques\": [");
        for (i, c) in self.cliques.iter().enumerate() {
            out.push_str(if i == 0 { "\n    " } else { ",\n    " });
            let items: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("[{}]", items.join(", ")));
        }
        out.push_str(if self.cliques.is_empty() { "]\n}\n" } else { "\n  ]\n}\n" });
        out
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct CoverReport {
    /// Vertices listed more than once.
    pub repeated: Vec<usize>,
    /// Indices of empty classes.
    pub empty_classes: Vec<usize>,
    /// First pair at distance greater than `D`, per offending class.
    pub violating_pairs: Vec<(usize, usize)>,
    /// Vertices in no class (only reported for full checks).
    pub uncovered: Vec<usize>,
    pub accepted: bool,
}

/// Checks disjointness and clique-ness of every class from the raw
/// distances, and with `full` also that every vertex is covered.
pub fn verify_cover(inst: &Instance, cover: &CliqueCover, full: bool) -> Result<CoverReport, ModelError> {
    let n = inst.len();
    let mut seen = vec![false; n];
    let mut report = CoverReport::default();
    for (ci, clique) in cover.cliques.iter().enumerate() {
        if clique.is_empty() {
            report.empty_classes.push(ci);
        }
        for &v in clique {
            if v >= n {
                return Err(ModelError::IndexOutOfRange { index: v, n });
            }
            if seen[v] {
                report.repeated.push(v);
            }
            seen[v] = true;
        }
        'pairs: for (i, &a) in clique.iter().enumerate() {
            for &b in &clique[i + 1..] {
                if cmp_dist(&inst.points[a], &inst.points[b], &inst.diameter)? == Ordering::Greater {
                    report.violating_pairs.push((a.min(b), a.max(b)));
                    break 'pairs;
                }
            }
        }
    }
    if full {
        report.uncovered = (0..n).filter(|&v| !seen[v]).collect();
    }
    report.repeated.sort_unstable();
    report.repeated.dedup();
    report.accepted = report.repeated.is_empty()
        && report.empty_classes.is_empty()
        && report.violating_pairs.is_empty()
        && report.uncovered.is_empty();
    Ok(report)
}
