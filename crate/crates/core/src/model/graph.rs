use std::cmp::Ordering;

use fixedbitset::FixedBitSet;

use serde::{Deserialize, Serialize};

use crate::geometry::sq_dist_unchecked;

use super::{Instance, ModelError};

/// File form of a graph: `{"n": 3, "edges": [[0, 1], [1, 2]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

/// Simple undirected graph on `0..n` with bitset adjacency rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
}

/// Threshold graph of an instance: `i ~ j` iff `|p_i - p_j| <= D`.
pub type UnitBallGraph = Graph;

impl Graph {
    pub fn empty(n: usize) -> Self {
        Self { adj: vec![FixedBitSet::with_capacity(n); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::empty(n);
        for &(a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    /// Adds `a ~ b`; self-loops are ignored.
    pub fn add_edge(&mut self, a: usize, b: usize) {
        if a != b {
            self.adj[a].insert(b);
            self.adj[b].insert(a);
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: GraphFile = serde_json::from_str(text).map_err(|e| ModelError::Malformed(e.to_string()))?;
        for &(a, b) in &file.edges {
            for index in [a, b] {
                if index >= file.n {
                    return Err(ModelError::IndexOutOfRange { index, n: file.n });
                }
            }
            if a == b {
                return Err(ModelError::Malformed(format!("self-loop at vertex {a}")));
            }
        }
        Ok(Self::from_edges(file.n, &file.edges))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&GraphFile { n: self.n(), edges: self.edges() }).expect("graph serializes")
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn adjacent(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains(b)
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|r| r.count_ones(..)).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (a, row) in self.adj.iter().enumerate() {
            out.extend(row.ones().filter(|&b| b > a).map(|b| (a, b)));
        }
        out
    }

    pub fn complement(&self) -> Self {
        let n = self.n();
        let mut g = Self::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if !self.adjacent(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &a)| vertices[i + 1..].iter().all(|&b| a == b || self.adjacent(a, b)))
    }

    /// Induced subgraph on `vertices`, relabelled to `0..vertices.len()`.
    pub fn induced(&self, vertices: &[usize]) -> Self {
        let mut g = Self::empty(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.adjacent(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let v = comp[i];
                i += 1;
                for w in self.adj[v].ones() {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }
}

/// Builds the closed-threshold graph. Points are swept in order of their
/// first coordinate so only pairs within `D` along that axis are compared.
pub fn build_graph(inst: &Instance) -> UnitBallGraph {
    let n = inst.len();
    let mut g = Graph::empty(n);
    let d2 = &inst.diameter * &inst.diameter;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| inst.points[a].coords()[0].cmp(&inst.points[b].coords()[0]).then(a.cmp(&b)));
    for (pos, &i) in order.iter().enumerate() {
        let pi = &inst.points[i];
        for &j in &order[pos + 1..] {
            let pj = &inst.points[j];
            let dx = &pj.coords()[0] - &pi.coords()[0];
            if dx > inst.diameter {
                break;
            }
            if sq_dist_unchecked(pi, pj).cmp(&d2) != Ordering::Greater {
                g.add_edge(i, j);
            }
        }
    }
    g
}
