use std::collections::{BTreeSet, VecDeque};

use fixedbitset::FixedBitSet;
use serde::Serialize;

use super::ContractionGraph;

/// `gamma(t) = epsilon * log2(t) + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightFunction {
    pub epsilon: f64,
}

impl Default for WeightFunction {
    fn default() -> Self {
        Self { epsilon: 0.2 }
    }
}

impl WeightFunction {
    pub fn new(epsilon: f64) -> Self {
        Self { epsilon }
    }

    pub fn gamma(&self, t: usize) -> f64 {
        self.epsilon * (t.max(1) as f64).log2() + 1.0
    }
}

/// Unrooted tree over bags of class indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TreeDecomposition {
    /// Sorted class indices of every bag.
    pub bags: Vec<Vec<usize>>,
    pub edges: Vec<(usize, usize)>,
}

impl TreeDecomposition {
    /// All `n` classes in one bag.
    pub fn single_bag(n: usize) -> Self {
        Self { bags: vec![(0..n).collect()], edges: vec![] }
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bags.is_empty()
    }

    /// Plain width: largest bag size minus one.
    pub fn width(&self) -> isize {
        self.bags.iter().map(Vec::len).max().unwrap_or(0) as isize - 1
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.bags.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }
}

/// Largest bag weight `sum gamma(|P|)`.
pub fn weighted_width(bags: &[Vec<usize>], class_sizes: &[usize], gamma: &WeightFunction) -> f64 {
    bags.iter().map(|bag| bag.iter().map(|&c| gamma.gamma(class_sizes[c])).sum::<f64>()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Structural problems with the tree itself or with node tags.
    pub structure: Vec<String>,
    /// Classes contained in no bag.
    pub missing_classes: Vec<usize>,
    /// Contraction edges contained in no bag.
    pub uncovered_edges: Vec<(usize, usize)>,
    /// Classes whose bags do not form a connected subtree.
    pub disconnected_classes: Vec<usize>,
    pub valid: bool,
}

impl ValidationReport {
    fn finish(mut self) -> Self {
        self.valid = self.structure.is_empty()
            && self.missing_classes.is_empty()
            && self.uncovered_edges.is_empty()
            && self.disconnected_classes.is_empty();
        self
    }

    pub fn describe(&self) -> String {
        let mut parts = self.structure.clone();
        if !self.missing_classes.is_empty() {
            parts.push(format!("classes in no bag: {:?}", self.missing_classes));
        }
        for (a, b) in &self.uncovered_edges {
            parts.push(format!("edge ({a}, {b}) is in no bag"));
        }
        if !self.disconnected_classes.is_empty() {
            parts.push(format!("classes with disconnected bags: {:?}", self.disconnected_classes));
        }
        parts.join("; ")
    }
}

/// Checks that the bags form a tree, every class and every contraction edge
/// lies in some bag, and the bags of every class are connected.
pub fn validate(td: &TreeDecomposition, cg: &ContractionGraph) -> ValidationReport {
    check_axioms(&td.bags, &td.edges, cg, ValidationReport::default()).finish()
}

pub(crate) fn check_axioms(
    bags: &[Vec<usize>],
    edges: &[(usize, usize)],
    cg: &ContractionGraph,
    mut report: ValidationReport,
) -> ValidationReport {
    let m = bags.len();
    let n = cg.len();
    if m == 0 {
        report.structure.push("decomposition has no nodes".into());
        return report;
    }
    let mut adj = vec![Vec::new(); m];
    for &(a, b) in edges {
        if a >= m || b >= m || a == b {
            report.structure.push(format!("bad tree edge ({a}, {b})"));
            return report;
        }
        adj[a].push(b);
        adj[b].push(a);
    }
    if edges.len() != m - 1 || reach(&adj, 0, |_| true).count_ones(..) != m {
        report.structure.push("nodes do not form a tree".into());
        return report;
    }
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut member = vec![FixedBitSet::with_capacity(n); m];
    for (t, bag) in bags.iter().enumerate() {
        for &c in bag {
            if c >= n {
                report.structure.push(format!("bag {t} names unknown class {c}"));
                return report;
            }
            holders[c].push(t);
            member[t].insert(c);
        }
    }
    report.missing_classes = (0..n).filter(|&c| holders[c].is_empty()).collect();
    for (a, b) in cg.graph.edges() {
        if !holders[a].iter().any(|&t| member[t].contains(b)) {
            report.uncovered_edges.push((a, b));
        }
    }
    for (c, held) in holders.iter().enumerate() {
        if let Some(&start) = held.first() {
            let seen = reach(&adj, start, |t| member[t].contains(c));
            if seen.count_ones(..) != held.len() {
                report.disconnected_classes.push(c);
            }
        }
    }
    report
}

fn reach(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize) -> bool) -> FixedBitSet {
    let mut seen = FixedBitSet::with_capacity(adj.len());
    let mut queue = VecDeque::from([start]);
    seen.insert(start);
    while let Some(t) = queue.pop_front() {
        for &u in &adj[t] {
            if !seen.contains(u) && allowed(u) {
                seen.insert(u);
                queue.push_back(u);
            }
        }
    }
    seen
}

const BASE_CASE: usize = 4;

struct SeparatorBuilder<'a> {
    cg: &'a ContractionGraph,
    weights: Vec<f64>,
    cells: &'a [(i64, i64)],
    bags: Vec<Vec<usize>>,
    edges: Vec<(usize, usize)>,
}

impl SeparatorBuilder<'_> {
    fn attach(&mut self, bag: BTreeSet<usize>, parent: Option<usize>) -> usize {
        let id = self.bags.len();
        self.bags.push(bag.into_iter().collect());
        if let Some(p) = parent {
            self.edges.push((p, id));
        }
        id
    }

    fn touches(&self, c: usize, set: &FixedBitSet) -> bool {
        self.cg.graph.neighbors(c).ones().any(|u| set.contains(u))
    }

    fn build(&mut self, x: Vec<usize>, interface: Vec<usize>, parent: Option<usize>) {
        let coord = |c: usize, axis: usize| if axis == 0 { self.cells[c].0 } else { self.cells[c].1 };
        let spread = |axis: usize| {
            let lo = x.iter().map(|&c| coord(c, axis)).min().unwrap_or(0);
            let hi = x.iter().map(|&c| coord(c, axis)).max().unwrap_or(0);
            (lo, hi)
        };
        let (sx, sy) = (spread(0), spread(1));
        let axis = if sx.1 - sx.0 >= sy.1 - sy.0 { 0 } else { 1 };
        let (lo, hi) = if axis == 0 { sx } else { sy };
        if x.len() <= BASE_CASE || hi - lo < 3 {
            let bag = interface.iter().chain(&x).copied().collect();
            self.attach(bag, parent);
            return;
        }

        let mut sorted = x.clone();
        sorted.sort_by_key(|&c| (coord(c, axis), c));
        let total: f64 = x.iter().map(|&c| self.weights[c]).sum();
        let mut acc = 0.0;
        let mut median = hi;
        for &c in &sorted {
            acc += self.weights[c];
            if 2.0 * acc >= total {
                median = coord(c, axis);
                break;
            }
        }
        let cut = median.clamp(lo + 1, hi - 2);

        let n = self.cg.len();
        let mut left = FixedBitSet::with_capacity(n);
        let mut right = FixedBitSet::with_capacity(n);
        let mut slab = Vec::new();
        for &c in &x {
            match coord(c, axis) {
                v if v < cut => left.insert(c),
                v if v > cut + 1 => right.insert(c),
                _ => slab.push(c),
            }
        }
        // keep only slab cells adjacent to both sides
        let mut sep = Vec::new();
        for c in slab {
            if !self.touches(c, &right) {
                left.insert(c);
            } else {
                sep.push(c);
            }
        }
        let mut kept = Vec::new();
        for c in sep {
            if !self.touches(c, &left) {
                right.insert(c);
            } else {
                kept.push(c);
            }
        }

        let bag: BTreeSet<usize> = interface.iter().chain(&kept).copied().collect();
        let node = self.attach(bag.clone(), parent);
        for part in [left, right] {
            if part.is_clear() {
                continue;
            }
            let child_interface: Vec<usize> = bag.iter().copied().filter(|&c| self.touches(c, &part)).collect();
            self.build(part.ones().collect(), child_interface, Some(node));
        }
    }
}

/// Recursive balanced slab separators over the cell grid.
pub fn separator_decomposition(
    cg: &ContractionGraph,
    gamma: &WeightFunction,
    cells: &[(i64, i64)],
) -> TreeDecomposition {
    let mut b = SeparatorBuilder {
        cg,
        weights: cg.class_sizes.iter().map(|&s| gamma.gamma(s)).collect(),
        cells,
        bags: Vec::new(),
        edges: Vec::new(),
    };
    b.build((0..cg.len()).collect(), Vec::new(), None);
    TreeDecomposition { bags: b.bags, edges: b.edges }
}

/// Greedy elimination by minimum fill-in (ties: smaller degree, then lower
/// index).
pub fn min_fill_decomposition(cg: &ContractionGraph) -> TreeDecomposition {
    let n = cg.len();
    if n == 0 {
        return TreeDecomposition { bags: vec![vec![]], edges: vec![] };
    }
    let mut adj: Vec<FixedBitSet> = (0..n).map(|v| cg.graph.neighbors(v).clone()).collect();
    let fill = |adj: &[FixedBitSet], v: usize| -> usize {
        let mut missing = 0;
        for u in adj[v].ones() {
            let mut rest = adj[v].clone();
            rest.difference_with(&adj[u]);
            rest.set(u, false);
            missing += rest.count_ones(..);
        }
        missing / 2
    };
    let mut queue: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
    let mut key = vec![(0, 0); n];
    for v in 0..n {
        key[v] = (fill(&adj, v), adj[v].count_ones(..));
        queue.insert((key[v].0, key[v].1, v));
    }
    let mut eliminated = FixedBitSet::with_capacity(n);
    let mut position = vec![0; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);
    while let Some((_, _, v)) = queue.pop_first() {
        position[v] = order.len();
        order.push(v);
        eliminated.insert(v);
        let nb: Vec<usize> = adj[v].ones().collect();
        let mut bag = nb.clone();
        bag.push(v);
        bag.sort_unstable();
        bags.push(bag);
        for &a in &nb {
            adj[a].set(v, false);
            for &b in &nb {
                if a != b {
                    adj[a].insert(b);
                }
            }
        }
        adj[v].clear();
        let mut touched = FixedBitSet::with_capacity(n);
        for &a in &nb {
            touched.insert(a);
            touched.union_with(&adj[a]);
        }
        for u in touched.ones() {
            if eliminated.contains(u) {
                continue;
            }
            queue.remove(&(key[u].0, key[u].1, u));
            key[u] = (fill(&adj, u), adj[u].count_ones(..));
            queue.insert((key[u].0, key[u].1, u));
        }
    }
    // parent of bag i: bag of the earliest-eliminated later neighbour
    let mut edges = Vec::with_capacity(n - 1);
    let mut roots = Vec::new();
    for (i, bag) in bags.iter().enumerate() {
        let v = order[i];
        match bag.iter().filter(|&&u| u != v).map(|&u| position[u]).min() {
            Some(j) => edges.push((i, j)),
            None => roots.push(i),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition { bags, edges }
}

/// Builds both the separator and the min-fill decomposition and returns the
/// one of smaller weighted width, after checking it.
pub fn tree_decomposition(cg: &ContractionGraph, gamma: &WeightFunction, cells: &[(i64, i64)]) -> TreeDecomposition {
    let sep = separator_decomposition(cg, gamma, cells);
    let fill = min_fill_decomposition(cg);
    let ws = weighted_width(&sep.bags, &cg.class_sizes, gamma);
    let wf = weighted_width(&fill.bags, &cg.class_sizes, gamma);
    log::debug!("separator width {ws:.3}, min-fill width {wf:.3}");
    let td = if wf < ws { fill } else { sep };
    let report = validate(&td, cg);
    assert!(report.valid, "internal error: invalid tree decomposition: {}", report.describe());
    td
}
